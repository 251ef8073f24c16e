#include "fluxro/io/csv.hpp"

#include <array>
#include <charconv>

#include "fluxro/errors.hpp"

namespace fluxro::io {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  text_ = header_line() + "\n";
}

std::string CsvTable::header_line() const {
  std::string line;
  for (std::size_t i = 0; i < header_.size(); ++i) line += (i ? "," : "") + header_[i];
  return line;
}

void CsvTable::separator() {
  if (column_ >= header_.size()) throw InvalidArgument("CSV row has more cells than the header");
  if (column_ > 0) text_ += ',';
  ++column_;
}

CsvTable& CsvTable::cell(double x) {
  separator();
  text_ += format_double(x);
  return *this;
}

CsvTable& CsvTable::cell(long long x) {
  separator();
  text_ += std::to_string(x);
  return *this;
}

CsvTable& CsvTable::cell(unsigned long long x) {
  separator();
  text_ += std::to_string(x);
  return *this;
}

CsvTable& CsvTable::cell(std::string_view s) {
  separator();
  text_ += s;
  return *this;
}

void CsvTable::end_row() {
  if (column_ != header_.size()) throw InvalidArgument("CSV row has fewer cells than the header");
  text_ += '\n';
  column_ = 0;
  ++rows_;
}

}  // namespace fluxro::io
