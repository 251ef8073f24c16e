#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fluxro::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// In-memory CSV with a fixed header; rows are appended cell by cell.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& cell(double x);
  CsvTable& cell(long long x);
  CsvTable& cell(unsigned long long x);
  CsvTable& cell(std::size_t x) { return cell(static_cast<unsigned long long>(x)); }
  CsvTable& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvTable& cell(std::string_view s);
  CsvTable& cell(const char* s) { return cell(std::string_view(s)); }
  void end_row();

  std::string header_line() const;
  const std::string& text() const { return text_; }
  std::size_t rows() const { return rows_; }

 private:
  void separator();

  std::vector<std::string> header_;
  std::string text_;
  std::size_t column_ = 0;
  std::size_t rows_ = 0;
};

}  // namespace fluxro::io
