#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fluxro {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "invalid-argument"; }
};

class InvalidDimension : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
  const char* category() const noexcept override { return "invalid-dimension"; }
};

class DomainError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
  const char* category() const noexcept override { return "domain"; }
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "numerical-failure"; }
};

/// Dressed-state assignment too poor to define the requested quantity.
class ResonanceRegion : public NumericalFailure {
 public:
  ResonanceRegion(const std::string& what, double quality)
      : NumericalFailure(what), quality_(quality) {}
  const char* category() const noexcept override { return "resonance-region"; }
  double quality() const noexcept { return quality_; }

 private:
  double quality_;
};

class BracketingError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
  const char* category() const noexcept override { return "bracketing"; }
};

/// Configuration problem. `kind` is one of missing-file, malformed, unknown-key,
/// invalid-type, invalid-value; `key` and `line` locate it when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& kind, const std::string& what, std::string key = {}, int line = 0)
      : Error(what), category_("config-" + kind), key_(std::move(key)), line_(line) {}
  const char* category() const noexcept override { return category_.c_str(); }
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string category_;
  std::string key_;
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "io"; }
};

}  // namespace fluxro
