#pragma once

#include <stdexcept>
#include <string>

namespace admsim {

/// Base of every error thrown by the library. The category drives the CLI
/// exit code.
class Error : public std::runtime_error {
public:
  enum class Category { validation, io, numerical };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

private:
  Category category_;
};

/// Input data violates a documented invariant (NaN samples, unsorted trains,
/// out-of-range fields, malformed rows).
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what)
      : Error(Category::validation, what) {}
};

/// Parameters that can never produce a valid run (sampling rate below the
/// front-end Nyquist limit, zero-RMS threshold reference, unknown keys).
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what)
      : Error(Category::validation, what) {}
};

/// Binary/text layout violations while decoding a file or byte buffer.
class FormatError : public Error {
public:
  explicit FormatError(const std::string& what)
      : Error(Category::validation, what) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(Category::io, what) {}
};

/// Arguments outside a function's mathematical domain (zero variance,
/// non-positive noise sigma, zero duration).
class DomainError : public Error {
public:
  explicit DomainError(const std::string& what)
      : Error(Category::numerical, what) {}
};

class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& what)
      : Error(Category::numerical, what) {}
};

} // namespace admsim
