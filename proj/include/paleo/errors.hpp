#ifndef PALEO_ERRORS_HPP
#define PALEO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace paleo {

// Bad configuration, bad parameter values, unusable CLI input. Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed data file; message carries the line number where known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Inputs that are individually valid but mutually inconsistent
// (mismatched record hashes, chronology length vs record). Exit code 3.
class ConsistencyError : public std::runtime_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

// Violated ordering precondition (time or depth monotonicity).
class OrderingError : public std::invalid_argument {
 public:
  explicit OrderingError(const std::string& what) : std::invalid_argument(what) {}
};

// Evaluation outside a model's validity window.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Every particle degenerate at some slice; the run cannot continue. Exit code 4.
class CollapseError : public std::runtime_error {
 public:
  CollapseError(const std::string& what, int slice)
      : std::runtime_error(what + " at slice " + std::to_string(slice)), slice_(slice) {}
  int slice() const { return slice_; }

 private:
  int slice_;
};

}  // namespace paleo

#endif
