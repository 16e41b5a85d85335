#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace beric {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class parse_error_kind { syntax, unknown_identifier, non_constant_exponent };

class parse_error : public error {
 public:
  parse_error(parse_error_kind kind, std::size_t offset, const std::string& what)
      : error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

  parse_error_kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  parse_error_kind kind_;
  std::size_t offset_;
};

namespace detail {
inline std::string format_point(const std::vector<double>& p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}
}  // namespace detail

/// Partial-function precondition violated while evaluating an expression (ln, sqrt,
/// division, fractional power).
class domain_error : public error {
 public:
  domain_error(const std::string& what, std::vector<double> point)
      : error(what + " at point " + detail::format_point(point)), point_(std::move(point)) {}

  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

/// |det g| fell below the nondegeneracy threshold, or the signature changed.
class singular_metric_error : public error {
 public:
  using error::error;
};

class config_error : public error {
 public:
  using error::error;
};

/// Operation requested on a domain it does not support (open axes for quadrature,
/// dimension too small for the reduced equations, t <= 0 for warped products).
class unsupported_domain_error : public error {
 public:
  using error::error;
};

}  // namespace beric
