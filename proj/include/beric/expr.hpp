#pragma once

// Closed-form scalar expressions over chart coordinates.
//
// Grammar (whitespace insignificant):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' exponent)?
//   primary := number | ident | func '(' expr ')' | '(' expr ')'
// The exponent must be a constant: a number, a signed number, or a
// parenthesised expression free of coordinates (folded at parse time).

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beric/error.hpp"
#include "beric/jet.hpp"

namespace beric {

enum class op : std::uint8_t {
  constant,
  variable,
  neg,
  sin,
  cos,
  exp,
  ln,
  sqrt,
  sinh,
  cosh,
  tanh,
  add,
  sub,
  mul,
  div,
  pow,
};

inline constexpr bool is_unary(op o) { return o >= op::neg && o <= op::tanh; }
inline constexpr bool is_binary(op o) { return o >= op::add && o <= op::pow; }

struct expr_node;

/// Immutable expression tree. Copies share structure.
class expr {
 public:
  expr();  // the constant 0
  explicit expr(std::shared_ptr<const expr_node> n) : node_(std::move(n)) {}
  explicit expr(std::nullptr_t) {}  // empty child slot

  const expr_node& node() const { return *node_; }
  op kind() const;

  friend bool operator==(const expr& a, const expr& b);

 private:
  std::shared_ptr<const expr_node> node_;
};

struct expr_node {
  op kind = op::constant;
  double value = 0.0;  // constant value, or the exponent of pow
  int var = -1;        // coordinate index for variables
  expr lhs{nullptr}, rhs{nullptr};  // children (unary ops use lhs; pow uses lhs only)
};

inline expr::expr() {
  static const auto zero = std::make_shared<const expr_node>();
  node_ = zero;
}
inline op expr::kind() const { return node_->kind; }

inline bool operator==(const expr& a, const expr& b) {
  if (a.node_ == b.node_) return true;
  const expr_node& x = *a.node_;
  const expr_node& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case op::constant:
      return x.value == y.value;
    case op::variable:
      return x.var == y.var;
    case op::pow:
      return x.value == y.value && x.lhs == y.lhs;
    default:
      if (is_unary(x.kind)) return x.lhs == y.lhs;
      return x.lhs == y.lhs && x.rhs == y.rhs;
  }
}

// ---------------------------------------------------------------------------
// Builders. Constant nodes are kept non-negative so that printing round-trips;
// negative values become neg(constant).

namespace detail {
inline expr make(op k, double value, int var, expr lhs = {}, expr rhs = {}) {
  auto n = std::make_shared<expr_node>();
  n->kind = k;
  n->value = value;
  n->var = var;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return expr(std::move(n));
}
}  // namespace detail

inline expr constant(double v) {
  if (std::signbit(v) && v != 0.0) return detail::make(op::neg, 0, -1, constant(-v));
  return detail::make(op::constant, v == 0.0 ? 0.0 : v, -1);
}
inline expr variable(int index) { return detail::make(op::variable, 0, index); }
inline expr unary(op k, expr a) { return detail::make(k, 0, -1, std::move(a)); }
inline expr binary(op k, expr a, expr b) { return detail::make(k, 0, -1, std::move(a), std::move(b)); }
inline expr power(expr base, double exponent) {
  return detail::make(op::pow, exponent, -1, std::move(base));
}

inline expr operator+(expr a, expr b) { return binary(op::add, std::move(a), std::move(b)); }
inline expr operator-(expr a, expr b) { return binary(op::sub, std::move(a), std::move(b)); }
inline expr operator*(expr a, expr b) { return binary(op::mul, std::move(a), std::move(b)); }
inline expr operator/(expr a, expr b) { return binary(op::div, std::move(a), std::move(b)); }
inline expr operator-(expr a) { return unary(op::neg, std::move(a)); }

inline bool is_constant_zero(const expr& e) {
  return e.kind() == op::constant && e.node().value == 0.0;
}

inline std::string_view function_name(op k) {
  switch (k) {
    case op::sin: return "sin";
    case op::cos: return "cos";
    case op::exp: return "exp";
    case op::ln: return "ln";
    case op::sqrt: return "sqrt";
    case op::sinh: return "sinh";
    case op::cosh: return "cosh";
    case op::tanh: return "tanh";
    default: return {};
  }
}

/// True when the expression references no coordinate.
inline bool is_closed(const expr& e) {
  const expr_node& n = e.node();
  if (n.kind == op::variable) return false;
  if (n.kind == op::constant) return true;
  if (is_binary(n.kind) && n.kind != op::pow) return is_closed(n.lhs) && is_closed(n.rhs);
  return is_closed(n.lhs);
}

/// Rewrites variable indices through `map` (old index -> new index).
inline expr remap_variables(const expr& e, std::span<const int> map) {
  const expr_node& n = e.node();
  switch (n.kind) {
    case op::constant: return e;
    case op::variable: return variable(map[static_cast<std::size_t>(n.var)]);
    case op::pow: return power(remap_variables(n.lhs, map), n.value);
    default:
      if (is_unary(n.kind)) return unary(n.kind, remap_variables(n.lhs, map));
      return binary(n.kind, remap_variables(n.lhs, map), remap_variables(n.rhs, map));
  }
}

// ---------------------------------------------------------------------------
// Symbolic partial derivative. Zero terms are dropped; no other simplification.

inline expr differentiate(const expr& e, int var) {
  const expr_node& n = e.node();
  auto d = [var](const expr& x) { return differentiate(x, var); };
  auto chain = [](expr outer, const expr& du) {
    if (is_constant_zero(du)) return constant(0);
    if (du.kind() == op::constant && du.node().value == 1.0) return outer;
    return std::move(outer) * du;
  };
  switch (n.kind) {
    case op::constant: return constant(0);
    case op::variable: return constant(n.var == var ? 1.0 : 0.0);
    case op::neg: {
      expr du = d(n.lhs);
      return is_constant_zero(du) ? du : -du;
    }
    case op::sin: return chain(unary(op::cos, n.lhs), d(n.lhs));
    case op::cos: return chain(-unary(op::sin, n.lhs), d(n.lhs));
    case op::exp: return chain(e, d(n.lhs));
    case op::ln: return chain(constant(1) / n.lhs, d(n.lhs));
    case op::sqrt: return chain(constant(0.5) / e, d(n.lhs));
    case op::sinh: return chain(unary(op::cosh, n.lhs), d(n.lhs));
    case op::cosh: return chain(unary(op::sinh, n.lhs), d(n.lhs));
    case op::tanh: return chain(constant(1) - power(e, 2), d(n.lhs));
    case op::pow: {
      double c = n.value;
      if (c == 0.0) return constant(0);
      expr outer = c == 1.0 ? constant(1) : constant(c) * power(n.lhs, c - 1);
      return chain(outer, d(n.lhs));
    }
    case op::add:
    case op::sub: {
      expr a = d(n.lhs), b = d(n.rhs);
      if (is_constant_zero(b)) return a;
      if (is_constant_zero(a)) return n.kind == op::add ? b : -b;
      return binary(n.kind, a, b);
    }
    case op::mul: {
      expr a = d(n.lhs), b = d(n.rhs);
      bool za = is_constant_zero(a), zb = is_constant_zero(b);
      if (za && zb) return constant(0);
      if (za) return n.lhs * b;
      if (zb) return a * n.rhs;
      return a * n.rhs + n.lhs * b;
    }
    case op::div: {
      expr a = d(n.lhs), b = d(n.rhs);
      bool za = is_constant_zero(a), zb = is_constant_zero(b);
      if (za && zb) return constant(0);
      if (zb) return a / n.rhs;
      expr num = za ? -(n.lhs * b) : a * n.rhs - n.lhs * b;
      return num / power(n.rhs, 2);
    }
  }
  return constant(0);
}

// ---------------------------------------------------------------------------
// Printing: fully parenthesised, shortest round-trip literals.

namespace detail {
inline void append_number(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void print_to(std::string& out, const expr& e, std::span<const std::string> coords) {
  const expr_node& n = e.node();
  switch (n.kind) {
    case op::constant:
      append_number(out, n.value);
      return;
    case op::variable:
      out += coords[static_cast<std::size_t>(n.var)];
      return;
    case op::neg:
      out += "(-";
      print_to(out, n.lhs, coords);
      out += ')';
      return;
    case op::pow:
      out += '(';
      print_to(out, n.lhs, coords);
      out += "^(";
      append_number(out, n.value);
      out += "))";
      return;
    case op::add:
    case op::sub:
    case op::mul:
    case op::div: {
      static constexpr char sym[] = {'+', '-', '*', '/'};
      out += '(';
      print_to(out, n.lhs, coords);
      out += ' ';
      out += sym[static_cast<int>(n.kind) - static_cast<int>(op::add)];
      out += ' ';
      print_to(out, n.rhs, coords);
      out += ')';
      return;
    }
    default:
      out += function_name(n.kind);
      out += '(';
      print_to(out, n.lhs, coords);
      out += ')';
      return;
  }
}
}  // namespace detail

inline std::string print(const expr& e, std::span<const std::string> coords) {
  std::string out;
  detail::print_to(out, e, coords);
  return out;
}

// ---------------------------------------------------------------------------
// Plain evaluation.

inline double evaluate(const expr& e, std::span<const double> p) {
  const expr_node& n = e.node();
  auto fail = [&](const char* what) -> double {
    throw domain_error(what, std::vector<double>(p.begin(), p.end()));
  };
  switch (n.kind) {
    case op::constant: return n.value;
    case op::variable: return p[static_cast<std::size_t>(n.var)];
    case op::neg: return -evaluate(n.lhs, p);
    case op::sin: return std::sin(evaluate(n.lhs, p));
    case op::cos: return std::cos(evaluate(n.lhs, p));
    case op::exp: return std::exp(evaluate(n.lhs, p));
    case op::sinh: return std::sinh(evaluate(n.lhs, p));
    case op::cosh: return std::cosh(evaluate(n.lhs, p));
    case op::tanh: return std::tanh(evaluate(n.lhs, p));
    case op::ln: {
      double x = evaluate(n.lhs, p);
      return x > 0 ? std::log(x) : fail("ln of non-positive argument");
    }
    case op::sqrt: {
      double x = evaluate(n.lhs, p);
      return x >= 0 ? std::sqrt(x) : fail("sqrt of negative argument");
    }
    case op::add: return evaluate(n.lhs, p) + evaluate(n.rhs, p);
    case op::sub: return evaluate(n.lhs, p) - evaluate(n.rhs, p);
    case op::mul: return evaluate(n.lhs, p) * evaluate(n.rhs, p);
    case op::div: {
      double d = evaluate(n.rhs, p);
      return d != 0 ? evaluate(n.lhs, p) / d : fail("division by zero");
    }
    case op::pow: {
      double x = evaluate(n.lhs, p);
      double c = n.value;
      bool integral = c == std::floor(c);
      if (!integral && x < 0) fail("fractional power of negative base");
      if (c < 0 && x == 0) fail("negative power of zero");
      return std::pow(x, c);
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Jet evaluation through a flattened postfix program; slots are reused across
// points so that hot loops do not allocate.

class compiled_expr {
 public:
  compiled_expr() = default;
  explicit compiled_expr(const expr& e) { emit(e); }

  /// Evaluates value and partials up to `order` at p. The returned reference is
  /// valid until the next call.
  const jet& eval(std::span<const double> p, int order = max_jet_order) {
    const jet_layout& L = layout_for(static_cast<int>(p.size()), order);
    if (slots_.size() != code_.size()) slots_.resize(code_.size());
    for (std::size_t pc = 0; pc < code_.size(); ++pc) run(code_[pc], slots_[pc], L, p);
    return slots_.back();
  }

  std::size_t size() const { return code_.size(); }

 private:
  struct instr {
    op kind;
    double value;
    int var;
    int a, b;  // operand slot indices
  };

  int emit(const expr& e) {
    const expr_node& n = e.node();
    int a = -1, b = -1;
    if (is_unary(n.kind) || n.kind == op::pow) a = emit(n.lhs);
    else if (is_binary(n.kind)) {
      a = emit(n.lhs);
      b = emit(n.rhs);
    }
    code_.push_back({n.kind, n.value, n.var, a, b});
    return static_cast<int>(code_.size()) - 1;
  }

  void run(const instr& in, jet& out, const jet_layout& L, std::span<const double> p) {
    auto fail = [&](const char* what) {
      throw domain_error(what, std::vector<double>(p.begin(), p.end()));
    };
    auto& A = in.a >= 0 ? slots_[static_cast<std::size_t>(in.a)] : out;
    switch (in.kind) {
      case op::constant:
        out.reset(L);
        out.coeffs()[0] = in.value;
        return;
      case op::variable:
        out.reset(L);
        out.coeffs()[0] = p[static_cast<std::size_t>(in.var)];
        if (L.order >= 1) out.coeffs()[L.off1 + static_cast<std::size_t>(in.var)] = 1.0;
        return;
      case op::neg: jet_scale(A, -1.0, out); return;
      case op::add: jet_add(A, slots_[static_cast<std::size_t>(in.b)], out); return;
      case op::sub: jet_add(A, slots_[static_cast<std::size_t>(in.b)], out, -1.0); return;
      case op::mul: jet_mul(A, slots_[static_cast<std::size_t>(in.b)], out); return;
      case op::div: {
        const jet& B = slots_[static_cast<std::size_t>(in.b)];
        double x = B.value();
        if (x == 0) fail("division by zero");
        double r = 1.0 / x;
        jet_compose(B, {r, -r * r, 2 * r * r * r, -6 * r * r * r * r}, scratch_);
        jet_mul(A, scratch_, out);
        return;
      }
      default: break;
    }
    const double x = A.value();
    std::array<double, 4> phi{};
    switch (in.kind) {
      case op::sin: {
        double s = std::sin(x), c = std::cos(x);
        phi = {s, c, -s, -c};
        break;
      }
      case op::cos: {
        double s = std::sin(x), c = std::cos(x);
        phi = {c, -s, -c, s};
        break;
      }
      case op::exp: {
        double v = std::exp(x);
        phi = {v, v, v, v};
        break;
      }
      case op::sinh: {
        double s = std::sinh(x), c = std::cosh(x);
        phi = {s, c, s, c};
        break;
      }
      case op::cosh: {
        double s = std::sinh(x), c = std::cosh(x);
        phi = {c, s, c, s};
        break;
      }
      case op::tanh: {
        double t = std::tanh(x), u = 1 - t * t;
        phi = {t, u, -2 * t * u, -2 * u * u + 4 * t * t * u};
        break;
      }
      case op::ln: {
        if (x <= 0) fail("ln of non-positive argument");
        double r = 1.0 / x;
        phi = {std::log(x), r, -r * r, 2 * r * r * r};
        break;
      }
      case op::sqrt: {
        if (x <= 0) fail("sqrt derivative at non-positive argument");
        double s = std::sqrt(x);
        phi = {s, 0.5 / s, -0.25 / (s * s * s), 0.375 / (s * s * s * s * s)};
        break;
      }
      case op::pow: {
        double c = in.value;
        bool integral = c == std::floor(c);
        if (!integral && x <= 0) fail("fractional power of non-positive base");
        if (c < 0 && x == 0) fail("negative power of zero");
        double coef = 1.0;
        for (int k = 0; k < 4; ++k) {
          phi[static_cast<std::size_t>(k)] = coef == 0.0 ? 0.0 : coef * std::pow(x, c - k);
          coef *= c - k;
        }
        break;
      }
      default: break;
    }
    jet_compose(A, phi, out);
  }

  std::vector<instr> code_;
  std::vector<jet> slots_;
  jet scratch_;
};

/// Value and partials of e at p up to `order` (default 3).
inline jet eval_jet(const expr& e, std::span<const double> p, int order = max_jet_order) {
  compiled_expr c(e);
  return c.eval(p, order);
}

// ---------------------------------------------------------------------------
// Parsing.

/// Named constants visible to the parser besides the coordinates.
using constant_table = std::map<std::string, double, std::less<>>;

inline const constant_table& builtin_constants() {
  static const constant_table t{{"pi", std::numbers::pi}, {"e", std::numbers::e}};
  return t;
}

namespace detail {

class parser {
 public:
  parser(std::string_view text, std::span<const std::string> coords, const constant_table& consts)
      : s_(text), coords_(coords), consts_(consts) {}

  expr parse_all() {
    expr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) syntax("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void syntax(const std::string& what) const {
    throw parse_error(parse_error_kind::syntax, pos_, what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
                                s_[pos_] == '\r'))
      ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) syntax(std::string("expected '") + c + "'");
  }

  expr parse_expr() {
    expr lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = binary(op::add, lhs, parse_term());
      else if (accept('-')) lhs = binary(op::sub, lhs, parse_term());
      else return lhs;
    }
  }

  expr parse_term() {
    expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = binary(op::mul, lhs, parse_unary());
      else if (accept('/')) lhs = binary(op::div, lhs, parse_unary());
      else return lhs;
    }
  }

  expr parse_unary() {
    if (accept('-')) return unary(op::neg, parse_unary());
    return parse_power();
  }

  expr parse_power() {
    expr base = parse_primary();
    if (!accept('^')) return base;
    skip_ws();
    std::size_t at = pos_;
    bool negate = false;
    while (accept('-')) negate = !negate;
    expr ex = parse_primary();
    if (!is_closed(ex))
      throw parse_error(parse_error_kind::non_constant_exponent, at, "exponent must be constant");
    double c = evaluate(ex, {});
    return power(base, negate ? -c : c);
  }

  expr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) syntax("unexpected end of input");
    char ch = s_[pos_];
    if (ch == '(') {
      ++pos_;
      expr e = parse_expr();
      expect(')');
      return e;
    }
    if ((ch >= '0' && ch <= '9') || ch == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') return parse_ident();
    syntax("unexpected character '" + std::string(1, ch) + "'");
  }

  expr parse_number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_, ++n;
      return n;
    };
    std::size_t n = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) syntax("malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // "2e" is 2 followed by identifier e
    }
    double v = 0;
    auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (res.ec != std::errc{} || res.ptr != s_.data() + pos_) {
      pos_ = start;
      syntax("malformed number");
    }
    return constant(v);
  }

  expr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string_view name = s_.substr(start, pos_ - start);
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i] == name) return variable(static_cast<int>(i));
    static constexpr op funcs[] = {op::sin,  op::cos,  op::exp,  op::ln,
                                   op::sqrt, op::sinh, op::cosh, op::tanh};
    for (op f : funcs) {
      if (function_name(f) == name) {
        if (!accept('(')) syntax("expected '(' after function " + std::string(name));
        expr arg = parse_expr();
        expect(')');
        return unary(f, arg);
      }
    }
    if (auto it = consts_.find(name); it != consts_.end()) return constant(it->second);
    if (auto it = builtin_constants().find(name); it != builtin_constants().end())
      return constant(it->second);
    throw parse_error(parse_error_kind::unknown_identifier, start,
                      "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view s_;
  std::span<const std::string> coords_;
  const constant_table& consts_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text` with `coords` as the coordinate names. Identifiers resolve to
/// coordinates first, then functions, then `consts`, then pi and e.
inline expr parse(std::string_view text, std::span<const std::string> coords,
                  const constant_table& consts = {}) {
  return detail::parser(text, coords, consts).parse_all();
}

inline expr parse(std::string_view text, std::initializer_list<std::string> coords,
                  const constant_table& consts = {}) {
  std::vector<std::string> c(coords);
  return parse(text, std::span<const std::string>(c), consts);
}

}  // namespace beric
