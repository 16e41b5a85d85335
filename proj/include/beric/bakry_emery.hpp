#pragma once

// m-Bakry-Emery Ricci tensors, weighted scalar curvature, quasi-Einstein
// residuals and the projectively equivalent connections that realise
// Ric_f^{1-n}.

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beric/chart.hpp"
#include "beric/error.hpp"
#include "beric/geometry.hpp"

namespace beric {

/// The parameter m: a nonzero real or infinity. With m = infinity the
/// df (x) df term is absent, not merely small.
class be_param {
 public:
  explicit be_param(double m) : m_(m) {
    if (m == 0.0 || std::isnan(m)) throw error("Bakry-Emery parameter m must be nonzero");
    if (std::isinf(m)) m_.reset();
  }
  static be_param infinity() { return be_param(); }

  bool is_infinite() const { return !m_.has_value(); }
  double value() const { return m_ ? *m_ : INFINITY; }
  /// 1/m, exactly zero for m = infinity.
  double reciprocal() const { return m_ ? 1.0 / *m_ : 0.0; }

  std::string to_string() const {
    if (!m_) return "inf";
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, *m_);
    return std::string(buf, r.ptr);
  }

  /// Accepts a real literal or "inf"/"infinity".
  static be_param parse(std::string_view s) {
    if (s == "inf" || s == "infinity" || s == "+inf") return infinity();
    double v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
      throw config_error("invalid value for m: '" + std::string(s) + "'");
    return be_param(v);
  }

 private:
  be_param() = default;
  std::optional<double> m_;
};

/// Ric + Hess f - (1/m) df (x) df
inline Eigen::MatrixXd be_ricci(const point_frame& fr, const jet& f, const be_param& m) {
  Eigen::MatrixXd r = fr.ricci() + hessian(f, fr);
  if (!m.is_infinite()) {
    Eigen::VectorXd df = differential(f);
    r -= m.reciprocal() * outer(df, df);
  }
  return r;
}

/// R_(g,f) = tr Ric_f^1 = R + lap f - |grad f|^2
inline double weighted_scalar(const point_frame& fr, const jet& f) {
  return fr.scalar_curvature() + laplacian(f, fr) - grad_norm_sq(f, fr);
}

enum class qe_kind { expanding, steady, shrinking };

inline qe_kind classify(double lambda) {
  return lambda < 0 ? qe_kind::expanding : lambda > 0 ? qe_kind::shrinking : qe_kind::steady;
}

inline std::string_view to_string(qe_kind k) {
  switch (k) {
    case qe_kind::expanding: return "expanding";
    case qe_kind::steady: return "steady";
    case qe_kind::shrinking: return "shrinking";
  }
  return {};
}

struct qe_instance {
  metric_field g;
  scalar_field f;
  be_param m;
  double lambda = 0.0;
};

struct qe_residual {
  Eigen::MatrixXd tensor;  // Ric_f^m - lambda g
  double norm = 0.0;       // max-abs entry
  qe_kind kind = qe_kind::steady;
};

inline qe_residual quasi_einstein_residual(const point_frame& fr, const jet& f, const be_param& m,
                                           double lambda) {
  qe_residual r;
  r.tensor = be_ricci(fr, f, m) - lambda * fr.g();
  r.norm = max_abs(r.tensor);
  r.kind = classify(lambda);
  return r;
}

inline qe_residual quasi_einstein_residual(const qe_instance& inst, std::span<const double> p) {
  point_frame fr = make_frame(inst.g, p, 2);
  return quasi_einstein_residual(fr, eval_jet(inst.f.value, p, 2), inst.m, inst.lambda);
}

/// Least-squares lambda for Ric_f^m = lambda g over a set of frames:
/// minimises sum |Ric_f^m - lambda g|_F^2 entrywise.
inline double best_fit_lambda(std::span<const Eigen::MatrixXd> be, std::span<const Eigen::MatrixXd> g) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < be.size(); ++i) {
    num += be[i].cwiseProduct(g[i]).sum();
    den += g[i].squaredNorm();
  }
  return den > 0 ? num / den : 0.0;
}

/// nabla^alpha_X Y = nabla_X Y - alpha(X) Y - alpha(Y) X, i.e.
/// Gamma^k_ij - alpha_i delta^k_j - alpha_j delta^k_i.
inline affine_conn projective_conn(const metric_field& g, std::span<const expr> alpha) {
  const int n = g.dim();
  if (alpha.size() != static_cast<std::size_t>(n))
    throw error("projective_conn: alpha needs one component per coordinate");
  affine_conn c(g.domain);
  c.base = g;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        expr e = constant(0);
        auto add = [&](const expr& a) { e = is_constant_zero(e) ? -a : e - a; };
        if (j == k && !is_constant_zero(alpha[static_cast<std::size_t>(i)])) add(alpha[static_cast<std::size_t>(i)]);
        if (i == k && !is_constant_zero(alpha[static_cast<std::size_t>(j)])) add(alpha[static_cast<std::size_t>(j)]);
        c.correction[static_cast<std::size_t>(k)](i, j) = e;
      }
  return c;
}

/// alpha = df / (n - 1), the 1-form for which Ric^{nabla^alpha} = Ric_f^{1-n}.
inline std::vector<expr> projective_form(const scalar_field& f) {
  const int n = f.domain.dim();
  std::vector<expr> alpha;
  for (int i = 0; i < n; ++i) {
    expr d = differentiate(f.value, i);
    alpha.push_back(is_constant_zero(d) ? d : d / constant(n - 1));
  }
  return alpha;
}

}  // namespace beric
