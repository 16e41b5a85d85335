#pragma once

// Tensor calculus at a point. All public tensors are fully covariant unless the
// name says otherwise; indices are raised explicitly with g_inv.
//
// Conventions:
//   Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)
//   R^l_ijk    = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
//   Ric_jk     = R^i_ijk,   R = g^jk Ric_jk
// With these the unit 2-sphere has R = +2.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beric/chart.hpp"
#include "beric/error.hpp"
#include "beric/jet.hpp"
#include "beric/tensor.hpp"

namespace beric {

/// Geometric data of one metric at one point. Derived quantities are computed on
/// first use and cached, so a frame must not be shared between threads.
class point_frame {
 public:
  /// Builds a frame from metric component jets. Jets of order k give access to
  /// Christoffels (k >= 1), curvature (k >= 2) and curvature gradients (k >= 3).
  point_frame(const sym_matrix<jet>& gj, std::span<const double> point)
      : n_(gj.dim()), order_(gj(0, 0).order()), point_(point.begin(), point.end()) {
    const int n = n_;
    g_.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) g_(i, j) = g_(j, i) = gj(i, j).value();
    det_ = g_.determinant();
    if (!(std::abs(det_) >= nondegeneracy_threshold))
      throw singular_metric_error("metric is singular (|det g| = " + std::to_string(std::abs(det_)) +
                                  ") at point " + detail::format_point(point_));
    g_inv_ = g_.inverse();
    if (order_ >= 1) {
      dg_ = tensor3(n);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) dg_(k, i, j) = gj(i, j).d1(k);
    }
    if (order_ >= 2) {
      d2g_ = tensor4(n);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d2g_(k, l, i, j) = gj(i, j).d2(k, l);
    }
    if (order_ >= 3) {
      d3g_ = tensor5(n);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) d3g_(k, l, m, i, j) = gj(i, j).d3(k, l, m);
    }
  }

  int dim() const { return n_; }
  int order() const { return order_; }
  const std::vector<double>& point() const { return point_; }

  const Eigen::MatrixXd& g() const { return g_; }
  const Eigen::MatrixXd& g_inv() const { return g_inv_; }
  double det() const { return det_; }
  /// sqrt|det g|, the density of the metric volume form.
  double volume_density() const { return std::sqrt(std::abs(det_)); }

  /// dg(k,i,j) = d_k g_ij
  const tensor3& dg() const { return require(1, "first metric derivatives"), dg_; }
  /// d2g(k,l,i,j) = d_k d_l g_ij
  const tensor4& d2g() const { return require(2, "second metric derivatives"), d2g_; }
  const tensor5& d3g() const { return require(3, "third metric derivatives"), d3g_; }

  /// gamma(k,i,j) = Gamma^k_ij
  const tensor3& christoffel() const {
    if (!gamma_) build_christoffel();
    return *gamma_;
  }
  /// dgamma(m,k,i,j) = d_m Gamma^k_ij
  const tensor4& christoffel_gradient() const {
    if (!dgamma_) build_christoffel_gradient();
    return *dgamma_;
  }
  /// d2gamma(p,m,k,i,j) = d_p d_m Gamma^k_ij
  const tensor5& christoffel_hessian() const {
    if (!d2gamma_) build_christoffel_hessian();
    return *d2gamma_;
  }

  /// riemann(l,i,j,k) = R^l_ijk
  const tensor4& riemann() const {
    if (!riemann_) build_riemann();
    return *riemann_;
  }
  const Eigen::MatrixXd& ricci() const {
    if (!ricci_) {
      const tensor4& R = riemann();
      Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n_, n_);
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          for (int i = 0; i < n_; ++i) ric(j, k) += R(i, i, j, k);
      ricci_ = std::move(ric);
    }
    return *ricci_;
  }
  double scalar_curvature() const {
    if (!scalar_) scalar_ = (g_inv_.array() * ricci().array()).sum();
    return *scalar_;
  }
  /// ricci_gradient(m,j,k) = d_m Ric_jk (coordinate partials; needs order-3 jets)
  const tensor3& ricci_gradient() const {
    if (!dricci_) build_ricci_gradient();
    return *dricci_;
  }

 private:
  void require(int k, const char* what) const {
    if (order_ < k)
      throw error(std::string(what) + " need metric jets of order " + std::to_string(k));
  }

  void build_christoffel() const {
    require(1, "Christoffel symbols");
    const int n = n_;
    tensor3 lower(n);  // Gamma_lij
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          lower(l, i, j) = 0.5 * (dg_(i, j, l) + dg_(j, i, l) - dg_(l, i, j));
    tensor3 G(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double s = 0;
          for (int l = 0; l < n; ++l) s += g_inv_(k, l) * lower(l, i, j);
          G(k, i, j) = G(k, j, i) = s;
        }
    gamma_ = std::move(G);
  }

  // d_m Gamma^k_ij = g^kl (d_m Gamma_lij - d_m g_la Gamma^a_ij)
  void build_christoffel_gradient() const {
    require(2, "Christoffel gradient");
    const int n = n_;
    const tensor3& G = christoffel();
    tensor4 Q(n);  // Q(l,m,i,j)
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            double v = 0.5 * (d2g_(m, i, j, l) + d2g_(m, j, i, l) - d2g_(m, l, i, j));
            for (int a = 0; a < n; ++a) v -= dg_(m, l, a) * G(a, i, j);
            Q(l, m, i, j) = Q(l, m, j, i) = v;
          }
    tensor4 D(n);
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            double v = 0;
            for (int l = 0; l < n; ++l) v += g_inv_(k, l) * Q(l, m, i, j);
            D(m, k, i, j) = D(m, k, j, i) = v;
          }
    dgamma_ = std::move(D);
  }

  // d_p d_m Gamma^k_ij = g^kl (d_p Q_lmij - d_p g_lb d_m Gamma^b_ij)
  void build_christoffel_hessian() const {
    require(3, "Christoffel Hessian");
    const int n = n_;
    const tensor3& G = christoffel();
    const tensor4& D = christoffel_gradient();
    tensor5 H(n);
    std::vector<double> dQ(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p)
      for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            for (int l = 0; l < n; ++l) {
              double v = 0.5 * (d3g_(p, m, i, j, l) + d3g_(p, m, j, i, l) - d3g_(p, m, l, i, j));
              for (int a = 0; a < n; ++a)
                v -= d2g_(p, m, l, a) * G(a, i, j) + dg_(m, l, a) * D(p, a, i, j);
              for (int b = 0; b < n; ++b) v -= dg_(p, l, b) * D(m, b, i, j);
              dQ[static_cast<std::size_t>(l)] = v;
            }
            for (int k = 0; k < n; ++k) {
              double v = 0;
              for (int l = 0; l < n; ++l) v += g_inv_(k, l) * dQ[static_cast<std::size_t>(l)];
              H(p, m, k, i, j) = H(p, m, k, j, i) = v;
            }
          }
    d2gamma_ = std::move(H);
  }

  void build_riemann() const {
    const int n = n_;
    const tensor3& G = christoffel();
    const tensor4& D = christoffel_gradient();
    tensor4 R(n);
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double v = D(i, l, j, k) - D(j, l, i, k);
            for (int m = 0; m < n; ++m) v += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
            R(l, i, j, k) = v;
          }
    riemann_ = std::move(R);
  }

  void build_ricci_gradient() const {
    const int n = n_;
    const tensor3& G = christoffel();
    const tensor4& D = christoffel_gradient();
    const tensor5& H = christoffel_hessian();
    tensor3 dR(n);
    for (int m = 0; m < n; ++m)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double v = 0;
          for (int i = 0; i < n; ++i) {
            v += H(m, i, i, j, k) - H(m, j, i, i, k);
            for (int a = 0; a < n; ++a)
              v += D(m, i, i, a) * G(a, j, k) + G(i, i, a) * D(m, a, j, k) -
                   D(m, i, j, a) * G(a, i, k) - G(i, j, a) * D(m, a, i, k);
          }
          dR(m, j, k) = v;
        }
    dricci_ = std::move(dR);
  }

  int n_;
  int order_;
  std::vector<double> point_;
  Eigen::MatrixXd g_, g_inv_;
  double det_ = 0;
  tensor3 dg_;
  tensor4 d2g_;
  tensor5 d3g_;

  mutable std::optional<tensor3> gamma_;
  mutable std::optional<tensor4> dgamma_;
  mutable std::optional<tensor5> d2gamma_;
  mutable std::optional<tensor4> riemann_;
  mutable std::optional<Eigen::MatrixXd> ricci_;
  mutable std::optional<double> scalar_;
  mutable std::optional<tensor3> dricci_;
};

inline point_frame make_frame(const metric_field& g, std::span<const double> p, int order = 2) {
  return point_frame(metric_jet(g, p, order), p);
}

inline const tensor3& christoffel(const point_frame& f) { return f.christoffel(); }
inline const tensor4& riemann(const point_frame& f) { return f.riemann(); }
inline const Eigen::MatrixXd& ricci(const point_frame& f) { return f.ricci(); }
inline double scalar_curv(const point_frame& f) { return f.scalar_curvature(); }

// ---------------------------------------------------------------------------
// Scalar fields. `f` is the jet of the field at the frame's point.

inline Eigen::VectorXd differential(const jet& f) {
  Eigen::VectorXd d(f.dim());
  for (int i = 0; i < f.dim(); ++i) d(i) = f.d1(i);
  return d;
}

/// Hess f_ij = d_i d_j f - Gamma^k_ij d_k f
inline Eigen::MatrixXd hessian(const jet& f, const point_frame& fr) {
  if (f.order() < 2) throw error("hessian needs scalar jets of order 2");
  const int n = fr.dim();
  const tensor3& G = fr.christoffel();
  Eigen::MatrixXd H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = f.d2(i, j);
      for (int k = 0; k < n; ++k) v -= G(k, i, j) * f.d1(k);
      H(i, j) = H(j, i) = v;
    }
  return H;
}

/// Contravariant gradient g^ij d_j f.
inline Eigen::VectorXd gradient(const jet& f, const point_frame& fr) {
  return fr.g_inv() * differential(f);
}

/// g^ij d_i f d_j f; negative for timelike gradients.
inline double grad_norm_sq(const jet& f, const point_frame& fr) {
  Eigen::VectorXd d = differential(f);
  return d.dot(fr.g_inv() * d);
}

/// Metric trace of the Hessian (the d'Alembertian in Lorentzian signature).
inline double laplacian(const jet& f, const point_frame& fr) {
  return (fr.g_inv().array() * hessian(f, fr).array()).sum();
}

// ---------------------------------------------------------------------------
// Pairings.

/// g^ik g^jl A_ij B_kl
inline double inner(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const point_frame& fr) {
  const Eigen::MatrixXd& gi = fr.g_inv();
  return (gi * A * gi).cwiseProduct(B).sum();
}

/// g^ij A_ij
inline double trace2(const Eigen::MatrixXd& A, const point_frame& fr) {
  return fr.g_inv().cwiseProduct(A).sum();
}

/// g^ij a_i b_j for covectors.
inline double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const point_frame& fr) {
  return a.dot(fr.g_inv() * b);
}

inline Eigen::MatrixXd outer(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a * b.transpose();
}

// ---------------------------------------------------------------------------
// Symmetric 2-tensors carrying their first coordinate derivatives.

struct sym2_jet {
  Eigen::MatrixXd value;
  tensor3 d;  // d(k,i,j) = d_k T_ij

  sym2_jet() = default;
  explicit sym2_jet(int n) : value(Eigen::MatrixXd::Zero(n, n)), d(n) {}

  int dim() const { return static_cast<int>(value.rows()); }

  sym2_jet& operator+=(const sym2_jet& o) {
    value += o.value;
    axpy_into(d, 1.0, o.d);
    return *this;
  }
  sym2_jet& operator-=(const sym2_jet& o) {
    value -= o.value;
    axpy_into(d, -1.0, o.d);
    return *this;
  }
  sym2_jet& operator*=(double s) {
    value *= s;
    tensor3 r(dim());
    axpy_into(r, s, d);
    d = std::move(r);
    return *this;
  }

 private:
  static void axpy_into(tensor3& y, double a, const tensor3& x) {
    const int n = y.dim();
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) y(k, i, j) += a * x(k, i, j);
  }
};

inline sym2_jet operator+(sym2_jet a, const sym2_jet& b) { return a += b; }
inline sym2_jet operator-(sym2_jet a, const sym2_jet& b) { return a -= b; }
inline sym2_jet operator*(double s, sym2_jet a) { return a *= s; }

/// From component jets of order >= 1.
inline sym2_jet to_sym2(const sym_matrix<jet>& t) {
  const int n = t.dim();
  sym2_jet r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r.value(i, j) = t(i, j).value();
      for (int k = 0; k < n; ++k) r.d(k, i, j) = t(i, j).d1(k);
    }
  return r;
}

inline sym2_jet metric_sym2(const point_frame& fr) {
  const int n = fr.dim();
  sym2_jet r(n);
  r.value = fr.g();
  r.d = fr.dg();
  return r;
}

/// df (x) df with its derivatives; needs f jets of order 2.
inline sym2_jet df_tensor_df(const jet& f) {
  const int n = f.dim();
  sym2_jet r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r.value(i, j) = f.d1(i) * f.d1(j);
      for (int k = 0; k < n; ++k) r.d(k, i, j) = f.d2(k, i) * f.d1(j) + f.d1(i) * f.d2(k, j);
    }
  return r;
}

/// Coordinate gradient of |grad f|^2: d_k (g^ab f_a f_b).
inline Eigen::VectorXd grad_norm_sq_differential(const jet& f, const point_frame& fr) {
  const int n = fr.dim();
  Eigen::VectorXd df = differential(f);
  Eigen::VectorXd up = fr.g_inv() * df;
  const tensor3& dg = fr.dg();
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) {
    double v = 0;
    for (int a = 0; a < n; ++a) {
      v += 2 * up(a) * f.d2(a, k);
      for (int b = 0; b < n; ++b) v -= up(a) * dg(k, a, b) * up(b);
    }
    out(k) = v;
  }
  return out;
}

/// phi * g with derivatives, given phi and d_k phi.
inline sym2_jet scaled_metric(double phi, const Eigen::VectorXd& dphi, const point_frame& fr) {
  const int n = fr.dim();
  sym2_jet r(n);
  r.value = phi * fr.g();
  const tensor3& dg = fr.dg();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r.d(k, i, j) = dphi(k) * fr.g()(i, j) + phi * dg(k, i, j);
  return r;
}

/// Ricci tensor with its derivatives (needs order-3 frames).
inline sym2_jet ricci_sym2(const point_frame& fr) {
  sym2_jet r(fr.dim());
  r.value = fr.ricci();
  r.d = fr.ricci_gradient();
  return r;
}

/// nabla_k T_ij = d_k T_ij - Gamma^m_ki T_mj - Gamma^m_kj T_im, stored (k,i,j).
inline tensor3 covariant_derivative(const sym2_jet& T, const point_frame& fr) {
  const int n = fr.dim();
  const tensor3& G = fr.christoffel();
  tensor3 out(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = T.d(k, i, j);
        for (int m = 0; m < n; ++m) v -= G(m, k, i) * T.value(m, j) + G(m, k, j) * T.value(i, m);
        out(k, i, j) = v;
      }
  return out;
}

/// div(T)_k = g^ij (nabla_i T)_jk
inline Eigen::VectorXd div_sym2(const sym2_jet& T, const point_frame& fr) {
  const int n = fr.dim();
  tensor3 nT = covariant_derivative(T, fr);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(k) += fr.g_inv()(i, j) * nT(i, j, k);
  return out;
}

// ---------------------------------------------------------------------------
// General torsion-free affine connections.

/// Torsion-free connection: Levi-Civita of `base` (or the flat coordinate
/// connection when absent) plus expression coefficients symmetric in the lower
/// indices. correction[k](i,j) is the added Gamma^k_ij.
struct affine_conn {
  chart domain;
  std::optional<metric_field> base;
  std::vector<sym_matrix<expr>> correction;

  explicit affine_conn(chart c) : domain(std::move(c)) {
    correction.assign(static_cast<std::size_t>(domain.dim()), sym_matrix<expr>(domain.dim()));
  }
  int dim() const { return domain.dim(); }
};

/// Coefficients and their first partials of a connection at p.
struct connection_data {
  tensor3 gamma;   // (k,i,j)
  tensor4 dgamma;  // (m,k,i,j)
};

inline connection_data evaluate_connection(const affine_conn& conn, std::span<const double> p) {
  const int n = conn.dim();
  connection_data c{tensor3(n), tensor4(n)};
  if (conn.base) {
    point_frame fr = make_frame(*conn.base, p, 2);
    c.gamma = fr.christoffel();
    c.dgamma = fr.christoffel_gradient();
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const expr& e = conn.correction[static_cast<std::size_t>(k)](i, j);
        if (is_constant_zero(e)) continue;
        jet v = eval_jet(e, p, 1);
        c.gamma(k, i, j) += v.value();
        if (i != j) c.gamma(k, j, i) += v.value();
        for (int m = 0; m < n; ++m) {
          c.dgamma(m, k, i, j) += v.d1(m);
          if (i != j) c.dgamma(m, k, j, i) += v.d1(m);
        }
      }
  return c;
}

/// Ric_jk = d_i G^i_jk - d_j G^i_ik + G^i_im G^m_jk - G^i_jm G^m_ik, contracted
/// directly from the coefficients; no metric compatibility is assumed, so the
/// result need not be symmetric.
inline Eigen::MatrixXd ricci_of_connection(const connection_data& c) {
  const int n = c.gamma.dim();
  Eigen::VectorXd trace(n);  // G^i_im
  for (int m = 0; m < n; ++m) {
    trace(m) = 0;
    for (int i = 0; i < n; ++i) trace(m) += c.gamma(i, i, m);
  }
  Eigen::MatrixXd ric(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double v = 0;
      for (int i = 0; i < n; ++i) v += c.dgamma(i, i, j, k) - c.dgamma(j, i, i, k);
      for (int m = 0; m < n; ++m) {
        v += trace(m) * c.gamma(m, j, k);
        for (int i = 0; i < n; ++i) v -= c.gamma(i, j, m) * c.gamma(m, i, k);
      }
      ric(j, k) = v;
    }
  return ric;
}

inline Eigen::MatrixXd affine_ricci(const affine_conn& conn, std::span<const double> p) {
  return ricci_of_connection(evaluate_connection(conn, p));
}

}  // namespace beric
