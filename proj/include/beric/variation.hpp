#pragma once

// First variation of the weighted Hilbert action
//   L(g, f) = int (R + lap f - |grad f|^2) dV_g
// along g + t s, f + t h on fully periodic charts: pointwise variation
// formulas, their t-finite-difference counterparts, and the assembled
// analytic and numeric totals.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "beric/bakry_emery.hpp"
#include "beric/chart.hpp"
#include "beric/error.hpp"
#include "beric/geometry.hpp"
#include "beric/model.hpp"

namespace beric {

inline const std::vector<double>& default_variation_steps() {
  static const std::vector<double> steps{1e-2, 5e-3, 2.5e-3};
  return steps;
}

/// Derivative at t = 0 from central differences at each step, extrapolated to
/// zero step in h^2 (Neville). `F` maps t to a vector.
inline Eigen::VectorXd richardson_derivative(const std::function<Eigen::VectorXd(double)>& F,
                                             const std::vector<double>& steps) {
  const std::size_t m = steps.size();
  std::vector<Eigen::VectorXd> d(m);
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    double h = steps[i];
    d[i] = (F(h) - F(-h)) / (2 * h);
    x[i] = h * h;
  }
  for (std::size_t k = 1; k < m; ++k)
    for (std::size_t i = m - 1; i >= k; --i) {
      d[i] = (x[i - k] * d[i] - x[i] * d[i - 1]) / (x[i - k] - x[i]);
      if (i == k) break;
    }
  return d[m - 1];
}

inline double richardson_derivative(const std::function<double(double)>& F,
                                    const std::vector<double>& steps) {
  auto G = [&](double t) {
    Eigen::VectorXd v(1);
    v(0) = F(t);
    return v;
  };
  return richardson_derivative(std::function<Eigen::VectorXd(double)>(G), steps)(0);
}

// ---------------------------------------------------------------------------
// Pointwise analytic terms.

struct variation_terms {
  double delta_volume = 0;        // 1/2 <g, s>
  double delta_grad_norm = 0;     // -<s, df (x) df> + 2 <grad h, grad f>
  tensor3 christoffel_variation;  // A^k_ij, stored (k,i,j)
  Eigen::VectorXd y_contraction;  // g^ij A^k_ij
  Eigen::VectorXd y_identity;     // div(s)^k - 1/2 grad(tr s)^k
  double delta_laplacian = 0;     // lap h - div(s(grad f)) + 1/2 <grad tr s, grad f>
  double delta_laplacian_with_lap_f = 0;  // same with lap f in place of lap h
  double ricci_pairing = 0;       // -<s, Ric>
  Eigen::VectorXd x_field;        // X = div(s)^# - grad tr s
  double div_x = 0;               // div(div s) - lap tr s

  double delta_scalar() const { return ricci_pairing + div_x; }
};

namespace detail {

/// First and second covariant derivatives of a symmetric 2-tensor given by
/// component jets of order 2.
struct sym2_derivatives {
  Eigen::MatrixXd value;
  tensor3 d1;  // nabla_k s_ij  (k,i,j)
  tensor4 d2;  // nabla_a nabla_b s_ij  (a,b,i,j)
};

inline sym2_derivatives covariant_derivatives(const sym_matrix<jet>& s, const point_frame& fr) {
  const int n = fr.dim();
  const tensor3& G = fr.christoffel();
  const tensor4& dG = fr.christoffel_gradient();
  sym2_derivatives r{Eigen::MatrixXd(n, n), tensor3(n), tensor4(n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.value(i, j) = s(i, j).value();
  auto ds = [&](int k, int i, int j) { return s(i, j).d1(k); };
  auto dds = [&](int a, int b, int i, int j) { return s(i, j).d2(a, b); };
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = ds(k, i, j);
        for (int m = 0; m < n; ++m) v -= G(m, k, i) * r.value(m, j) + G(m, k, j) * r.value(i, m);
        r.d1(k, i, j) = v;
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          // d_a (nabla_b s_ij)
          double v = dds(a, b, i, j);
          for (int m = 0; m < n; ++m)
            v -= dG(a, m, b, i) * r.value(m, j) + G(m, b, i) * ds(a, m, j) +
                 dG(a, m, b, j) * r.value(i, m) + G(m, b, j) * ds(a, i, m);
          for (int m = 0; m < n; ++m)
            v -= G(m, a, b) * r.d1(m, i, j) + G(m, a, i) * r.d1(b, m, j) + G(m, a, j) * r.d1(b, i, m);
          r.d2(a, b, i, j) = v;
        }
  return r;
}

}  // namespace detail

/// All pointwise variation terms. Needs order-2 frame and jets.
inline variation_terms variation_terms_at(const point_frame& fr, const jet& f,
                                          const sym_matrix<jet>& s, const jet& h) {
  const int n = fr.dim();
  const Eigen::MatrixXd& gi = fr.g_inv();
  variation_terms t;
  detail::sym2_derivatives S = detail::covariant_derivatives(s, fr);

  Eigen::VectorXd df = differential(f);
  Eigen::VectorXd dh = differential(h);
  Eigen::VectorXd grad_f = gi * df;

  t.delta_volume = 0.5 * trace2(S.value, fr);
  t.delta_grad_norm = -inner(S.value, outer(df, df), fr) + 2 * dh.dot(grad_f);

  // div(s)_l, d(tr s)_k
  Eigen::VectorXd div_s = Eigen::VectorXd::Zero(n), dtr = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        div_s(k) += gi(i, j) * S.d1(i, j, k);
        dtr(k) += gi(i, j) * S.d1(k, i, j);
      }

  t.christoffel_variation = tensor3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0;
        for (int l = 0; l < n; ++l) v += gi(k, l) * (S.d1(i, j, l) + S.d1(j, i, l) - S.d1(l, i, j));
        t.christoffel_variation(k, i, j) = 0.5 * v;
      }
  t.y_contraction = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t.y_contraction(k) += gi(i, j) * t.christoffel_variation(k, i, j);
  t.y_identity = gi * (div_s - 0.5 * dtr);

  // div of the covector W_a = s_ab grad^b f, from its own coordinate derivatives.
  {
    const tensor3& dg = fr.dg();
    const tensor3& G = fr.christoffel();
    Eigen::MatrixXd du(n, n);  // du(k,b) = d_k grad^b f
    for (int k = 0; k < n; ++k)
      for (int b = 0; b < n; ++b) {
        double v = 0;
        for (int l = 0; l < n; ++l) {
          v += gi(b, l) * f.d2(l, k);
          for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) v -= gi(b, c) * dg(k, c, d) * gi(d, l) * df(l);
        }
        du(k, b) = v;
      }
    Eigen::VectorXd W = S.value * grad_f;
    double div_w = 0;
    for (int a = 0; a < n; ++a)
      for (int k = 0; k < n; ++k) {
        double dkw = 0;
        for (int b = 0; b < n; ++b) dkw += s(a, b).d1(k) * grad_f(b) + S.value(a, b) * du(k, b);
        for (int m = 0; m < n; ++m) dkw -= G(m, k, a) * W(m);
        div_w += gi(a, k) * dkw;
      }
    double rest = -div_w + 0.5 * dtr.dot(grad_f);
    t.delta_laplacian = laplacian(h, fr) + rest;
    t.delta_laplacian_with_lap_f = laplacian(f, fr) + rest;
  }

  t.ricci_pairing = -inner(S.value, fr.ricci(), fr);
  t.x_field = gi * (div_s - dtr);
  double divdiv = 0, lap_tr = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          divdiv += gi(a, b) * gi(i, j) * S.d2(a, i, j, b);
          lap_tr += gi(a, b) * gi(i, j) * S.d2(a, b, i, j);
        }
  t.div_x = divdiv - lap_tr;
  return t;
}

inline double delta_volume(const point_frame& fr, const sym_matrix<jet>& s) {
  Eigen::MatrixXd sv(fr.dim(), fr.dim());
  for (int i = 0; i < fr.dim(); ++i)
    for (int j = 0; j < fr.dim(); ++j) sv(i, j) = s(i, j).value();
  return 0.5 * trace2(sv, fr);
}

/// Integrand of the assembled first variation, without the volume density:
/// <-Ric + R/2 g + df (x) df - |grad f|^2/2 g, s> + 2 lap f h
inline double first_variation_density(const point_frame& fr, const jet& f,
                                      const sym_matrix<jet>& s, const jet& h) {
  const int n = fr.dim();
  Eigen::MatrixXd sv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sv(i, j) = s(i, j).value();
  Eigen::VectorXd df = differential(f);
  Eigen::MatrixXd E = -fr.ricci() + 0.5 * fr.scalar_curvature() * fr.g() + outer(df, df) -
                      0.5 * grad_norm_sq(f, fr) * fr.g();
  return inner(E, sv, fr) + 2 * laplacian(f, fr) * h.value();
}

// ---------------------------------------------------------------------------
// t-finite-difference counterparts at one point.

struct numeric_terms {
  double delta_volume = 0;
  double delta_grad_norm = 0;
  tensor3 christoffel_variation;
  double delta_laplacian = 0;
  double delta_scalar = 0;
};

inline numeric_terms numeric_terms_at(const model_sample& x, std::span<const double> p,
                                      const std::vector<double>& steps = default_variation_steps()) {
  const int n = x.g.dim();
  numeric_terms r;
  const double vol0 = point_frame(x.g, p).volume_density();
  auto frame_at = [&](double t) { return point_frame(perturbed_metric(x, t), p); };
  r.delta_volume = richardson_derivative(
      std::function<double(double)>([&](double t) { return frame_at(t).volume_density() / vol0; }),
      steps);
  r.delta_grad_norm = richardson_derivative(std::function<double(double)>([&](double t) {
                                              return grad_norm_sq(perturbed_potential(x, t), frame_at(t));
                                            }),
                                            steps);
  r.delta_laplacian = richardson_derivative(std::function<double(double)>([&](double t) {
                                              return laplacian(perturbed_potential(x, t), frame_at(t));
                                            }),
                                            steps);
  r.delta_scalar = richardson_derivative(
      std::function<double(double)>([&](double t) { return frame_at(t).scalar_curvature(); }), steps);
  Eigen::VectorXd dG = richardson_derivative(std::function<Eigen::VectorXd(double)>([&](double t) {
                                               point_frame fr = frame_at(t);
                                               const tensor3& G = fr.christoffel();
                                               return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
                                                   G.data().data(), static_cast<Eigen::Index>(G.data().size())));
                                             }),
                                             steps);
  r.christoffel_variation = tensor3(n);
  for (int k = 0, idx = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j, ++idx) r.christoffel_variation(k, i, j) = dG(idx);
  return r;
}

// ---------------------------------------------------------------------------
// Integrated quantities.

inline void require_periodic(const model& m) {
  if (!m.domain.fully_periodic())
    throw unsupported_domain_error("integrals require every chart axis to be periodic");
}

inline sample_grid grid_of(const model& m, const std::optional<std::vector<int>>& counts = std::nullopt) {
  if (counts) return sample_grid(m.domain, *counts);
  if (m.grid) return sample_grid(m.domain, *m.grid);
  throw config_error("model has no grid");
}

/// int R_(g,f) dV_g by the periodic product rule.
inline double action(const model& m, const sample_grid& grid) {
  require_periodic(m);
  model_evaluator ev(m);
  double total = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto p = grid.point(i);
    const model_sample& x = ev.at(p, 2);
    point_frame fr(x.g, p);
    total += grid.weight(i) * weighted_scalar(fr, x.f) * fr.volume_density();
  }
  return total;
}

struct variation_totals {
  double analytic = 0;
  double numeric = 0;
  double integrand_l1 = 0;  // int |analytic integrand| dV, a magnitude scale
  double div_x_integral = 0;
  double ibp_gap = 0;       // int <grad h, grad f> dV + int lap f h dV
  double ibp_scale = 0;     // int |<grad h, grad f>| dV
  double laplacian_integral = 0;  // int lap f dV

  double relative_gap() const {
    double scale = std::max(std::abs(analytic), std::abs(numeric));
    return scale > 0 ? std::abs(analytic - numeric) / scale : 0.0;
  }
};

/// Analytic and numeric first variation in one sweep over the grid. The
/// numeric side differentiates the quadrature of the action along t.
inline variation_totals first_variation(const model& m, const sample_grid& grid,
                                        const std::vector<double>& steps = default_variation_steps()) {
  require_periodic(m);
  model_evaluator ev(m);
  variation_totals r;
  std::vector<double> plus(steps.size(), 0.0), minus(steps.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto p = grid.point(i);
    const double w = grid.weight(i);
    const model_sample& x = ev.at(p, 2);
    point_frame fr(x.g, p);
    const double vol = fr.volume_density();
    double dens = first_variation_density(fr, x.f, x.s, x.h);
    r.analytic += w * dens * vol;
    r.integrand_l1 += w * std::abs(dens) * vol;
    variation_terms vt = variation_terms_at(fr, x.f, x.s, x.h);
    r.div_x_integral += w * vt.div_x * vol;
    double gh_gf = inner(differential(x.h), differential(x.f), fr);
    double lap_f = laplacian(x.f, fr);
    r.ibp_gap += w * (gh_gf + lap_f * x.h.value()) * vol;
    r.ibp_scale += w * std::abs(gh_gf) * vol;
    r.laplacian_integral += w * lap_f * vol;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      for (double sign : {1.0, -1.0}) {
        double t = sign * steps[k];
        point_frame ft(perturbed_metric(x, t), p);
        double v = w * weighted_scalar(ft, perturbed_potential(x, t)) * ft.volume_density();
        (sign > 0 ? plus : minus)[k] += v;
      }
    }
  }
  // Same extrapolation as richardson_derivative, on the accumulated totals.
  std::vector<double> xs(steps.size());
  std::vector<double> d(steps.size());
  for (std::size_t k = 0; k < steps.size(); ++k) {
    d[k] = (plus[k] - minus[k]) / (2 * steps[k]);
    xs[k] = steps[k] * steps[k];
  }
  const std::size_t M = steps.size();
  for (std::size_t k = 1; k < M; ++k)
    for (std::size_t i = M - 1; i >= k; --i) {
      d[i] = (xs[i - k] * d[i] - xs[i] * d[i - 1]) / (xs[i - k] - xs[i]);
      if (i == k) break;
    }
  r.numeric = d[M - 1];
  return r;
}

inline double analytic_first_variation(const model& m, const sample_grid& grid) {
  return first_variation(m, grid).analytic;
}
inline double numeric_first_variation(const model& m, const sample_grid& grid,
                                      const std::vector<double>& steps = default_variation_steps()) {
  return first_variation(m, grid, steps).numeric;
}

// ---------------------------------------------------------------------------
// Per-term checks over a point set.

/// Relative max-norm errors of each analytic term against its finite-difference
/// counterpart: max_p |a - n| / max(max_p |n|, floor). The Y entry compares the contraction
/// route with the identity route instead.
struct term_errors {
  std::map<std::string, double> errors;
  double laplacian_with_lap_f = 0;  // the lap f reading, expected to fail
};

/// Terms whose reference is smaller than this are compared absolutely.
inline constexpr double relative_error_floor = 1e-6;

inline double relative_max_error(const std::vector<double>& a, const std::vector<double>& b) {
  double err = 0, scale = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    err = std::max(err, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return err / std::max(scale, relative_error_floor);
}

inline term_errors check_terms(const model& m, std::span<const std::vector<double>> pts,
                               const std::vector<double>& steps = default_variation_steps()) {
  model_evaluator ev(m);
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> cols;
  std::vector<double> with_lap_f;
  for (const auto& p : pts) {
    const model_sample& x = ev.at(p, 2);
    point_frame fr(x.g, p);
    variation_terms a = variation_terms_at(fr, x.f, x.s, x.h);
    numeric_terms num = numeric_terms_at(x, p, steps);
    auto push = [&](const std::string& name, double va, double vn) {
      cols[name].first.push_back(va);
      cols[name].second.push_back(vn);
    };
    push("delta_volume", a.delta_volume, num.delta_volume);
    push("delta_grad_norm", a.delta_grad_norm, num.delta_grad_norm);
    push("delta_laplacian", a.delta_laplacian, num.delta_laplacian);
    push("delta_scalar_curvature", a.delta_scalar(), num.delta_scalar);
    with_lap_f.push_back(a.delta_laplacian_with_lap_f);
    for (std::size_t k = 0; k < a.christoffel_variation.data().size(); ++k)
      push("christoffel_variation", a.christoffel_variation.data()[k],
           num.christoffel_variation.data()[k]);
    for (int k = 0; k < fr.dim(); ++k) push("y_vector", a.y_contraction(k), a.y_identity(k));
  }
  term_errors r;
  for (const auto& [name, c] : cols) r.errors[name] = relative_max_error(c.first, c.second);
  r.laplacian_with_lap_f = relative_max_error(with_lap_f, cols["delta_laplacian"].second);
  return r;
}

}  // namespace beric
