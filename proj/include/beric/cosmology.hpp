#pragma once

// Warped-product space-times N x (0, inf) with g = e^{2a(t)} gbar - dt (x) dt
// and a potential f(t), including the exact family a = ln(t)/n,
// f = sqrt((n-1)/n) ln t over a Ricci-flat fiber.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beric/chart.hpp"
#include "beric/error.hpp"
#include "beric/expr.hpp"
#include "beric/field_eq.hpp"
#include "beric/geometry.hpp"
#include "beric/model.hpp"

namespace beric {

/// a and f are expressions in the single coordinate t (variable index 0).
struct warped_product_spec {
  metric_field fiber;
  expr a;
  expr f;
  std::optional<expr> warp;  // e^{2a} in closed form, if known; otherwise exp(2a)
  double t_min = 0.5;
  double t_max = 10.0;
  std::string time_name = "t";

  int n() const { return fiber.dim(); }
};

struct eds_solution {
  int n;

  double c() const { return std::sqrt((n - 1.0) / n); }
  expr a() const { return constant(1.0 / n) * unary(op::ln, variable(0)); }
  expr f() const { return constant(c()) * unary(op::ln, variable(0)); }
  /// e^{2a} = t^{2/n}
  expr warp() const { return power(variable(0), 2.0 / n); }
};

/// Flat fiber metric on coordinates x1..xn over the unit box.
inline metric_field flat_fiber(int n, bool periodic = false) {
  std::vector<axis> axes;
  for (int i = 0; i < n; ++i) axes.push_back({"x" + std::to_string(i + 1), 0.0, 1.0, periodic});
  metric_field g{chart(std::move(axes))};
  for (int i = 0; i < n; ++i) g(i, i) = constant(1);
  return g;
}

inline warped_product_spec eds_spec(const eds_solution& sol, metric_field fiber, double t_min = 0.5,
                                    double t_max = 10.0) {
  if (fiber.dim() != sol.n) throw error("fiber dimension does not match the solution");
  return {std::move(fiber), sol.a(), sol.f(), sol.warp(), t_min, t_max, "t"};
}

/// The (n+1)-dimensional model: fiber coordinates followed by t.
inline model assemble(const warped_product_spec& spec) {
  if (!(spec.t_min > 0))
    throw unsupported_domain_error("warped product time range must exclude t = 0");
  if (!(spec.t_max > spec.t_min)) throw config_error("empty time range");
  const int n = spec.n();
  std::vector<axis> axes = spec.fiber.domain.axes();
  axes.push_back({spec.time_name, spec.t_min, spec.t_max, false});
  chart c(std::move(axes));
  const int map_t[] = {n};
  expr warp = spec.warp ? remap_variables(*spec.warp, map_t)
                        : unary(op::exp, constant(2) * remap_variables(spec.a, map_t));

  model m;
  m.name = "warped-product";
  m.domain = c;
  m.metric = metric_field(c);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const expr& gb = spec.fiber(i, j);
      if (is_constant_zero(gb)) continue;
      m.metric(i, j) = warp * gb;
    }
  m.metric(n, n) = constant(-1);
  m.potential = {c, remap_variables(spec.f, map_t)};
  return m;
}

namespace detail {
inline jet time_jet(const expr& e, double t) {
  const double p[] = {t};
  return eval_jet(e, p, 2);
}
}  // namespace detail

/// -n a'(t) f'(t) - f''(t)
inline double warped_laplacian_formula(const warped_product_spec& spec, double t) {
  if (!(t > 0)) throw unsupported_domain_error("t must be positive");
  jet a = detail::time_jet(spec.a, t);
  jet f = detail::time_jet(spec.f, t);
  return -spec.n() * a.d1(0) * f.d1(0) - f.d2(0, 0);
}

/// The warped Ricci components over a Ricci-flat fiber, written as
/// Ric(X,Y) = spatial * g(X,Y) and Ric(dt,dt) = tt. The uncorrected pair drops the squares on a' and does
/// not match the tensor.
struct warped_ricci_formulas {
  double spatial_uncorrected = 0;  // a'' + n a'
  double tt_uncorrected = 0;       // -n (a'' + a')
  double spatial_corrected = 0;  // a'' + n a'^2
  double tt_corrected = 0;       // -n (a'' + a'^2)
};

inline warped_ricci_formulas warped_ricci(const warped_product_spec& spec, double t) {
  jet a = detail::time_jet(spec.a, t);
  const double n = spec.n(), a1 = a.d1(0), a2 = a.d2(0, 0);
  return {a2 + n * a1, -n * (a2 + a1), a2 + n * a1 * a1, -n * (a2 + a1 * a1)};
}

struct harmonic_ode_result {
  double c = 0;          // fitted |f'| e^{na} at the first time
  double max_gap = 0;    // max | |f'(t)| - c e^{-n a(t)} | over the remaining times
  bool degenerate = false;  // f' vanishes at every sample time
  bool holds = false;
};

/// Checks |f'(t)| = c e^{-n a(t)} with c fitted at times[0].
inline harmonic_ode_result harmonic_f_ode(const warped_product_spec& spec, std::span<const double> times,
                                          double tol = 1e-9) {
  if (times.empty()) throw error("harmonic_f_ode: no sample times");
  harmonic_ode_result r;
  const int n = spec.n();
  auto fp = [&](double t) { return std::abs(detail::time_jet(spec.f, t).d1(0)); };
  auto av = [&](double t) { return detail::time_jet(spec.a, t).value(); };
  r.degenerate = true;
  for (double t : times) {
    if (!(t > 0)) throw unsupported_domain_error("t must be positive");
    if (fp(t) > tol) r.degenerate = false;
  }
  r.c = fp(times[0]) * std::exp(n * av(times[0]));
  for (double t : times.subspan(1))
    r.max_gap = std::max(r.max_gap, std::abs(fp(t) - r.c * std::exp(-n * av(t))));
  r.holds = r.max_gap <= tol;
  return r;
}

/// Reduced field equations of the assembled pair at every (fiber point, time).
/// The fiber must be Ricci-flat at the fiber points.
inline residual_report verify_solution(const warped_product_spec& spec,
                                       std::span<const std::vector<double>> fiber_points,
                                       std::span<const double> times, double tol = 1e-9) {
  for (const auto& p : fiber_points) {
    point_frame fb = make_frame(spec.fiber, p, 2);
    if (max_abs(fb.ricci()) > 1e-10)
      throw error("fiber metric is not Ricci-flat at " + detail::format_point(p));
  }
  model m = assemble(spec);
  model_evaluator ev(m);
  const int n = spec.n();
  residual_report rep;
  rep.model = "warped-product";
  for (const char* name : {"reduced_eq", "laplacian", "ric_tt_minus_fp2"}) rep.tolerances[name] = tol;
  for (double t : times) {
    if (!(t > 0)) throw unsupported_domain_error("sample times must be positive");
    for (const auto& fp : fiber_points) {
      std::vector<double> p(fp);
      p.push_back(t);
      const model_sample& x = ev.at(p, 2);
      point_frame fr(x.g, p);
      field_residual red = reduced_residual(fr, x.f);
      residual_record rec;
      rec.coords = p;
      rec.norms["reduced_eq"] = max_abs(red.tensor);
      rec.norms["laplacian"] = std::abs(red.laplacian);
      rec.norms["ric_tt_minus_fp2"] = std::abs(fr.ricci()(n, n) - x.f.d1(n) * x.f.d1(n));
      rep.add(std::move(rec));
    }
  }
  return rep;
}

}  // namespace beric
