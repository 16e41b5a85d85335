// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "beric/bakry_emery.hpp"
#include "beric/config.hpp"
#include "beric/cosmology.hpp"
#include "beric/field_eq.hpp"
#include "beric/random_model.hpp"
#include "beric/report.hpp"
#include "beric/variation.hpp"
#include "oracle.hpp"

using namespace beric;

namespace {

struct outcome {
  bool pass;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

model flat_model(std::vector<std::string> names, int negative, const char* f, double half_width) {
  std::vector<axis> axes;
  for (auto& s : names) axes.push_back({s, -half_width, half_width, false});
  chart c(std::move(axes));
  model m;
  m.domain = c;
  m.metric = metric_field(c);
  for (int i = 0; i < c.dim(); ++i) m.metric(i, i) = constant(i < negative ? -1 : 1);
  m.potential = {c, c.parse(f)};
  return m;
}

// 1. Expanding flat universes solve the reduced equations.
outcome eds_family() {
  auto start = std::chrono::steady_clock::now();
  double worst_eq = 0, worst_lap = 0;
  for (int n : {2, 3, 4, 9}) {
    residual_report r = verify_solution(eds_spec(eds_solution{n}, flat_fiber(n)), eds_fiber_points(n, 25),
                                        eds_times());
    worst_eq = std::max(worst_eq, r.aggregates.at("reduced_eq"));
    worst_lap = std::max(worst_lap, r.aggregates.at("laplacian"));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst_eq <= 1e-9 && worst_lap <= 1e-10 && secs < 5.0,
          "|Ric - df df| " + num(worst_eq) + ", |lap f| " + num(worst_lap) + ", " + num(secs) + " s"};
}

// 2. Divergence of the stress tensor.
outcome divergence() {
  model euclid = flat_model({"x", "y"}, 0, "sin(x)*sinh(y)", 2.0);
  model mink = flat_model({"t", "x"}, 1, "x", 2.0);
  rng r(2);
  double worst = 0;
  for (const model* m : {&euclid, &mink}) {
    model_evaluator ev(*m);
    for (const auto& p : random_points(m->domain, 50, r)) {
      const model_sample& x = ev.at(p, 2);
      point_frame fr(x.g, p);
      worst = std::max(worst, max_abs(divergence_check(fr, x.f).div_stress));
    }
  }
  model control = flat_model({"x", "y"}, 0, "sin(x)", 2.0);
  model_evaluator ev(control);
  double decomp = 0, nonzero = 0;
  for (const auto& p : random_points(control.domain, 50, r)) {
    const model_sample& x = ev.at(p, 2);
    point_frame fr(x.g, p);
    divergence_result d = divergence_check(fr, x.f);
    decomp = std::max({decomp, max_abs(d.df_df_gap()), max_abs(d.norm_gap()),
                       max_abs(d.div_stress - d.laplacian_df)});
    nonzero = std::max(nonzero, max_abs(d.div_stress));
  }
  return {worst <= 1e-9 && decomp <= 1e-9 && nonzero > 1e-3,
          "div T " + num(worst) + ", control decomposition gap " + num(decomp) + ", control |div T| " +
              num(nonzero)};
}

// 3. First variation on tori.
outcome first_variation_check() {
  double worst_gap = 0, worst_term = 0, best_with_lap_f = INFINITY;
  for (int n : {2, 3})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      variation_options opt;
      opt.grid = std::vector<int>(static_cast<std::size_t>(n), 64);
      opt.seed = seed;
      variation_report r = run_variation(random_torus_model(n, seed), opt);
      worst_gap = std::max(worst_gap, r.totals.relative_gap());
      for (const auto& [k, v] : r.terms.errors) worst_term = std::max(worst_term, v);
      best_with_lap_f = std::min(best_with_lap_f, r.terms.laplacian_with_lap_f);
    }
  return {worst_gap <= 1e-6 && worst_term <= 1e-6 && best_with_lap_f > 1e-6,
          "relative gap " + num(worst_gap) + ", worst term " + num(worst_term) +
              ", lap f reading off by >= " + num(best_with_lap_f)};
}

// 4. Full and reduced forms are equivalent.
outcome equivalence() {
  double worst_trace = 0, worst_transform = 0;
  for (int k = 0; k < 20; ++k) {
    model m = random_analytic_model(3 + k % 3, 4000 + k, k % 2);
    std::vector<double> p(static_cast<std::size_t>(m.dim()), 0.1 * (k % 5) - 0.2);
    point_frame fr = make_frame(m.metric, p);
    equivalence_result e = equivalence_check(fr, eval_jet(m.potential.value, p, 2));
    worst_trace = std::max(worst_trace, e.trace_identity);
    worst_transform = std::max({worst_transform, e.full_from_reduced, e.reduced_from_full});
  }
  double eds_full = 0, eds_red = 0;
  for (int n : {3, 4}) {
    model m = preset_model("eds:n=" + std::to_string(n));
    model_evaluator ev(m);
    for (const auto& p : m.points) {
      const model_sample& x = ev.at(p, 2);
      point_frame fr(x.g, p);
      eds_full = std::max(eds_full, max_abs(full_residual(fr, x.f).tensor));
      eds_red = std::max(eds_red, max_abs(reduced_residual(fr, x.f).tensor));
    }
  }
  return {worst_trace <= 1e-12 && worst_transform <= 1e-10 && eds_full <= 1e-9 && eds_red <= 1e-9,
          "trace identity " + num(worst_trace) + ", transforms " + num(worst_transform) + ", EdS full " +
              num(eds_full) + " reduced " + num(eds_red)};
}

// 5. Projective connection realises the Bakry-Emery tensor with m = 1 - n.
outcome projective() {
  double worst = 0;
  for (int n : {2, 3, 4})
    for (int k = 0; k < 10; ++k) {
      model m = random_analytic_model(n, 5000 + 100 * n + k, k % 2);
      affine_conn conn = projective_conn(m.metric, projective_form(m.potential));
      rng r(k);
      auto p = random_points(m.domain, 1, r, 0.1)[0];
      point_frame fr = make_frame(m.metric, p);
      Eigen::MatrixXd target = be_ricci(fr, eval_jet(m.potential.value, p, 2), be_param(1.0 - n));
      worst = std::max(worst, max_abs(affine_ricci(conn, p) - target) / std::max(1.0, max_abs(target)));
    }
  return {worst <= 1e-9, "max |Ric(nabla^alpha) - Ric_f^(1-n)| " + num(worst)};
}

// 6. Critical pairs that are steady quasi-Einstein have parallel gradient.
critical_pair_report plane_wave(double c, const std::vector<double>& p) {
  chart ch({{"u", -1, 1, false}, {"v", -1, 1, false}, {"x", -1, 1, false}, {"y", -1, 1, false}});
  metric_field g(ch);
  g(0, 0) = constant(-c * c / 2) * ch.parse("x^2 + y^2");
  g(0, 1) = constant(1);
  g(2, 2) = constant(1);
  g(3, 3) = constant(1);
  point_frame fr = make_frame(g, p);
  return critical_pair_check(fr, eval_jet(constant(c) * variable(0), p, 2));
}

curvature_terms random_algebraic(rng& r, int kind) {
  const int n = r.integer(2, 5);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = r.uniform(-0.3, 0.3);
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n) + 0.5 * (a + a.transpose());
  if (kind % 2) g(0, 0) -= 2.5;  // Lorentzian
  Eigen::MatrixXd gi = g.inverse();
  Eigen::VectorXd df(n);
  Eigen::MatrixXd hess(n, n), other(n, n);
  for (int i = 0; i < n; ++i) df(i) = r.uniform(-1, 1);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      hess(i, j) = hess(j, i) = r.uniform(-1, 1);
      other(i, j) = other(j, i) = r.uniform(-1, 1);
    }
  Eigen::MatrixXd dfdf = df * df.transpose();
  switch (kind % 5) {
    case 0:  // critical with trace-free Hessian
      hess -= gi.cwiseProduct(hess).sum() / n * g;
      return {g, gi, dfdf, hess, dfdf};
    case 1:  // steady quasi-Einstein, not critical
      return {g, gi, dfdf - hess, hess, dfdf};
    case 2:  // critical with Hess f = 0
      return {g, gi, dfdf, Eigen::MatrixXd::Zero(n, n), dfdf};
    case 3:  // critical with Hess f = lambda g: forces lambda = 0 through the trace
      return {g, gi, dfdf, r.uniform(-1, 1) * g, dfdf};
    default:  // unrelated tensors
      return {g, gi, other, hess, dfdf};
  }
}

outcome critical_pairs() {
  model flat = flat_model({"x", "y", "z"}, 0, "1.5", 1.0);
  const double fp[] = {0.1, 0.2, 0.3};
  critical_pair_report pos = critical_pair_check(make_frame(flat.metric, fp), eval_jet(flat.potential.value, fp, 2));
  critical_pair_report wave = plane_wave(0.6, {0.1, 0.2, 0.5, -0.3});
  bool positive = pos.field_zero && pos.hess_zero && pos.qe0_zero && pos.holds() && wave.field_zero &&
                  wave.hess_zero && wave.qe0_zero && wave.holds();

  model eds = preset_model("eds:n=3");
  bool negative = true;
  for (std::size_t i = 0; i < eds.points.size(); i += 7) {
    const auto& ep = eds.points[i];
    point_frame efr = make_frame(eds.metric, ep);
    jet f = eval_jet(eds.potential.value, ep, 2);
    critical_pair_report neg = critical_pair_check(efr, f);
    curvature_terms t = curvature_terms_at(efr, f);
    double qe_is_hess = max_abs(t.ricci + t.hessian - t.df_df - t.hessian);
    negative = negative && neg.field_zero && !neg.hess_zero && !neg.qe0_zero && neg.holds() && qe_is_hess <= 1e-9;
  }

  rng r(6);
  int violations = 0, critical = 0;
  for (int k = 0; k < 100; ++k) {
    critical_pair_report rep = critical_pair_check(random_algebraic(r, k));
    critical += rep.field_zero;
    violations += static_cast<int>(rep.violations.size());
  }
  // geometric instances on top of the algebraic ones
  int extra = 0;
  for (int k = 0; k < 30; ++k) {
    critical_pair_report rep;
    if (k % 3 == 0) {
      std::vector<double> p;
      for (int i = 0; i < 4; ++i) p.push_back(r.uniform(-1, 1));
      rep = plane_wave(r.uniform(-2, 2), p);
    } else if (k % 3 == 1) {
      int n = r.integer(2, 6);
      model m = assemble(eds_spec(eds_solution{n}, flat_fiber(n), 0.1, 20));
      auto p = random_points(m.domain, 1, r)[0];
      rep = critical_pair_check(make_frame(m.metric, p), eval_jet(m.potential.value, p, 2));
    } else {
      model m = random_analytic_model(r.integer(2, 4), 6000 + static_cast<std::uint64_t>(k), k % 2);
      auto p = random_points(m.domain, 1, r, 0.1)[0];
      rep = critical_pair_check(make_frame(m.metric, p), eval_jet(m.potential.value, p, 2));
    }
    extra += static_cast<int>(rep.violations.size());
  }
  return {positive && negative && violations == 0 && extra == 0,
          std::string("positive cases ") + (positive ? "ok" : "wrong") + ", EdS control " +
              (negative ? "ok" : "wrong") + ", 100 algebraic (" + std::to_string(critical) + " critical) " +
              std::to_string(violations) + " violations, 30 geometric " + std::to_string(extra) + " violations"};
}

// 7. Curvature against finite differences of the metric, and the round sphere.
outcome curvature_oracle() {
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    model m = random_analytic_model(2 + k % 3, 7000 + k, k % 2);
    rng r(k);
    auto p = random_points(m.domain, 1, r, 0.2)[0];
    point_frame fr = make_frame(m.metric, p);
    oracle::curvature o = oracle::curvature_at(m.metric, p);
    worst = std::max(worst, oracle::relative_error(fr.ricci(), o.ricci));
    worst = std::max(worst, std::abs(fr.scalar_curvature() - o.scalar) / std::max(1.0, std::abs(o.scalar)));
  }
  model s = load_model(R"(
chart:
  axes:
    - {name: th, min: 0.1, max: 3.0}
    - {name: ph, min: 0, max: 2*pi, periodic: true}
metric: {"th,th": 1, "ph,ph": sin(th)^2}
)");
  double sphere = 0;
  for (double th : {0.3, 1.1, 2.0, 2.8}) {
    const double p[] = {th, 1.0};
    point_frame fr = make_frame(s.metric, p);
    sphere = std::max({sphere, max_abs(fr.ricci() - fr.g()), std::abs(fr.scalar_curvature() - 2)});
  }
  return {worst <= 1e-6 && sphere <= 1e-9, "oracle relative error " + num(worst) + ", sphere " + num(sphere)};
}

// 8. Reports are byte-identical across runs.
outcome determinism() {
  auto once = [] {
    check_options c;
    c.m = be_param(3.0);
    std::string out = to_json(run_check(preset_model("eds:n=3"), c)).dump();
    variation_options v;
    v.grid = std::vector<int>{32, 32};
    out += to_json(run_variation(preset_model("random-torus:n=2", 11), v)).dump();
    out += run_curvature(preset_model("random-torus:n=3", 12), be_param::infinity(), 12).dump();
    return out;
  };
  std::string a = once(), b = once();
  return {a == b && !a.empty(), std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "differ")};
}

}  // namespace

int main() {
  struct criterion {
    const char* name;
    std::function<outcome()> run;
  };
  const criterion all[] = {
      {"expanding flat universes solve the reduced equations", eds_family},
      {"stress tensor is divergence-free for harmonic potentials", divergence},
      {"first variation: analytic equals numeric", first_variation_check},
      {"full and reduced field equations are equivalent", equivalence},
      {"projective connection gives Ric_f^(1-n)", projective},
      {"critical steady quasi-Einstein pairs have Hess f = 0", critical_pairs},
      {"curvature matches finite-difference oracle", curvature_oracle},
      {"reports are deterministic", determinism},
  };
  int failed = 0, k = 0;
  for (const auto& c : all) {
    ++k;
    outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %d. %s: %s\n", o.pass ? "PASS" : "FAIL", k, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", k - failed, k);
  return failed == 0 ? 0 : 1;
}
