#include <gtest/gtest.h>

#include <cmath>

#include "beric/cosmology.hpp"
#include "beric/field_eq.hpp"
#include "beric/random_model.hpp"

using namespace beric;

namespace {
model flat(std::vector<std::string> names, int negative, const char* f) {
  std::vector<axis> axes;
  for (auto& s : names) axes.push_back({s, -1, 1, false});
  chart c(std::move(axes));
  model m;
  m.domain = c;
  m.metric = metric_field(c);
  for (int i = 0; i < c.dim(); ++i) m.metric(i, i) = constant(i < negative ? -1 : 1);
  m.potential = {c, c.parse(f)};
  return m;
}

struct at_point {
  point_frame fr;
  jet f;
};

at_point sample(const model& m, const std::vector<double>& p) {
  return {make_frame(m.metric, p), eval_jet(m.potential.value, p, 2)};
}
}  // namespace

TEST(FieldEq, TraceIdentityOnRandomPairs) {
  for (int seed = 0; seed < 10; ++seed) {
    const int n = 3 + seed % 3;
    model m = random_analytic_model(n, 900 + seed, seed % 2);
    rng r(seed);
    for (const auto& p : random_points(m.domain, 2, r, 0.1)) {
      auto [fr, f] = sample(m, p);
      equivalence_result e = equivalence_check(fr, f);
      EXPECT_LT(e.trace_identity, 1e-12) << m.name;
      EXPECT_TRUE(e.equivalent) << m.name;
    }
  }
}

TEST(FieldEq, ReducedFormNeedsDimensionThree) {
  model m = flat({"x", "y"}, 0, "x");
  auto [fr, f] = sample(m, {0.1, 0.2});
  EXPECT_THROW(reduced_residual(fr, f), unsupported_domain_error);
  EXPECT_THROW(equivalence_check(fr, f), unsupported_domain_error);
  EXPECT_NO_THROW(full_residual(fr, f));
}

TEST(FieldEq, EdSSolvesBothForms) {
  for (int n : {2, 3, 4}) {
    model m = assemble(eds_spec(eds_solution{n}, flat_fiber(n)));
    std::vector<double> p(static_cast<std::size_t>(n), 0.4);
    p.push_back(1.7);
    auto [fr, f] = sample(m, p);
    EXPECT_LT(max_abs(full_residual(fr, f).tensor), 1e-12);
    EXPECT_LT(max_abs(reduced_residual(fr, f).tensor), 1e-12);
    EXPECT_LT(std::abs(laplacian(f, fr)), 1e-12);
  }
}

TEST(FieldEq, StressIsDivergenceFreeForHarmonicPotentials) {
  model euclid = flat({"x", "y"}, 0, "sin(x)*sinh(y)");
  model mink = flat({"t", "x"}, 1, "x");
  rng r(3);
  for (const model* m : {&euclid, &mink})
    for (const auto& p : random_points(m->domain, 10, r)) {
      auto [fr, f] = sample(*m, p);
      divergence_result d = divergence_check(fr, f);
      EXPECT_LT(max_abs(d.div_stress), 1e-12);
    }
}

TEST(FieldEq, DivergenceDecomposition) {
  model m = flat({"x", "y"}, 0, "sin(x)");
  auto [fr, f] = sample(m, {0.7, 0.1});
  divergence_result d = divergence_check(fr, f);
  EXPECT_GT(max_abs(d.div_stress), 0.1);
  EXPECT_LT(max_abs(d.div_stress - d.laplacian_df), 1e-14);
  EXPECT_LT(max_abs(d.df_df_gap()), 1e-14);
  EXPECT_LT(max_abs(d.norm_gap()), 1e-14);
  for (int seed = 0; seed < 6; ++seed) {
    model rm = random_analytic_model(2 + seed % 3, 70 + seed, seed % 2);
    std::vector<double> p(static_cast<std::size_t>(rm.dim()), 0.3);
    auto [rf, rfj] = sample(rm, p);
    divergence_result rd = divergence_check(rf, rfj);
    EXPECT_LT(max_abs(rd.df_df_gap()), 1e-11) << rm.name;
    EXPECT_LT(max_abs(rd.norm_gap()), 1e-11) << rm.name;
    EXPECT_LT(max_abs(rd.div_stress - rd.laplacian_df), 1e-11) << rm.name;
  }
}

TEST(CriticalPairs, PlaneWaveIsCriticalAndSteady) {
  // g = 2 du dv + H du^2 + dx^2 + dy^2, H = -c^2 (x^2 + y^2)/2, f = c u
  chart c({{"u", -1, 1, false}, {"v", -1, 1, false}, {"x", -1, 1, false}, {"y", -1, 1, false}});
  metric_field g(c);
  g(0, 0) = c.parse("-0.18*(x^2 + y^2)");
  g(0, 1) = constant(1);
  g(2, 2) = constant(1);
  g(3, 3) = constant(1);
  expr f = c.parse("0.6*u");
  for (double x : {0.0, 0.5}) {
    const double p[] = {0.1, 0.2, x, -0.3};
    point_frame fr = make_frame(g, p);
    critical_pair_report r = critical_pair_check(fr, eval_jet(f, p, 2));
    EXPECT_TRUE(r.field_zero);
    EXPECT_TRUE(r.hess_zero);
    EXPECT_TRUE(r.qe0_zero);
    EXPECT_TRUE(r.holds());
  }
}

TEST(CriticalPairs, EdSIsCriticalButNotSteady) {
  model m = assemble(eds_spec(eds_solution{3}, flat_fiber(3)));
  const double p[] = {0.2, 0.2, 0.2, 2.0};
  point_frame fr = make_frame(m.metric, p);
  critical_pair_report r = critical_pair_check(fr, eval_jet(m.potential.value, p, 2));
  EXPECT_TRUE(r.field_zero);
  EXPECT_FALSE(r.hess_zero);
  EXPECT_FALSE(r.qe0_zero);
  EXPECT_TRUE(r.holds());
}

TEST(CriticalPairs, DetectsInjectedViolation) {
  curvature_terms t;
  t.g = Eigen::MatrixXd::Identity(3, 3);
  t.g_inv = t.g;
  t.df_df = Eigen::MatrixXd::Zero(3, 3);
  t.ricci = Eigen::MatrixXd::Zero(3, 3);
  t.hessian = Eigen::MatrixXd::Zero(3, 3);
  t.hessian(0, 1) = t.hessian(1, 0) = 1.0;
  // Ric + Hess - df df = 0 is forced false here, so craft the bad combination directly
  t.ricci = -t.hessian;
  t.df_df = Eigen::MatrixXd::Zero(3, 3);
  critical_pair_report r = critical_pair_check(t);
  EXPECT_FALSE(r.field_zero);
  EXPECT_TRUE(r.qe0_zero);
  EXPECT_TRUE(r.holds());
}

TEST(Residuals, ReportMergeAndPass) {
  residual_report a, b;
  a.model = "m";
  a.tolerances["x"] = 1e-9;
  a.add({{0.0}, {{"x", 1e-12}}});
  b.tolerances["x"] = 1e-10;
  b.add({{1.0}, {{"x", 5e-10}}});
  residual_report ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  EXPECT_EQ(ab.aggregates, ba.aggregates);
  EXPECT_EQ(ab.tolerances, ba.tolerances);
  EXPECT_DOUBLE_EQ(ab.aggregates["x"], 5e-10);
  EXPECT_FALSE(ab.pass());
  EXPECT_TRUE(a.pass());
  residual_report nan;
  nan.tolerances["x"] = 1;
  nan.add({{0.0}, {{"x", NAN}}});
  EXPECT_FALSE(nan.pass());
}
