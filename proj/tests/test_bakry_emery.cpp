#include <gtest/gtest.h>

#include <cmath>

#include "beric/bakry_emery.hpp"
#include "beric/random_model.hpp"

using namespace beric;

TEST(BeParam, InfinityIsASentinel) {
  be_param inf = be_param::infinity();
  EXPECT_TRUE(inf.is_infinite());
  EXPECT_EQ(inf.reciprocal(), 0.0);
  EXPECT_EQ(inf.to_string(), "inf");
  EXPECT_TRUE(be_param::parse("inf").is_infinite());
  EXPECT_TRUE(be_param(INFINITY).is_infinite());
  EXPECT_DOUBLE_EQ(be_param::parse("-2.5").value(), -2.5);
  EXPECT_THROW(be_param(0.0), error);
  EXPECT_THROW(be_param::parse("abc"), config_error);
}

TEST(BakryEmery, TensorAndWeightedScalar) {
  model m = random_analytic_model(3, 11);
  const double p[] = {0.2, -0.3, 0.1};
  point_frame fr = make_frame(m.metric, p);
  jet f = eval_jet(m.potential.value, p, 2);
  Eigen::VectorXd df = differential(f);
  Eigen::MatrixXd base = fr.ricci() + hessian(f, fr);
  EXPECT_LT(max_abs(be_ricci(fr, f, be_param::infinity()) - base), 1e-15);
  EXPECT_LT(max_abs(be_ricci(fr, f, be_param(4.0)) - (base - 0.25 * df * df.transpose())), 1e-14);
  EXPECT_NEAR(weighted_scalar(fr, f), trace2(be_ricci(fr, f, be_param(1.0)), fr), 1e-12);
}

TEST(BakryEmery, GaussianShrinkingSoliton) {
  chart c({{"x", -2, 2, false}, {"y", -2, 2, false}, {"z", -2, 2, false}});
  metric_field g(c);
  for (int i = 0; i < 3; ++i) g(i, i) = constant(1);
  const double lambda = 0.5;
  qe_instance inst{g, {c, c.parse("0.25*(x^2 + y^2 + z^2)")}, be_param::infinity(), lambda};
  const double p[] = {0.4, -1.0, 1.5};
  qe_residual r = quasi_einstein_residual(inst, p);
  EXPECT_LT(r.norm, 1e-14);
  EXPECT_EQ(r.kind, qe_kind::shrinking);
  EXPECT_EQ(classify(-1), qe_kind::expanding);
  EXPECT_EQ(classify(0), qe_kind::steady);

  std::vector<Eigen::MatrixXd> be, gs;
  for (double t : {0.1, 0.7}) {
    const double q[] = {t, 0.2, -t};
    point_frame fr = make_frame(g, q);
    be.push_back(be_ricci(fr, eval_jet(inst.f.value, q, 2), inst.m));
    gs.push_back(fr.g());
  }
  EXPECT_NEAR(best_fit_lambda(be, gs), lambda, 1e-14);
}

class Projective : public ::testing::TestWithParam<int> {};

TEST_P(Projective, AffineRicciIsBakryEmeryWithNegativeM) {
  const int n = GetParam();
  for (int k = 0; k < 4; ++k) {
    model m = random_analytic_model(n, 300 + 10 * n + k, k % 2);
    affine_conn conn = projective_conn(m.metric, projective_form(m.potential));
    rng r(k);
    for (const auto& p : random_points(m.domain, 2, r, 0.1)) {
      point_frame fr = make_frame(m.metric, p);
      Eigen::MatrixXd target = be_ricci(fr, eval_jet(m.potential.value, p, 2), be_param(1.0 - n));
      Eigen::MatrixXd ric = affine_ricci(conn, p);
      EXPECT_LT(max_abs(ric - target), 1e-10 * std::max(1.0, max_abs(target))) << m.name;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, Projective, ::testing::Values(2, 3, 4));

TEST(Projective, ZeroFormGivesLeviCivitaRicci) {
  model m = random_analytic_model(3, 5);
  std::vector<expr> alpha(3, constant(0));
  affine_conn conn = projective_conn(m.metric, alpha);
  const double p[] = {0.1, 0.2, 0.3};
  EXPECT_LT(max_abs(affine_ricci(conn, p) - make_frame(m.metric, p).ricci()), 1e-12);
}
