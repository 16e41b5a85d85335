#include <gtest/gtest.h>

#include <numbers>

#include "beric/chart.hpp"

using namespace beric;

TEST(Chart, Validation) {
  EXPECT_THROW(chart({{"x", 0, 1, false}}), error);
  EXPECT_THROW(chart({{"x", 0, 1, false}, {"x", 0, 1, false}}), error);
  EXPECT_THROW(chart({{"x", 1, 1, false}, {"y", 0, 1, false}}), error);
  chart c({{"x", 0, 1, true}, {"y", 0, 2, false}});
  EXPECT_EQ(c.index_of("y"), 1);
  EXPECT_EQ(c.index_of("q"), -1);
  EXPECT_FALSE(c.fully_periodic());
}

TEST(Chart, SymmetricStorage) {
  sym_matrix<double> m(3, 0.0);
  m(0, 2) = 5;
  EXPECT_EQ(m(2, 0), 5);
  EXPECT_EQ(m.packed().size(), 6u);
}

TEST(Chart, GridNodesAndWeights) {
  chart c({{"x", 0, 2 * std::numbers::pi, true}, {"y", 0, 1, false}});
  sample_grid g(c, {4, 2});
  EXPECT_EQ(g.size(), 8u);
  double total = 0;
  bool has_zero = false, has_quarter = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    total += g.weight(i);
    auto p = g.point(i);
    has_zero = has_zero || p[0] == 0.0;
    has_quarter = has_quarter || p[1] == 0.25;
  }
  EXPECT_NEAR(total, 2 * std::numbers::pi, 1e-14);
  EXPECT_TRUE(has_zero);
  EXPECT_TRUE(has_quarter);
  EXPECT_THROW(sample_grid(c, {4}), config_error);
}

TEST(Chart, Signature) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(0, 0) = -1;
  const double p[] = {0, 0, 0};
  signature s = signature_of(m, p);
  EXPECT_EQ(s.positive, 2);
  EXPECT_EQ(s.negative, 1);
  m(0, 0) = 1e-12;
  EXPECT_THROW(signature_of(m, p), singular_metric_error);
}
