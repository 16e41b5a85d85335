#include <gtest/gtest.h>

#include "beric/jet.hpp"

using namespace beric;

TEST(Jet, LayoutSizes) {
  EXPECT_EQ(layout_for(3, 0).size, 1u);
  EXPECT_EQ(layout_for(3, 1).size, 4u);
  EXPECT_EQ(layout_for(3, 2).size, 10u);
  EXPECT_EQ(layout_for(3, 3).size, 20u);
  EXPECT_EQ(layout_for(16, 3).size, 1u + 16 + 136 + 816);
  EXPECT_THROW(layout_for(17, 1), std::out_of_range);
  EXPECT_THROW(layout_for(2, 4), std::out_of_range);
}

TEST(Jet, ProductRule) {
  // x*y*x at (2, 3): value 12, d/dx = 2xy = 12, d/dy = x^2 = 4, d2/dx2 = 2y = 6, d2/dxdy = 2x = 4
  jet x = jet::variable(layout_for(2, 3), 0, 2.0);
  jet y = jet::variable(layout_for(2, 3), 1, 3.0);
  jet p = x * y * x;
  EXPECT_DOUBLE_EQ(p.value(), 12);
  EXPECT_DOUBLE_EQ(p.d1(0), 12);
  EXPECT_DOUBLE_EQ(p.d1(1), 4);
  EXPECT_DOUBLE_EQ(p.d2(0, 0), 6);
  EXPECT_DOUBLE_EQ(p.d2(0, 1), 4);
  EXPECT_DOUBLE_EQ(p.d2(1, 0), 4);
  EXPECT_DOUBLE_EQ(p.d2(1, 1), 0);
  EXPECT_DOUBLE_EQ(p.d3(0, 0, 1), 2);
  EXPECT_DOUBLE_EQ(p.d3(1, 0, 0), 2);
  EXPECT_DOUBLE_EQ(p.d3(0, 0, 0), 0);
}

TEST(Jet, Truncation) {
  jet x = jet::variable(layout_for(2, 3), 0, 1.5);
  jet t = (x * x * x).truncated(1);
  EXPECT_EQ(t.order(), 1);
  EXPECT_DOUBLE_EQ(t.d1(0), 3 * 1.5 * 1.5);
  EXPECT_DOUBLE_EQ(t.d2(0, 0), 0);
}
