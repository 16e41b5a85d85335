#pragma once

// Seeded generators of smooth test instances. Uses its own uniform mapping on
// top of mt19937_64 so that instances are identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "beric/chart.hpp"
#include "beric/expr.hpp"
#include "beric/model.hpp"

namespace beric {

class rng {
 public:
  explicit rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 eng_;
};

/// sum_k amp_k sin(w_k . x + phase_k) with integer wave vectors (|w_i| <= 2),
/// periodic on [0, 2 pi)^n.
inline expr random_periodic(rng& r, int dim, int terms, double amplitude) {
  expr sum = constant(0);
  for (int k = 0; k < terms; ++k) {
    expr arg = constant(r.uniform(0, 2 * std::numbers::pi));
    bool any = false;
    for (int i = 0; i < dim; ++i) {
      int w = r.integer(-2, 2);
      if (w == 0) continue;
      any = true;
      arg = arg + constant(w) * variable(i);
    }
    if (!any) arg = arg + variable(r.integer(0, dim - 1));
    expr term = constant(r.uniform(-amplitude, amplitude)) * unary(op::sin, arg);
    sum = is_constant_zero(sum) ? term : sum + term;
  }
  return sum;
}

inline chart torus_chart(int n) {
  static const char* names[] = {"x", "y", "z", "w"};
  std::vector<axis> axes;
  for (int i = 0; i < n; ++i)
    axes.push_back({i < 4 ? names[i] : "x" + std::to_string(i), 0.0, 2 * std::numbers::pi, true});
  return chart(std::move(axes));
}

/// Random smooth metric, potential and variation directions on the flat
/// n-torus. The metric is diagonally dominant, hence of fixed signature; with
/// `lorentzian` the first axis is timelike.
inline model random_torus_model(int n, std::uint64_t seed, bool lorentzian = false,
                                int grid_nodes = 64) {
  rng r(seed);
  chart c = torus_chart(n);
  model m;
  m.name = "random-torus:n=" + std::to_string(n) + (lorentzian ? ",lorentzian" : "") +
           ":seed=" + std::to_string(seed);
  m.domain = c;
  m.metric = metric_field(c);
  for (int i = 0; i < n; ++i) {
    expr d = constant(1) + random_periodic(r, n, 2, 0.12);
    m.metric(i, i) = (lorentzian && i == 0) ? -d : d;
    for (int j = i + 1; j < n; ++j) m.metric(i, j) = random_periodic(r, n, 1, 0.05);
  }
  m.potential = {c, random_periodic(r, n, 3, 0.5)};
  sym_tensor_field s(c);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s(i, j) = random_periodic(r, n, 2, 0.3);
  m.perturbation = s;
  m.direction = scalar_field{c, random_periodic(r, n, 2, 0.5)};
  m.grid = std::vector<int>(static_cast<std::size_t>(n), grid_nodes);
  return m;
}

/// Random analytic (not periodic) metric and potential on the box [-1, 1]^n,
/// built from exponentials, trigonometric and polynomial terms.
inline model random_analytic_model(int n, std::uint64_t seed, int negative = 0) {
  rng r(seed);
  std::vector<axis> axes;
  for (int i = 0; i < n; ++i) axes.push_back({"u" + std::to_string(i), -1.0, 1.0, false});
  chart c(std::move(axes));
  auto smooth = [&](double amp) {
    int a = r.integer(0, n - 1), b = r.integer(0, n - 1);
    double k1 = r.uniform(-1.5, 1.5), k2 = r.uniform(-1.5, 1.5);
    expr e = constant(r.uniform(-amp, amp)) *
             unary(op::sin, constant(k1) * variable(a) + constant(r.uniform(0, 3)));
    e = e + constant(r.uniform(-amp, amp)) * variable(a) * variable(b);
    e = e + constant(r.uniform(-amp, amp)) * unary(op::exp, constant(k2) * variable(b)) -
        constant(0) ;
    return e;
  };
  model m;
  m.name = "random-analytic:n=" + std::to_string(n) + ":seed=" + std::to_string(seed);
  m.domain = c;
  m.metric = metric_field(c);
  for (int i = 0; i < n; ++i) {
    expr d = constant(1.5) + smooth(0.1);
    m.metric(i, i) = i < negative ? -d : d;
    for (int j = i + 1; j < n; ++j) m.metric(i, j) = smooth(0.04);
  }
  m.potential = {c, smooth(0.6) + constant(r.uniform(-0.5, 0.5)) * unary(op::cos, variable(r.integer(0, n - 1)))};
  return m;
}

/// Uniform random points inside the chart box, shrunk by `margin` on each side.
inline std::vector<std::vector<double>> random_points(const chart& c, std::size_t count, rng& r,
                                                      double margin = 0.0) {
  std::vector<std::vector<double>> pts;
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> p;
    for (const axis& a : c.axes()) p.push_back(r.uniform(a.lo + margin, a.hi - margin));
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace beric
