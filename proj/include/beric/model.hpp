#pragma once

// A model bundles a chart with a metric, a potential and optional variation
// directions; model_evaluator turns it into jets point by point.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beric/chart.hpp"
#include "beric/expr.hpp"
#include "beric/geometry.hpp"

namespace beric {

struct model {
  std::string name;
  chart domain;
  metric_field metric;
  scalar_field potential;                        // f
  std::optional<sym_tensor_field> perturbation;  // s
  std::optional<scalar_field> direction;         // h
  std::optional<std::vector<int>> grid;
  std::vector<std::vector<double>> points;
  constant_table constants;

  int dim() const { return domain.dim(); }
};

/// Per-point jets of every field of a model.
struct model_sample {
  sym_matrix<jet> g;
  jet f;
  sym_matrix<jet> s;
  jet h;
};

/// Compiles every expression of a model once and evaluates them at points
/// without further allocation. Not thread-safe; use one per thread.
class model_evaluator {
 public:
  explicit model_evaluator(const model& m) : n_(m.dim()) {
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) {
        g_.emplace_back(m.metric(i, j));
        s_.emplace_back(m.perturbation ? (*m.perturbation)(i, j) : constant(0));
      }
    f_ = compiled_expr(m.potential.value);
    h_ = compiled_expr(m.direction ? m.direction->value : constant(0));
    out_.g = sym_matrix<jet>(n_);
    out_.s = sym_matrix<jet>(n_);
  }

  const model_sample& at(std::span<const double> p, int order) {
    auto gp = out_.g.packed();
    auto sp = out_.s.packed();
    for (std::size_t k = 0; k < g_.size(); ++k) {
      gp[k] = g_[k].eval(p, order);
      sp[k] = s_[k].eval(p, order);
    }
    out_.f = f_.eval(p, order);
    out_.h = h_.eval(p, order);
    return out_;
  }

 private:
  int n_;
  std::vector<compiled_expr> g_, s_;
  compiled_expr f_, h_;
  model_sample out_;
};

/// g + t s and f + t h as jets.
inline sym_matrix<jet> perturbed_metric(const model_sample& x, double t) {
  sym_matrix<jet> r(x.g.dim());
  auto out = r.packed();
  auto g = x.g.packed();
  auto s = x.s.packed();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = axpy(g[k], t, s[k]);
  return r;
}

inline jet perturbed_potential(const model_sample& x, double t) { return axpy(x.f, t, x.h); }

}  // namespace beric
