#pragma once

// Coordinate charts and the fields declared over them.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "beric/error.hpp"
#include "beric/expr.hpp"
#include "beric/jet.hpp"

namespace beric {

inline constexpr double nondegeneracy_threshold = 1e-10;

/// Symmetric n x n matrix stored as its upper triangle; (i,j) and (j,i) name the
/// same element.
template <typename T>
class sym_matrix {
 public:
  sym_matrix() = default;
  explicit sym_matrix(int n, const T& init = T{})
      : n_(n), data_(static_cast<std::size_t>(n * (n + 1) / 2), init) {}

  int dim() const { return n_; }
  T& operator()(int i, int j) { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const { return data_[index(i, j)]; }

  std::span<T> packed() { return data_; }
  std::span<const T> packed() const { return data_; }

 private:
  std::size_t index(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i * n_ - i * (i - 1) / 2 + (j - i));
  }

  int n_ = 0;
  std::vector<T> data_;
};

struct axis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;

  double length() const { return hi - lo; }
};

class chart {
 public:
  chart() = default;
  explicit chart(std::vector<axis> axes) : axes_(std::move(axes)) {
    if (axes_.size() < 2) throw config_error("chart dimension must be at least 2");
    if (axes_.size() > static_cast<std::size_t>(max_jet_dim))
      throw config_error("chart dimension exceeds " + std::to_string(max_jet_dim));
    std::set<std::string> seen;
    for (const axis& a : axes_) {
      if (a.name.empty()) throw config_error("empty coordinate name");
      if (!seen.insert(a.name).second) throw config_error("duplicate coordinate '" + a.name + "'");
      if (!(a.hi > a.lo)) throw config_error("empty range for coordinate '" + a.name + "'");
      names_.push_back(a.name);
    }
  }

  int dim() const { return static_cast<int>(axes_.size()); }
  const std::vector<axis>& axes() const { return axes_; }
  const axis& operator[](int i) const { return axes_[static_cast<std::size_t>(i)]; }
  std::span<const std::string> names() const { return names_; }
  bool fully_periodic() const {
    return std::all_of(axes_.begin(), axes_.end(), [](const axis& a) { return a.periodic; });
  }

  int index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return -1;
  }

  expr parse(std::string_view text, const constant_table& consts = {}) const {
    return beric::parse(text, names_, consts);
  }

 private:
  std::vector<axis> axes_;
  std::vector<std::string> names_;
};

/// Symmetric covariant 2-tensor field with expression components.
struct sym_tensor_field {
  chart domain;
  sym_matrix<expr> components;

  sym_tensor_field() = default;
  explicit sym_tensor_field(chart c) : domain(std::move(c)), components(domain.dim()) {}

  int dim() const { return domain.dim(); }
  const expr& operator()(int i, int j) const { return components(i, j); }
  expr& operator()(int i, int j) { return components(i, j); }
};

/// The metric. Nondegeneracy is checked where it is evaluated.
struct metric_field : sym_tensor_field {
  using sym_tensor_field::sym_tensor_field;
};

struct scalar_field {
  chart domain;
  expr value;
};

/// Product grid over a chart. Periodic axes get N uniform nodes without the
/// duplicated endpoint; open axes get N midpoint nodes. Weights are the cell
/// volumes and sum to the coordinate volume of the box.
class sample_grid {
 public:
  sample_grid(const chart& c, std::vector<int> counts) : counts_(std::move(counts)) {
    if (counts_.size() != static_cast<std::size_t>(c.dim()))
      throw config_error("grid needs one node count per axis");
    std::vector<std::vector<double>> nodes;
    weight_ = 1.0;
    periodic_ = c.fully_periodic();
    for (int a = 0; a < c.dim(); ++a) {
      int n = counts_[static_cast<std::size_t>(a)];
      if (n < 1) throw config_error("grid node counts must be positive");
      const axis& ax = c[a];
      double h = ax.length() / n;
      weight_ *= h;
      std::vector<double> xs(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) xs[static_cast<std::size_t>(k)] = ax.lo + (ax.periodic ? k : k + 0.5) * h;
      nodes.push_back(std::move(xs));
    }
    std::size_t total = 1;
    for (int n : counts_) total *= static_cast<std::size_t>(n);
    dim_ = c.dim();
    points_.reserve(total * static_cast<std::size_t>(dim_));
    std::vector<int> idx(static_cast<std::size_t>(dim_), 0);
    for (std::size_t p = 0; p < total; ++p) {
      for (int a = 0; a < dim_; ++a)
        points_.push_back(nodes[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])]);
      for (int a = dim_ - 1; a >= 0; --a) {
        if (++idx[static_cast<std::size_t>(a)] < counts_[static_cast<std::size_t>(a)]) break;
        idx[static_cast<std::size_t>(a)] = 0;
      }
    }
  }

  std::size_t size() const { return points_.size() / static_cast<std::size_t>(dim_); }
  std::span<const double> point(std::size_t i) const {
    return std::span<const double>(points_).subspan(i * static_cast<std::size_t>(dim_),
                                                    static_cast<std::size_t>(dim_));
  }
  double weight(std::size_t) const { return weight_; }
  const std::vector<int>& counts() const { return counts_; }
  bool periodic() const { return periodic_; }

 private:
  std::vector<int> counts_;
  std::vector<double> points_;
  double weight_ = 0.0;
  int dim_ = 0;
  bool periodic_ = false;
};

/// Jets of every component at p, up to `order`.
inline sym_matrix<jet> tensor_jet(const sym_tensor_field& g, std::span<const double> p,
                                  int order = max_jet_order) {
  sym_matrix<jet> out(g.dim());
  for (int i = 0; i < g.dim(); ++i)
    for (int j = i; j < g.dim(); ++j) out(i, j) = eval_jet(g(i, j), p, order);
  return out;
}

inline sym_matrix<jet> metric_jet(const metric_field& g, std::span<const double> p,
                                  int order = max_jet_order) {
  return tensor_jet(g, p, order);
}

inline Eigen::MatrixXd metric_value(const metric_field& g, std::span<const double> p) {
  const int n = g.dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = evaluate(g(i, j), p);
  return m;
}

struct signature {
  int positive = 0;
  int negative = 0;
  friend bool operator==(const signature&, const signature&) = default;
};

/// Eigenvalue sign counts of a symmetric matrix; throws on |det| below threshold.
inline signature signature_of(const Eigen::MatrixXd& m, std::span<const double> where) {
  double det = m.determinant();
  if (!(std::abs(det) >= nondegeneracy_threshold))
    throw singular_metric_error("metric is singular (|det g| = " + std::to_string(std::abs(det)) +
                                ") at point " +
                                detail::format_point({where.begin(), where.end()}));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  signature s;
  for (int i = 0; i < m.rows(); ++i) (es.eigenvalues()(i) > 0 ? s.positive : s.negative)++;
  return s;
}

/// The common signature of g over pts. Throws on a singular sample or a
/// signature change between samples.
inline signature check_nondegenerate(const metric_field& g, std::span<const std::vector<double>> pts) {
  if (pts.empty()) throw error("check_nondegenerate: no sample points");
  signature first = signature_of(metric_value(g, pts[0]), pts[0]);
  for (const auto& p : pts.subspan(1)) {
    signature s = signature_of(metric_value(g, p), p);
    if (!(s == first))
      throw singular_metric_error("metric signature changes between " +
                                  detail::format_point(pts[0]) + " and " + detail::format_point(p));
  }
  return first;
}

}  // namespace beric
