#pragma once

// Truncated multivariate Taylor jets.
//
// A jet of order k over n variables stores a scalar value together with every
// partial derivative up to order k, packed over sorted index tuples:
//   [ value | d1 (n) | d2 (i<=j) | d3 (i<=j<=k) ]
// Symmetry of mixed partials holds by storage. Arithmetic propagates all
// directions at once (forward mode), so a single pass over an expression yields
// the full derivative tensor at a point.

#include <array>
#include <cassert>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace beric {

inline constexpr int max_jet_order = 3;
inline constexpr int max_jet_dim = 16;

/// Index tables for one (dim, order) pair. Built once, shared by all jets.
struct jet_layout {
  int dim = 0;
  int order = 0;
  std::size_t size = 0;
  std::size_t off1 = 1, off2 = 0, off3 = 0;
  std::size_t n_pairs = 0, n_triples = 0;

  std::vector<int> pair_of;                 // n*n -> packed pair id
  std::vector<int> triple_of;               // n*n*n -> packed triple id
  std::vector<std::array<int, 2>> pairs;    // pair id -> (i, j), i <= j
  std::vector<std::array<int, 3>> triples;  // triple id -> (i, j, k), i <= j <= k
  // triple id -> pair ids of (i,j), (i,k), (j,k)
  std::vector<std::array<int, 3>> triple_pairs;

  jet_layout(int n, int k) : dim(n), order(k) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) pairs.push_back({i, j});
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int l = j; l < n; ++l) triples.push_back({i, j, l});
    n_pairs = pairs.size();
    n_triples = triples.size();
    pair_of.assign(static_cast<std::size_t>(n * n), 0);
    for (std::size_t p = 0; p < n_pairs; ++p) {
      auto [i, j] = pairs[p];
      pair_of[i * n + j] = pair_of[j * n + i] = static_cast<int>(p);
    }
    triple_of.assign(static_cast<std::size_t>(n * n * n), 0);
    for (std::size_t q = 0; q < n_triples; ++q) {
      auto [i, j, l] = triples[q];
      const int perms[6][3] = {{i, j, l}, {i, l, j}, {j, i, l}, {j, l, i}, {l, i, j}, {l, j, i}};
      for (auto& pm : perms) triple_of[(pm[0] * n + pm[1]) * n + pm[2]] = static_cast<int>(q);
      triple_pairs.push_back({pair_of[i * n + j], pair_of[i * n + l], pair_of[j * n + l]});
    }
    off1 = 1;
    off2 = off1 + (k >= 1 ? static_cast<std::size_t>(n) : 0);
    off3 = off2 + (k >= 2 ? n_pairs : 0);
    size = off3 + (k >= 3 ? n_triples : 0);
  }

  int pair(int i, int j) const { return pair_of[static_cast<std::size_t>(i * dim + j)]; }
  int triple(int i, int j, int k) const {
    return triple_of[static_cast<std::size_t>((i * dim + j) * dim + k)];
  }
};

/// Shared layout for (dim, order). Layouts live for the program's lifetime.
inline const jet_layout& layout_for(int dim, int order) {
  if (dim < 1 || dim > max_jet_dim || order < 0 || order > max_jet_order)
    throw std::out_of_range("jet layout: dim or order out of range");
  static const std::vector<jet_layout> table = [] {
    std::vector<jet_layout> t;
    for (int n = 1; n <= max_jet_dim; ++n)
      for (int k = 0; k <= max_jet_order; ++k) t.emplace_back(n, k);
    return t;
  }();
  return table[static_cast<std::size_t>((dim - 1) * (max_jet_order + 1) + order)];
}

class jet {
 public:
  jet() = default;
  explicit jet(const jet_layout& layout) : layout_(&layout), c_(layout.size, 0.0) {}
  jet(int dim, int order) : jet(layout_for(dim, order)) {}

  static jet constant(const jet_layout& layout, double v) {
    jet j(layout);
    j.c_[0] = v;
    return j;
  }
  /// The coordinate function x^i evaluated at value v.
  static jet variable(const jet_layout& layout, int i, double v) {
    jet j(layout);
    j.c_[0] = v;
    if (layout.order >= 1) j.c_[layout.off1 + static_cast<std::size_t>(i)] = 1.0;
    return j;
  }

  const jet_layout& layout() const { return *layout_; }
  bool empty() const { return layout_ == nullptr; }
  int dim() const { return layout_->dim; }
  int order() const { return layout_->order; }

  double value() const { return c_[0]; }
  double d1(int i) const {
    return layout_->order >= 1 ? c_[layout_->off1 + static_cast<std::size_t>(i)] : 0.0;
  }
  double d2(int i, int j) const {
    return layout_->order >= 2 ? c_[layout_->off2 + static_cast<std::size_t>(layout_->pair(i, j))]
                               : 0.0;
  }
  double d3(int i, int j, int k) const {
    return layout_->order >= 3
               ? c_[layout_->off3 + static_cast<std::size_t>(layout_->triple(i, j, k))]
               : 0.0;
  }

  std::span<double> coeffs() { return c_; }
  std::span<const double> coeffs() const { return c_; }

  /// Re-targets this jet to a layout, reusing storage; contents are zeroed.
  void reset(const jet_layout& layout) {
    layout_ = &layout;
    c_.assign(layout.size, 0.0);
  }

  /// Copy with derivatives above `order` dropped.
  jet truncated(int order) const;

  jet& operator+=(const jet& o);
  jet& operator-=(const jet& o);
  jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }

 private:
  const jet_layout* layout_ = nullptr;
  std::vector<double> c_;
};

// ---------------------------------------------------------------------------
// Kernels. `out` must not alias an input unless noted; it is re-targeted to the
// inputs' layout.

inline void jet_add(const jet& a, const jet& b, jet& out, double sb = 1.0) {
  assert(&a.layout() == &b.layout());
  out.reset(a.layout());
  auto o = out.coeffs();
  auto x = a.coeffs();
  auto y = b.coeffs();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] + sb * y[i];
}

inline void jet_scale(const jet& a, double s, jet& out) {
  out.reset(a.layout());
  auto o = out.coeffs();
  auto x = a.coeffs();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = s * x[i];
}

inline void jet_mul(const jet& a, const jet& b, jet& out) {
  assert(&a.layout() == &b.layout());
  const jet_layout& L = a.layout();
  out.reset(L);
  auto o = out.coeffs();
  auto x = a.coeffs();
  auto y = b.coeffs();
  const double a0 = x[0], b0 = y[0];
  o[0] = a0 * b0;
  if (L.order < 1) return;
  const double* a1 = x.data() + L.off1;
  const double* b1 = y.data() + L.off1;
  for (int i = 0; i < L.dim; ++i) o[L.off1 + i] = a1[i] * b0 + a0 * b1[i];
  if (L.order < 2) return;
  const double* a2 = x.data() + L.off2;
  const double* b2 = y.data() + L.off2;
  for (std::size_t p = 0; p < L.n_pairs; ++p) {
    auto [i, j] = L.pairs[p];
    o[L.off2 + p] = a2[p] * b0 + a1[i] * b1[j] + a1[j] * b1[i] + a0 * b2[p];
  }
  if (L.order < 3) return;
  const double* a3 = x.data() + L.off3;
  const double* b3 = y.data() + L.off3;
  for (std::size_t q = 0; q < L.n_triples; ++q) {
    auto [i, j, k] = L.triples[q];
    auto [ij, ik, jk] = L.triple_pairs[q];
    o[L.off3 + q] = a3[q] * b0 + a2[ij] * b1[k] + a2[ik] * b1[j] + a2[jk] * b1[i] +
                    a1[i] * b2[jk] + a1[j] * b2[ik] + a1[k] * b2[ij] + a0 * b3[q];
  }
}

/// out = phi(a), given phi and its first three derivatives at a.value().
inline void jet_compose(const jet& a, const std::array<double, 4>& phi, jet& out) {
  const jet_layout& L = a.layout();
  out.reset(L);
  auto o = out.coeffs();
  auto x = a.coeffs();
  o[0] = phi[0];
  if (L.order < 1) return;
  const double* a1 = x.data() + L.off1;
  for (int i = 0; i < L.dim; ++i) o[L.off1 + i] = phi[1] * a1[i];
  if (L.order < 2) return;
  const double* a2 = x.data() + L.off2;
  for (std::size_t p = 0; p < L.n_pairs; ++p) {
    auto [i, j] = L.pairs[p];
    o[L.off2 + p] = phi[2] * a1[i] * a1[j] + phi[1] * a2[p];
  }
  if (L.order < 3) return;
  const double* a3 = x.data() + L.off3;
  for (std::size_t q = 0; q < L.n_triples; ++q) {
    auto [i, j, k] = L.triples[q];
    auto [ij, ik, jk] = L.triple_pairs[q];
    o[L.off3 + q] = phi[3] * a1[i] * a1[j] * a1[k] +
                    phi[2] * (a2[ij] * a1[k] + a2[ik] * a1[j] + a2[jk] * a1[i]) +
                    phi[1] * a3[q];
  }
}

inline jet jet::truncated(int order) const {
  const jet_layout& L = layout_for(dim(), order);
  jet r(L);
  auto o = r.coeffs();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = c_[i];
  return r;
}

inline jet& jet::operator+=(const jet& o) {
  assert(layout_ == o.layout_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

inline jet& jet::operator-=(const jet& o) {
  assert(layout_ == o.layout_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

inline jet operator+(jet a, const jet& b) { return a += b; }
inline jet operator-(jet a, const jet& b) { return a -= b; }
inline jet operator*(double s, jet a) { return a *= s; }
inline jet operator*(const jet& a, const jet& b) {
  jet r;
  jet_mul(a, b, r);
  return r;
}

/// a + t*b, the jet of a linear perturbation.
inline jet axpy(const jet& a, double t, const jet& b) {
  jet r;
  jet_add(a, b, r, t);
  return r;
}

}  // namespace beric
