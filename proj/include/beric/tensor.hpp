#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace beric {

/// Dense rank-R array over an n-dimensional index space, row-major.
template <int Rank>
class dense_tensor {
 public:
  dense_tensor() = default;
  explicit dense_tensor(int n) : n_(n), data_(extent(n), 0.0) {}

  int dim() const { return n_; }

  template <typename... I>
    requires(sizeof...(I) == Rank)
  double& operator()(I... idx) {
    return data_[offset(idx...)];
  }
  template <typename... I>
    requires(sizeof...(I) == Rank)
  double operator()(I... idx) const {
    return data_[offset(idx...)];
  }

  const std::vector<double>& data() const { return data_; }

  double max_abs() const {
    double m = 0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  static std::size_t extent(int n) {
    std::size_t e = 1;
    for (int r = 0; r < Rank; ++r) e *= static_cast<std::size_t>(n);
    return e;
  }
  template <typename... I>
  std::size_t offset(I... idx) const {
    std::size_t off = 0;
    ((off = off * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx)), ...);
    return off;
  }

  int n_ = 0;
  std::vector<double> data_;
};

using tensor3 = dense_tensor<3>;
using tensor4 = dense_tensor<4>;
using tensor5 = dense_tensor<5>;

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace beric
