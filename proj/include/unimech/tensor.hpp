#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "unimech/errors.hpp"

namespace unimech {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense rank-3 tensor T(k, i, j) holding the coefficients of a bilinear map
/// B(x, y) = sum_{k,i,j} T(k,i,j) x_i y_j e_k. The output index comes first.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t out, std::size_t left, std::size_t right)
      : dims_{out, left, right}, data_(out * left * right, 0.0) {}

  std::size_t out_dim() const { return dims_[0]; }
  std::size_t left_dim() const { return dims_[1]; }
  std::size_t right_dim() const { return dims_[2]; }

  double& operator()(std::size_t k, std::size_t i, std::size_t j) {
    return data_[(k * dims_[1] + i) * dims_[2] + j];
  }
  double operator()(std::size_t k, std::size_t i, std::size_t j) const {
    return data_[(k * dims_[1] + i) * dims_[2] + j];
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  /// B(x, y).
  Vector apply(const Vector& x, const Vector& y) const {
    detail::require_dim(static_cast<std::size_t>(x.size()), dims_[1], "Tensor3::apply (left)");
    detail::require_dim(static_cast<std::size_t>(y.size()), dims_[2], "Tensor3::apply (right)");
    Vector r = Vector::Zero(static_cast<Eigen::Index>(dims_[0]));
    for (std::size_t k = 0; k < dims_[0]; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < dims_[1]; ++i) {
        if (x[i] == 0.0) continue;
        for (std::size_t j = 0; j < dims_[2]; ++j) s += (*this)(k, i, j) * x[i] * y[j];
      }
      r[k] = s;
    }
    return r;
  }

  /// Matrix of y -> B(x, y).
  Matrix left_contract(const Vector& x) const {
    detail::require_dim(static_cast<std::size_t>(x.size()), dims_[1], "Tensor3::left_contract");
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dims_[0]), static_cast<Eigen::Index>(dims_[2]));
    for (std::size_t k = 0; k < dims_[0]; ++k)
      for (std::size_t i = 0; i < dims_[1]; ++i)
        for (std::size_t j = 0; j < dims_[2]; ++j) m(k, j) += (*this)(k, i, j) * x[i];
    return m;
  }

  /// Matrix of x -> B(x, y).
  Matrix right_contract(const Vector& y) const {
    detail::require_dim(static_cast<std::size_t>(y.size()), dims_[2], "Tensor3::right_contract");
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dims_[0]), static_cast<Eigen::Index>(dims_[1]));
    for (std::size_t k = 0; k < dims_[0]; ++k)
      for (std::size_t i = 0; i < dims_[1]; ++i)
        for (std::size_t j = 0; j < dims_[2]; ++j) m(k, i) += (*this)(k, i, j) * y[j];
    return m;
  }

  Tensor3& operator+=(const Tensor3& o) {
    if (o.dims_ != dims_) throw DimensionError("Tensor3::operator+=: shape mismatch");
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
    return *this;
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::array<std::size_t, 3> dims_{0, 0, 0};
  std::vector<double> data_;
};

inline Vector basis_vector(std::size_t dim, std::size_t i) {
  Vector e = Vector::Zero(static_cast<Eigen::Index>(dim));
  e[static_cast<Eigen::Index>(i)] = 1.0;
  return e;
}

}  // namespace unimech
