// Shared test helpers: seeded random data and independent oracles.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "unimech/jets.hpp"
#include "unimech/lie_algebra.hpp"
#include "unimech/unified_product.hpp"

namespace testsupport {

using unimech::Matrix;
using unimech::Vector;

class Rng {
 public:
  explicit Rng(unsigned seed = 12345) : gen_(seed) {}

  double normal() { return nd_(gen_); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }

  Vector vec(Eigen::Index n, double scale = 1.0) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * normal();
    return v;
  }

  /// Cross-product matrix of a random vector.
  Matrix so3_alg(double scale = 1.0) { return hat3(vec(3, scale)); }

  /// Rotation by Rodrigues' formula.
  Matrix so3_group() {
    const Vector w = vec(3);
    const double th = w.norm();
    const Matrix K = hat3(w / th);
    return Matrix::Identity(3, 3) + std::sin(th) * K + (1.0 - std::cos(th)) * K * K;
  }

  Matrix sl2_alg(double scale = 1.0) {
    const Vector v = vec(3, scale);
    Matrix m(2, 2);
    m << v[0], v[1], v[2], -v[0];
    return m;
  }

  /// [[a, b], [c, (1 + b c) / a]] with a bounded away from 0.
  Matrix sl2_group() {
    const double a = uniform(0.5, 1.5) * (normal() < 0 ? -1.0 : 1.0);
    const double b = normal(), c = normal();
    Matrix m(2, 2);
    m << a, b, c, (1.0 + b * c) / a;
    return m;
  }

  unimech::JetElement so3_jet(std::size_t nslots, double scale = 1.0) {
    unimech::JetElement j{{unimech::GroupKind::SO, 3}, so3_group(), {}};
    for (std::size_t i = 0; i < nslots; ++i) j.slots.push_back(so3_alg(scale));
    return j;
  }

  unimech::JetElement sl2_jet(std::size_t nslots, double scale = 1.0) {
    unimech::JetElement j{{unimech::GroupKind::SL, 2}, sl2_group(), {}};
    for (std::size_t i = 0; i < nslots; ++i) j.slots.push_back(sl2_alg(scale));
    return j;
  }

  static Matrix hat3(const Vector& w) {
    Matrix K(3, 3);
    K << 0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0;
    return K;
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> nd_{0.0, 1.0};
};

inline Vector cross(const Vector& a, const Vector& b) {
  Vector r(3);
  r << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
  return r;
}

inline Matrix br(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// Jacobi residual computed from the bracket function on basis triples.
inline double jacobi_oracle(const unimech::LieAlgebra& a) {
  double worst = 0.0;
  const std::size_t n = a.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const Vector x = unimech::basis_vector(n, i), y = unimech::basis_vector(n, j), z = unimech::basis_vector(n, k);
        const Vector s = a.bracket(a.bracket(x, y), z) + a.bracket(a.bracket(y, z), x) + a.bracket(a.bracket(z, x), y);
        worst = std::max(worst, s.cwiseAbs().maxCoeff());
      }
  return worst;
}

/// Printed T^3G product, term by term.
inline unimech::JetElement t3_display(const unimech::JetElement& a, const unimech::JetElement& b) {
  const Matrix &x = a.base, &y = b.base;
  const Matrix yi = y.inverse();
  auto Ad = [&](const Matrix& m) -> Matrix { return yi * m * y; };
  const auto &xi = a.slots, &ze = b.slots;
  unimech::JetElement r{a.group, x * y, {}};
  r.slots.push_back(ze[0] + Ad(xi[0]));
  r.slots.push_back(ze[1] + Ad(xi[1]) - br(ze[0], Ad(xi[0])));
  r.slots.push_back(ze[2] + Ad(xi[2]) - 2.0 * br(ze[0], Ad(xi[1])) - br(ze[1], Ad(xi[0])) +
                    br(ze[0], br(ze[0], Ad(xi[0]))));
  return r;
}

/// Printed T^4G product, term by term.
inline unimech::JetElement t4_display(const unimech::JetElement& a, const unimech::JetElement& b) {
  unimech::JetElement head_a{a.group, a.base, {a.slots[0], a.slots[1], a.slots[2]}};
  unimech::JetElement head_b{b.group, b.base, {b.slots[0], b.slots[1], b.slots[2]}};
  unimech::JetElement r = t3_display(head_a, head_b);
  const Matrix yi = b.base.inverse();
  auto Ad = [&](const Matrix& m) -> Matrix { return yi * m * b.base; };
  const auto &xi = a.slots, &z = b.slots;
  const Matrix A1 = Ad(xi[0]);
  r.slots.push_back(z[3] + Ad(xi[3]) - 3.0 * br(z[0], Ad(xi[2])) - 3.0 * br(z[1], Ad(xi[1])) +
                    3.0 * br(z[0], br(z[0], Ad(xi[1]))) + 2.0 * br(z[1], br(z[0], A1)) + br(z[0], br(z[1], A1)) -
                    br(z[2], A1) - br(z[0], br(z[0], br(z[0], A1))));
  return r;
}

}  // namespace testsupport
