#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "unimech/dynamics.hpp"
#include "unimech/errors.hpp"
#include "unimech/lie_algebra.hpp"
#include "unimech/unified_product.hpp"

namespace unimech {

// ---------------------------------------------------------------------------
// Kepler energy-momentum algebra

struct KeplerParams {
  double e = -0.5;
  double m = 1.0;
  double k = 1.0;

  double coupling() const { return 2.0 * e / (m * m * m * k * k); }
  void validate() const {
    if (!(m > 0.0) || !(k > 0.0)) throw InvalidArgument("kepler: m and k must be positive");
    if (!std::isfinite(e)) throw InvalidArgument("kepler: e must be finite");
  }
};

namespace model_detail {

inline double levi_civita(std::size_t i, std::size_t j, std::size_t k) {
  if (i == j || j == k || i == k) return 0.0;
  return ((j + 3 - i) % 3 == 1) ? 1.0 : -1.0;
}

inline Vector cross(const Vector& a, const Vector& b) {
  Vector r(3);
  r << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
  return r;
}

}  // namespace model_detail

/// m = R^3 (v), h = so(3) (eta) with [eta, beta] = eta x beta,
/// eta ▷ v = eta x v, theta(v, w) = c v x w, phi = psi = 0.
inline UnifiedProductData kepler_algebra(const KeplerParams& p) {
  p.validate();
  const double c = p.coupling();
  LieAlgebra h = LieAlgebra::from_tensor(presets::so3().constants(), {"eta1", "eta2", "eta3"});
  Tensor3 act(3, 3, 3), phi(3, 3, 3), theta(3, 3, 3), psi(3, 3, 3);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const double eps = model_detail::levi_civita(k, i, j);
        act(k, i, j) = eps;
        theta(k, i, j) = c * eps;
      }
  return UnifiedProductData(3, std::move(h), std::move(act), std::move(phi), std::move(theta), std::move(psi),
                            {"v1", "v2", "v3"});
}

/// Differences between the generic fields and the printed cross-product
/// equations, per block.
struct RegressionResidual {
  std::vector<std::string> blocks;
  std::vector<double> ep;
  std::vector<double> lp;

  double max_ep() const { return ep.empty() ? 0.0 : *std::max_element(ep.begin(), ep.end()); }
  double max_lp() const { return lp.empty() ? 0.0 : *std::max_element(lp.begin(), lp.end()); }
  double max() const { return std::max(max_ep(), max_lp()); }
};

/// Printed Kepler Euler-Poincaré equations, with (v, eta) = I^{-1} pi.
inline Split kepler_printed_ep(double c, const EnergySpec& spec, const Split& pi) {
  using model_detail::cross;
  const Split x = Split::from_flat(spec.inverse_inertia() * pi.flat(), 3, 3);
  return {cross(pi.m, x.h) + c * cross(pi.h, x.m), cross(pi.h, x.h) - cross(x.m, pi.m)};
}

/// Printed Kepler Lie-Poisson equations.
inline Split kepler_printed_lp(double c, const EnergySpec& spec, const Split& mu) {
  using model_detail::cross;
  const Split g = Split::from_flat(spec.gradient(mu.flat(), Side::momentum), 3, 3);
  return {-cross(mu.m, g.h) + c * cross(g.m, mu.h), cross(g.h, mu.h) + cross(g.m, mu.m)};
}

inline RegressionResidual kepler_regression(const UnifiedProductData& d, double c, const EnergySpec& spec,
                                            const Split& state) {
  const Split ge = ep_field(d, spec, state), pe = kepler_printed_ep(c, spec, state);
  const Split gl = lp_field(d, spec, state), pl = kepler_printed_lp(c, spec, state);
  auto dist = [](const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); };
  return {{"v", "eta"}, {dist(ge.m, pe.m), dist(ge.h, pe.h)}, {dist(gl.m, pl.m), dist(gl.h, pl.h)}};
}

// ---------------------------------------------------------------------------
// Four-field (tokamak) algebra over a finite-dimensional base algebra

struct TokamakParams {
  LieAlgebra base;
  double B = 1.0;
};

/// m = (v, beta), h = (w, alpha), each block a copy of the base algebra.
inline UnifiedProductData tokamak_algebra(const TokamakParams& p) {
  const ValidationReport vr = p.base.validate();
  if (!vr.passed()) throw InvalidArgument("tokamak: base algebra is not a Lie algebra");
  const std::size_t n = p.base.dim();
  const Tensor3& c = p.base.constants();
  // h bracket: ([alpha, w'] + [w, alpha'], [alpha, alpha'])
  Tensor3 ch(2 * n, 2 * n, 2 * n);
  Tensor3 act(2 * n, 2 * n, 2 * n), phi(2 * n, 2 * n, 2 * n), theta(2 * n, 2 * n, 2 * n), psi(2 * n, 2 * n, 2 * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double v = c(k, i, j);
        ch(k, n + i, j) += v;      // [alpha, w']
        ch(k, i, n + j) += v;      // [w, alpha']
        ch(n + k, n + i, n + j) += v;  // [alpha, alpha']
        act(k, n + i, j) = v;      // [alpha, v]
        act(n + k, n + i, n + j) = v;  // [alpha, beta]
        theta(k, n + i, j) += -p.B * v;  // -B [beta, v']
        theta(k, i, n + j) += -p.B * v;  // -B [v, beta']
      }
  std::vector<std::string> hl, ml;
  for (const auto& l : p.base.labels()) ml.push_back("v." + l);
  for (const auto& l : p.base.labels()) ml.push_back("beta." + l);
  for (const auto& l : p.base.labels()) hl.push_back("w." + l);
  for (const auto& l : p.base.labels()) hl.push_back("alpha." + l);
  LieAlgebra h = LieAlgebra::from_tensor(std::move(ch), std::move(hl), p.base.tol());
  return UnifiedProductData(2 * n, std::move(h), std::move(act), std::move(phi), std::move(theta), std::move(psi),
                            std::move(ml), p.base.tol());
}

namespace model_detail {

struct Blocks4 {
  Vector v, beta, w, alpha;
};

inline Blocks4 blocks(const Vector& x, std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return {x.segment(0, m), x.segment(m, m), x.segment(2 * m, m), x.segment(3 * m, m)};
}

inline Vector join(const Vector& a, const Vector& b, const Vector& c, const Vector& d) {
  Vector r(a.size() + b.size() + c.size() + d.size());
  r << a, b, c, d;
  return r;
}

}  // namespace model_detail

/// Printed tokamak Euler-Poincaré equations; ad* is the base coadjoint
/// matrix, velocities from I^{-1}.
inline Vector tokamak_printed_ep(const LieAlgebra& base, double B, const EnergySpec& spec, const Vector& pi) {
  const std::size_t n = base.dim();
  const auto P = model_detail::blocks(pi, n);
  const auto X = model_detail::blocks(spec.inverse_inertia() * pi, n);
  auto C = [&base](const Vector& a) { return base.coad_matrix(a); };
  return model_detail::join(-(C(X.alpha) * P.v) + B * (C(X.beta) * P.w), -(C(X.alpha) * P.beta) + B * (C(X.v) * P.w),
                            C(X.alpha) * P.w,
                            C(X.w) * P.w + C(X.alpha) * P.alpha - C(X.v) * P.v - C(X.beta) * P.beta);
}

/// Printed tokamak Lie-Poisson equations.
inline Vector tokamak_printed_lp(const LieAlgebra& base, double B, const EnergySpec& spec, const Vector& mu) {
  const std::size_t n = base.dim();
  const auto M = model_detail::blocks(mu, n);
  const auto U = model_detail::blocks(spec.gradient(mu, Side::momentum), n);
  auto C = [&base](const Vector& a) { return base.coad_matrix(a); };
  return model_detail::join(C(U.alpha) * M.v - B * (C(U.beta) * M.w), C(U.alpha) * M.beta - B * (C(U.v) * M.w),
                            -(C(U.alpha) * M.w),
                            -(C(U.w) * M.w) - C(U.alpha) * M.alpha + C(U.v) * M.v + C(U.beta) * M.beta);
}

inline RegressionResidual tokamak_regression(const UnifiedProductData& d, const LieAlgebra& base, double B,
                                             const EnergySpec& spec, const Split& state) {
  const std::size_t n = base.dim();
  const auto ge = model_detail::blocks(ep_field(d, spec, state).flat(), n);
  const auto pe = model_detail::blocks(tokamak_printed_ep(base, B, spec, state.flat()), n);
  const auto gl = model_detail::blocks(lp_field(d, spec, state).flat(), n);
  const auto pl = model_detail::blocks(tokamak_printed_lp(base, B, spec, state.flat()), n);
  auto dist = [](const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); };
  return {{"v", "beta", "w", "alpha"},
          {dist(ge.v, pe.v), dist(ge.beta, pe.beta), dist(ge.w, pe.w), dist(ge.alpha, pe.alpha)},
          {dist(gl.v, pl.v), dist(gl.beta, pl.beta), dist(gl.w, pl.w), dist(gl.alpha, pl.alpha)}};
}

}  // namespace unimech
