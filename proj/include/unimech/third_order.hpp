#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "unimech/dynamics.hpp"
#include "unimech/errors.hpp"
#include "unimech/jets.hpp"
#include "unimech/lie_algebra.hpp"
#include "unimech/unified_product.hpp"

namespace unimech {

/// Matrix realization of a Lie algebra: hat maps coordinates to matrices,
/// vee is its left inverse on the span of the basis.
class MatrixLieAlgebra {
 public:
  MatrixLieAlgebra(GroupTag group, std::vector<Matrix> basis, std::vector<std::string> labels = {})
      : group_(group), basis_(std::move(basis)) {
    if (basis_.empty()) throw InvalidArgument("MatrixLieAlgebra needs a basis");
    const auto d = static_cast<Eigen::Index>(group_.d);
    const auto n = static_cast<Eigen::Index>(basis_.size());
    Matrix stacked(d * d, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      const Matrix& e = basis_[static_cast<std::size_t>(a)];
      if (e.rows() != d || e.cols() != d) throw DimensionError("basis matrix has the wrong shape");
      stacked.col(a) = e.reshaped();
    }
    qr_ = stacked.colPivHouseholderQr();
    if (qr_.rank() != n) throw InvalidArgument("basis matrices are linearly dependent");
    Tensor3 c(basis_.size(), basis_.size(), basis_.size());
    for (std::size_t i = 0; i < basis_.size(); ++i)
      for (std::size_t j = 0; j < basis_.size(); ++j) {
        const Vector v = vee(commutator(basis_[i], basis_[j]));
        for (std::size_t k = 0; k < basis_.size(); ++k) c(k, i, j) = std::abs(v[k]) < 1e-14 ? 0.0 : v[k];
      }
    algebra_ = LieAlgebra::from_tensor(std::move(c), std::move(labels));
  }

  const GroupTag& group() const { return group_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Matrix>& basis() const { return basis_; }
  const LieAlgebra& algebra() const { return algebra_; }

  Matrix hat(const Vector& x) const {
    detail::require_dim(static_cast<std::size_t>(x.size()), dim(), "hat");
    Matrix m = zero_matrix(group_.d);
    for (std::size_t a = 0; a < dim(); ++a) m += x[static_cast<Eigen::Index>(a)] * basis_[a];
    return m;
  }

  Vector vee(const Matrix& m) const {
    if (m.rows() != group_.d || m.cols() != group_.d) throw DimensionError("vee: matrix has the wrong shape");
    return qr_.solve(Vector(m.reshaped()));
  }

  Matrix exp(const Vector& x) const { return hat(x).exp(); }

 private:
  GroupTag group_;
  std::vector<Matrix> basis_;
  Eigen::ColPivHouseholderQR<Matrix> qr_;
  LieAlgebra algebra_;
};

namespace matrix_algebras {

/// hat(w) v = w x v; [E1, E2] = E3.
inline MatrixLieAlgebra so3() {
  std::vector<Matrix> b(3, zero_matrix(3));
  b[0](2, 1) = 1;
  b[0](1, 2) = -1;
  b[1](0, 2) = 1;
  b[1](2, 0) = -1;
  b[2](1, 0) = 1;
  b[2](0, 1) = -1;
  return MatrixLieAlgebra({GroupKind::SO, 3}, std::move(b), {"L1", "L2", "L3"});
}

/// (H, E, F) with [H,E] = 2E, [H,F] = -2F, [E,F] = H.
inline MatrixLieAlgebra sl2() {
  std::vector<Matrix> b(3, zero_matrix(2));
  b[0](0, 0) = 1;
  b[0](1, 1) = -1;
  b[1](0, 1) = 1;
  b[2](1, 0) = 1;
  return MatrixLieAlgebra({GroupKind::SL, 2}, std::move(b), {"H", "E", "F"});
}

inline MatrixLieAlgebra by_name(const std::string& name) {
  if (name == "so3") return so3();
  if (name == "sl2") return sl2();
  throw UnknownPreset("no matrix realization for algebra '" + name + "'");
}

}  // namespace matrix_algebras

// ---------------------------------------------------------------------------
// Third-order Euler-Poincaré

/// State (pi0, pi1, pi2) flattened; eta = I^{-1} pi.
inline Vector ep3_field(const LieAlgebra& g, const EnergySpec& spec, const Vector& pi) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  detail::require_dim(static_cast<std::size_t>(pi.size()), 3 * g.dim(), "ep3_field");
  if (spec.kind() != EnergySpec::Kind::quadratic) throw InvalidArgument("ep3_field needs a quadratic energy");
  detail::require_dim(spec.dim(), 3 * g.dim(), "ep3_field (energy)");
  const Vector eta = spec.inverse_inertia() * pi;
  const Vector e0 = eta.segment(0, n), e1 = eta.segment(n, n), e2 = eta.segment(2 * n, n);
  const Vector p0 = pi.segment(0, n), p1 = pi.segment(n, n), p2 = pi.segment(2 * n, n);
  const Matrix c0 = g.coad_matrix(e0), c1 = g.coad_matrix(e1), c2 = g.coad_matrix(e2);
  Vector out(3 * n);
  out << -(c0 * p0) - c1 * p1 - c2 * p2, -(c0 * p1) - 2.0 * (c1 * p2), -(c0 * p2);
  return out;
}

/// (g ⋉ g) ⋉_theta g: m = tangent(g), h = g as an abelian algebra,
/// psi(zeta, (v0, v1)) = [zeta, v0], theta((a0, a1), (b0, b1)) = -2 [b1, a1].
inline UnifiedProductData ep3_product(const LieAlgebra& g) {
  const std::size_t n = g.dim();
  const LieAlgebra m = presets::tangent(g);
  std::vector<std::string> h_labels;
  for (const auto& l : g.labels()) h_labels.push_back("dd" + l);
  LieAlgebra h = LieAlgebra::from_entries(n, {}, h_labels, g.tol());
  Tensor3 act(2 * n, n, 2 * n), phi = m.constants(), theta(n, 2 * n, 2 * n), psi(n, n, 2 * n);
  const Tensor3& c = g.constants();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        psi(k, i, j) = c(k, i, j);
        theta(k, n + i, n + j) = -2.0 * c(k, j, i);
      }
  return UnifiedProductData(2 * n, std::move(h), std::move(act), std::move(phi), std::move(theta), std::move(psi),
                            m.labels(), g.tol());
}

/// Residual series of (d/dt + ad*_{eta0})(pi0 - d/dt pi1 + d^2/dt^2 pi2) along
/// a uniformly sampled ep3 trajectory. First derivatives of the momenta are the
/// field values; the remaining derivatives use 4th-order central stencils on
/// those samples. One entry per interior point (indices 2 .. N-3).
struct ThirdOrderResidual {
  std::vector<std::size_t> index;
  std::vector<double> residual;

  double max() const {
    double m = 0.0;
    for (double r : residual) m = std::max(m, r);
    return m;
  }
};

inline ThirdOrderResidual third_order_identity_residual(const LieAlgebra& g, const EnergySpec& spec,
                                                        const Trajectory& tr) {
  if (tr.size() < 5) throw TooFewPoints("third_order_identity_residual needs at least 5 samples");
  const double h = tr.t[1] - tr.t[0];
  if (!(h > 0.0)) throw InvalidArgument("trajectory must be sampled with a positive step");
  for (std::size_t i = 1; i < tr.size(); ++i)
    if (std::abs((tr.t[i] - tr.t[i - 1]) - h) > 1e-9 * h) throw InvalidArgument("trajectory is not uniformly sampled");
  const auto n = static_cast<Eigen::Index>(g.dim());
  std::vector<Vector> dp;
  dp.reserve(tr.size());
  for (const auto& s : tr.states) dp.push_back(ep3_field(g, spec, s));
  auto seg = [n](const Vector& v, int b) -> Vector { return v.segment(b * n, n); };
  ThirdOrderResidual out;
  for (std::size_t i = 2; i + 2 < tr.size(); ++i) {
    const Vector &fm2 = dp[i - 2], &fm1 = dp[i - 1], &f0 = dp[i], &fp1 = dp[i + 1], &fp2 = dp[i + 2];
    const Vector d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    const Vector d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    const Vector& pi = tr.states[i];
    const Vector eta0 = seg(spec.inverse_inertia() * pi, 0);
    const Vector q = seg(pi, 0) - seg(f0, 1) + seg(d1, 2);
    const Vector dq = seg(f0, 0) - seg(d1, 1) + seg(d2, 2);
    out.index.push_back(i);
    out.residual.push_back((dq + g.coad_matrix(eta0) * q).norm());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Euler-Lagrange equations on T(T^2G)

/// L(g, xi1, xi2, eta) with eta = (eta0, eta1, eta2) flattened.
using TT2GLagrangian = std::function<double(const Matrix&, const Vector&, const Vector&, const Vector&)>;

struct TT2GState {
  Matrix g;
  Vector xi1, xi2;
  Vector eta;  // (eta0, eta1, eta2)
};

namespace el_detail {

inline double fd_step(double eps, double x) { return eps * std::max(1.0, std::abs(x)); }

}  // namespace el_detail

/// delta L / delta eta by central differences.
inline Vector fiber_derivative(const TT2GLagrangian& L, const TT2GState& s, double eps = 1e-6) {
  Vector e = s.eta, out(s.eta.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const double x = e[i], hs = el_detail::fd_step(eps, x);
    e[i] = x + hs;
    const double fp = L(s.g, s.xi1, s.xi2, e);
    e[i] = x - hs;
    const double fm = L(s.g, s.xi1, s.xi2, e);
    e[i] = x;
    out[i] = (fp - fm) / (2.0 * hs);
  }
  return out;
}

/// Left-trivialized group gradient: <T*L_g dL/dg, E_a> = d/ds L(g exp(s E_a)).
inline Vector left_trivialized_gradient(const MatrixLieAlgebra& alg, const TT2GLagrangian& L, const TT2GState& s,
                                        double eps = 1e-6) {
  Vector out(static_cast<Eigen::Index>(alg.dim()));
  for (std::size_t a = 0; a < alg.dim(); ++a) {
    const Matrix gp = s.g * (eps * alg.basis()[a]).exp();
    const Matrix gm = s.g * (-eps * alg.basis()[a]).exp();
    out[static_cast<Eigen::Index>(a)] = (L(gp, s.xi1, s.xi2, s.eta) - L(gm, s.xi1, s.xi2, s.eta)) / (2.0 * eps);
  }
  return out;
}

inline Vector partial_xi(const TT2GLagrangian& L, const TT2GState& s, int which, double eps = 1e-6) {
  TT2GState t = s;
  Vector& x = which == 1 ? t.xi1 : t.xi2;
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x[i], hs = el_detail::fd_step(eps, v);
    x[i] = v + hs;
    const double fp = L(t.g, t.xi1, t.xi2, t.eta);
    x[i] = v - hs;
    const double fm = L(t.g, t.xi1, t.xi2, t.eta);
    x[i] = v;
    out[i] = (fp - fm) / (2.0 * hs);
  }
  return out;
}

/// Right-hand sides of the three momentum equations at the given velocities.
inline Vector el_t_t2g_rhs(const MatrixLieAlgebra& alg, const TT2GLagrangian& L, const TT2GState& s,
                           double eps = 1e-6) {
  const LieAlgebra& g = alg.algebra();
  const auto n = static_cast<Eigen::Index>(g.dim());
  detail::require_dim(static_cast<std::size_t>(s.eta.size()), 3 * g.dim(), "el_t_t2g (eta)");
  detail::require_dim(static_cast<std::size_t>(s.xi1.size()), g.dim(), "el_t_t2g (xi1)");
  detail::require_dim(static_cast<std::size_t>(s.xi2.size()), g.dim(), "el_t_t2g (xi2)");
  const Vector p = fiber_derivative(L, s, eps);
  const Vector p0 = p.segment(0, n), p1 = p.segment(n, n), p2 = p.segment(2 * n, n);
  const Vector e0 = s.eta.segment(0, n), e1 = s.eta.segment(n, n), e2 = s.eta.segment(2 * n, n);
  const Vector tg = left_trivialized_gradient(alg, L, s, eps);
  const Vector l1 = partial_xi(L, s, 1, eps), l2 = partial_xi(L, s, 2, eps);
  auto C = [&g](const Vector& a) { return g.coad_matrix(a); };
  Vector out(3 * n);
  out << tg - C(s.xi1) * l1 - C(s.xi2) * l2 - C(e0) * p0 - C(e1) * p1 - C(e2) * p2,
      l1 - C(s.xi1) * l2 - C(e0) * p1 - 2.0 * (C(e1) * p2),
      l2 - C(e0) * p2;
  return out;
}

/// Solves dL/deta (g, xi1, xi2, eta) = p for eta by Newton iteration with a
/// finite-difference Hessian, starting from s.eta.
inline Vector solve_fiber_map(const TT2GLagrangian& L, const TT2GState& s, const Vector& p, double tol = 1e-10,
                              int max_iter = 50) {
  detail::require_dim(static_cast<std::size_t>(p.size()), static_cast<std::size_t>(s.eta.size()), "solve_fiber_map");
  TT2GState t = s;
  const double hh = 1e-4;
  const Eigen::Index m = p.size();
  for (int it = 0; it < max_iter; ++it) {
    const Vector r = fiber_derivative(L, t) - p;
    if (!r.allFinite()) throw SingularFiberMap("fiber map produced non-finite values");
    if (r.cwiseAbs().maxCoeff() <= tol * std::max(1.0, p.cwiseAbs().maxCoeff())) return t.eta;
    Matrix H(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      TT2GState a = t, b = t;
      a.eta[j] += hh;
      b.eta[j] -= hh;
      H.col(j) = (fiber_derivative(L, a) - fiber_derivative(L, b)) / (2.0 * hh);
    }
    Eigen::FullPivLU<Matrix> lu(H);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) throw SingularFiberMap("fiber map Hessian is singular");
    t.eta -= lu.solve(r);
  }
  throw SingularFiberMap("fiber map inversion did not converge");
}

/// Momentum-form field: given the momenta p = dL/deta, recovers eta through
/// the fiber map and evaluates the three right-hand sides.
inline Vector el_t_t2g_field(const MatrixLieAlgebra& alg, const TT2GLagrangian& L, const Matrix& g, const Vector& xi1,
                             const Vector& xi2, const Vector& p, const Vector& eta_guess, double eps = 1e-6) {
  TT2GState s{g, xi1, xi2, eta_guess};
  s.eta = solve_fiber_map(L, s, p);
  return el_t_t2g_rhs(alg, L, s, eps);
}

}  // namespace unimech
