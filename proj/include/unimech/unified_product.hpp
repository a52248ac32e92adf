#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "unimech/errors.hpp"
#include "unimech/lie_algebra.hpp"
#include "unimech/tensor.hpp"

namespace unimech {

/// A vector (v, eta) of m ⊕ h, or a covector (alpha, beta) of m* ⊕ h*.
struct Split {
  Vector m;
  Vector h;

  Split() = default;
  Split(Vector m_part, Vector h_part) : m(std::move(m_part)), h(std::move(h_part)) {}

  static Split zero(std::size_t dim_m, std::size_t dim_h) {
    return {Vector::Zero(static_cast<Eigen::Index>(dim_m)), Vector::Zero(static_cast<Eigen::Index>(dim_h))};
  }

  /// Splits a flat coordinate vector, m-block first.
  static Split from_flat(const Vector& x, std::size_t dim_m, std::size_t dim_h) {
    detail::require_dim(static_cast<std::size_t>(x.size()), dim_m + dim_h, "Split::from_flat");
    const auto dm = static_cast<Eigen::Index>(dim_m), dh = static_cast<Eigen::Index>(dim_h);
    return {x.head(dm), x.tail(dh)};
  }

  Vector flat() const {
    Vector x(m.size() + h.size());
    x << m, h;
    return x;
  }

  double max_abs() const {
    double a = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
    if (h.size()) a = std::max(a, h.cwiseAbs().maxCoeff());
    return a;
  }
};

using SplitVector = Split;
using SplitCovector = Split;

/// Structure data (m, h, act, phi, theta, psi) of a unified product.
///   act(a, i, j):   h ⊗ m -> m,  eta ▷ v
///   phi(a, i, j):   m ⊗ m -> m,  [[v, w]]
///   theta(a, i, j): m ⊗ m -> h,  theta(v, w)
///   psi(a, i, j):   h ⊗ m -> h,  psi(eta, v)
class UnifiedProductData {
 public:
  UnifiedProductData() = default;

  UnifiedProductData(std::size_t dim_m, LieAlgebra h, Tensor3 act, Tensor3 phi, Tensor3 theta, Tensor3 psi,
                     std::vector<std::string> m_labels = {}, double tol = 1e-10)
      : dim_m_(dim_m),
        h_(std::move(h)),
        act_(std::move(act)),
        phi_(std::move(phi)),
        theta_(std::move(theta)),
        psi_(std::move(psi)),
        m_labels_(std::move(m_labels)),
        tol_(tol) {
    const std::size_t dh = h_.dim();
    check_shape(act_, dim_m_, dh, dim_m_, "act");
    check_shape(phi_, dim_m_, dim_m_, dim_m_, "phi");
    check_shape(theta_, dh, dim_m_, dim_m_, "theta");
    check_shape(psi_, dh, dh, dim_m_, "psi");
    if (m_labels_.empty()) {
      for (std::size_t i = 0; i < dim_m_; ++i) m_labels_.push_back("m" + std::to_string(i + 1));
    } else if (m_labels_.size() != dim_m_) {
      throw DimensionError("m_labels length must equal dim_m");
    }
    if (tol_ < 0.0) throw InvalidArgument("tol must be nonnegative");
  }

  /// All coupling tensors zero.
  static UnifiedProductData empty(std::size_t dim_m, LieAlgebra h, std::vector<std::string> m_labels = {}) {
    const std::size_t dh = h.dim();
    return UnifiedProductData(dim_m, std::move(h), Tensor3(dim_m, dh, dim_m), Tensor3(dim_m, dim_m, dim_m),
                              Tensor3(dh, dim_m, dim_m), Tensor3(dh, dh, dim_m), std::move(m_labels));
  }

  std::size_t dim_m() const { return dim_m_; }
  std::size_t dim_h() const { return h_.dim(); }
  std::size_t dim() const { return dim_m_ + h_.dim(); }
  const LieAlgebra& h() const { return h_; }
  const Tensor3& act() const { return act_; }
  const Tensor3& phi() const { return phi_; }
  const Tensor3& theta() const { return theta_; }
  const Tensor3& psi() const { return psi_; }
  Tensor3& act() { return act_; }
  Tensor3& phi() { return phi_; }
  Tensor3& theta() { return theta_; }
  Tensor3& psi() { return psi_; }
  const std::vector<std::string>& m_labels() const { return m_labels_; }
  double tol() const { return tol_; }
  void set_tol(double t) { tol_ = t; }

  std::vector<std::string> labels() const {
    std::vector<std::string> out = m_labels_;
    out.insert(out.end(), h_.labels().begin(), h_.labels().end());
    return out;
  }

  Vector apply_act(const Vector& eta, const Vector& v) const { return act_.apply(eta, v); }
  Vector apply_phi(const Vector& v, const Vector& w) const { return phi_.apply(v, w); }
  Vector apply_theta(const Vector& v, const Vector& w) const { return theta_.apply(v, w); }
  Vector apply_psi(const Vector& eta, const Vector& v) const { return psi_.apply(eta, v); }

  void check(const Split& x, const char* what) const {
    detail::require_dim(static_cast<std::size_t>(x.m.size()), dim_m_, what);
    detail::require_dim(static_cast<std::size_t>(x.h.size()), h_.dim(), what);
  }

 private:
  static void check_shape(const Tensor3& t, std::size_t o, std::size_t l, std::size_t r, const char* name) {
    if (t.out_dim() != o || t.left_dim() != l || t.right_dim() != r)
      throw DimensionError(std::string("tensor '") + name + "' has shape (" + std::to_string(t.out_dim()) + "," +
                           std::to_string(t.left_dim()) + "," + std::to_string(t.right_dim()) + "), expected (" +
                           std::to_string(o) + "," + std::to_string(l) + "," + std::to_string(r) + ")");
  }

  std::size_t dim_m_ = 0;
  LieAlgebra h_;
  Tensor3 act_, phi_, theta_, psi_;
  std::vector<std::string> m_labels_;
  double tol_ = 1e-10;
};

/// Bracket of two split vectors.
inline Split bracket(const UnifiedProductData& d, const Split& x, const Split& y) {
  d.check(x, "bracket");
  d.check(y, "bracket");
  Vector m = d.apply_phi(x.m, y.m) + d.apply_act(x.h, y.m) - d.apply_act(y.h, x.m);
  Vector h = d.h().bracket(x.h, y.h) + d.apply_psi(x.h, y.m) - d.apply_psi(y.h, x.m) + d.apply_theta(x.m, y.m);
  return {std::move(m), std::move(h)};
}

/// Structure constants of m ⋈ h, m-block first.
inline LieAlgebra compose_bracket(const UnifiedProductData& d) {
  const std::size_t dm = d.dim_m(), dh = d.dim_h(), n = dm + dh;
  Tensor3 c(n, n, n);
  const Tensor3 &act = d.act(), &phi = d.phi(), &theta = d.theta(), &psi = d.psi();
  const Tensor3& ch = d.h().constants();
  for (std::size_t i = 0; i < dm; ++i)
    for (std::size_t j = 0; j < dm; ++j) {
      for (std::size_t k = 0; k < dm; ++k) c(k, i, j) = phi(k, i, j);
      for (std::size_t k = 0; k < dh; ++k) c(dm + k, i, j) = theta(k, i, j);
    }
  for (std::size_t a = 0; a < dh; ++a)
    for (std::size_t i = 0; i < dm; ++i) {
      for (std::size_t k = 0; k < dm; ++k) {
        c(k, dm + a, i) = act(k, a, i);
        c(k, i, dm + a) = -act(k, a, i);
      }
      for (std::size_t k = 0; k < dh; ++k) {
        c(dm + k, dm + a, i) = psi(k, a, i);
        c(dm + k, i, dm + a) = -psi(k, a, i);
      }
    }
  for (std::size_t k = 0; k < dh; ++k)
    for (std::size_t a = 0; a < dh; ++a)
      for (std::size_t b = 0; b < dh; ++b) c(dm + k, dm + a, dm + b) = ch(k, a, b);
  return LieAlgebra::from_tensor(std::move(c), d.labels(), d.tol());
}

// ---------------------------------------------------------------------------
// Axioms

struct AxiomResidual {
  std::string name;
  std::string description;
  double residual = 0.0;
  std::vector<std::size_t> witness;  // basis indices of the worst tuple
};

struct AxiomReport {
  std::vector<AxiomResidual> axioms;
  double tol = 0.0;

  bool passed() const {
    return std::all_of(axioms.begin(), axioms.end(), [&](const AxiomResidual& a) { return a.residual <= tol; });
  }
  double max_residual() const {
    double m = 0.0;
    for (const auto& a : axioms) m = std::max(m, a.residual);
    return m;
  }
  const AxiomResidual& operator[](const std::string& name) const {
    for (const auto& a : axioms)
      if (a.name == name) return a;
    throw InvalidArgument("no axiom named '" + name + "'");
  }
  std::vector<std::string> failing() const {
    std::vector<std::string> out;
    for (const auto& a : axioms)
      if (a.residual > tol) out.push_back(a.name);
    return out;
  }
};

namespace detail {

inline double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline void record(AxiomResidual& r, double value, std::vector<std::size_t> witness) {
  if (value > r.residual) {
    r.residual = value;
    r.witness = std::move(witness);
  }
}

}  // namespace detail

/// Evaluates every compatibility condition on all basis tuples. The first two
/// entries check the standing hypotheses (h is a Lie algebra, ▷ is a left
/// action); A1..A6 are the unified-product axioms.
inline AxiomReport validate_axioms(const UnifiedProductData& d) {
  const std::size_t dm = d.dim_m(), dh = d.dim_h();
  const LieAlgebra& h = d.h();
  auto em = [&](std::size_t i) { return basis_vector(dm, i); };
  auto eh = [&](std::size_t i) { return basis_vector(dh, i); };
  auto act = [&](const Vector& e, const Vector& v) { return d.apply_act(e, v); };
  auto phi = [&](const Vector& v, const Vector& w) { return d.apply_phi(v, w); };
  auto theta = [&](const Vector& v, const Vector& w) { return d.apply_theta(v, w); };
  auto psi = [&](const Vector& e, const Vector& v) { return d.apply_psi(e, v); };
  using detail::inf_norm;
  using detail::record;

  AxiomReport rep;
  rep.tol = d.tol();

  AxiomResidual hj{"h_jacobi", "h is a Lie algebra (antisymmetry and Jacobi)", 0.0, {}};
  {
    const ValidationReport v = h.validate();
    if (v.antisymmetry_residual >= v.jacobi_residual) {
      hj.residual = v.antisymmetry_residual;
      if (v.antisymmetry_witness) hj.witness.assign(v.antisymmetry_witness->begin(), v.antisymmetry_witness->end());
    } else {
      hj.residual = v.jacobi_residual;
      if (v.jacobi_witness) hj.witness.assign(v.jacobi_witness->begin(), v.jacobi_witness->end());
    }
  }

  AxiomResidual mod{"module", "[eta1,eta2]>v = eta1>(eta2>v) - eta2>(eta1>v)", 0.0, {}};
  AxiomResidual a4{"A4", "psi([eta1,eta2],v) compatibility", 0.0, {}};
  for (std::size_t a = 0; a < dh; ++a)
    for (std::size_t b = 0; b < dh; ++b)
      for (std::size_t i = 0; i < dm; ++i) {
        const Vector e1 = eh(a), e2 = eh(b), v = em(i);
        const Vector c12 = h.bracket(e1, e2);
        record(mod, inf_norm(act(c12, v) - act(e1, act(e2, v)) + act(e2, act(e1, v))), {a, b, i});
        const Vector lhs = psi(c12, v);
        const Vector rhs = h.bracket(e1, psi(e2, v)) + h.bracket(psi(e1, v), e2) + psi(e1, act(e2, v)) -
                           psi(e2, act(e1, v));
        record(a4, inf_norm(lhs - rhs), {a, b, i});
      }

  AxiomResidual a1{"A1", "[[v,v]] = 0 and theta(v,v) = 0", 0.0, {}};
  for (std::size_t i = 0; i < dm; ++i)
    for (std::size_t j = 0; j < dm; ++j) {
      for (std::size_t k = 0; k < dm; ++k) record(a1, std::abs(d.phi()(k, i, j) + d.phi()(k, j, i)), {i, j});
      for (std::size_t k = 0; k < dh; ++k) record(a1, std::abs(d.theta()(k, i, j) + d.theta()(k, j, i)), {i, j});
    }

  AxiomResidual a2{"A2", "eta>[[v1,v2]] compatibility", 0.0, {}};
  AxiomResidual a3{"A3", "[eta,theta(v1,v2)] compatibility", 0.0, {}};
  for (std::size_t a = 0; a < dh; ++a)
    for (std::size_t i = 0; i < dm; ++i)
      for (std::size_t j = 0; j < dm; ++j) {
        const Vector e = eh(a), v1 = em(i), v2 = em(j);
        const Vector l2 = act(e, phi(v1, v2));
        const Vector r2 = phi(act(e, v1), v2) + phi(v1, act(e, v2)) + act(psi(e, v1), v2) - act(psi(e, v2), v1);
        record(a2, inf_norm(l2 - r2), {a, i, j});
        const Vector l3 = h.bracket(e, theta(v1, v2));
        const Vector r3 = theta(act(e, v1), v2) + theta(v1, act(e, v2)) + psi(psi(e, v1), v2) -
                          psi(psi(e, v2), v1) - psi(e, phi(v1, v2));
        record(a3, inf_norm(l3 - r3), {a, i, j});
      }

  AxiomResidual a5{"A5", "cyclic [[[[v1,v2]],v3]] + theta(v1,v2)>v3 = 0", 0.0, {}};
  AxiomResidual a6{"A6", "cyclic psi(theta(v1,v2),v3) + theta([[v1,v2]],v3) = 0", 0.0, {}};
  for (std::size_t i = 0; i < dm; ++i)
    for (std::size_t j = 0; j < dm; ++j)
      for (std::size_t l = 0; l < dm; ++l) {
        const Vector v[3] = {em(i), em(j), em(l)};
        Vector s5 = Vector::Zero(static_cast<Eigen::Index>(dm));
        Vector s6 = Vector::Zero(static_cast<Eigen::Index>(dh));
        for (int c = 0; c < 3; ++c) {
          const Vector &x = v[c], &y = v[(c + 1) % 3], &z = v[(c + 2) % 3];
          s5 += phi(phi(x, y), z) + act(theta(x, y), z);
          s6 += psi(theta(x, y), z) + theta(phi(x, y), z);
        }
        record(a5, inf_norm(s5), {i, j, l});
        record(a6, inf_norm(s6), {i, j, l});
      }

  rep.axioms = {hj, mod, a1, a2, a3, a4, a5, a6};
  return rep;
}

// ---------------------------------------------------------------------------
// Dual maps. Each is fixed by the pairing identity documented alongside it.

/// <ad*_v alpha, w> = -<alpha, [[v, w]]>
inline Vector ad_star_m(const UnifiedProductData& d, const Vector& v, const Vector& alpha) {
  return -d.phi().left_contract(v).transpose() * alpha;
}

/// <alpha ◁* eta, w> = <alpha, eta ▷ w>
inline Vector act_star(const UnifiedProductData& d, const Vector& alpha, const Vector& eta) {
  return d.act().left_contract(eta).transpose() * alpha;
}

/// <a*_eta beta, w> = <beta, psi(eta, w)>
inline Vector psi_star_h(const UnifiedProductData& d, const Vector& eta, const Vector& beta) {
  return d.psi().left_contract(eta).transpose() * beta;
}

/// <theta*_v beta, w> = <beta, theta(v, w)>
inline Vector theta_star(const UnifiedProductData& d, const Vector& v, const Vector& beta) {
  return d.theta().left_contract(v).transpose() * beta;
}

/// <b*_v alpha, zeta> = <alpha, zeta ▷ v>
inline Vector act_star_v(const UnifiedProductData& d, const Vector& v, const Vector& alpha) {
  return d.act().right_contract(v).transpose() * alpha;
}

/// <_v psi* beta, zeta> = <beta, psi(zeta, v)>
inline Vector psi_star_v(const UnifiedProductData& d, const Vector& v, const Vector& beta) {
  return d.psi().right_contract(v).transpose() * beta;
}

/// ad*_{(v,eta)}(alpha, beta), assembled from the six dual maps.
inline Split coad(const UnifiedProductData& d, const Split& x, const Split& mu) {
  d.check(x, "coad (x)");
  d.check(mu, "coad (mu)");
  const Vector &v = x.m, &eta = x.h, &alpha = mu.m, &beta = mu.h;
  Vector m = ad_star_m(d, v, alpha) - act_star(d, alpha, eta) - psi_star_h(d, eta, beta) - theta_star(d, v, beta);
  Vector h = d.h().coad_matrix(eta) * beta + act_star_v(d, v, alpha) + psi_star_v(d, v, beta);
  return {std::move(m), std::move(h)};
}

}  // namespace unimech
