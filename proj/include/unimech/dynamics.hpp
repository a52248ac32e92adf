#pragma once

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "unimech/errors.hpp"
#include "unimech/unified_product.hpp"

namespace unimech {

/// Which side of the Legendre transform a state lives on.
enum class Side { velocity, momentum };

/// Quadratic (inertia operator) or black-box energy on the flat coordinates.
class EnergySpec {
 public:
  enum class Kind { quadratic, blackbox };
  using Function = std::function<double(const Vector&)>;

  /// l(xi) = 1/2 <I xi, xi>, H(mu) = 1/2 <mu, I^{-1} mu>.
  static EnergySpec quadratic(Matrix inertia) {
    if (inertia.rows() != inertia.cols() || inertia.rows() == 0)
      throw DimensionError("inertia must be a nonempty square matrix");
    if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidArgument("inertia must be symmetric");
    EnergySpec s;
    s.kind_ = Kind::quadratic;
    Eigen::LLT<Matrix> llt(inertia);
    if (llt.info() != Eigen::Success) throw SingularInertia("inertia is not positive definite");
    s.inverse_ = llt.solve(Matrix::Identity(inertia.rows(), inertia.cols()));
    if (!s.inverse_.allFinite()) throw SingularInertia("inertia is not invertible");
    s.inertia_ = std::move(inertia);
    s.dim_ = static_cast<std::size_t>(s.inertia_.rows());
    return s;
  }

  static EnergySpec identity(std::size_t n) {
    return quadratic(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }

  /// f is evaluated on flat coordinates of length dim.
  static EnergySpec blackbox(Function f, std::size_t dim, double fd_eps = 1e-6) {
    if (!f) throw InvalidArgument("blackbox energy needs a function");
    if (!(fd_eps > 0.0)) throw InvalidArgument("fd_eps must be positive");
    EnergySpec s;
    s.kind_ = Kind::blackbox;
    s.f_ = std::move(f);
    s.dim_ = dim;
    s.fd_eps_ = fd_eps;
    return s;
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double fd_eps() const { return fd_eps_; }
  const Matrix& inertia() const { return inertia_; }
  const Matrix& inverse_inertia() const {
    if (kind_ != Kind::quadratic) throw InvalidArgument("black-box energy has no inertia operator");
    return inverse_;
  }

  /// Energy value. Quadratic: velocity side 1/2 <I x, x>, momentum side 1/2 <x, I^{-1} x>.
  double value(const Vector& x, Side side) const {
    detail::require_dim(static_cast<std::size_t>(x.size()), dim_, "EnergySpec::value");
    if (kind_ == Kind::blackbox) return f_(x);
    return side == Side::velocity ? 0.5 * x.dot(inertia_ * x) : 0.5 * x.dot(inverse_ * x);
  }

  Vector gradient(const Vector& x, Side side) const {
    detail::require_dim(static_cast<std::size_t>(x.size()), dim_, "EnergySpec::gradient");
    if (kind_ == Kind::quadratic) return side == Side::velocity ? Vector(inertia_ * x) : Vector(inverse_ * x);
    Vector g(x.size());
    Vector y = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double xi = x[i];
      y[i] = xi + fd_eps_;
      const double fp = f_(y);
      y[i] = xi - fd_eps_;
      const double fm = f_(y);
      y[i] = xi;
      g[i] = (fp - fm) / (2.0 * fd_eps_);
    }
    return g;
  }

 private:
  Kind kind_ = Kind::quadratic;
  std::size_t dim_ = 0;
  Matrix inertia_, inverse_;
  Function f_;
  double fd_eps_ = 1e-6;
};

/// delta l / delta xi (velocity side) or delta H / delta mu (momentum side).
inline Vector variational_derivative(const EnergySpec& spec, const Vector& x, Side side) {
  return spec.gradient(x, side);
}

inline Split variational_derivative(const UnifiedProductData& d, const EnergySpec& spec, const Split& x, Side side) {
  d.check(x, "variational_derivative");
  return Split::from_flat(spec.gradient(x.flat(), side), d.dim_m(), d.dim_h());
}

/// Euler-Poincaré field in momentum form. State pi = (pi_v, pi_eta); the
/// velocity (v, eta) = I^{-1} pi.
inline Split ep_field(const UnifiedProductData& d, const EnergySpec& spec, const Split& pi) {
  d.check(pi, "ep_field");
  if (spec.kind() != EnergySpec::Kind::quadratic)
    throw InvalidArgument("ep_field needs a quadratic (hyperregular) energy");
  const Split x = Split::from_flat(spec.inverse_inertia() * pi.flat(), d.dim_m(), d.dim_h());
  const Vector &v = x.m, &eta = x.h, &pv = pi.m, &pe = pi.h;
  Vector m = -ad_star_m(d, v, pv) + act_star(d, pv, eta) + psi_star_h(d, eta, pe) + theta_star(d, v, pe);
  Vector h = -(d.h().coad_matrix(eta) * pe) - act_star_v(d, v, pv) - psi_star_v(d, v, pe);
  return {std::move(m), std::move(h)};
}

/// Lie-Poisson field. State mu = (kappa, lambda).
inline Split lp_field(const UnifiedProductData& d, const EnergySpec& spec, const Split& mu) {
  d.check(mu, "lp_field");
  const Split g = variational_derivative(d, spec, mu, Side::momentum);
  const Vector &u = g.m, &s = g.h, &kappa = mu.m, &lambda = mu.h;
  Vector m = ad_star_m(d, u, kappa) - act_star(d, kappa, s) - psi_star_h(d, s, lambda) - theta_star(d, u, lambda);
  Vector h = d.h().coad_matrix(s) * lambda + act_star_v(d, u, kappa) + psi_star_v(d, u, lambda);
  return {std::move(m), std::move(h)};
}

// ---------------------------------------------------------------------------
// Integration

struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> states;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
};

using Field = std::function<Vector(const Vector&)>;

/// Classical RK4 with n fixed steps of size h starting at t0. Returns n + 1 states.
inline Trajectory rk4(const Field& f, const Vector& y0, double h, std::size_t n, double t0 = 0.0) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("rk4: step must be positive and finite");
  if (n < 1) throw InvalidArgument("rk4: need at least one step");
  if (!y0.allFinite()) throw NonFiniteState("rk4: initial state is not finite");
  Trajectory tr;
  tr.t.reserve(n + 1);
  tr.states.reserve(n + 1);
  tr.t.push_back(t0);
  tr.states.push_back(y0);
  Vector y = y0;
  for (std::size_t s = 1; s <= n; ++s) {
    const Vector k1 = f(y);
    const Vector k2 = f(y + 0.5 * h * k1);
    const Vector k3 = f(y + 0.5 * h * k2);
    const Vector k4 = f(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) throw NonFiniteState("rk4: state left the finite range at step " + std::to_string(s));
    tr.t.push_back(t0 + static_cast<double>(s) * h);
    tr.states.push_back(y);
  }
  return tr;
}

inline Field ep_flat_field(const UnifiedProductData& d, const EnergySpec& spec) {
  return [d, spec](const Vector& y) { return ep_field(d, spec, Split::from_flat(y, d.dim_m(), d.dim_h())).flat(); };
}

inline Field lp_flat_field(const UnifiedProductData& d, const EnergySpec& spec) {
  return [d, spec](const Vector& y) { return lp_field(d, spec, Split::from_flat(y, d.dim_m(), d.dim_h())).flat(); };
}

// ---------------------------------------------------------------------------
// Conservation

struct Functional {
  std::string name;
  std::function<double(const Vector&)> f;
};

struct ConservationEntry {
  std::string functional;
  double initial = 0.0;
  double max_abs_drift = 0.0;
  // Relative to |initial|; equals the absolute drift when initial is exactly 0.
  double max_rel_drift = 0.0;
};

inline std::vector<ConservationEntry> conservation_report(const Trajectory& tr, const std::vector<Functional>& fs) {
  if (tr.empty()) throw InvalidArgument("conservation_report: empty trajectory");
  std::vector<ConservationEntry> out;
  for (const auto& fn : fs) {
    ConservationEntry e;
    e.functional = fn.name;
    e.initial = fn.f(tr.states.front());
    for (const auto& y : tr.states) e.max_abs_drift = std::max(e.max_abs_drift, std::abs(fn.f(y) - e.initial));
    e.max_rel_drift = e.initial != 0.0 ? e.max_abs_drift / std::abs(e.initial) : e.max_abs_drift;
    out.push_back(e);
  }
  return out;
}

/// H(mu) for Lie-Poisson states, or E(pi) = 1/2 <pi, I^{-1} pi> for momentum-form EP states.
inline Functional hamiltonian_functional(const EnergySpec& spec, std::string name = "hamiltonian") {
  return {std::move(name), [spec](const Vector& y) { return spec.value(y, Side::momentum); }};
}

/// Squared Euclidean norm of coordinates [offset, offset + len).
inline Functional norm_sq_block(std::size_t offset, std::size_t len, std::string name) {
  return {std::move(name), [offset, len](const Vector& y) {
            if (offset + len > static_cast<std::size_t>(y.size())) throw DimensionError("norm_sq_block out of range");
            return y.segment(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(len)).squaredNorm();
          }};
}

}  // namespace unimech
