#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unimech/errors.hpp"
#include "unimech/tensor.hpp"

namespace unimech {

/// Result of checking antisymmetry and Jacobi on all basis pairs/triples.
struct ValidationReport {
  double antisymmetry_residual = 0.0;
  double jacobi_residual = 0.0;
  double tol = 0.0;
  std::optional<std::array<std::size_t, 3>> antisymmetry_witness;  // (k, i, j)
  std::optional<std::array<std::size_t, 3>> jacobi_witness;        // (i, j, l)

  bool antisymmetry_ok() const { return antisymmetry_residual <= tol; }
  bool jacobi_ok() const { return jacobi_residual <= tol; }
  bool passed() const { return antisymmetry_ok() && jacobi_ok(); }
};

/// Finite-dimensional real Lie algebra given by structure constants
/// c(k, i, j) with [e_i, e_j] = sum_k c(k, i, j) e_k.
class LieAlgebra {
 public:
  struct Entry {
    std::size_t k, i, j;
    double value;
  };

  LieAlgebra() = default;

  /// Builds from the entries with i < j and antisymmetrizes. Entries with
  /// i == j are rejected, entries with i > j are stored as -value at (k, j, i).
  static LieAlgebra from_entries(std::size_t dim, const std::vector<Entry>& entries,
                                 std::vector<std::string> labels = {}, double tol = 1e-10) {
    LieAlgebra a(dim, std::move(labels), tol);
    for (const auto& e : entries) {
      if (e.k >= dim || e.i >= dim || e.j >= dim)
        throw InvalidArgument("structure constant index out of range");
      if (e.i == e.j) throw InvalidArgument("structure constant with i == j must vanish");
      const std::size_t i = std::min(e.i, e.j), j = std::max(e.i, e.j);
      const double v = e.i < e.j ? e.value : -e.value;
      a.c_(e.k, i, j) += v;
      a.c_(e.k, j, i) -= v;
    }
    return a;
  }

  /// Takes a raw tensor as is. Nothing is enforced; call validate().
  static LieAlgebra from_tensor(Tensor3 c, std::vector<std::string> labels = {}, double tol = 1e-10) {
    if (c.out_dim() != c.left_dim() || c.left_dim() != c.right_dim())
      throw DimensionError("structure tensor must be cubic");
    LieAlgebra a(c.out_dim(), std::move(labels), tol);
    a.c_ = std::move(c);
    return a;
  }

  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const Tensor3& constants() const { return c_; }
  double tol() const { return tol_; }
  void set_tol(double t) { tol_ = t; }
  bool is_abelian() const { return c_.is_zero(); }

  Vector bracket(const Vector& x, const Vector& y) const {
    detail::require_dim(static_cast<std::size_t>(x.size()), dim_, "bracket");
    detail::require_dim(static_cast<std::size_t>(y.size()), dim_, "bracket");
    return c_.apply(x, y);
  }

  /// M with M * y = [x, y].
  Matrix ad_matrix(const Vector& x) const {
    detail::require_dim(static_cast<std::size_t>(x.size()), dim_, "ad_matrix");
    return c_.left_contract(x);
  }

  /// -(ad x)^T, so <coad(x) mu, y> = -<mu, [x, y]>.
  Matrix coad_matrix(const Vector& x) const { return -ad_matrix(x).transpose(); }

  static double pairing(const Vector& mu, const Vector& x) {
    detail::require_dim(static_cast<std::size_t>(mu.size()), static_cast<std::size_t>(x.size()), "pairing");
    return mu.dot(x);
  }

  ValidationReport validate() const {
    ValidationReport r;
    r.tol = tol_;
    for (std::size_t k = 0; k < dim_; ++k)
      for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) {
          const double res = std::abs(c_(k, i, j) + c_(k, j, i));
          if (res > r.antisymmetry_residual) {
            r.antisymmetry_residual = res;
            r.antisymmetry_witness = std::array<std::size_t, 3>{k, i, j};
          }
        }
    // [[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j]
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        for (std::size_t l = 0; l < dim_; ++l) {
          double worst = 0.0;
          for (std::size_t p = 0; p < dim_; ++p) {
            double s = 0.0;
            for (std::size_t m = 0; m < dim_; ++m)
              s += c_(m, i, j) * c_(p, m, l) + c_(m, j, l) * c_(p, m, i) + c_(m, l, i) * c_(p, m, j);
            worst = std::max(worst, std::abs(s));
          }
          if (worst > r.jacobi_residual) {
            r.jacobi_residual = worst;
            r.jacobi_witness = std::array<std::size_t, 3>{i, j, l};
          }
        }
    return r;
  }

 private:
  LieAlgebra(std::size_t dim, std::vector<std::string> labels, double tol)
      : dim_(dim), labels_(std::move(labels)), c_(dim, dim, dim), tol_(tol) {
    if (tol < 0.0) throw InvalidArgument("tol must be nonnegative");
    if (labels_.empty()) {
      for (std::size_t i = 0; i < dim; ++i) labels_.push_back("e" + std::to_string(i + 1));
    } else if (labels_.size() != dim) {
      throw DimensionError("basis_labels length must equal dim");
    }
  }

  std::size_t dim_ = 0;
  std::vector<std::string> labels_;
  Tensor3 c_;
  double tol_ = 1e-10;
};

namespace presets {

inline LieAlgebra abelian(std::size_t n) {
  if (n == 0) throw InvalidArgument("abelian: n must be positive");
  return LieAlgebra::from_entries(n, {});
}

inline LieAlgebra so3() {
  return LieAlgebra::from_entries(3, {{2, 0, 1, 1.0}, {0, 1, 2, 1.0}, {1, 0, 2, -1.0}}, {"L1", "L2", "L3"});
}

/// Basis (H, E, F): [H,E] = 2E, [H,F] = -2F, [E,F] = H.
inline LieAlgebra sl2() {
  return LieAlgebra::from_entries(3, {{1, 0, 1, 2.0}, {2, 0, 2, -2.0}, {0, 1, 2, 1.0}}, {"H", "E", "F"});
}

/// [X, Y] = Z, Z central.
inline LieAlgebra heisenberg() {
  return LieAlgebra::from_entries(3, {{2, 0, 1, 1.0}}, {"X", "Y", "Z"});
}

/// g ⋉ g with [(x1,x2),(y1,y2)] = ([x1,y1], [x1,y2] + [x2,y1]).
inline LieAlgebra tangent(const LieAlgebra& g) {
  const std::size_t n = g.dim();
  Tensor3 c(2 * n, 2 * n, 2 * n);
  const Tensor3& cg = g.constants();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double v = cg(k, i, j);
        c(k, i, j) = v;
        c(n + k, i, n + j) = v;
        c(n + k, n + i, j) = v;
      }
  std::vector<std::string> labels;
  for (const auto& l : g.labels()) labels.push_back(l);
  for (const auto& l : g.labels()) labels.push_back("d" + l);
  return LieAlgebra::from_tensor(std::move(c), std::move(labels), g.tol());
}

namespace detail_preset {
inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}
}  // namespace detail_preset

/// Looks up a preset by name. Accepts "abelian" (with n), "abelian(n)",
/// "so3", "sl2", "heisenberg" and "tangent(<name>)" nested arbitrarily.
inline LieAlgebra by_name(const std::string& raw, std::size_t n = 0) {
  const std::string name = detail_preset::trim(raw);
  if (name == "so3") return so3();
  if (name == "sl2") return sl2();
  if (name == "heisenberg") return heisenberg();
  if (name == "abelian") {
    if (n == 0) throw InvalidArgument("abelian preset needs n > 0");
    return abelian(n);
  }
  const auto open = name.find('(');
  if (open != std::string::npos && name.back() == ')') {
    const std::string head = detail_preset::trim(name.substr(0, open));
    const std::string arg = name.substr(open + 1, name.size() - open - 2);
    if (head == "tangent") return tangent(by_name(arg, n));
    if (head == "abelian") {
      try {
        std::size_t pos = 0;
        const long v = std::stol(arg, &pos);
        if (v > 0 && detail_preset::trim(arg.substr(pos)).empty()) return abelian(static_cast<std::size_t>(v));
      } catch (const std::exception&) {
      }
      throw InvalidArgument("abelian(n): bad n '" + arg + "'");
    }
  }
  throw UnknownPreset("unknown algebra preset '" + name + "'");
}

}  // namespace presets
}  // namespace unimech
