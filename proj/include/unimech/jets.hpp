#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "unimech/errors.hpp"
#include "unimech/tensor.hpp"

namespace unimech {

// ---------------------------------------------------------------------------
// Matrix groups

enum class GroupKind { GL, SO, SL };

struct GroupTag {
  GroupKind kind = GroupKind::GL;
  int d = 0;

  std::string name() const {
    const char* k = kind == GroupKind::GL ? "GL" : kind == GroupKind::SO ? "SO" : "SL";
    return k + std::to_string(d);
  }

  /// "SO3", "SL2", "GL4", ...
  static GroupTag parse(const std::string& s) {
    if (s.size() < 3) throw InvalidArgument("bad group tag '" + s + "'");
    GroupTag g;
    const std::string k = s.substr(0, 2);
    if (k == "GL") g.kind = GroupKind::GL;
    else if (k == "SO") g.kind = GroupKind::SO;
    else if (k == "SL") g.kind = GroupKind::SL;
    else throw InvalidArgument("bad group tag '" + s + "'");
    try {
      std::size_t pos = 0;
      g.d = std::stoi(s.substr(2), &pos);
      if (pos != s.size() - 2 || g.d < 1) throw InvalidArgument("");
    } catch (const std::exception&) {
      throw InvalidArgument("bad group tag '" + s + "'");
    }
    return g;
  }

  friend bool operator==(const GroupTag&, const GroupTag&) = default;
};

inline Matrix identity_matrix(int d) { return Matrix::Identity(d, d); }
inline Matrix zero_matrix(int d) { return Matrix::Zero(d, d); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline Matrix checked_inverse(const Matrix& g) {
  Eigen::FullPivLU<Matrix> lu(g);
  if (!lu.isInvertible()) throw SingularMatrix("matrix is not invertible");
  return lu.inverse();
}

/// Ad_g X = g X g^{-1}.
inline Matrix Ad(const Matrix& g, const Matrix& x) { return g * x * checked_inverse(g); }

inline void validate_group_matrix(const GroupTag& tag, const Matrix& g, double tol) {
  if (g.rows() != tag.d || g.cols() != tag.d)
    throw InvalidGroupElement(tag.name() + ": base has shape " + std::to_string(g.rows()) + "x" +
                              std::to_string(g.cols()));
  if (!g.allFinite()) throw InvalidGroupElement(tag.name() + ": base is not finite");
  const double det = g.determinant();
  switch (tag.kind) {
    case GroupKind::GL:
      if (std::abs(det) <= tol) throw InvalidGroupElement("GL: determinant vanishes");
      break;
    case GroupKind::SO: {
      const double orth = (g.transpose() * g - identity_matrix(tag.d)).cwiseAbs().maxCoeff();
      if (orth > tol || std::abs(det - 1.0) > tol) throw InvalidGroupElement("SO: base is not a rotation");
      break;
    }
    case GroupKind::SL:
      if (std::abs(det - 1.0) > tol) throw InvalidGroupElement("SL: determinant is not 1");
      break;
  }
}

inline void validate_algebra_matrix(const GroupTag& tag, const Matrix& x, double tol) {
  if (x.rows() != tag.d || x.cols() != tag.d)
    throw InvalidGroupElement(tag.name() + ": slot has shape " + std::to_string(x.rows()) + "x" +
                              std::to_string(x.cols()));
  if (!x.allFinite()) throw InvalidGroupElement(tag.name() + ": slot is not finite");
  if (tag.kind == GroupKind::SO && (x + x.transpose()).cwiseAbs().maxCoeff() > tol)
    throw InvalidGroupElement("so: slot is not antisymmetric");
  if (tag.kind == GroupKind::SL && std::abs(x.trace()) > tol) throw InvalidGroupElement("sl: slot is not traceless");
}

/// (x, slots) in T^nG (n slots) or T^(n)G (2^n - 1 slots).
struct JetElement {
  GroupTag group;
  Matrix base;
  std::vector<Matrix> slots;

  std::size_t size() const { return slots.size(); }

  static JetElement unit(GroupTag g, std::size_t nslots) {
    return {g, identity_matrix(g.d), std::vector<Matrix>(nslots, zero_matrix(g.d))};
  }

  void validate(double tol = 1e-10) const {
    validate_group_matrix(group, base, tol);
    for (const auto& s : slots) validate_algebra_matrix(group, s, tol);
  }
};

/// Max-abs distance between two jets of the same shape.
inline double jet_distance(const JetElement& a, const JetElement& b) {
  if (a.slots.size() != b.slots.size()) throw DimensionError("jet_distance: slot counts differ");
  double r = (a.base - b.base).cwiseAbs().maxCoeff();
  for (std::size_t i = 0; i < a.slots.size(); ++i) r = std::max(r, (a.slots[i] - b.slots[i]).cwiseAbs().maxCoeff());
  return r;
}

// ---------------------------------------------------------------------------
// Combinatorics

/// All compositions (ordered partitions) of k, anti-lexicographically ordered:
/// (k), (k-1,1), ..., (1,...,1).
inline std::vector<std::vector<int>> compositions(int k) {
  std::vector<std::vector<int>> out;
  if (k <= 0) return out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int rest) -> void {
    if (rest == 0) {
      out.push_back(cur);
      return;
    }
    for (int f = rest; f >= 1; --f) {
      cur.push_back(f);
      self(self, rest - f);
      cur.pop_back();
    }
  };
  rec(rec, k);
  return out;
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

/// N_(i1..il) = prod_{j>=2} C(i1 + ... + ij - 1, ij - 1).
inline std::uint64_t partition_coefficient(const std::vector<int>& parts) {
  if (parts.empty()) throw InvalidArgument("partition_coefficient: empty list");
  std::uint64_t p = 1;
  int s = 0;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    if (parts[j] < 1) throw InvalidArgument("partition_coefficient: parts must be positive");
    s += parts[j];
    if (j > 0) p *= binomial(s - 1, parts[j] - 1);
  }
  return p;
}

/// Set partitions of the subset encoded by the bitmask (bit e-1 <-> element e).
/// Each partition is returned as its block masks sorted by maximal element,
/// so the last block always contains max(alpha).
inline std::vector<std::vector<unsigned>> ordered_set_partitions(unsigned alpha) {
  std::vector<unsigned> elems;
  for (unsigned b = 0; b < 32; ++b)
    if (alpha >> b & 1u) elems.push_back(1u << b);
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> blocks;
  auto rec = [&](auto&& self, std::size_t idx) -> void {
    if (idx == elems.size()) {
      out.push_back(blocks);
      return;
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b] |= elems[idx];
      self(self, idx + 1);
      blocks[b] &= ~elems[idx];
    }
    blocks.push_back(elems[idx]);
    self(self, idx + 1);
    blocks.pop_back();
  };
  rec(rec, 0);
  auto top = [](unsigned m) {
    unsigned t = 0;
    while (m >> 1) {
      m >>= 1;
      ++t;
    }
    return t;
  };
  for (auto& p : out) std::sort(p.begin(), p.end(), [&](unsigned a, unsigned b) { return top(a) < top(b); });
  return out;
}

/// Label of a T^(n)G slot: bitmask 0b101 -> "31".
inline std::string subset_label(unsigned mask) {
  std::string s;
  for (int b = 31; b >= 0; --b)
    if (mask >> b & 1u) s += std::to_string(b + 1);
  return s;
}

// ---------------------------------------------------------------------------
// Generic kernels over a matrix type. Instantiated with Matrix and with
// DualMatrix (first-order jets of matrices, used for exact Ad computations).

/// v + eps d with eps^2 = 0.
struct DualMatrix {
  Matrix v, d;

  DualMatrix operator+(const DualMatrix& o) const { return {v + o.v, d + o.d}; }
  DualMatrix operator-(const DualMatrix& o) const { return {v - o.v, d - o.d}; }
  DualMatrix operator-() const { return {-v, -d}; }
  DualMatrix operator*(const DualMatrix& o) const { return {v * o.v, v * o.d + d * o.v}; }
  DualMatrix& operator+=(const DualMatrix& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  friend DualMatrix operator*(double s, const DualMatrix& m) { return {s * m.v, s * m.d}; }
};

namespace jet_detail {

inline Matrix inverse(const Matrix& m) { return checked_inverse(m); }
inline DualMatrix inverse(const DualMatrix& m) {
  const Matrix vi = checked_inverse(m.v);
  return {vi, -vi * m.d * vi};
}
inline Matrix zero_like(const Matrix& m) { return Matrix::Zero(m.rows(), m.cols()); }
inline DualMatrix zero_like(const DualMatrix& m) { return {zero_like(m.v), zero_like(m.v)}; }

template <class M>
M lie(const M& a, const M& b) {
  return M(a * b) - M(b * a);
}

template <class M>
struct Jet {
  M base;
  std::vector<M> slots;
};

template <class M>
Jet<M> tn_multiply(const Jet<M>& a, const Jet<M>& b) {
  const std::size_t n = a.slots.size();
  const M yinv = inverse(b.base);
  std::vector<M> adx(n);
  for (std::size_t i = 0; i < n; ++i) adx[i] = M(M(yinv * a.slots[i]) * b.base);
  Jet<M> r{M(a.base * b.base), {}};
  for (int k = 1; k <= static_cast<int>(n); ++k) {
    M acc = b.slots[static_cast<std::size_t>(k - 1)];
    for (const auto& c : compositions(k)) {
      const std::size_t l = c.size();
      M t = adx[static_cast<std::size_t>(c.back() - 1)];
      for (std::size_t j = 0; j + 1 < l; ++j) t = lie(b.slots[static_cast<std::size_t>(c[j] - 1)], t);
      const double coef = (l % 2 == 1 ? 1.0 : -1.0) * static_cast<double>(partition_coefficient(c));
      acc += coef * t;
    }
    r.slots.push_back(acc);
  }
  return r;
}

template <class M>
Jet<M> tn_inverse(const Jet<M>& a) {
  const std::size_t n = a.slots.size();
  const M xinv = inverse(a.base);
  Jet<M> r{xinv, {}};
  for (int k = 1; k <= static_cast<int>(n); ++k) {
    M acc = zero_like(a.base);
    for (const auto& c : compositions(k)) {
      const std::size_t l = c.size();
      M t = a.slots[static_cast<std::size_t>(c.back() - 1)];
      for (std::size_t j = l - 1; j-- > 0;) t = lie(a.slots[static_cast<std::size_t>(c[j] - 1)], t);
      acc += (-static_cast<double>(partition_coefficient(c))) * M(M(a.base * t) * xinv);
    }
    r.slots.push_back(acc);
  }
  return r;
}

template <class M>
Jet<M> iterated_multiply(const Jet<M>& a, const Jet<M>& b) {
  const std::size_t ns = a.slots.size();
  const M yinv = inverse(b.base);
  std::vector<M> adx(ns);
  for (std::size_t i = 0; i < ns; ++i) adx[i] = M(M(yinv * a.slots[i]) * b.base);
  Jet<M> r{M(a.base * b.base), {}};
  for (unsigned alpha = 1; alpha <= ns; ++alpha) {
    M acc = b.slots[alpha - 1];
    for (const auto& lam : ordered_set_partitions(alpha)) {
      const std::size_t l = lam.size();
      M t = adx[lam.back() - 1];
      for (std::size_t j = 0; j + 1 < l; ++j) t = lie(b.slots[lam[j] - 1], t);
      acc += (l % 2 == 1 ? 1.0 : -1.0) * t;
    }
    r.slots.push_back(acc);
  }
  return r;
}

template <class M>
Jet<M> iterated_inverse(const Jet<M>& a) {
  const std::size_t ns = a.slots.size();
  const M xinv = inverse(a.base);
  Jet<M> r{xinv, {}};
  for (unsigned alpha = 1; alpha <= ns; ++alpha) {
    M acc = zero_like(a.base);
    for (const auto& lam : ordered_set_partitions(alpha)) {
      const std::size_t l = lam.size();
      M t = a.slots[lam.back() - 1];
      for (std::size_t j = l - 1; j-- > 0;) t = lie(a.slots[lam[j] - 1], t);
      acc += -1.0 * M(M(a.base * t) * xinv);
    }
    r.slots.push_back(acc);
  }
  return r;
}

inline Jet<Matrix> to_jet(const JetElement& a) { return {a.base, a.slots}; }
inline JetElement from_jet(const GroupTag& g, Jet<Matrix> j) { return {g, std::move(j.base), std::move(j.slots)}; }

inline void check_pair(const JetElement& a, const JetElement& b) {
  if (!(a.group == b.group)) throw GroupMismatch("jets live on different groups: " + a.group.name() + " vs " + b.group.name());
  if (a.slots.size() != b.slots.size()) throw DimensionError("jets have different numbers of slots");
  const auto d = static_cast<Eigen::Index>(a.group.d);
  auto shape_ok = [d](const Matrix& m) { return m.rows() == d && m.cols() == d; };
  if (!shape_ok(a.base) || !shape_ok(b.base)) throw DimensionError("jet base has the wrong shape");
  for (std::size_t i = 0; i < a.slots.size(); ++i)
    if (!shape_ok(a.slots[i]) || !shape_ok(b.slots[i])) throw DimensionError("jet slot has the wrong shape");
}

inline std::size_t iterated_order(std::size_t nslots) {
  for (std::size_t n = 1; n <= 3; ++n)
    if (nslots == (std::size_t{1} << n) - 1) return n;
  throw DimensionError("iterated tangent jets need 1, 3 or 7 slots (n <= 3)");
}

}  // namespace jet_detail

// ---------------------------------------------------------------------------
// T^nG

inline JetElement tn_multiply(const JetElement& a, const JetElement& b) {
  jet_detail::check_pair(a, b);
  return jet_detail::from_jet(a.group, jet_detail::tn_multiply(jet_detail::to_jet(a), jet_detail::to_jet(b)));
}

inline JetElement tn_inverse(const JetElement& a) {
  return jet_detail::from_jet(a.group, jet_detail::tn_inverse(jet_detail::to_jet(a)));
}

// ---------------------------------------------------------------------------
// T^(n)G, n <= 3. Slot i holds X_alpha for the subset with bitmask i + 1,
// giving the order 1, 2, 21, 3, 31, 32, 321.

inline JetElement iterated_multiply(const JetElement& a, const JetElement& b) {
  jet_detail::check_pair(a, b);
  jet_detail::iterated_order(a.slots.size());
  return jet_detail::from_jet(a.group, jet_detail::iterated_multiply(jet_detail::to_jet(a), jet_detail::to_jet(b)));
}

inline JetElement iterated_inverse(const JetElement& a) {
  jet_detail::iterated_order(a.slots.size());
  return jet_detail::from_jet(a.group, jet_detail::iterated_inverse(jet_detail::to_jet(a)));
}

/// T^nG -> T^(n)G, X_alpha = xi_|alpha|.
inline JetElement iterated_embed(const JetElement& j) {
  const std::size_t n = j.slots.size();
  if (n < 1 || n > 3) throw DimensionError("iterated_embed supports 1 <= n <= 3");
  JetElement r{j.group, j.base, {}};
  for (unsigned alpha = 1; alpha < (1u << n); ++alpha) r.slots.push_back(j.slots[std::popcount(alpha) - 1]);
  return r;
}

inline JetElement t3_embed(const JetElement& j) {
  detail::require_dim(j.slots.size(), 3, "t3_embed");
  return iterated_embed(j);
}

/// (X1, X2, X21, X31) in g^4.
using G4 = std::array<Matrix, 4>;

inline JetElement g4_embed(const GroupTag& g, const G4& x) {
  for (const auto& m : x)
    if (m.rows() != g.d || m.cols() != g.d) throw DimensionError("g4_embed: slot has the wrong shape");
  const Matrix z = zero_matrix(g.d);
  return {g, identity_matrix(g.d), {x[0], x[1], x[2], z, x[3], z, z}};
}

struct T3Factorization {
  G4 g4;            // complement part, embedded at the identity
  JetElement t3;    // T^3G part
  double residual;  // max-abs reconstruction error
};

/// Unique j = g4_embed(M) * t3_embed(eta).
inline T3Factorization t3_factorize(const JetElement& j, double tol = 1e-10) {
  detail::require_dim(j.slots.size(), 7, "t3_factorize");
  const Matrix& y = j.base;
  const Matrix yinv = checked_inverse(y);
  const auto& Z = j.slots;
  auto Ad_y = [&](const Matrix& x) -> Matrix { return y * x * yinv; };
  auto Ad_yinv = [&](const Matrix& x) -> Matrix { return yinv * x * y; };
  const Matrix eta1 = Z[3];
  const Matrix eta2 = Z[5];
  const Matrix m31 = Ad_y(Z[4] - eta2);
  const Matrix eta3 = Z[6] + commutator(eta1, Ad_yinv(m31));
  const Matrix m1 = Ad_y(Z[0] - eta1);
  const Matrix m2 = Ad_y(Z[1] - eta1);
  const Matrix m21 = Ad_y(Z[2] - eta2 + commutator(eta1, Ad_yinv(m2)));
  T3Factorization f{{m1, m2, m21, m31}, {j.group, y, {eta1, eta2, eta3}}, 0.0};
  f.residual = jet_distance(iterated_multiply(g4_embed(j.group, f.g4), t3_embed(f.t3)), j);
  if (!(f.residual <= tol * std::max(1.0, j.base.cwiseAbs().maxCoeff())))
    throw FactorizationError("t3_factorize: reconstruction residual " + std::to_string(f.residual));
  return f;
}

/// g4_embed(M) g4_embed(N) = g4_embed(phi) t3_embed(gamma).
struct G4Product {
  G4 phi;
  JetElement gamma;
};

inline G4Product g4_product(const GroupTag& g, const G4& m, const G4& n) {
  const T3Factorization f = t3_factorize(iterated_multiply(g4_embed(g, m), g4_embed(g, n)));
  return {f.g4, f.t3};
}

/// t3_embed(t) g4_embed(M) = g4_embed(t ▷ M) t3_embed(sigma(t, M)).
struct MixedProduct {
  G4 act;
  JetElement sigma;
};

inline MixedProduct t3_g4_product(const JetElement& t, const G4& m) {
  const T3Factorization f = t3_factorize(iterated_multiply(t3_embed(t), g4_embed(t.group, m)));
  return {f.g4, f.t3};
}

// ---------------------------------------------------------------------------
// T^nG inside T(T^{n-1}G), left trivialized: (h, V) with V in the Lie
// algebra of T^{n-1}G, product (h1 h2, V2 + Ad_{h2^{-1}} V1).

struct TangentJet {
  JetElement point;              // n - 1 slots
  std::vector<Matrix> velocity;  // n entries: base direction then slot directions
};

inline TangentJet tangent_embed(const JetElement& j) {
  if (j.slots.empty()) throw DimensionError("tangent_embed needs n >= 1");
  TangentJet t;
  t.point = {j.group, j.base, std::vector<Matrix>(j.slots.begin(), j.slots.end() - 1)};
  t.velocity = j.slots;
  return t;
}

/// Ad_h V for h in T^{n-1}G, computed exactly on dual numbers.
inline std::vector<Matrix> tangent_Ad(const JetElement& h, const std::vector<Matrix>& v) {
  detail::require_dim(v.size(), h.slots.size() + 1, "tangent_Ad");
  const Matrix z = zero_matrix(h.group.d);
  jet_detail::Jet<DualMatrix> hd{{h.base, z}, {}};
  for (const auto& s : h.slots) hd.slots.push_back({s, z});
  jet_detail::Jet<DualMatrix> c{{identity_matrix(h.group.d), v[0]}, {}};
  for (std::size_t i = 1; i < v.size(); ++i) c.slots.push_back({z, v[i]});
  const auto hinv = jet_detail::tn_inverse(hd);
  const auto conj = jet_detail::tn_multiply(jet_detail::tn_multiply(hd, c), hinv);
  std::vector<Matrix> out{conj.base.d};
  for (const auto& s : conj.slots) out.push_back(s.d);
  return out;
}

inline TangentJet tangent_multiply(const TangentJet& a, const TangentJet& b) {
  TangentJet r;
  r.point = tn_multiply(a.point, b.point);
  const auto moved = tangent_Ad(tn_inverse(b.point), a.velocity);
  detail::require_dim(b.velocity.size(), moved.size(), "tangent_multiply");
  for (std::size_t i = 0; i < moved.size(); ++i) r.velocity.push_back(b.velocity[i] + moved[i]);
  return r;
}

inline double tangent_distance(const TangentJet& a, const TangentJet& b) {
  double r = jet_distance(a.point, b.point);
  detail::require_dim(a.velocity.size(), b.velocity.size(), "tangent_distance");
  for (std::size_t i = 0; i < a.velocity.size(); ++i)
    r = std::max(r, (a.velocity[i] - b.velocity[i]).cwiseAbs().maxCoeff());
  return r;
}

}  // namespace unimech
