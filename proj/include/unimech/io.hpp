#pragma once

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "unimech/dynamics.hpp"
#include "unimech/errors.hpp"
#include "unimech/jets.hpp"
#include "unimech/lie_algebra.hpp"
#include "unimech/unified_product.hpp"

namespace unimech::io {

using json = nlohmann::json;

/// Shortest representation that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline json parse(const std::string& text, const std::string& what = "document") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

namespace io_detail {

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
  }
}

inline std::vector<std::string> labels(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return {};
  return get<std::vector<std::string>>(j, key, where);
}

/// Sparse [[k, i, j, value], ...] entries (0-based) into a dense tensor.
inline Tensor3 sparse_tensor(const json& j, const char* key, std::size_t o, std::size_t l, std::size_t r,
                             const std::string& where) {
  Tensor3 t(o, l, r);
  if (!j.contains(key)) return t;
  const json& arr = j.at(key);
  if (!arr.is_array()) throw ConfigError(where + ": '" + key + "' must be an array");
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 4) throw ConfigError(where + ": '" + key + "' entries must be [k, i, j, value]");
    try {
      const auto k = e[0].get<std::size_t>(), i = e[1].get<std::size_t>(), jj = e[2].get<std::size_t>();
      if (k >= o || i >= l || jj >= r) throw ConfigError(where + ": '" + key + "' index out of range");
      t(k, i, jj) += e[3].get<double>();
    } catch (const json::exception& ex) {
      throw ConfigError(where + ": '" + key + "' entry: " + ex.what());
    }
  }
  return t;
}

inline json sparse_entries(const Tensor3& t, bool upper_only = false) {
  json arr = json::array();
  for (std::size_t k = 0; k < t.out_dim(); ++k)
    for (std::size_t i = 0; i < t.left_dim(); ++i)
      for (std::size_t j = 0; j < t.right_dim(); ++j) {
        if (upper_only && i >= j) continue;
        if (t(k, i, j) != 0.0) arr.push_back({k, i, j, t(k, i, j)});
      }
  return arr;
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Algebras

/// Either a preset name ("so3", "tangent(sl2)", "abelian(4)") or
/// {"dim": n, "labels": [...], "c": [[k, i, j, value], ...]} with i < j.
inline LieAlgebra algebra_from_json(const json& j, double tol = 1e-10) {
  if (j.is_string()) {
    try {
      LieAlgebra a = presets::by_name(j.get<std::string>());
      a.set_tol(tol);
      return a;
    } catch (const UnknownPreset& e) {
      throw ConfigError(e.what());
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (!j.is_object()) throw ConfigError("algebra: expected a preset name or an object");
  if (j.contains("preset")) {
    const std::size_t n = j.value("n", std::size_t{0});
    try {
      LieAlgebra a = presets::by_name(j.at("preset").get<std::string>(), n);
      a.set_tol(tol);
      return a;
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  const auto dim = io_detail::get<std::size_t>(j, "dim", "algebra");
  if (dim == 0) throw ConfigError("algebra: dim must be positive");
  std::vector<LieAlgebra::Entry> entries;
  if (j.contains("c")) {
    for (const auto& e : j.at("c")) {
      if (!e.is_array() || e.size() != 4) throw ConfigError("algebra: 'c' entries must be [k, i, j, value]");
      try {
        entries.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<std::size_t>(), e[3].get<double>()});
      } catch (const json::exception& ex) {
        throw ConfigError(std::string("algebra: 'c' entry: ") + ex.what());
      }
    }
  }
  try {
    return LieAlgebra::from_entries(dim, entries, io_detail::labels(j, "labels", "algebra"), tol);
  } catch (const Error& e) {
    throw ConfigError(std::string("algebra: ") + e.what());
  }
}

inline json algebra_to_json(const LieAlgebra& a) {
  return {{"dim", a.dim()}, {"labels", a.labels()}, {"c", io_detail::sparse_entries(a.constants(), true)}};
}

/// {"dim_m": n, "m_labels": [...], "h": <algebra>, "act"|"phi"|"theta"|"psi": [[k, i, j, value], ...]}.
/// The four coupling tensors are taken as written (no antisymmetrization),
/// so violations of the axioms survive loading and are reported.
inline UnifiedProductData product_from_json(const json& j, double tol = 1e-10) {
  if (!j.is_object()) throw ConfigError("unified product: expected an object");
  const auto dm = io_detail::get<std::size_t>(j, "dim_m", "unified product");
  if (!j.contains("h")) throw ConfigError("unified product: missing key 'h'");
  LieAlgebra h = algebra_from_json(j.at("h"), tol);
  const std::size_t dh = h.dim();
  const std::string w = "unified product";
  Tensor3 act = io_detail::sparse_tensor(j, "act", dm, dh, dm, w);
  Tensor3 phi = io_detail::sparse_tensor(j, "phi", dm, dm, dm, w);
  Tensor3 theta = io_detail::sparse_tensor(j, "theta", dh, dm, dm, w);
  Tensor3 psi = io_detail::sparse_tensor(j, "psi", dh, dh, dm, w);
  try {
    return UnifiedProductData(dm, std::move(h), std::move(act), std::move(phi), std::move(theta), std::move(psi),
                              io_detail::labels(j, "m_labels", w), tol);
  } catch (const Error& e) {
    throw ConfigError(w + ": " + e.what());
  }
}

inline json product_to_json(const UnifiedProductData& d) {
  return {{"dim_m", d.dim_m()},
          {"m_labels", d.m_labels()},
          {"h", algebra_to_json(d.h())},
          {"act", io_detail::sparse_entries(d.act())},
          {"phi", io_detail::sparse_entries(d.phi())},
          {"theta", io_detail::sparse_entries(d.theta())},
          {"psi", io_detail::sparse_entries(d.psi())}};
}

// ---------------------------------------------------------------------------
// Jets

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw ConfigError(where + ": rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& r = j[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != cols) throw ConfigError(where + ": ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) {
      if (!r[static_cast<std::size_t>(k)].is_number()) throw ConfigError(where + ": non-numeric entry");
      m(i, k) = r[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return m;
}

inline json jet_to_json(const JetElement& a) {
  json slots = json::array();
  for (const auto& s : a.slots) slots.push_back(matrix_to_json(s));
  return {{"group", a.group.name()}, {"base", matrix_to_json(a.base)}, {"slots", slots}};
}

inline JetElement jet_from_json(const json& j, double tol = 1e-10) {
  JetElement a;
  try {
    a.group = GroupTag::parse(io_detail::get<std::string>(j, "group", "jet"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("jet: ") + e.what());
  }
  if (!j.contains("base")) throw ConfigError("jet: missing key 'base'");
  a.base = matrix_from_json(j.at("base"), "jet base");
  if (j.contains("slots")) {
    if (!j.at("slots").is_array()) throw ConfigError("jet: 'slots' must be an array");
    for (const auto& s : j.at("slots")) a.slots.push_back(matrix_from_json(s, "jet slot"));
  }
  a.validate(tol);
  return a;
}

// ---------------------------------------------------------------------------
// Trajectories and reports

inline void write_csv(std::ostream& out, const Trajectory& tr, const std::vector<std::string>& labels) {
  out << "t";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (std::size_t r = 0; r < tr.size(); ++r) {
    out << format_double(tr.t[r]);
    const Vector& y = tr.states[r];
    for (Eigen::Index i = 0; i < y.size(); ++i) out << ',' << format_double(y[i]);
    out << '\n';
  }
}

inline json report_to_json(const std::vector<ConservationEntry>& rep) {
  json arr = json::array();
  for (const auto& e : rep)
    arr.push_back({{"functional", e.functional},
                   {"initial", e.initial},
                   {"max_abs_drift", e.max_abs_drift},
                   {"max_rel_drift", e.max_rel_drift}});
  return arr;
}

inline json axiom_report_to_json(const AxiomReport& r) {
  json arr = json::array();
  for (const auto& a : r.axioms)
    arr.push_back({{"name", a.name}, {"description", a.description}, {"residual", a.residual},
                   {"witness", a.witness}, {"ok", a.residual <= r.tol}});
  return {{"tol", r.tol}, {"passed", r.passed()}, {"axioms", arr}};
}

}  // namespace unimech::io
