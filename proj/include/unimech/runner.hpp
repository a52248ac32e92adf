#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "unimech/dynamics.hpp"
#include "unimech/errors.hpp"
#include "unimech/io.hpp"
#include "unimech/lie_algebra.hpp"
#include "unimech/models.hpp"
#include "unimech/third_order.hpp"
#include "unimech/unified_product.hpp"

namespace unimech::runner {

using io::json;

enum ExitCode : int { ok = 0, config_error = 1, validation_failed = 2, integration_failed = 3 };

/// Tolerance from UM_TOL if set and valid, otherwise the fallback.
inline double default_tol(double fallback = 1e-10) {
  const char* s = std::getenv("UM_TOL");
  if (!s || !*s) return fallback;
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || !(v >= 0.0)) throw ConfigError(std::string("UM_TOL is not a nonnegative number: ") + s);
  return v;
}

enum class Dynamics { ep, lp, ep3 };

/// A loaded model: a unified product for ep/lp, a base algebra for ep3.
struct Model {
  std::string name;
  std::optional<UnifiedProductData> product;
  std::optional<LieAlgebra> algebra;

  std::size_t state_dim(Dynamics dyn) const {
    return dyn == Dynamics::ep3 ? 3 * algebra->dim() : product->dim();
  }
};

struct RunConfig {
  Model model;
  Dynamics dynamics = Dynamics::lp;
  EnergySpec energy;
  Vector initial;
  double h = 1e-3;
  std::size_t steps = 1;
  std::string trajectory_path;
  std::string report_path;
  std::vector<std::string> conserve;
};

inline Dynamics parse_dynamics(const std::string& s) {
  if (s == "ep") return Dynamics::ep;
  if (s == "lp") return Dynamics::lp;
  if (s == "ep3") return Dynamics::ep3;
  throw ConfigError("dynamics must be one of ep, lp, ep3 (got '" + s + "')");
}

inline UnifiedProductData kepler_from_json(const json& j, double tol) {
  KeplerParams p;
  p.e = j.value("e", p.e);
  p.m = j.value("m", p.m);
  p.k = j.value("k", p.k);
  try {
    UnifiedProductData d = kepler_algebra(p);
    d.set_tol(tol);
    return d;
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

inline UnifiedProductData tokamak_from_json(const json& j, double tol) {
  const json base = j.contains("base") ? j.at("base") : json("so3");
  TokamakParams p{io::algebra_from_json(base, tol), j.value("B_i", j.value("B", 1.0))};
  try {
    UnifiedProductData d = tokamak_algebra(p);
    d.set_tol(tol);
    return d;
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

/// Preset name ("kepler", "tokamak"), {"preset": ..., params}, or an inline
/// unified product document. For ep3 the model is a base algebra.
inline Model load_model(const json& j, Dynamics dyn, double tol) {
  Model m;
  if (dyn == Dynamics::ep3) {
    const json a = j.is_object() && j.contains("algebra") ? j.at("algebra") : j;
    m.algebra = io::algebra_from_json(a, tol);
    m.name = a.is_string() ? a.get<std::string>() : "inline algebra";
    return m;
  }
  std::string preset;
  json params = json::object();
  if (j.is_string()) {
    preset = j.get<std::string>();
  } else if (j.is_object() && j.contains("preset")) {
    preset = j.at("preset").get<std::string>();
    params = j;
  }
  if (preset.empty()) {
    m.product = io::product_from_json(j, tol);
    m.name = "inline";
  } else if (preset == "kepler") {
    m.product = kepler_from_json(params, tol);
    m.name = preset;
  } else if (preset == "tokamak") {
    m.product = tokamak_from_json(params, tol);
    m.name = preset;
  } else {
    throw ConfigError("unknown model preset '" + preset + "'");
  }
  return m;
}

inline EnergySpec load_energy(const json& j, std::size_t dim) {
  const std::string kind = j.value("kind", std::string("quadratic"));
  if (kind == "quadratic") {
    Matrix I = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    if (j.contains("inertia")) {
      const json& in = j.at("inertia");
      if (in.is_string()) {
        if (in.get<std::string>() != "identity") throw ConfigError("inertia: unknown tag '" + in.get<std::string>() + "'");
      } else if (in.is_object() && in.contains("diag")) {
        const auto d = in.at("diag").get<std::vector<double>>();
        if (d.size() != dim) throw ConfigError("inertia: diag has the wrong length");
        for (std::size_t i = 0; i < dim; ++i) I(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
      } else {
        I = io::matrix_from_json(in, "inertia");
        if (static_cast<std::size_t>(I.rows()) != dim || static_cast<std::size_t>(I.cols()) != dim)
          throw ConfigError("inertia: expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
      }
    }
    try {
      return EnergySpec::quadratic(I);
    } catch (const Error& e) {
      throw ConfigError(std::string("inertia: ") + e.what());
    }
  }
  if (kind == "blackbox") {
    const std::string expr = j.value("expression", std::string("half_norm_sq"));
    Vector w = Vector::Ones(static_cast<Eigen::Index>(dim));
    if (j.contains("weights")) {
      const auto ws = j.at("weights").get<std::vector<double>>();
      if (ws.size() != dim) throw ConfigError("energy: weights have the wrong length");
      for (std::size_t i = 0; i < dim; ++i) w[static_cast<Eigen::Index>(i)] = ws[i];
    }
    if (expr != "half_norm_sq") throw ConfigError("energy: unknown expression tag '" + expr + "'");
    const double eps = j.value("fd_eps", 1e-6);
    try {
      return EnergySpec::blackbox([w](const Vector& x) { return 0.5 * x.dot(w.cwiseProduct(x)); }, dim, eps);
    } catch (const Error& e) {
      throw ConfigError(std::string("energy: ") + e.what());
    }
  }
  throw ConfigError("energy: kind must be quadratic or blackbox");
}

inline RunConfig load_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected an object");
  const double tol = default_tol();
  RunConfig c;
  c.dynamics = parse_dynamics(io::io_detail::get<std::string>(j, "dynamics", "config"));
  if (!j.contains("model")) throw ConfigError("config: missing key 'model'");
  c.model = load_model(j.at("model"), c.dynamics, tol);
  const std::size_t dim = c.model.state_dim(c.dynamics);
  c.energy = load_energy(j.value("energy", json::object()), dim);
  const auto init = io::io_detail::get<std::vector<double>>(j, "initial", "config");
  if (init.size() != dim)
    throw ConfigError("initial: expected " + std::to_string(dim) + " coordinates, got " + std::to_string(init.size()));
  c.initial = Eigen::Map<const Vector>(init.data(), static_cast<Eigen::Index>(init.size()));
  const json integ = j.value("integrator", json::object());
  c.h = integ.value("h", 1e-3);
  const long steps = integ.value("steps", 1000L);
  if (!(c.h > 0.0)) throw ConfigError("integrator: h must be positive");
  if (steps < 1) throw ConfigError("integrator: steps must be at least 1");
  c.steps = static_cast<std::size_t>(steps);
  const json out = j.value("outputs", json::object());
  c.trajectory_path = out.value("trajectory_path", std::string("trajectory.csv"));
  c.report_path = out.value("report_path", std::string("report.json"));
  c.conserve = j.value("conserve", std::vector<std::string>{});
  if (c.energy.kind() == EnergySpec::Kind::blackbox && c.dynamics != Dynamics::lp)
    throw ConfigError("energy: ep and ep3 need a quadratic energy");
  return c;
}

inline std::vector<std::string> state_labels(const RunConfig& c) {
  if (c.dynamics != Dynamics::ep3) return c.model.product->labels();
  std::vector<std::string> out;
  for (int b = 0; b < 3; ++b)
    for (const auto& l : c.model.algebra->labels()) out.push_back("pi" + std::to_string(b) + "." + l);
  return out;
}

/// Conserved-functional tags: hamiltonian, energy, norm_sq_block (every
/// block) and norm_sq_block:<block> with blocks m, h (ep/lp) or 0, 1, 2 (ep3).
inline std::vector<Functional> build_functionals(const RunConfig& c) {
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> blocks;
  if (c.dynamics == Dynamics::ep3) {
    const std::size_t n = c.model.algebra->dim();
    for (std::size_t b = 0; b < 3; ++b) blocks.push_back({std::to_string(b), {b * n, n}});
  } else {
    blocks.push_back({"m", {0, c.model.product->dim_m()}});
    blocks.push_back({"h", {c.model.product->dim_m(), c.model.product->dim_h()}});
  }
  std::vector<Functional> fs;
  for (const auto& tag : c.conserve) {
    if (tag == "hamiltonian" || tag == "energy") {
      fs.push_back(hamiltonian_functional(c.energy, tag));
    } else if (tag == "norm_sq_block") {
      for (const auto& [name, range] : blocks) fs.push_back(norm_sq_block(range.first, range.second, "norm_sq_block:" + name));
    } else if (tag.rfind("norm_sq_block:", 0) == 0) {
      const std::string want = tag.substr(14);
      bool found = false;
      for (const auto& [name, range] : blocks)
        if (name == want) {
          fs.push_back(norm_sq_block(range.first, range.second, tag));
          found = true;
        }
      if (!found) throw ConfigError("conserve: unknown block '" + want + "'");
    } else {
      throw ConfigError("conserve: unknown functional '" + tag + "'");
    }
  }
  return fs;
}

/// Prints the algebra and axiom checks; true if everything passes.
inline bool check_model(const Model& m, std::ostream& out) {
  if (m.algebra) {
    const ValidationReport r = m.algebra->validate();
    out << "algebra " << m.name << ": antisymmetry " << r.antisymmetry_residual << ", jacobi " << r.jacobi_residual
        << (r.passed() ? "  ok\n" : "  FAILED\n");
    return r.passed();
  }
  const UnifiedProductData& d = *m.product;
  const AxiomReport ar = validate_axioms(d);
  out << "model " << m.name << " (dim_m=" << d.dim_m() << ", dim_h=" << d.dim_h() << ", tol=" << ar.tol << ")\n";
  for (const auto& a : ar.axioms) {
    out << "  " << a.name << ": " << a.residual << (a.residual <= ar.tol ? "  ok" : "  FAILED");
    if (a.residual > ar.tol && !a.witness.empty()) {
      out << "  witness (";
      for (std::size_t i = 0; i < a.witness.size(); ++i) out << (i ? "," : "") << a.witness[i];
      out << ")";
    }
    out << "  [" << a.description << "]\n";
  }
  const ValidationReport jr = compose_bracket(d).validate();
  out << "  composed jacobi: " << jr.jacobi_residual << (jr.passed() ? "  ok\n" : "  FAILED\n");
  if (!ar.passed()) {
    out << "failing axioms:";
    for (const auto& n : ar.failing()) out << ' ' << n;
    out << '\n';
  }
  return ar.passed() && jr.passed();
}

inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (!check_model(c.model, out)) {
    err << "model validation failed\n";
    return validation_failed;
  }
  Field field;
  const EnergySpec& spec = c.energy;
  if (c.dynamics == Dynamics::ep) field = ep_flat_field(*c.model.product, spec);
  else if (c.dynamics == Dynamics::lp) field = lp_flat_field(*c.model.product, spec);
  else field = [g = *c.model.algebra, spec](const Vector& y) { return ep3_field(g, spec, y); };

  Trajectory tr;
  try {
    tr = rk4(field, c.initial, c.h, c.steps);
  } catch (const NonFiniteState& e) {
    err << "integration failed: " << e.what() << '\n';
    return integration_failed;
  }

  // <mu_dot, dH/dmu> along the run.
  double ortho = 0.0;
  for (const auto& y : tr.states) ortho = std::max(ortho, std::abs(field(y).dot(spec.gradient(y, Side::momentum))));

  {
    std::ofstream f(c.trajectory_path);
    if (!f) throw ConfigError("cannot write '" + c.trajectory_path + "'");
    io::write_csv(f, tr, state_labels(c));
  }
  const auto rep = conservation_report(tr, build_functionals(c));
  const char* dyn = c.dynamics == Dynamics::ep ? "ep" : c.dynamics == Dynamics::lp ? "lp" : "ep3";
  json doc = {{"model", c.model.name},       {"dynamics", dyn},
              {"h", c.h},                    {"steps", c.steps},
              {"rows", tr.size()},           {"max_field_orthogonality", ortho},
              {"conservation", io::report_to_json(rep)}};
  {
    std::ofstream f(c.report_path);
    if (!f) throw ConfigError("cannot write '" + c.report_path + "'");
    f << doc.dump(2) << '\n';
  }
  for (const auto& e : rep)
    out << e.functional << ": initial " << io::format_double(e.initial) << ", max_rel_drift " << e.max_rel_drift << '\n';
  out << "wrote " << tr.size() << " rows to " << c.trajectory_path << ", report to " << c.report_path << '\n';
  return ok;
}

/// Runs a config file; maps errors to exit codes.
inline int run_file(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    return run(load_config(io::read_file(path)), out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  }
}

/// Validates the model of a config file (or a bare model document).
inline int validate_file(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const json j = io::read_file(path);
    const double tol = default_tol();
    Model m;
    if (j.is_object() && j.contains("model")) {
      const Dynamics dyn = parse_dynamics(j.value("dynamics", std::string("lp")));
      m = load_model(j.at("model"), dyn, tol);
    } else {
      m = load_model(j, Dynamics::lp, tol);
    }
    return check_model(m, out) ? ok : validation_failed;
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  }
}

inline void print_tensor(std::ostream& out, const char* name, const Tensor3& t,
                         const std::vector<std::string>& ol, const std::vector<std::string>& ll,
                         const std::vector<std::string>& rl) {
  std::size_t count = 0;
  for (std::size_t k = 0; k < t.out_dim(); ++k)
    for (std::size_t i = 0; i < t.left_dim(); ++i)
      for (std::size_t j = 0; j < t.right_dim(); ++j)
        if (t(k, i, j) != 0.0) ++count;
  out << name << ": " << count << " nonzero\n";
  for (std::size_t k = 0; k < t.out_dim(); ++k)
    for (std::size_t i = 0; i < t.left_dim(); ++i)
      for (std::size_t j = 0; j < t.right_dim(); ++j)
        if (t(k, i, j) != 0.0)
          out << "  " << name << "[" << ol[k] << "](" << ll[i] << ", " << rl[j] << ") = " << io::format_double(t(k, i, j))
              << '\n';
}

inline void describe(const Model& m, std::ostream& out) {
  if (m.algebra) {
    const LieAlgebra& a = *m.algebra;
    out << "algebra " << m.name << "\ndim=" << a.dim() << "\nlabels:";
    for (const auto& l : a.labels()) out << ' ' << l;
    out << '\n';
    print_tensor(out, "c", a.constants(), a.labels(), a.labels(), a.labels());
    return;
  }
  const UnifiedProductData& d = *m.product;
  const auto& ml = d.m_labels();
  const auto& hl = d.h().labels();
  out << "model " << m.name << "\ndim_m=" << d.dim_m() << "\ndim_h=" << d.dim_h() << "\nm labels:";
  for (const auto& l : ml) out << ' ' << l;
  out << "\nh labels:";
  for (const auto& l : hl) out << ' ' << l;
  out << '\n';
  print_tensor(out, "h_bracket", d.h().constants(), hl, hl, hl);
  print_tensor(out, "act", d.act(), ml, hl, ml);
  print_tensor(out, "phi", d.phi(), ml, ml, ml);
  print_tensor(out, "theta", d.theta(), hl, ml, ml);
  print_tensor(out, "psi", d.psi(), hl, hl, ml);
}

}  // namespace unimech::runner
