// umech: run, validate and describe unified-product models.

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <iostream>
#include <string>

#include "unimech/io.hpp"
#include "unimech/models.hpp"
#include "unimech/runner.hpp"

namespace rn = unimech::runner;

namespace {

int describe(const std::string& what, double e, double m, double k, const std::string& base, double B) {
  using unimech::io::json;
  try {
    const double tol = rn::default_tol();
    rn::Model model;
    if (what == "kepler") {
      model = rn::load_model(json{{"preset", "kepler"}, {"e", e}, {"m", m}, {"k", k}}, rn::Dynamics::lp, tol);
      std::cout << "coupling 2e/(m^3 k^2) = " << unimech::io::format_double(unimech::KeplerParams{e, m, k}.coupling())
                << '\n';
    } else if (what == "tokamak") {
      model = rn::load_model(json{{"preset", "tokamak"}, {"base", base}, {"B_i", B}}, rn::Dynamics::lp, tol);
      std::cout << "base " << base << ", B_i = " << unimech::io::format_double(B) << '\n';
    } else if (what.size() > 5 && what.substr(what.size() - 5) == ".json") {
      const json j = unimech::io::read_file(what);
      if (j.is_object() && j.contains("model")) {
        model = rn::load_model(j.at("model"), rn::parse_dynamics(j.value("dynamics", std::string("lp"))), tol);
      } else if (j.is_object() && j.contains("dim_m")) {
        model = rn::load_model(j, rn::Dynamics::lp, tol);
      } else {
        model = rn::load_model(j, rn::Dynamics::ep3, tol);
      }
    } else {
      model = rn::load_model(json(what), rn::Dynamics::ep3, tol);
    }
    rn::describe(model, std::cout);
    return rn::ok;
  } catch (const unimech::Error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return rn::config_error;
  } catch (const unimech::io::json::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return rn::config_error;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unified-product Lie algebras: validation and reduced dynamics"};
  app.require_subcommand(1);

  std::string run_cfg;
  auto* run = app.add_subcommand("run", "Integrate a model config and write trajectory CSV and report JSON");
  run->add_option("config", run_cfg, "Config JSON file")->required();

  std::string val_cfg;
  auto* validate = app.add_subcommand("validate", "Check the algebra and axioms of a config or model file");
  validate->add_option("config", val_cfg, "Config or model JSON file")->required();

  std::string what;
  double e = -0.5, m = 1.0, k = 1.0, B = 1.0;
  std::string base = "so3";
  auto* desc = app.add_subcommand("describe", "Print dimensions, labels and nonzero structure tensors");
  desc->add_option("model", what, "kepler, tokamak, an algebra preset, or a JSON file")->required();
  desc->add_option("--e", e, "Kepler energy level");
  desc->add_option("--m", m, "Kepler mass");
  desc->add_option("--k", k, "Kepler force constant");
  desc->add_option("--base", base, "Tokamak base algebra");
  desc->add_option("--B", B, "Tokamak compressibility B_i");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex) == 0 ? 0 : rn::config_error;
  }

  if (*run) return rn::run_file(run_cfg, std::cout, std::cerr);
  if (*validate) return rn::validate_file(val_cfg, std::cout, std::cerr);
  return describe(what, e, m, k, base, B);
}
