#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "unimech/io.hpp"
#include "unimech/models.hpp"
#include "unimech/runner.hpp"

using namespace unimech;
using io::json;
namespace fs = std::filesystem;
namespace rn = unimech::runner;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("unimech_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }

 private:
  fs::path path_;
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t columns(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

json kepler_lp_config(const TempDir& d, std::size_t steps = 1000) {
  return {{"model", {{"preset", "kepler"}, {"e", -0.5}, {"m", 1.0}, {"k", 1.0}}},
          {"dynamics", "lp"},
          {"energy", {{"kind", "quadratic"}, {"inertia", "identity"}}},
          {"initial", {0.1, 0.2, 0.3, 0.4, -0.5, 0.6}},
          {"integrator", {{"h", 1e-3}, {"steps", steps}}},
          {"outputs", {{"trajectory_path", d.file("traj.csv")}, {"report_path", d.file("report.json")}}},
          {"conserve", {"hamiltonian", "norm_sq_block"}}};
}

bool same_tensor(const Tensor3& a, const Tensor3& b) { return a == b; }

}  // namespace

TEST(Io, FormatDoubleRoundTrips) {
  for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) EXPECT_EQ(std::stod(io::format_double(x)), x);
  EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(Io, ParseErrorsBecomeConfigErrors) {
  EXPECT_THROW(io::parse("{\"dim\": 3, \"c\": [", "inline"), ConfigError);
  EXPECT_THROW(io::read_file("/nonexistent/unimech.json"), ConfigError);
}

TEST(Io, AlgebraForms) {
  EXPECT_EQ(io::algebra_from_json("so3").constants(), presets::so3().constants());
  EXPECT_EQ(io::algebra_from_json(json{{"preset", "abelian"}, {"n", 4}}).dim(), 4u);
  const LieAlgebra h = io::algebra_from_json(json::parse(R"({"dim": 3, "labels": ["X","Y","Z"], "c": [[2, 0, 1, 1.0]]})"));
  EXPECT_EQ(h.constants(), presets::heisenberg().constants());
  EXPECT_EQ(h.labels()[2], "Z");
  EXPECT_THROW(io::algebra_from_json("so5"), ConfigError);
  EXPECT_THROW(io::algebra_from_json(json::parse(R"({"dim": 2, "c": [[5, 0, 1, 1.0]]})")), ConfigError);
  EXPECT_THROW(io::algebra_from_json(json::parse(R"({"dim": 2, "c": [[0, 1]]})")), ConfigError);
  EXPECT_THROW(io::algebra_from_json(json::parse(R"({"c": []})")), ConfigError);
}

TEST(Io, AlgebraRoundTrip) {
  for (const char* name : {"sl2", "tangent(so3)", "heisenberg"}) {
    const LieAlgebra a = presets::by_name(name);
    const LieAlgebra b = io::algebra_from_json(io::algebra_to_json(a));
    EXPECT_EQ(a.constants(), b.constants()) << name;
    EXPECT_EQ(a.labels(), b.labels()) << name;
  }
}

TEST(Io, ProductRoundTrip) {
  for (const auto& d : {kepler_algebra({-0.5, 1.2, 0.9}), tokamak_algebra({presets::sl2(), 0.7})}) {
    const UnifiedProductData e = io::product_from_json(json::parse(io::product_to_json(d).dump()));
    EXPECT_TRUE(same_tensor(d.act(), e.act()));
    EXPECT_TRUE(same_tensor(d.phi(), e.phi()));
    EXPECT_TRUE(same_tensor(d.theta(), e.theta()));
    EXPECT_TRUE(same_tensor(d.psi(), e.psi()));
    EXPECT_EQ(d.labels(), e.labels());
  }
}

TEST(Io, CouplingTensorsAreLoadedAsWritten) {
  const json j = json::parse(R"({"dim_m": 2, "h": {"preset": "abelian", "n": 1},
                                 "theta": [[0, 0, 1, 1.0]]})");
  const UnifiedProductData d = io::product_from_json(j);
  EXPECT_EQ(d.theta()(0, 0, 1), 1.0);
  EXPECT_EQ(d.theta()(0, 1, 0), 0.0);
  EXPECT_GT(validate_axioms(d)["A1"].residual, 0.5);
  EXPECT_THROW(io::product_from_json(json::parse(R"({"dim_m": 2, "h": "so3", "act": [[0, 3, 0, 1.0]]})")), ConfigError);
  EXPECT_THROW(io::product_from_json(json::parse(R"({"dim_m": 2})")), ConfigError);
}

TEST(Io, JetRoundTrip) {
  testsupport::Rng rng(80);
  const JetElement a = rng.so3_jet(3);
  const JetElement b = io::jet_from_json(json::parse(io::jet_to_json(a).dump()));
  EXPECT_EQ(b.group, a.group);
  EXPECT_EQ(jet_distance(a, b), 0.0);
  json bad = io::jet_to_json(a);
  bad["base"][0][0] = 5.0;
  EXPECT_THROW(io::jet_from_json(bad), InvalidGroupElement);
  bad = io::jet_to_json(a);
  bad["group"] = "XY3";
  EXPECT_THROW(io::jet_from_json(bad), ConfigError);
  EXPECT_THROW(io::matrix_from_json(json::parse("[[1, 2], [3]]"), "m"), ConfigError);
}

TEST(Io, CsvLayout) {
  Trajectory tr;
  tr.t = {0.0, 0.5};
  Vector a(2), b(2);
  a << 1.0, 2.0;
  b << 0.25, -3.0;
  tr.states = {a, b};
  std::ostringstream out;
  io::write_csv(out, tr, {"x", "y"});
  EXPECT_EQ(out.str(), "t,x,y\n0,1,2\n0.5,0.25,-3\n");
}

TEST(Config, DefaultsAndLabels) {
  const rn::RunConfig c = rn::load_config(json::parse(R"({"model": "kepler", "dynamics": "ep",
                                                          "initial": [1, 0, 0, 0, 1, 0]})"));
  EXPECT_EQ(c.h, 1e-3);
  EXPECT_EQ(c.steps, 1000u);
  EXPECT_EQ(c.trajectory_path, "trajectory.csv");
  EXPECT_EQ(c.report_path, "report.json");
  EXPECT_EQ(rn::state_labels(c).front(), "v1");
  const rn::RunConfig e = rn::load_config(json::parse(R"({"model": "so3", "dynamics": "ep3",
                                                          "initial": [0,0,0,0,0,0,0,0,0]})"));
  EXPECT_EQ(rn::state_labels(e).front(), "pi0.L1");
  EXPECT_EQ(rn::state_labels(e).back(), "pi2.L3");
}

TEST(Config, Errors) {
  auto load = [](const char* text) { return rn::load_config(json::parse(text)); };
  EXPECT_THROW(load(R"({"model": "kepler", "dynamics": "lp", "initial": [1, 2]})"), ConfigError);
  EXPECT_THROW(load(R"({"model": "kepler", "dynamics": "xx", "initial": [0,0,0,0,0,0]})"), ConfigError);
  EXPECT_THROW(load(R"({"model": "orbit", "dynamics": "lp", "initial": [0,0,0,0,0,0]})"), ConfigError);
  EXPECT_THROW(load(R"({"dynamics": "lp", "initial": []})"), ConfigError);
  EXPECT_THROW(load(R"({"model": "kepler", "dynamics": "ep", "energy": {"kind": "blackbox"},
                        "initial": [0,0,0,0,0,0]})"),
               ConfigError);
  EXPECT_THROW(load(R"({"model": "kepler", "dynamics": "lp", "energy": {"inertia": {"diag": [1, 2]}},
                        "initial": [0,0,0,0,0,0]})"),
               ConfigError);
  EXPECT_THROW(load(R"({"model": "kepler", "dynamics": "lp", "energy": {"inertia": {"diag": [1, 1, 1, 1, 1, -1]}},
                        "initial": [0,0,0,0,0,0]})"),
               ConfigError);
  EXPECT_THROW(load(R"({"model": "kepler", "dynamics": "lp", "integrator": {"h": -1},
                        "initial": [0,0,0,0,0,0]})"),
               ConfigError);
  EXPECT_THROW(load(R"({"model": {"preset": "kepler", "m": 0}, "dynamics": "lp", "initial": [0,0,0,0,0,0]})"),
               ConfigError);
  const rn::RunConfig c = load(R"({"model": "kepler", "dynamics": "lp", "conserve": ["momentum"],
                                   "initial": [0,0,0,0,0,0]})");
  EXPECT_THROW(rn::build_functionals(c), ConfigError);
}

TEST(Config, FunctionalTags) {
  rn::RunConfig c = rn::load_config(json::parse(R"({"model": "kepler", "dynamics": "lp", "initial": [0,0,0,0,0,0],
      "conserve": ["energy", "norm_sq_block", "norm_sq_block:h"]})"));
  const auto fs = rn::build_functionals(c);
  ASSERT_EQ(fs.size(), 4u);
  EXPECT_EQ(fs[1].name, "norm_sq_block:m");
  EXPECT_EQ(fs[3].name, "norm_sq_block:h");
  Vector y(6);
  y << 1, 1, 1, 2, 0, 0;
  EXPECT_EQ(fs[3].f(y), 4.0);
}

TEST(Runner, KeplerLiePoissonRun) {
  TempDir d;
  const std::string cfg = d.write("cfg.json", kepler_lp_config(d).dump());
  std::ostringstream out, err;
  ASSERT_EQ(rn::run_file(cfg, out, err), rn::ok) << err.str();
  const auto lines = read_lines(d.file("traj.csv"));
  ASSERT_EQ(lines.size(), 1002u);
  EXPECT_EQ(lines.front(), "t,v1,v2,v3,eta1,eta2,eta3");
  for (const auto& l : lines) EXPECT_EQ(columns(l), 7u);
  const json rep = io::read_file(d.file("report.json"));
  EXPECT_EQ(rep.at("rows").get<int>(), 1001);
  EXPECT_EQ(rep.at("dynamics"), "lp");
  EXPECT_LE(rep.at("max_field_orthogonality").get<double>(), 1e-12);
  ASSERT_EQ(rep.at("conservation").size(), 3u);
  EXPECT_LE(rep.at("conservation")[0].at("max_rel_drift").get<double>(), 1e-10);
}

TEST(Runner, Ep3RunWritesNineColumns) {
  TempDir d;
  json c = {{"model", {{"algebra", "sl2"}}},
            {"dynamics", "ep3"},
            {"initial", {0.1, 0.2, 0.3, 0.0, 0.1, 0.2, 0.3, 0.2, 0.1}},
            {"integrator", {{"h", 1e-2}, {"steps", 50}}},
            {"outputs", {{"trajectory_path", d.file("t.csv")}, {"report_path", d.file("r.json")}}},
            {"conserve", {"hamiltonian"}}};
  std::ostringstream out, err;
  ASSERT_EQ(rn::run_file(d.write("c.json", c.dump()), out, err), rn::ok) << err.str();
  const auto lines = read_lines(d.file("t.csv"));
  EXPECT_EQ(lines.size(), 52u);
  EXPECT_EQ(columns(lines.front()), 10u);
}

TEST(Runner, AxiomViolationExitsWithValidationCode) {
  TempDir d;
  json c = kepler_lp_config(d, 10);
  c["model"] = json::parse(R"({"dim_m": 3, "h": "so3", "psi": [[0, 0, 0, 1.0], [1, 1, 0, 1.0], [2, 2, 0, 1.0]],
                               "act": [[2, 0, 1, 1.0], [1, 0, 2, -1.0], [0, 1, 2, 1.0], [2, 1, 0, -1.0],
                                       [1, 2, 0, 1.0], [0, 2, 1, -1.0]]})");
  std::ostringstream out, err;
  EXPECT_EQ(rn::run_file(d.write("bad.json", c.dump()), out, err), rn::validation_failed);
  EXPECT_NE(out.str().find("failing axioms:"), std::string::npos);
  EXPECT_FALSE(fs::exists(d.file("traj.csv")));
}

TEST(Runner, ConfigErrorsExitWithOne) {
  TempDir d;
  std::ostringstream out, err;
  EXPECT_EQ(rn::run_file(d.write("trunc.json", R"({"model": "kepler", "initial": [)"), out, err), rn::config_error);
  EXPECT_EQ(rn::run_file(d.write("type.json", R"({"model": {"preset": "kepler", "e": "x"}, "dynamics": "lp",
                                                  "initial": [0,0,0,0,0,0]})"),
                         out, err),
            rn::config_error);
  EXPECT_EQ(rn::run_file(d.file("missing.json"), out, err), rn::config_error);
  EXPECT_EQ(rn::validate_file(d.write("t2.json", "{"), out, err), rn::config_error);
}

TEST(Runner, BlowUpExitsWithIntegrationCode) {
  TempDir d;
  json c = kepler_lp_config(d, 1000);
  c["initial"] = {1e3, -2e3, 3e3, 1e3, 2e3, -1e3};
  c["integrator"] = {{"h", 1.0}, {"steps", 1000}};
  std::ostringstream out, err;
  EXPECT_EQ(rn::run_file(d.write("blow.json", c.dump()), out, err), rn::integration_failed) << err.str();
}

TEST(Runner, ValidatePresets) {
  TempDir d;
  std::ostringstream out, err;
  EXPECT_EQ(rn::validate_file(d.write("k.json", R"({"preset": "kepler", "e": -1.5})"), out, err), rn::ok);
  EXPECT_EQ(rn::validate_file(d.write("t.json", R"({"preset": "tokamak", "base": "sl2", "B_i": 0.7})"), out, err), rn::ok);
  EXPECT_EQ(rn::validate_file(d.write("e.json", R"({"model": "heisenberg", "dynamics": "ep3"})"), out, err), rn::ok);
  EXPECT_NE(out.str().find("composed jacobi"), std::string::npos);
}

TEST(Runner, DescribeListsNonzeroTensors) {
  const rn::Model m = rn::load_model("kepler", rn::Dynamics::lp, 1e-10);
  std::ostringstream out;
  rn::describe(m, out);
  const std::string s = out.str();
  EXPECT_NE(s.find("dim_m=3"), std::string::npos);
  EXPECT_NE(s.find("theta: 6 nonzero"), std::string::npos);
  EXPECT_NE(s.find("theta[eta3](v1, v2) = -1"), std::string::npos);
  EXPECT_NE(s.find("psi: 0 nonzero"), std::string::npos);
}
