#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sns/commands.hpp"
#include "sns/errors.hpp"

using namespace sns;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "sns2d_cli_test" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json minimal(const fs::path& out) {
  return {{"seed", 11},
          {"out", out.string()},
          {"lattice", {{"kmax", 4}, {"n_forced", 2}}},
          {"forcing", {{"flat", 0.5}}},
          {"integrator", {{"dt", 0.01}, {"t_end", 1.0}}}};
}

std::string config_error(const json& doc, const std::string& command) {
  try {
    parse_config(doc, command);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SNS2D_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("minimal simulate run writes its files") {
  const fs::path out = scratch("minimal");
  const CommandResult r = cmd_simulate(parse_config(minimal(out), "simulate"));
  CHECK(r.exit_code == kExitPass);
  for (const char* f : {"trajectory.csv", "fields.csv", "dn.csv", "manifest.json"}) CHECK(fs::exists(out / f));
  const json m = read_json(out / "manifest.json");
  CHECK(m["manifest"]["seed"] == 11);
  CHECK(m["manifest"]["substreams"] == json::array({"simulate"}));
  CHECK(m["lattice"]["kmax"] == 4);
  CHECK(m["integrator"]["scheme"] == "exponential");
  std::ifstream traj(out / "trajectory.csv");
  std::string line;
  int rows = -1;
  while (std::getline(traj, line)) ++rows;
  CHECK(rows == 101);
}

TEST_CASE("same seed gives byte-identical data, a different seed does not") {
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  cmd_simulate(parse_config(minimal(a), "simulate"));
  cmd_simulate(parse_config(minimal(b), "simulate"));
  json other = minimal(c);
  other["seed"] = 12;
  cmd_simulate(parse_config(other, "simulate"));
  for (const char* f : {"trajectory.csv", "fields.csv", "dn.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) != slurp(c / f));
  }
}

TEST_CASE("t_end = 0 records a single snapshot") {
  const fs::path out = scratch("t0");
  json doc = minimal(out);
  doc["integrator"]["t_end"] = 0.0;
  doc["initial"] = {{"type", "random"}, {"norm", 1.0}};
  const CommandResult r = cmd_simulate(parse_config(doc, "simulate"));
  CHECK(r.exit_code == kExitPass);
  const std::string traj = slurp(out / "trajectory.csv");
  CHECK(std::count(traj.begin(), traj.end(), '\n') == 2);
  const std::size_t row = traj.find("\n0,");
  REQUIRE(row != std::string::npos);
  CHECK(std::stod(traj.substr(row + 3)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(slurp(out / "dn.csv") == "n,D_n\n");
}

TEST_CASE("validation errors carry field paths") {
  const fs::path out = scratch("errors");
  json doc = minimal(out);
  doc["integrator"]["dt"] = -0.1;
  CHECK(config_error(doc, "simulate") == "config.integrator.dt: must be positive");

  doc = minimal(out);
  doc["lattice"]["kmaxx"] = 3;
  CHECK(config_error(doc, "simulate") == "config.lattice.kmaxx: unknown key");

  doc = minimal(out);
  doc["colour"] = "blue";
  CHECK(config_error(doc, "simulate") == "config.colour: unknown key");

  doc = minimal(out);
  doc["integrator"]["dt"] = "small";
  CHECK(config_error(doc, "simulate") == "config.integrator.dt: expected a number");

  doc = minimal(out);
  doc["integrator"]["t_end"] = 1.005;
  CHECK(config_error(doc, "simulate").rfind("config.integrator.t_end:", 0) == 0);

  doc = minimal(out);
  doc["forcing"] = {{"modes", json::array({{{"k", {1, 0}}, {"gamma", 1.0}}})}};
  CHECK(config_error(doc, "simulate").rfind("config.forcing:", 0) == 0);

  doc = minimal(out);
  doc["estimate"] = {{"checks", json::array({{{"type", "exp_moment"}, {"D", 3.0}}})}};
  CHECK(config_error(doc, "estimate") == "config.estimate.checks[0].D: unknown key");

  doc = minimal(out);
  doc["verify"] = {{"checks", {"orthogonality", "nonsense"}}};
  CHECK(config_error(doc, "verify") == "config.verify.checks[1]: unknown check 'nonsense'");

  CHECK_THROWS_AS(parse_config(minimal(out), "launch"), ConfigError);
}

TEST_CASE("explicit forcing table round-trips through the manifest") {
  const fs::path out = scratch("modes");
  json doc = minimal(out);
  json modes = json::array();
  for (auto [a, b] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}})
    modes.push_back({{"k", {a, b}}, {"gamma", 0.25}});
  doc["forcing"] = {{"modes", modes}};
  const RunConfig cfg = parse_config(doc, "simulate");
  CHECK(cfg.forcing.build(cfg.lattice()).R() == doctest::Approx(2.0));
  const RunConfig again = parse_config(cfg.to_json(), "simulate");
  CHECK(again.to_json() == cfg.to_json());
}

TEST_CASE("manifest replay reproduces data files bitwise") {
  const fs::path a = scratch("replay_a"), b = scratch("replay_b");
  json doc = minimal(a);
  doc["initial"] = {{"type", "random"}, {"norm", 2.0}, {"decay", 1.0}};
  doc["integrator"]["t_end"] = 2.0;
  doc["integrator"]["record_stride"] = 5;
  cmd_simulate(parse_config(doc, "simulate"));
  json manifest = read_json(a / "manifest.json");
  CHECK(manifest["manifest"]["substreams"] == json::array({"initial", "simulate"}));
  manifest["out"] = b.string();
  const CommandResult r = cmd_simulate(parse_config(manifest, "simulate"));
  REQUIRE(!r.files.empty());
  for (const auto& f : r.files) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("estimate: minimum sample count and replay") {
  const fs::path a = scratch("est_a"), b = scratch("est_b");
  json doc = minimal(a);
  doc["lattice"] = {{"kmax", 4}, {"n_forced", 2}};
  doc["estimate"] = {{"samples", 120}, {"checks", json::array({{{"type", "exp_moment"}, {"t", 0.5}}})}};
  const CommandResult r = cmd_estimate(parse_config(doc, "estimate"));
  CHECK(r.exit_code == kExitPass);
  CHECK(r.report["checks"][0]["pass"] == true);
  json manifest = read_json(a / "manifest.json");
  CHECK(manifest["manifest"]["substreams"] == json::array({"estimate_0_exp_moment"}));
  manifest["out"] = b.string();
  manifest["workers"] = 3;
  cmd_estimate(parse_config(manifest, "estimate"));
  CHECK(slurp(a / "estimate_report.json") == slurp(b / "estimate_report.json"));

  doc["estimate"]["samples"] = 40;
  CHECK(config_error(doc, "estimate") == "config.estimate.samples: must be >= min_samples = 100");
  doc["estimate"]["samples"] = 200;
  doc["estimate"]["checks"][0]["samples"] = 10;
  CHECK(config_error(doc, "estimate") == "config.estimate.checks[0].samples: must be >= min_samples = 100");
}

TEST_CASE("verify report schema and negative control") {
  const fs::path a = scratch("verify_a"), b = scratch("verify_b");
  json doc = minimal(a);
  doc["lattice"] = {{"kmax", 6}, {"n_forced", 2}};
  doc["verify"] = {{"checks", {"orthogonality", "kernel_equivalence", "delta_f"}}, {"fields", 5}, {"delta_f_draws", 10}};
  const CommandResult ok = cmd_verify(parse_config(doc, "verify"));
  CHECK(ok.exit_code == kExitPass);
  const json rep = read_json(a / "verify_report.json");
  for (const auto& c : rep["checks"])
    for (const char* key : {"check", "params", "lhs", "rhs", "pass", "slack"}) CHECK(c.contains(key));

  doc["out"] = b.string();
  doc["verify"]["kernel"] = "corrupted";
  const CommandResult bad = cmd_verify(parse_config(doc, "verify"));
  CHECK(bad.exit_code == kExitCheckFailed);
  CHECK(bad.report["pass"] == false);
}

TEST_CASE("toy: over-budget refusal and config echo") {
  const fs::path out = scratch("toy");
  json doc = {{"out", out.string()}, {"toy", {{"chain", {{"grid_cells", 40}, {"truncation", 3}}}}}};
  CHECK(config_error(doc, "toy") == "config.toy.chain: G^N = 64000 states exceeds max_states = 4096");
  CHECK(!fs::exists(out));

  doc["toy"] = {{"chain", {{"grid_cells", 6}}}, {"n_max", 10}};
  const CommandResult r = cmd_toy(parse_config(doc, "toy"));
  CHECK(r.exit_code == kExitPass);
  const json m = read_json(out / "manifest.json");
  CHECK(m["toy"]["chain"]["grid_cells"] == 6);
  CHECK(m["toy"]["n_max"] == 10);
  const std::string curve = slurp(out / "tv_curve.csv");
  CHECK(curve.rfind("chain,n,tv,envelope\ntwo_state,1,", 0) == 0);
  CHECK(r.report["two_state"]["pass"] == true);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("exit");
  fs::create_directories(dir);
  const auto write = [&](const std::string& name, const json& doc) {
    std::ofstream(dir / name) << doc.dump();
    return (dir / name).string();
  };
  json doc = minimal(dir / "run");
  const std::string good = write("good.json", doc);
  CHECK(run_cli("simulate --config " + good) == 0);
  CHECK(run_cli("simulate --config " + (dir / "run" / "manifest.json").string() + " --out " +
                (dir / "rerun").string() + " --seed 11") == 0);
  CHECK(slurp(dir / "run" / "fields.csv") == slurp(dir / "rerun" / "fields.csv"));
  CHECK(run_cli("verify --config " + (dir / "run" / "manifest.json").string()) == 2);

  doc["lattice"]["kmax"] = "four";
  CHECK(run_cli("simulate --config " + write("bad.json", doc)) == 2);
  CHECK(run_cli("simulate --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("launch") == 2);

  json blow = minimal(dir / "blow");
  blow["integrator"] = {{"dt", 0.5}, {"t_end", 50.0}, {"scheme", "euler_maruyama"}};
  blow["initial"] = {{"type", "random"}, {"norm", 50.0}};
  CHECK(run_cli("simulate --config " + write("blow.json", blow)) == 3);
  const json m = read_json(dir / "blow" / "manifest.json");
  CHECK(m["manifest"]["status"] == "blowup");
  CHECK(m["manifest"].contains("blowup_time"));

  json bad_kernel = minimal(dir / "vbad");
  bad_kernel["verify"] = {{"kernel", "corrupted"}, {"checks", {"orthogonality"}}, {"fields", 3}};
  CHECK(run_cli("verify --config " + write("vbad.json", bad_kernel)) == 1);
}
