#include <oifem/driver.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace oifem;
namespace ot = oifem::testing;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("oifem_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string &name) const { return path_ / name; }

private:
  static int &counter() {
    static int c = 0;
    return c;
  }
  fs::path path_;
};

std::string slurp(const fs::path &p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void spit(const fs::path &p, const std::string &s) { std::ofstream(p) << s; }

RunConfig config_from(const std::string &text) {
  std::istringstream is(text);
  return parse_config(is);
}

int run_cli(const std::string &args) {
  const std::string cmd = std::string(OIFEM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> key_values(const std::string &text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      continue;
    const auto end = line.find(' ', eq);
    out[line.substr(0, eq)] = line.substr(eq + 1, end == std::string::npos ? std::string::npos : end - eq - 1);
  }
  return out;
}

} // namespace

TEST(Config, DefaultsAndOverrides) {
  const RunConfig cfg = config_from("# slab\nnx = 4\nny=2\nlaw = power:3 # trailing\nphi_b = 2.5\n\n");
  EXPECT_EQ(cfg.mesh, RunConfig::MeshKind::slab);
  EXPECT_EQ(cfg.nx, 4);
  EXPECT_EQ(cfg.ny, 2);
  EXPECT_EQ(cfg.law, "power:3");
  EXPECT_EQ(cfg.phi_b, 2.5);
  EXPECT_EQ(cfg.phi_a, 0.0);
  EXPECT_EQ(cfg.tol, 1e-10);
  EXPECT_EQ(cfg.edge_points, 2);
  EXPECT_EQ(cfg.effective_residual_bound(), 1e-9);
}

TEST(Config, ErrorsCarryLineNumbers) {
  const auto line_of_error = [](const std::string &text) {
    try {
      config_from(text);
    } catch (const ParseError &e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of_error("nx = 2\nbogus = 1\n"), 2);
  EXPECT_EQ(line_of_error("nx = 2\n\nnx = 3\n"), 3);
  EXPECT_EQ(line_of_error("nx = two\n"), 1);
  EXPECT_EQ(line_of_error("nx 2\n"), 1);
  EXPECT_EQ(line_of_error("phi_a =\n"), 1);
  EXPECT_EQ(line_of_error("mesh = grid\n"), 1);
  EXPECT_THROW(config_from("law = power:0.5\n"), Error);
  EXPECT_THROW(config_from("tol = 0\n"), Error);
  EXPECT_THROW(config_from("mesh = file\n"), Error);
}

TEST(Driver, SolveWritesAllOutputs) {
  TempDir dir;
  RunConfig cfg = config_from("nx = 2\nny = 2\nphi_b = 3\n");
  cfg.output_prefix = (dir / "run").string();
  std::ostringstream log, err;
  ASSERT_EQ(run_solve(cfg, log, err), exit_ok) << err.str();
  EXPECT_NE(log.str().find("converged=true"), std::string::npos);

  const auto report = nlohmann::json::parse(slurp(dir / "run.report.json"));
  EXPECT_TRUE(report["converged"].get<bool>());
  EXPECT_TRUE(report["diagnostics_within_bounds"].get<bool>());
  EXPECT_NEAR(report["final_energy"].get<double>(), ot::kPrototypeEnergy, 1e-10);
  EXPECT_NEAR(report["oracle_flux"].get<double>(), ot::kPrototypeFlux, 1e-14);
  EXPECT_LE(report["oracle_infnorm_error"].get<double>(), 1e-8);
  EXPECT_EQ(report["energy_history"].size(), report["residual_norm_history"].size());

  const auto diag = nlohmann::json::parse(slurp(dir / "run.diag.json"));
  EXPECT_EQ(diag.size(), 10u);
  EXPECT_LE(diag["energy_gap"].get<double>(), 1e-8);

  const std::string csv = slurp(dir / "run.field.csv");
  EXPECT_EQ(csv.rfind("vertex_index,region,x,y,value\n", 0), 0u);
}

TEST(Driver, ExitCodes) {
  TempDir dir;
  std::ostringstream log, err;

  RunConfig capped = config_from("nx = 2\nny = 2\nphi_b = 30\nmax_iter = 1\n");
  capped.output_prefix = (dir / "capped").string();
  EXPECT_EQ(run_solve(capped, log, err), exit_not_converged);

  RunConfig strict = config_from("nx = 2\nny = 2\nphi_b = 3\ngap_bound = 1e-30\nresidual_bound = 1e-30\n");
  strict.output_prefix = (dir / "strict").string();
  EXPECT_EQ(run_solve(strict, log, err), exit_diagnostics_failed);

  RunConfig missing = config_from("mesh = file\nmesh_file = /nonexistent/mesh.oimesh\n");
  missing.output_prefix = (dir / "missing").string();
  EXPECT_EQ(run_solve(missing, log, err), exit_input_error);

  EXPECT_EQ(run_nfinfo("power:0.5", log, err), exit_input_error);
}

TEST(Driver, OracleOutput) {
  std::ostringstream out, err;
  ASSERT_EQ(run_oracle(config_from("nx = 2\nphi_b = 3\n"), out, err), exit_ok);
  std::istringstream is(out.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line.substr(0, 5), "flux,");
  EXPECT_NEAR(std::stod(line.substr(5)), ot::kPrototypeFlux, 1e-15);
  EXPECT_NE(out.str().find("x,region,phi\n"), std::string::npos);
  EXPECT_EQ(run_oracle(config_from("mesh = file\nmesh_file = m\n"), out, err), exit_input_error);
}

TEST(Driver, NfinfoVerdicts) {
  std::ostringstream out, err;
  ASSERT_EQ(run_nfinfo("sinh-bv", out, err), exit_ok);
  auto kv = key_values(out.str());
  EXPECT_EQ(kv["delta2.Phi"], "no");
  EXPECT_EQ(kv["delta2.Psi"], "no");
  EXPECT_EQ(kv["delta2.Phi*"], "yes");
  EXPECT_EQ(kv["delta2.Psi*"], "yes");
  EXPECT_EQ(kv["assumption.Delta"], "yes");

  std::ostringstream out2;
  ASSERT_EQ(run_nfinfo("power:2", out2, err), exit_ok);
  kv = key_values(out2.str());
  for (const char *k : {"delta2.Phi", "delta2.Psi", "delta2.Phi*", "delta2.Psi*", "assumption.Delta"})
    EXPECT_EQ(kv[k], "yes") << k;
}

TEST(Binary, SubcommandsAndExitCodes) {
  TempDir dir;
  const auto cfg = dir / "slab.cfg";
  spit(cfg, "nx = 2\nny = 1\nphi_b = 3\noutput_prefix = " + (dir / "out").string() + "\n");
  EXPECT_EQ(run_cli("solve " + cfg.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out.field.csv"));
  EXPECT_EQ(run_cli("oracle " + cfg.string()), 0);
  EXPECT_EQ(run_cli("nfinfo sinh-bv"), 0);
  EXPECT_EQ(run_cli("nfinfo power:0.5"), 1);
  EXPECT_EQ(run_cli("solve " + (dir / "absent.cfg").string()), 1);

  const auto bad = dir / "bad.cfg";
  spit(bad, "nx = 2\nwhat = 1\n");
  EXPECT_EQ(run_cli("solve " + bad.string()), 1);
}

TEST(Binary, RepeatedRunsAreByteIdentical) {
  TempDir dir;
  for (const char *name : {"a", "b"}) {
    const auto cfg = dir / (std::string(name) + ".cfg");
    spit(cfg, "nx = 3\nny = 2\nphi_b = 3\noutput_prefix = " + (dir / name).string() + "\n");
    ASSERT_EQ(run_cli("solve " + cfg.string()), 0);
  }
  for (const char *suffix : {".field.csv", ".diag.json", ".report.json"})
    EXPECT_EQ(slurp(dir / ("a" + std::string(suffix))), slurp(dir / ("b" + std::string(suffix)))) << suffix;
}
