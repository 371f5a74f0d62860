// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <oifem/oifem.hpp>

#include "oracles.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace oifem;
namespace ot = oifem::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double v) { return format17(v); }

double infnorm_diff(const BrokenField &a, const BrokenField &b) {
  return (a.coeffs - b.coeffs).lpNorm<Eigen::Infinity>();
}

BrokenField random_correction(const SpacePtr &s, double scale) {
  Eigen::VectorXd x(s->n_free());
  for (int i = 0; i < x.size(); ++i)
    x[i] = ot::uniform(-scale, scale);
  return extend_free(s, x);
}

// 1. P1 exactness on slabs, with runtime bound.
Outcome slab_exactness() {
  double worst = 0.0, slowest = 0.0;
  bool ok = true;
  for (int nx : {1, 2, 8})
    for (int ny : {1, 2, 8}) {
      const auto start = std::chrono::steady_clock::now();
      const SpacePtr s = make_space(generate_slab(nx, ny, 1, 1, 1));
      const DiscreteProblem prob = make_problem(s, make_prototype_laws(), 0.0, 3.0);
      SolveOptions opt;
      opt.tol = 1e-10;
      const SolveReport rep = minimize(prob, opt);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const double err = infnorm_diff(rep.final_field, interpolate(s, slab_oracle(prob.laws, 1, 1, 0, 3)));
      ok = ok && rep.converged && err <= 1e-8 && secs < 1.0;
      worst = std::max(worst, err);
      slowest = std::max(slowest, secs);
    }
  return {ok, "max error " + num(worst) + ", slowest run " + num(slowest) + " s"};
}

// 2. Oracle root residual and bracket.
Outcome oracle_root() {
  const SlabProfile prof = slab_oracle(make_prototype_laws(), 1, 1, 0, 3);
  const double j = prof.flux;
  const double res = std::abs(std::asinh(j) + std::log1p(j) + j - 3.0);
  return {res <= 1e-12 && j > 1.19 && j < 1.21 && std::abs(j - ot::kPrototypeFlux) <= 1e-12,
          "j* = " + num(j) + ", residual " + num(res)};
}

// 3. Linear slab: unit flux and unit jump.
Outcome linear_slab() {
  const SpacePtr s = make_space(generate_slab(2, 2, 1, 1, 1));
  const DiscreteProblem prob = make_problem(s, make_power_laws(2.0), 0.0, 3.0);
  const SolveReport rep = minimize(prob);
  double worst = 0.0;
  const RecoveredFlux f = recover_flux(prob, rep.final_field);
  for (const Vec2 &j : f.element)
    worst = std::max({worst, std::abs(j.x() - 1.0), std::abs(j.y())});
  for (int k = 0; k < static_cast<int>(s->mesh().interface_edges.size()); ++k)
    for (double t : {0.0, 0.5, 1.0})
      worst = std::max(worst, std::abs(edge_jump(rep.final_field, k, t) - 1.0));
  return {rep.converged && worst <= 1e-12, "max deviation " + num(worst)};
}

// 4. Energy identity at the discrete solution.
Outcome energy_gap() {
  double worst = 0.0;
  for (const char *law : {"sinh-bv", "power:2", "power:3"}) {
    const SpacePtr s = make_space(generate_slab(4, 4, 1, 1, 1));
    const DiscreteProblem prob = make_problem(s, law_from_name(law), 0.0, 3.0);
    const SolveReport rep = minimize(prob);
    worst = std::max(worst, energy_identity(prob, rep.final_field).gap);
  }
  return {worst <= 1e-8, "max energy_gap " + num(worst)};
}

// 5. Uniqueness from random starts.
Outcome uniqueness() {
  const SpacePtr s = make_space(generate_slab(4, 4, 1, 1, 1));
  const DiscreteProblem prob = make_problem(s, make_prototype_laws(), 0.0, 3.0);
  std::vector<BrokenField> sols;
  bool ok = true;
  for (int i = 0; i < 5; ++i) {
    const SolveReport rep = minimize(prob, random_correction(s, 3.0));
    ok = ok && rep.converged;
    sols.push_back(rep.final_field);
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < sols.size(); ++a)
    for (std::size_t b = a + 1; b < sols.size(); ++b)
      worst = std::max(worst, infnorm_diff(sols[a], sols[b]));
  return {ok && worst <= 1e-8, "max pairwise difference " + num(worst)};
}

// 6. Gradient and Hessian against central differences.
Outcome derivatives() {
  double g_worst = 0.0, h_worst = 0.0;
  const double h = 1e-6;
  for (const char *law : {"sinh-bv", "power:3"}) {
    const SpacePtr s = make_space(generate_slab(2, 2, 1, 1, 1));
    const DiscreteProblem prob = make_problem(s, law_from_name(law), 0.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd x = restrict_free(random_correction(s, 1.0));
      const Eigen::VectorXd r = residual_free(prob, x);
      const Eigen::MatrixXd H = Eigen::MatrixXd(hessian_free(prob, x));
      for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (energy_free(prob, xp) - energy_free(prob, xm)) / (2 * h);
        g_worst = std::max(g_worst, std::abs(fd - r[i]) / std::max(1.0, std::abs(r[i])));
        const Eigen::VectorXd col = (residual_free(prob, xp) - residual_free(prob, xm)) / (2 * h);
        h_worst = std::max(h_worst, (col - H.col(i)).lpNorm<Eigen::Infinity>() /
                                        std::max(1.0, H.col(i).lpNorm<Eigen::Infinity>()));
      }
    }
  }
  return {g_worst <= 1e-5 && h_worst <= 1e-4, "gradient " + num(g_worst) + ", hessian " + num(h_worst)};
}

// 7. Delta_2 classification of the prototype and the quadratic family.
Outcome delta2_verdicts() {
  const DeltaAssumptionReport proto = check_delta_assumption(make_prototype_laws());
  const DeltaAssumptionReport quad = check_delta_assumption(make_power_laws(2.0));
  const bool ok = proto.phi_verdict() == Verdict::no && proto.psi.satisfied == Verdict::no &&
                  proto.phi_star_verdict() == Verdict::yes && proto.psi_star.satisfied == Verdict::yes &&
                  proto.holds() == Verdict::yes && quad.phi_verdict() == Verdict::yes &&
                  quad.psi.satisfied == Verdict::yes && quad.phi_star_verdict() == Verdict::yes &&
                  quad.psi_star.satisfied == Verdict::yes && quad.holds() == Verdict::yes;
  std::ostringstream os;
  os << "sinh-bv Phi=" << to_string(proto.phi_verdict()) << " Psi=" << to_string(proto.psi.satisfied)
     << " Phi*=" << to_string(proto.phi_star_verdict()) << " Psi*=" << to_string(proto.psi_star.satisfied)
     << "; power:2 all=" << to_string(quad.holds());
  return {ok, os.str()};
}

// 8. Numeric conjugate of cosh - 1 against the closed form.
Outcome cosh_conjugate() {
  const NFunction phi = cosh_minus_one();
  const double top = std::sinh(30.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double s = top * i / 99.0;
    const double exact = ot::cosh_conjugate(s);
    const double got = conjugate(phi, s);
    worst = std::max(worst, std::abs(got - exact) / std::max(1.0, std::abs(exact)));
  }
  return {worst <= 1e-8, "max relative error " + num(worst)};
}

// 9. Variational pairing against random test fields.
Outcome variational() {
  const SpacePtr s = make_space(generate_slab(4, 4, 1, 1, 1));
  const DiscreteProblem prob = make_problem(s, make_prototype_laws(), 0.0, 3.0);
  SolveOptions opt;
  const SolveReport rep = minimize(prob, opt);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const BrokenField q = random_correction(s, 1.0);
    worst = std::max(worst, std::abs(variational_pairing(prob, rep.final_field, q)));
  }
  return {rep.converged && worst <= 10 * opt.tol, "max |pairing| " + num(worst)};
}

// 10. Two CLI runs produce identical bytes.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("oifem_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  bool ok = true;
  for (const char *name : {"a", "b"}) {
    const fs::path cfg = dir / (std::string(name) + ".cfg");
    std::ofstream(cfg) << "nx = 4\nny = 3\nphi_b = 3\noutput_prefix = " << (dir / name).string() << "\n";
    const std::string cmd = std::string(OIFEM_CLI_PATH) + " solve " + cfg.string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    ok = ok && WIFEXITED(status) && WEXITSTATUS(status) == 0;
  }
  const auto slurp = [](const fs::path &p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
  };
  std::size_t bytes = 0;
  for (const char *suffix : {".field.csv", ".diag.json", ".report.json"}) {
    const std::string a = slurp(dir / ("a" + std::string(suffix)));
    const std::string b = slurp(dir / ("b" + std::string(suffix)));
    ok = ok && !a.empty() && a == b;
    bytes += a.size();
  }
  fs::remove_all(dir);
  return {ok, std::to_string(bytes) + " bytes compared"};
}

} // namespace

int main() {
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
      {"slab exactness", slab_exactness}, {"oracle root", oracle_root},
      {"linear slab", linear_slab},       {"energy identity", energy_gap},
      {"uniqueness", uniqueness},         {"derivatives", derivatives},
      {"delta2 verdicts", delta2_verdicts}, {"cosh conjugate", cosh_conjugate},
      {"variational pairing", variational}, {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " AC" << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
