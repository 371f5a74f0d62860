#pragma once

// The three batch pipelines behind the command line: solve, oracle, nfinfo.

#include <oifem/config.hpp>
#include <oifem/dualcheck.hpp>
#include <oifem/solver.hpp>

#include <fstream>
#include <ostream>
#include <string>

namespace oifem {

enum ExitCode : int {
  exit_ok = 0,
  exit_input_error = 1,
  exit_not_converged = 2,
  exit_diagnostics_failed = 3,
  exit_runtime_error = 4,
};

inline InterfaceMesh build_mesh(const RunConfig &cfg) {
  if (cfg.mesh == RunConfig::MeshKind::slab)
    return generate_slab(cfg.nx, cfg.ny, cfg.length1, cfg.length2, cfg.height);
  return read_mesh(cfg.mesh_file);
}

struct SolveOutcome {
  SolveReport report;
  DiagnosticsReport diagnostics;
  bool slab = false;
  SlabProfile oracle;
  double oracle_infnorm_error = 0.0;
  bool diagnostics_ok = false;
};

/// Solves the configured problem and evaluates every diagnostic.
inline SolveOutcome solve_configured(const RunConfig &cfg) {
  SpacePtr space = make_space(build_mesh(cfg));
  const DiscreteProblem prob = make_problem(space, law_from_name(cfg.law), cfg.phi_a, cfg.phi_b, cfg.edge_points);

  SolveOptions opt;
  opt.tol = cfg.tol;
  opt.max_iter = cfg.max_iter;

  SolveOutcome out;
  out.report = minimize(prob, opt);
  const BrokenField &phi = out.report.final_field;
  out.diagnostics = diagnose(prob, phi);

  const auto &d = out.diagnostics;
  const double rb = cfg.effective_residual_bound();
  out.diagnostics_ok = d.energy_gap <= cfg.gap_bound && d.fenchel_gap_volume <= cfg.gap_bound &&
                       d.fenchel_gap_interface <= cfg.gap_bound && d.conservation_residual <= rb &&
                       d.dual_membership_residual <= rb;

  if (cfg.mesh == RunConfig::MeshKind::slab) {
    out.slab = true;
    out.oracle = slab_oracle(prob.laws, cfg.length1, cfg.length2, cfg.phi_a, cfg.phi_b);
    const BrokenField exact = interpolate(space, out.oracle);
    out.oracle_infnorm_error = (phi.coeffs - exact.coeffs).lpNorm<Eigen::Infinity>();
    out.diagnostics_ok = out.diagnostics_ok && d.interface_residual <= cfg.gap_bound &&
                         out.oracle_infnorm_error <= cfg.gap_bound;
  }
  return out;
}

inline void write_report_json(const RunConfig &cfg, const SolveOutcome &o, std::ostream &os) {
  const auto &r = o.report;
  JsonObjectWriter w(os);
  w.string("law", cfg.law)
      .boolean("converged", r.converged)
      .integer("iterations", r.iterations)
      .integer("n_dofs", r.final_field.space->n_dofs())
      .integer("n_free", r.final_field.space->n_free())
      .number("final_energy", r.energy_history.back())
      .number("final_residual_norm", r.residual_norm_history.back())
      .array("energy_history", r.energy_history)
      .array("residual_norm_history", r.residual_norm_history)
      .array("line_search_counts", r.line_search_counts);
  if (o.slab)
    w.number("oracle_flux", o.oracle.flux).number("oracle_infnorm_error", o.oracle_infnorm_error);
  w.boolean("diagnostics_within_bounds", o.diagnostics_ok);
}

/// Writes <prefix>.field.csv, <prefix>.diag.json and <prefix>.report.json.
inline int run_solve(const RunConfig &cfg, std::ostream &log, std::ostream &err) {
  SolveOutcome o;
  try {
    o = solve_configured(cfg);
  } catch (const OverflowError &e) {
    err << "error: " << e.what() << '\n';
    return exit_runtime_error;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  }

  const auto open = [&](const std::string &suffix) {
    std::ofstream os(cfg.output_prefix + suffix);
    if (!os)
      throw Error("cannot write '" + cfg.output_prefix + suffix + "'");
    return os;
  };
  try {
    {
      auto os = open(".field.csv");
      write_field_csv(o.report.final_field, os);
    }
    {
      auto os = open(".diag.json");
      write_json(o.diagnostics, os);
    }
    {
      auto os = open(".report.json");
      write_report_json(cfg, o, os);
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  }

  log << "converged=" << (o.report.converged ? "true" : "false") << " iterations=" << o.report.iterations
      << " residual=" << format17(o.report.residual_norm_history.back())
      << " energy_gap=" << format17(o.diagnostics.energy_gap);
  if (o.slab)
    log << " oracle_infnorm_error=" << format17(o.oracle_infnorm_error);
  log << '\n';

  if (!o.report.converged) {
    err << "error: solver did not converge within " << cfg.max_iter << " iterations\n";
    return exit_not_converged;
  }
  if (!o.diagnostics_ok) {
    err << "error: diagnostics exceed the configured bounds\n";
    return exit_diagnostics_failed;
  }
  return exit_ok;
}

/// Prints the slab flux, slopes, jump and the 1D profile at the slab's vertex abscissae.
inline int run_oracle(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  if (cfg.mesh != RunConfig::MeshKind::slab) {
    err << "error: the oracle needs a slab mesh\n";
    return exit_input_error;
  }
  SlabProfile prof;
  try {
    const LawSet laws = law_from_name(cfg.law);
    prof = slab_oracle(laws, cfg.length1, cfg.length2, cfg.phi_a, cfg.phi_b);
    if (cfg.nx < 1)
      throw Error("nx must be at least 1");
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  }
  const double defect = cfg.length1 * prof.slope_1 + prof.jump + cfg.length2 * prof.slope_2 - (cfg.phi_b - cfg.phi_a);
  out << "flux," << format17(prof.flux) << '\n';
  out << "slope_1," << format17(prof.slope_1) << '\n';
  out << "jump," << format17(prof.jump) << '\n';
  out << "slope_2," << format17(prof.slope_2) << '\n';
  out << "defect," << format17(defect) << '\n';
  out << '\n' << "x,region,phi\n";
  for (int i = 0; i <= cfg.nx; ++i) {
    const double x = cfg.length1 * i / cfg.nx;
    out << format17(x) << ",1," << format17(prof.value(x, Region::omega1)) << '\n';
  }
  for (int i = 0; i <= cfg.nx; ++i) {
    const double x = cfg.length1 + cfg.length2 * i / cfg.nx;
    out << format17(x) << ",2," << format17(prof.value(x, Region::omega2)) << '\n';
  }
  return exit_ok;
}

/// Delta_2 verdicts for Phi, Psi, Phi*, Psi*, the (Delta) assumption and the
/// growth witnesses, one "key=value" per line.
inline int run_nfinfo(const std::string &law_name, std::ostream &out, std::ostream &err) {
  LawSet laws;
  try {
    laws = law_from_name(law_name);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  }
  const DeltaAssumptionReport rep = check_delta_assumption(laws);
  const char *regions[2] = {"omega1", "omega2"};

  out << "law=" << laws.name << '\n';
  for (int k = 0; k < 2; ++k)
    out << "delta2.Phi." << regions[k] << '=' << to_string(rep.phi[k].satisfied) << " label="
        << laws.volume(static_cast<Region>(k + 1)).potential.label
        << " max_ratio=" << format17(rep.phi[k].max_ratio_seen) << '\n';
  out << "delta2.Phi=" << to_string(rep.phi_verdict()) << '\n';
  out << "delta2.Psi=" << to_string(rep.psi.satisfied) << " label=" << laws.interface.potential.label
      << " max_ratio=" << format17(rep.psi.max_ratio_seen) << '\n';
  for (int k = 0; k < 2; ++k)
    out << "delta2.Phi*." << regions[k] << '=' << to_string(rep.phi_star[k].satisfied)
        << " max_ratio=" << format17(rep.phi_star[k].max_ratio_seen) << '\n';
  out << "delta2.Phi*=" << to_string(rep.phi_star_verdict()) << '\n';
  out << "delta2.Psi*=" << to_string(rep.psi_star.satisfied)
      << " max_ratio=" << format17(rep.psi_star.max_ratio_seen) << '\n';
  for (int k = 0; k < 2; ++k)
    out << "growth.Phi." << regions[k] << '=' << (rep.phi_growth[k].satisfied ? "yes" : "no")
        << " K=" << format17(rep.phi_growth[k].witness_K)
        << " equality=" << (rep.phi_growth[k].equality ? "true" : "false") << '\n';
  out << "growth.Psi=" << (rep.psi_growth.satisfied ? "yes" : "no") << " K=" << format17(rep.psi_growth.witness_K)
      << " equality=" << (rep.psi_growth.equality ? "true" : "false") << '\n';
  out << "couple.Phi_Psi=" << to_string(rep.primal_couple()) << '\n';
  out << "couple.Phi*_Psi*=" << to_string(rep.dual_couple()) << '\n';
  out << "assumption.Delta=" << to_string(rep.holds()) << '\n';
  return exit_ok;
}

} // namespace oifem
