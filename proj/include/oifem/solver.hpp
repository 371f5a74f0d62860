#pragma once

// Damped Newton minimisation of the discrete energy, and the semi-analytic
// slab solution used as ground truth.

#include <oifem/assembly.hpp>

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oifem {

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 100;
  double armijo_c1 = 1e-4;
  int max_backtracks = 60;
  /// Largest |grad phi| and |[phi]| a step may produce for exponential laws.
  double argument_cap = 650.0;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> energy_history;
  std::vector<double> residual_norm_history;
  /// Backtracking halvings taken in each accepted step.
  std::vector<int> line_search_counts;
  /// Whether each step used the Newton direction (false: steepest descent).
  std::vector<bool> newton_steps;
  /// The minimiser p of I, and phi = phi_0 + p.
  BrokenField correction;
  BrokenField final_field;
};

namespace detail {

// Largest alpha in (0, 1] keeping every capped argument within `cap`.
inline double step_cap(const DiscreteProblem &prob, const Eigen::VectorXd &x, const Eigen::VectorXd &d,
                       double cap) {
  const auto &space = *prob.space;
  const auto &m = space.mesh();
  const BrokenField phi = total_field_free(prob, x);
  const BrokenField dir = extend_free(prob.space, d);
  double alpha = 1.0;

  const auto limit_quadratic = [&](double a, double b, double c) {
    // |u + alpha w|^2 <= cap^2 with a = |w|^2, b = u.w, c = |u|^2 - cap^2
    if (a <= 0.0 || c > 0.0)
      return;
    const double root = (-b + std::sqrt(std::max(0.0, b * b - a * c))) / a;
    alpha = std::min(alpha, root);
  };

  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    if (!std::isfinite(prob.law(t).potential.overflow_limit))
      continue;
    const Vec2 u = element_gradient(phi, t);
    const Vec2 w = element_gradient(dir, t);
    limit_quadratic(w.squaredNorm(), u.dot(w), u.squaredNorm() - cap * cap);
  }
  if (std::isfinite(prob.laws.interface.potential.overflow_limit)) {
    for (int k = 0; k < static_cast<int>(m.interface_edges.size()); ++k)
      for (double s : {0.0, 1.0}) {
        const double u = edge_jump(phi, k, s);
        const double w = edge_jump(dir, k, s);
        limit_quadratic(w * w, u * w, u * u - cap * cap);
      }
  }
  return alpha;
}

inline double energy_or_inf(const DiscreteProblem &prob, const Eigen::VectorXd &x) {
  try {
    return energy_free(prob, x);
  } catch (const OverflowError &) {
    return std::numeric_limits<double>::infinity();
  }
}

} // namespace detail

/// Minimises I(p) over corrections p vanishing on the Dirichlet boundary,
/// starting from `initial`. Newton directions come from a sparse LDL^T
/// factorisation of the Hessian; steepest descent is used when that fails or
/// does not give a descent direction. Steps are Armijo-backtracked on the energy.
///
/// Near convergence the energy decrease drops below rounding of I; a step
/// that fails Armijo by no more than a few ulps of I is accepted when it
/// reduces the residual.
inline SolveReport minimize(const DiscreteProblem &prob, const BrokenField &initial,
                            const SolveOptions &opt = {}) {
  if (!(opt.tol > 0.0))
    throw Error("solver tolerance must be positive");
  total_field(prob, initial);

  SolveReport rep;
  Eigen::VectorXd x = restrict_free(initial);
  double E = energy_free(prob, x);
  Eigen::VectorXd r = residual_free(prob, x);
  const auto rnorm = [](const Eigen::VectorXd &v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; };
  rep.energy_history.push_back(E);
  rep.residual_norm_history.push_back(rnorm(r));

  for (int it = 0;; ++it) {
    if (rnorm(r) <= opt.tol) {
      rep.converged = true;
      break;
    }
    if (it >= opt.max_iter)
      break;

    Eigen::VectorXd d;
    bool newton = false;
    {
      Eigen::SimplicialLDLT<SparseMatrix> ldlt(hessian_free(prob, x));
      if (ldlt.info() == Eigen::Success) {
        d = ldlt.solve(-r);
        newton = ldlt.info() == Eigen::Success && d.allFinite() && r.dot(d) < 0.0;
      }
    }
    if (!newton)
      d = -r;

    double alpha = detail::step_cap(prob, x, d, opt.argument_cap);
    const double slope = r.dot(d);
    const double roundoff = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(E));
    bool accepted = false;
    int halvings = 0;
    Eigen::VectorXd x_new;
    double E_new = 0.0;
    Eigen::VectorXd r_new;
    for (; halvings <= opt.max_backtracks; ++halvings, alpha *= 0.5) {
      x_new = x + alpha * d;
      r_new.resize(0);
      E_new = detail::energy_or_inf(prob, x_new);
      if (!std::isfinite(E_new))
        continue;
      if (E_new <= E + opt.armijo_c1 * alpha * slope) {
        accepted = true;
        break;
      }
      if (E_new <= E + roundoff) {
        r_new = residual_free(prob, x_new);
        if (rnorm(r_new) < rnorm(r)) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted)
      break;

    x = std::move(x_new);
    E = E_new;
    r = r_new.size() == x.size() ? std::move(r_new) : residual_free(prob, x);
    rep.iterations = it + 1;
    rep.energy_history.push_back(E);
    rep.residual_norm_history.push_back(rnorm(r));
    rep.line_search_counts.push_back(halvings);
    rep.newton_steps.push_back(newton);
  }

  rep.correction = extend_free(prob.space, x);
  rep.final_field = total_field_free(prob, x);
  return rep;
}

inline SolveReport minimize(const DiscreteProblem &prob, const SolveOptions &opt = {}) {
  return minimize(prob, BrokenField::zero(prob.space), opt);
}

/// Exact 1D solution of the slab problem: constant flux j, slopes
/// slope_1 = f_1(j), slope_2 = f_2(j) and interface jump g(j).
struct SlabProfile {
  double flux = 0.0;
  double slope_1 = 0.0;
  double jump = 0.0;
  double slope_2 = 0.0;
  double length_1 = 0.0;
  double length_2 = 0.0;
  double phi_a = 0.0;

  /// phi(x) seen from the given region (the side matters only at x = length_1).
  double value(double x, Region r) const {
    if (r == Region::omega1)
      return phi_a + slope_1 * x;
    return phi_a + slope_1 * length_1 + jump + slope_2 * (x - length_1);
  }
};

/// Solves L1 f_1(j) + g(j) + L2 f_2(j) = phi_b - phi_a by bisection.
inline SlabProfile slab_oracle(const LawSet &laws, double length_1, double length_2, double phi_a,
                               double phi_b) {
  if (!(length_1 > 0.0) || !(length_2 > 0.0))
    throw Error("slab_oracle: lengths must be positive");
  const double target = phi_b - phi_a;
  const auto drop = [&](double j) {
    return length_1 * laws.omega1.scalar_inverse(j) + laws.interface.g(j) +
           length_2 * laws.omega2.scalar_inverse(j);
  };

  SlabProfile out;
  out.length_1 = length_1;
  out.length_2 = length_2;
  out.phi_a = phi_a;
  if (target != 0.0) {
    const double sign = target > 0.0 ? 1.0 : -1.0;
    double lo = 0.0;
    double hi = 1.0;
    while (sign * drop(sign * hi) < std::abs(target)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300)
        throw Error("slab_oracle: could not bracket the flux");
    }
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi)
        break;
      if (sign * drop(sign * mid) < std::abs(target))
        lo = mid;
      else
        hi = mid;
    }
    // Keep whichever bracket end has the smaller defect.
    const double dlo = std::abs(sign * drop(sign * lo) - std::abs(target));
    const double dhi = std::abs(sign * drop(sign * hi) - std::abs(target));
    out.flux = sign * (dlo < dhi ? lo : hi);
  }
  out.slope_1 = laws.omega1.scalar_inverse(out.flux);
  out.jump = laws.interface.g(out.flux);
  out.slope_2 = laws.omega2.scalar_inverse(out.flux);
  return out;
}

/// Interpolant of the oracle profile in the broken space.
inline BrokenField interpolate(SpacePtr space, const SlabProfile &prof) {
  BrokenField f = BrokenField::zero(space);
  for (int d = 0; d < space->n_dofs(); ++d)
    f.coeffs[d] = prof.value(space->mesh().vertices[space->dof_vertex(d)].x(), space->dof_region(d));
  return f;
}

} // namespace oifem
