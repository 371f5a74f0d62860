#pragma once

// Post-solve checks: flux recovery, conservation against continuous test
// functions, the interface flux condition, the transposed (dual) pairing of
// the weak form, and the aggregated Fenchel identity.

#include <oifem/assembly.hpp>
#include <oifem/json_writer.hpp>

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

namespace oifem {

struct RecoveredFlux {
  /// h(grad phi) on every triangle.
  std::vector<Vec2> element;
  /// Per interface edge and edge quadrature point: h(grad phi).n from the
  /// Omega_1 side, from the Omega_2 side, and b([phi]).
  std::vector<std::vector<double>> normal_side1;
  std::vector<std::vector<double>> normal_side2;
  std::vector<std::vector<double>> interface_law;
};

inline RecoveredFlux recover_flux(const DiscreteProblem &prob, const BrokenField &phi) {
  const auto &m = prob.space->mesh();
  RecoveredFlux out;
  out.element.resize(m.triangles.size());
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
    out.element[t] = prob.law(t).h(element_gradient(phi, t));

  const EdgeRule rule = prob.edge_rule();
  const int ne = static_cast<int>(m.interface_edges.size());
  out.normal_side1.resize(ne);
  out.normal_side2.resize(ne);
  out.interface_law.resize(ne);
  for (int k = 0; k < ne; ++k) {
    const Vec2 n = m.normal(k);
    const auto &e = m.interface_edges[k];
    for (double s : rule.nodes) {
      out.normal_side1[k].push_back(out.element[e.tri1].dot(n));
      out.normal_side2[k].push_back(out.element[e.tri2].dot(n));
      out.interface_law[k].push_back(prob.laws.interface.b(edge_jump(phi, k, s)));
    }
  }
  return out;
}

/// Infinity norm of int (j - j_0).grad psi_v over continuous P1 hat functions
/// psi_v (both sides of an interface vertex identified) vanishing on Gamma_D.
inline double conservation_residual(const DiscreteProblem &prob, const BrokenField &phi) {
  const auto &space = *prob.space;
  const auto &m = space.mesh();
  const int nv = static_cast<int>(m.vertices.size());
  std::vector<char> admissible(nv, 1);
  for (int d = 0; d < space.n_dofs(); ++d)
    if (space.is_dirichlet(d))
      admissible[space.dof_vertex(d)] = 0;

  std::vector<double> res(nv, 0.0);
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    const Vec2 j = prob.law(t).h(element_gradient(phi, t)) - prob.j0_at(t);
    const auto &grads = space.basis_gradients(t);
    for (int a = 0; a < 3; ++a)
      res[m.triangles[t].v[a]] += space.area(t) * j.dot(grads[a]);
  }
  double worst = 0.0;
  for (int v = 0; v < nv; ++v)
    if (admissible[v])
      worst = std::max(worst, std::abs(res[v]));
  return worst;
}

/// max |h(grad phi)|_{Omega_1} . n - b([phi])| / (1 + |b([phi])|) over edge quadrature points.
inline double interface_residual(const DiscreteProblem &prob, const BrokenField &phi) {
  const RecoveredFlux flux = recover_flux(prob, phi);
  double worst = 0.0;
  for (std::size_t k = 0; k < flux.interface_law.size(); ++k)
    for (std::size_t q = 0; q < flux.interface_law[k].size(); ++q) {
      const double b = flux.interface_law[k][q];
      worst = std::max(worst, std::abs(flux.normal_side1[k][q] - b) / (1.0 + std::abs(b)));
    }
  return worst;
}

/// Agreement of the normal flux seen from the two sides of Gamma.
inline double two_sided_flux_gap(const DiscreteProblem &prob, const BrokenField &phi) {
  const RecoveredFlux flux = recover_flux(prob, phi);
  double worst = 0.0;
  for (std::size_t k = 0; k < flux.normal_side1.size(); ++k)
    for (std::size_t q = 0; q < flux.normal_side1[k].size(); ++q) {
      const double a = flux.normal_side1[k][q];
      const double b = flux.normal_side2[k][q];
      worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
    }
  return worst;
}

/// Discrete gradient G (2 rows per triangle) and quadrature-point jump J operators.
struct PairingOperators {
  SparseMatrix gradient;
  SparseMatrix jump;
  Eigen::VectorXd element_weight;
  Eigen::VectorXd edge_weight;
};

inline PairingOperators pairing_operators(const DiscreteProblem &prob) {
  const auto &space = *prob.space;
  const auto &m = space.mesh();
  const int nt = static_cast<int>(m.triangles.size());
  const int ne = static_cast<int>(m.interface_edges.size());
  const EdgeRule rule = prob.edge_rule();
  const int nq = static_cast<int>(rule.nodes.size());

  PairingOperators ops;
  std::vector<Eigen::Triplet<double>> g;
  ops.element_weight.resize(2 * nt);
  for (int t = 0; t < nt; ++t) {
    const auto dofs = space.triangle_dofs(t);
    const auto &grads = space.basis_gradients(t);
    for (int a = 0; a < 3; ++a) {
      g.emplace_back(2 * t, dofs[a], grads[a].x());
      g.emplace_back(2 * t + 1, dofs[a], grads[a].y());
    }
    ops.element_weight[2 * t] = ops.element_weight[2 * t + 1] = space.area(t);
  }
  ops.gradient.resize(2 * nt, space.n_dofs());
  ops.gradient.setFromTriplets(g.begin(), g.end());

  std::vector<Eigen::Triplet<double>> jt;
  ops.edge_weight.resize(ne * nq);
  for (int k = 0; k < ne; ++k) {
    const auto d1 = space.edge_dofs(k, Region::omega1);
    const auto d2 = space.edge_dofs(k, Region::omega2);
    const double len = m.edge_length(m.interface_edges[k].v);
    for (int q = 0; q < nq; ++q) {
      const double s = rule.nodes[q];
      const int row = k * nq + q;
      jt.emplace_back(row, d2[0], 1.0 - s);
      jt.emplace_back(row, d2[1], s);
      jt.emplace_back(row, d1[0], -(1.0 - s));
      jt.emplace_back(row, d1[1], -s);
      ops.edge_weight[row] = len * rule.weights[q];
    }
  }
  ops.jump.resize(ne * nq, space.n_dofs());
  ops.jump.setFromTriplets(jt.begin(), jt.end());
  return ops;
}

/// The weak-form pairing evaluated as G^T (|T| tau) + J^T (w b([phi])) with
/// tau = h(grad phi) - j_0, restricted to free DOFs.
inline Eigen::VectorXd dual_membership_vector(const DiscreteProblem &prob, const BrokenField &phi) {
  const auto &m = prob.space->mesh();
  const PairingOperators ops = pairing_operators(prob);
  const Eigen::VectorXd grad = ops.gradient * phi.coeffs;
  const Eigen::VectorXd jumps = ops.jump * phi.coeffs;

  Eigen::VectorXd tau(grad.size());
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    const Vec2 flux = prob.law(t).h(Vec2(grad[2 * t], grad[2 * t + 1])) - prob.j0_at(t);
    tau[2 * t] = flux.x();
    tau[2 * t + 1] = flux.y();
  }
  Eigen::VectorXd w(jumps.size());
  for (Eigen::Index i = 0; i < jumps.size(); ++i)
    w[i] = prob.laws.interface.b(jumps[i]);

  const Eigen::VectorXd all = ops.gradient.transpose() * ops.element_weight.cwiseProduct(tau) +
                              ops.jump.transpose() * ops.edge_weight.cwiseProduct(w);
  return restrict_to_free(*prob.space, all);
}

inline double dual_membership_residual(const DiscreteProblem &prob, const BrokenField &phi) {
  const Eigen::VectorXd v = dual_membership_vector(prob, phi);
  return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0;
}

/// The four integrals int Phi(grad phi), int Phi*(h(grad phi)), int_Gamma Psi([phi]),
/// int_Gamma Psi*(b([phi])) and the work they must add up to.
struct EnergyIdentity {
  double phi = 0.0;
  double phi_star = 0.0;
  double psi = 0.0;
  double psi_star = 0.0;
  /// int h(grad phi).grad phi + int_Gamma b([phi]) [phi]
  double work = 0.0;
  /// |phi + phi_star + psi + psi_star - work| / (1 + sum)
  double gap = 0.0;
  /// Largest pointwise relative Fenchel gap, and the smallest signed one.
  double fenchel_gap_volume = 0.0;
  double fenchel_gap_interface = 0.0;
  double min_signed_gap = 0.0;

  double sum() const { return phi + phi_star + psi + psi_star; }
};

inline EnergyIdentity energy_identity(const DiscreteProblem &prob, const BrokenField &phi) {
  const auto &space = *prob.space;
  const auto &m = space.mesh();
  EnergyIdentity out;
  double min_gap = std::numeric_limits<double>::infinity();

  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    const VolumeLaw &law = prob.law(t);
    const Vec2 g = element_gradient(phi, t);
    const Vec2 j = law.h(g);
    const double a = law.energy_density(g);
    const double b = law.conjugate_density(j);
    const double w = j.dot(g);
    out.phi += space.area(t) * a;
    out.phi_star += space.area(t) * b;
    out.work += space.area(t) * w;
    const double gap = (a + b - w) / (1.0 + std::abs(w));
    out.fenchel_gap_volume = std::max(out.fenchel_gap_volume, std::abs(gap));
    min_gap = std::min(min_gap, gap);
  }

  const EdgeRule rule = prob.edge_rule();
  for (int k = 0; k < static_cast<int>(m.interface_edges.size()); ++k) {
    const double len = m.edge_length(m.interface_edges[k].v);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double z = edge_jump(phi, k, rule.nodes[q]);
      const double bz = prob.laws.interface.b(z);
      const double a = prob.laws.interface.energy_density(z);
      const double b = prob.laws.interface.conjugate_density(bz);
      const double weight = len * rule.weights[q];
      out.psi += weight * a;
      out.psi_star += weight * b;
      out.work += weight * bz * z;
      const double gap = (a + b - bz * z) / (1.0 + std::abs(bz * z));
      out.fenchel_gap_interface = std::max(out.fenchel_gap_interface, std::abs(gap));
      min_gap = std::min(min_gap, gap);
    }
  }
  out.min_signed_gap = std::isfinite(min_gap) ? min_gap : 0.0;
  out.gap = std::abs(out.sum() - out.work) / (1.0 + out.sum());
  return out;
}

/// Left side of the variational inequality for a test correction q:
/// int (h(grad phi) - j_0).grad(phi - phi_0 - q) + int_Gamma b([phi]) [phi - q].
/// Vanishes (up to the residual) at a discrete solution, for every q.
inline double variational_pairing(const DiscreteProblem &prob, const BrokenField &phi, const BrokenField &q) {
  const auto &space = *prob.space;
  const auto &m = space.mesh();
  const BrokenField diff{prob.space, phi.coeffs - prob.lift.coeffs - q.coeffs};
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    const Vec2 j = prob.law(t).h(element_gradient(phi, t)) - prob.j0_at(t);
    sum += space.area(t) * j.dot(element_gradient(diff, t));
  }
  const EdgeRule rule = prob.edge_rule();
  for (int k = 0; k < static_cast<int>(m.interface_edges.size()); ++k) {
    const double len = m.edge_length(m.interface_edges[k].v);
    for (std::size_t q_i = 0; q_i < rule.nodes.size(); ++q_i) {
      const double s = rule.nodes[q_i];
      sum += len * rule.weights[q_i] * prob.laws.interface.b(edge_jump(phi, k, s)) * edge_jump(diff, k, s);
    }
  }
  return sum;
}

struct DiagnosticsReport {
  double fenchel_gap_volume = 0.0;
  double fenchel_gap_interface = 0.0;
  double conservation_residual = 0.0;
  double interface_residual = 0.0;
  double dual_membership_residual = 0.0;
  double energy_phi = 0.0;
  double energy_phi_star = 0.0;
  double energy_psi = 0.0;
  double energy_psi_star = 0.0;
  double energy_gap = 0.0;
};

inline DiagnosticsReport diagnose(const DiscreteProblem &prob, const BrokenField &phi) {
  DiagnosticsReport d;
  const EnergyIdentity id = energy_identity(prob, phi);
  d.fenchel_gap_volume = id.fenchel_gap_volume;
  d.fenchel_gap_interface = id.fenchel_gap_interface;
  d.conservation_residual = conservation_residual(prob, phi);
  d.interface_residual = interface_residual(prob, phi);
  d.dual_membership_residual = dual_membership_residual(prob, phi);
  d.energy_phi = id.phi;
  d.energy_phi_star = id.phi_star;
  d.energy_psi = id.psi;
  d.energy_psi_star = id.psi_star;
  d.energy_gap = id.gap;
  return d;
}

inline void write_json(const DiagnosticsReport &d, std::ostream &os) {
  JsonObjectWriter w(os);
  w.number("fenchel_gap_volume", d.fenchel_gap_volume)
      .number("fenchel_gap_interface", d.fenchel_gap_interface)
      .number("conservation_residual", d.conservation_residual)
      .number("interface_residual", d.interface_residual)
      .number("dual_membership_residual", d.dual_membership_residual)
      .number("energy_phi", d.energy_phi)
      .number("energy_phi_star", d.energy_phi_star)
      .number("energy_psi", d.energy_psi)
      .number("energy_psi_star", d.energy_psi_star)
      .number("energy_gap", d.energy_gap);
}

} // namespace oifem
