#pragma once

// Discrete energy, its gradient (the weak-form residual) and Hessian on the
// broken P1 space. The unknown p is the correction to the Dirichlet lift.

#include <oifem/constitutive.hpp>
#include <oifem/space.hpp>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace oifem {

/// Gauss-Legendre rule on [0, 1].
struct EdgeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline EdgeRule gauss_legendre(int points) {
  // Nodes and weights on [-1, 1].
  static const std::vector<std::vector<std::pair<double, double>>> table = {
      {{0.0, 2.0}},
      {{-0.57735026918962576451, 1.0}, {0.57735026918962576451, 1.0}},
      {{-0.77459666924148337704, 5.0 / 9.0}, {0.0, 8.0 / 9.0}, {0.77459666924148337704, 5.0 / 9.0}},
      {{-0.86113631159405257522, 0.34785484513745385737},
       {-0.33998104358485626480, 0.65214515486254614263},
       {0.33998104358485626480, 0.65214515486254614263},
       {0.86113631159405257522, 0.34785484513745385737}},
      {{-0.90617984593866399280, 0.23692688505618908751},
       {-0.53846931010568309104, 0.47862867049936646804},
       {0.0, 0.56888888888888888889},
       {0.53846931010568309104, 0.47862867049936646804},
       {0.90617984593866399280, 0.23692688505618908751}},
  };
  if (points < 1 || points > static_cast<int>(table.size()))
    throw Error("edge quadrature supports 1 to 5 points, got " + std::to_string(points));
  EdgeRule rule;
  for (const auto &[x, w] : table[points - 1]) {
    rule.nodes.push_back(0.5 * (x + 1.0));
    rule.weights.push_back(0.5 * w);
  }
  return rule;
}

struct DiscreteProblem {
  SpacePtr space;
  LawSet laws;
  /// Jump-free Dirichlet lift phi_0.
  BrokenField lift;
  /// Elementwise constant Neumann datum j_0; empty means zero.
  std::vector<Vec2> j0;
  int edge_points = 2;

  const VolumeLaw &law(int t) const { return laws.volume(space->mesh().triangles[t].region); }
  Vec2 j0_at(int t) const { return j0.empty() ? Vec2::Zero() : j0[t]; }
  EdgeRule edge_rule() const { return gauss_legendre(edge_points); }
};

inline DiscreteProblem make_problem(SpacePtr space, LawSet laws, double phi_a, double phi_b,
                                    int edge_points = 2) {
  DiscreteProblem prob;
  prob.lift = lift_dirichlet(space, phi_a, phi_b);
  prob.space = std::move(space);
  prob.laws = std::move(laws);
  prob.edge_points = edge_points;
  gauss_legendre(edge_points);
  return prob;
}

/// phi = phi_0 + p, after checking p vanishes on the Dirichlet DOFs.
inline BrokenField total_field(const DiscreteProblem &prob, const BrokenField &p) {
  if (p.coeffs.size() != prob.space->n_dofs())
    throw Error("field size does not match the space");
  for (int d = 0; d < prob.space->n_dofs(); ++d)
    if (prob.space->is_dirichlet(d) && p.coeffs[d] != 0.0)
      throw Error("correction field must vanish on Dirichlet DOFs");
  return BrokenField{prob.space, prob.lift.coeffs + p.coeffs};
}

inline BrokenField total_field_free(const DiscreteProblem &prob, const Eigen::VectorXd &free) {
  return BrokenField{prob.space, prob.lift.coeffs + extend_free(prob.space, free).coeffs};
}

namespace detail {

template <class F>
auto on_element(int t, F &&fn) {
  try {
    return fn();
  } catch (const OverflowError &e) {
    throw OverflowError("element " + std::to_string(t) + ": " + e.what());
  }
}

template <class F>
auto on_edge(int k, F &&fn) {
  try {
    return fn();
  } catch (const OverflowError &e) {
    throw OverflowError("interface edge " + std::to_string(k) + ": " + e.what());
  }
}

} // namespace detail

struct EnergyTerms {
  std::vector<double> element;
  std::vector<double> edge;

  double total() const {
    double sum = 0.0;
    for (double e : element)
      sum += e;
    for (double e : edge)
      sum += e;
    return sum;
  }
};

/// Per-element and per-interface-edge contributions of I(p) for a full field phi.
inline EnergyTerms energy_terms_of(const DiscreteProblem &prob, const BrokenField &phi) {
  const auto &space = *prob.space;
  const auto &m = space.mesh();
  EnergyTerms out;
  out.element.resize(m.triangles.size());
  out.edge.resize(m.interface_edges.size());
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    out.element[t] = detail::on_element(t, [&] {
      const Vec2 g = element_gradient(phi, t);
      return space.area(t) * (prob.law(t).energy_density(g) - prob.j0_at(t).dot(g));
    });
  }
  const EdgeRule rule = prob.edge_rule();
  for (int k = 0; k < static_cast<int>(m.interface_edges.size()); ++k) {
    out.edge[k] = detail::on_edge(k, [&] {
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        sum += rule.weights[q] * prob.laws.interface.energy_density(edge_jump(phi, k, rule.nodes[q]));
      return m.edge_length(m.interface_edges[k].v) * sum;
    });
  }
  return out;
}

inline EnergyTerms energy_terms(const DiscreteProblem &prob, const BrokenField &p) {
  return energy_terms_of(prob, total_field(prob, p));
}

inline double energy(const DiscreteProblem &prob, const BrokenField &p) {
  return energy_terms(prob, p).total();
}

inline double energy_free(const DiscreteProblem &prob, const Eigen::VectorXd &free) {
  return energy_terms_of(prob, total_field_free(prob, free)).total();
}

/// Weak-form residual over all DOFs for a full field phi:
/// int h(grad phi).grad q_i + int_Gamma b([phi]) [q_i] - int j_0.grad q_i.
inline Eigen::VectorXd residual_all(const DiscreteProblem &prob, const BrokenField &phi) {
  const auto &space = *prob.space;
  const auto &m = space.mesh();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(space.n_dofs());
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    detail::on_element(t, [&] {
      const Vec2 flux = prob.law(t).h(element_gradient(phi, t)) - prob.j0_at(t);
      const auto dofs = space.triangle_dofs(t);
      const auto &grads = space.basis_gradients(t);
      for (int a = 0; a < 3; ++a)
        r[dofs[a]] += space.area(t) * flux.dot(grads[a]);
      return 0;
    });
  }
  const EdgeRule rule = prob.edge_rule();
  for (int k = 0; k < static_cast<int>(m.interface_edges.size()); ++k) {
    detail::on_edge(k, [&] {
      const double len = m.edge_length(m.interface_edges[k].v);
      const auto d1 = space.edge_dofs(k, Region::omega1);
      const auto d2 = space.edge_dofs(k, Region::omega2);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = rule.nodes[q];
        const double w = len * rule.weights[q] * prob.laws.interface.b(edge_jump(phi, k, s));
        const std::array<double, 2> shape = {1.0 - s, s};
        for (int a = 0; a < 2; ++a) {
          r[d2[a]] += w * shape[a];
          r[d1[a]] -= w * shape[a];
        }
      }
      return 0;
    });
  }
  return r;
}

inline Eigen::VectorXd restrict_to_free(const BrokenSpace &space, const Eigen::VectorXd &all) {
  const auto &fd = space.free_dofs();
  Eigen::VectorXd out(fd.size());
  for (std::size_t i = 0; i < fd.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = all[fd[i]];
  return out;
}

inline Eigen::VectorXd residual_free(const DiscreteProblem &prob, const Eigen::VectorXd &free) {
  return restrict_to_free(*prob.space, residual_all(prob, total_field_free(prob, free)));
}

/// Gradient of the energy with respect to the free coefficients of p.
inline Eigen::VectorXd residual(const DiscreteProblem &prob, const BrokenField &p) {
  return restrict_to_free(*prob.space, residual_all(prob, total_field(prob, p)));
}

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Hessian of the energy over free DOFs; symmetric positive semidefinite.
inline SparseMatrix hessian_free(const DiscreteProblem &prob, const Eigen::VectorXd &free) {
  const auto &space = *prob.space;
  const auto &m = space.mesh();
  const BrokenField phi = total_field_free(prob, free);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * m.triangles.size() + 16 * m.interface_edges.size());

  const auto add = [&](int da, int db, double v) {
    const int fa = space.free_index(da);
    const int fb = space.free_index(db);
    if (fa >= 0 && fb >= 0)
      trips.emplace_back(fa, fb, v);
  };

  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    detail::on_element(t, [&] {
      const Mat2 D = prob.law(t).dh(element_gradient(phi, t));
      const auto dofs = space.triangle_dofs(t);
      const auto &grads = space.basis_gradients(t);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          add(dofs[a], dofs[b], space.area(t) * grads[a].dot(D * grads[b]));
      return 0;
    });
  }

  const EdgeRule rule = prob.edge_rule();
  for (int k = 0; k < static_cast<int>(m.interface_edges.size()); ++k) {
    detail::on_edge(k, [&] {
      const double len = m.edge_length(m.interface_edges[k].v);
      const auto d1 = space.edge_dofs(k, Region::omega1);
      const auto d2 = space.edge_dofs(k, Region::omega2);
      // jump = sum_a shape_a (u2_a - u1_a): DOFs with signs
      const std::array<int, 4> dofs = {d1[0], d1[1], d2[0], d2[1]};
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = rule.nodes[q];
        const double w = len * rule.weights[q] * prob.laws.interface.db(edge_jump(phi, k, s));
        const std::array<double, 4> dj = {-(1.0 - s), -s, 1.0 - s, s};
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            add(dofs[a], dofs[b], w * dj[a] * dj[b]);
      }
      return 0;
    });
  }

  SparseMatrix H(space.n_free(), space.n_free());
  H.setFromTriplets(trips.begin(), trips.end());
  return H;
}

inline SparseMatrix hessian(const DiscreteProblem &prob, const BrokenField &p) {
  total_field(prob, p);
  return hessian_free(prob, restrict_free(p));
}

} // namespace oifem
