#pragma once

// Broken P1 space: continuous inside each region, two independent degrees of
// freedom on every interface vertex.

#include <oifem/mesh.hpp>

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace oifem {

class BrokenSpace {
public:
  explicit BrokenSpace(InterfaceMesh mesh) : mesh_(std::move(mesh)) {
    validate(mesh_);
    const int nv = static_cast<int>(mesh_.vertices.size());

    std::vector<std::array<bool, 2>> touches(nv, {false, false});
    for (const auto &t : mesh_.triangles)
      for (int v : t.v)
        touches[v][region_index(t.region)] = true;

    interface_vertex_.assign(nv, 0);
    for (const auto &e : mesh_.interface_edges)
      interface_vertex_[e.v[0]] = interface_vertex_[e.v[1]] = 1;

    vertex_dofs_.assign(nv, {-1, -1});
    int next = 0;
    for (int v = 0; v < nv; ++v) {
      if (!touches[v][0] && !touches[v][1])
        throw Error("vertex " + std::to_string(v) + " is not used by any triangle");
      if (touches[v][0] && touches[v][1] && !interface_vertex_[v])
        throw Error("vertex " + std::to_string(v) + " touches both regions off the interface");
      for (int r = 0; r < 2; ++r)
        if (touches[v][r] || interface_vertex_[v])
          vertex_dofs_[v][r] = next++;
    }
    n_dofs_ = next;

    dof_vertex_.resize(n_dofs_);
    dof_region_.resize(n_dofs_);
    for (int v = 0; v < nv; ++v)
      for (int r = 0; r < 2; ++r)
        if (vertex_dofs_[v][r] >= 0) {
          dof_vertex_[vertex_dofs_[v][r]] = v;
          dof_region_[vertex_dofs_[v][r]] = static_cast<Region>(r + 1);
        }

    dirichlet_marker_.assign(n_dofs_, -1);
    for (const auto &be : mesh_.boundary_edges) {
      if (be.marker == BoundaryMarker::neumann)
        continue;
      const int r = be.marker == BoundaryMarker::dirichlet_a ? 0 : 1;
      for (int v : be.v)
        dirichlet_marker_[vertex_dofs_[v][r]] = static_cast<int>(be.marker);
    }

    free_index_.assign(n_dofs_, -1);
    for (int d = 0; d < n_dofs_; ++d)
      if (dirichlet_marker_[d] < 0) {
        free_index_[d] = static_cast<int>(free_dofs_.size());
        free_dofs_.push_back(d);
      }

    const int nt = static_cast<int>(mesh_.triangles.size());
    area_.resize(nt);
    basis_grad_.resize(nt);
    for (int t = 0; t < nt; ++t) {
      const auto &tv = mesh_.triangles[t].v;
      const double a2 = 2.0 * mesh_.signed_area(t);
      area_[t] = 0.5 * a2;
      for (int k = 0; k < 3; ++k) {
        const Vec2 &p = mesh_.vertices[tv[(k + 1) % 3]];
        const Vec2 &q = mesh_.vertices[tv[(k + 2) % 3]];
        basis_grad_[t][k] = Vec2(p.y() - q.y(), q.x() - p.x()) / a2;
      }
    }
  }

  const InterfaceMesh &mesh() const { return mesh_; }
  int n_dofs() const { return n_dofs_; }
  int n_free() const { return static_cast<int>(free_dofs_.size()); }

  /// DOF of vertex v seen from region r, or -1.
  int dof(int v, Region r) const { return vertex_dofs_[v][region_index(r)]; }
  int dof_vertex(int d) const { return dof_vertex_[d]; }
  Region dof_region(int d) const { return dof_region_[d]; }
  bool is_interface_vertex(int v) const { return interface_vertex_[v] != 0; }

  std::array<int, 3> triangle_dofs(int t) const {
    const auto &tri = mesh_.triangles[t];
    return {dof(tri.v[0], tri.region), dof(tri.v[1], tri.region), dof(tri.v[2], tri.region)};
  }

  /// DOFs of interface edge k's endpoints on side r.
  std::array<int, 2> edge_dofs(int k, Region r) const {
    const auto &e = mesh_.interface_edges[k];
    return {dof(e.v[0], r), dof(e.v[1], r)};
  }

  bool is_dirichlet(int d) const { return dirichlet_marker_[d] >= 0; }
  BoundaryMarker dirichlet_marker(int d) const { return static_cast<BoundaryMarker>(dirichlet_marker_[d]); }
  int free_index(int d) const { return free_index_[d]; }
  const std::vector<int> &free_dofs() const { return free_dofs_; }

  double area(int t) const { return area_[t]; }
  /// Gradients of the three barycentric coordinates of triangle t.
  const std::array<Vec2, 3> &basis_gradients(int t) const { return basis_grad_[t]; }

private:
  InterfaceMesh mesh_;
  int n_dofs_ = 0;
  std::vector<std::array<int, 2>> vertex_dofs_;
  std::vector<int> dof_vertex_;
  std::vector<Region> dof_region_;
  std::vector<char> interface_vertex_;
  std::vector<int> dirichlet_marker_;
  std::vector<int> free_index_;
  std::vector<int> free_dofs_;
  std::vector<double> area_;
  std::vector<std::array<Vec2, 3>> basis_grad_;
};

using SpacePtr = std::shared_ptr<const BrokenSpace>;

inline SpacePtr make_space(InterfaceMesh mesh) { return std::make_shared<const BrokenSpace>(std::move(mesh)); }

struct BrokenField {
  SpacePtr space;
  Eigen::VectorXd coeffs;

  static BrokenField zero(SpacePtr s) {
    BrokenField f{s, Eigen::VectorXd::Zero(s->n_dofs())};
    return f;
  }
};

/// Gradient of the field on triangle t, taken from that triangle's region.
inline Vec2 element_gradient(const BrokenField &f, int t) {
  const auto dofs = f.space->triangle_dofs(t);
  const auto &g = f.space->basis_gradients(t);
  return f.coeffs[dofs[0]] * g[0] + f.coeffs[dofs[1]] * g[1] + f.coeffs[dofs[2]] * g[2];
}

/// Omega_2 trace minus Omega_1 trace at parameter s in [0, 1] along interface edge k.
inline double edge_jump(const BrokenField &f, int k, double s) {
  const auto d1 = f.space->edge_dofs(k, Region::omega1);
  const auto d2 = f.space->edge_dofs(k, Region::omega2);
  const double j0 = f.coeffs[d2[0]] - f.coeffs[d1[0]];
  const double j1 = f.coeffs[d2[1]] - f.coeffs[d1[1]];
  return (1.0 - s) * j0 + s * j1;
}

/// Jump-free lift of the Dirichlet data.
///
/// When both Dirichlet components are vertical lines (the slab), the lift is
/// the linear blend in x between them. Otherwise it takes the data on the
/// Dirichlet DOFs and zero elsewhere. Interface DOFs match on both sides.
inline BrokenField lift_dirichlet(SpacePtr space, double phi_a, double phi_b) {
  const auto &m = space->mesh();
  double xa_min = 1e300, xa_max = -1e300, xb_min = 1e300, xb_max = -1e300;
  for (const auto &be : m.boundary_edges) {
    if (be.marker == BoundaryMarker::neumann)
      continue;
    for (int v : be.v) {
      const double x = m.vertices[v].x();
      if (be.marker == BoundaryMarker::dirichlet_a) {
        xa_min = std::min(xa_min, x);
        xa_max = std::max(xa_max, x);
      } else {
        xb_min = std::min(xb_min, x);
        xb_max = std::max(xb_max, x);
      }
    }
  }
  const bool vertical = xa_min == xa_max && xb_min == xb_max && xa_min != xb_min;

  BrokenField f = BrokenField::zero(space);
  for (int d = 0; d < space->n_dofs(); ++d) {
    if (space->is_dirichlet(d)) {
      f.coeffs[d] = space->dirichlet_marker(d) == BoundaryMarker::dirichlet_a ? phi_a : phi_b;
    } else if (vertical) {
      const double x = m.vertices[space->dof_vertex(d)].x();
      f.coeffs[d] = phi_a + (phi_b - phi_a) * (x - xa_min) / (xb_min - xa_min);
    }
  }
  return f;
}

/// Free-DOF coefficients of a field.
inline Eigen::VectorXd restrict_free(const BrokenField &f) {
  const auto &fd = f.space->free_dofs();
  Eigen::VectorXd out(fd.size());
  for (std::size_t i = 0; i < fd.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = f.coeffs[fd[i]];
  return out;
}

/// Field with the given free coefficients and zero Dirichlet entries.
inline BrokenField extend_free(SpacePtr space, const Eigen::VectorXd &free) {
  BrokenField f = BrokenField::zero(space);
  const auto &fd = space->free_dofs();
  for (std::size_t i = 0; i < fd.size(); ++i)
    f.coeffs[fd[i]] = free[static_cast<Eigen::Index>(i)];
  return f;
}

/// CSV "vertex_index,region,x,y,value"; interface vertices appear once per region.
inline void write_field_csv(const BrokenField &f, std::ostream &os) {
  const auto &m = f.space->mesh();
  const auto old_precision = os.precision(17);
  os << "vertex_index,region,x,y,value\n";
  for (int v = 0; v < static_cast<int>(m.vertices.size()); ++v)
    for (Region r : {Region::omega1, Region::omega2}) {
      const int d = f.space->dof(v, r);
      if (d < 0)
        continue;
      os << v << ',' << static_cast<int>(r) << ',' << m.vertices[v].x() << ',' << m.vertices[v].y() << ','
         << f.coeffs[d] << '\n';
    }
  os.precision(old_precision);
}

} // namespace oifem
