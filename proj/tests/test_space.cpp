#include <oifem/space.hpp>

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace oifem;
namespace ot = oifem::testing;

TEST(BrokenSpace, DofCounts) {
  for (auto [nx, ny] : {std::pair{1, 1}, std::pair{2, 3}}) {
    const SpacePtr s = make_space(generate_slab(nx, ny, 1, 1, 1));
    const int nv = static_cast<int>(s->mesh().vertices.size());
    const int n_gamma = 2 * ny + 1;
    EXPECT_EQ(s->n_dofs(), nv + n_gamma);
    // 2 (2ny + 1) Dirichlet DOFs
    EXPECT_EQ(s->n_free(), s->n_dofs() - 2 * n_gamma);
    int interface = 0;
    for (int v = 0; v < nv; ++v)
      if (s->is_interface_vertex(v)) {
        ++interface;
        EXPECT_GE(s->dof(v, Region::omega1), 0);
        EXPECT_GE(s->dof(v, Region::omega2), 0);
        EXPECT_NE(s->dof(v, Region::omega1), s->dof(v, Region::omega2));
      } else {
        EXPECT_TRUE((s->dof(v, Region::omega1) < 0) != (s->dof(v, Region::omega2) < 0));
      }
    EXPECT_EQ(interface, n_gamma);
  }
}

TEST(BrokenSpace, TriangleDofsFollowRegion) {
  const SpacePtr s = make_space(generate_slab(2, 2, 1, 1, 1));
  for (int t = 0; t < static_cast<int>(s->mesh().triangles.size()); ++t) {
    const auto &tri = s->mesh().triangles[t];
    const auto dofs = s->triangle_dofs(t);
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(s->dof_vertex(dofs[i]), tri.v[i]);
      EXPECT_EQ(s->dof_region(dofs[i]), tri.region);
    }
  }
}

TEST(BrokenSpace, BasisGradientsReproduceLinears) {
  const SpacePtr s = make_space(ot::jiggle_interior(generate_slab(3, 3, 1, 1, 1), 1.0 / 3, 1.0 / 6));
  BrokenField f = BrokenField::zero(s);
  for (int d = 0; d < s->n_dofs(); ++d) {
    const Vec2 &x = s->mesh().vertices[s->dof_vertex(d)];
    f.coeffs[d] = 2.0 * x.x() - 3.0 * x.y() + 0.5;
  }
  for (int t = 0; t < static_cast<int>(s->mesh().triangles.size()); ++t) {
    const Vec2 g = element_gradient(f, t);
    EXPECT_NEAR(g.x(), 2.0, 1e-12);
    EXPECT_NEAR(g.y(), -3.0, 1e-12);
    const auto &bg = s->basis_gradients(t);
    EXPECT_NEAR((bg[0] + bg[1] + bg[2]).norm(), 0.0, 1e-12);
  }
  for (int k = 0; k < static_cast<int>(s->mesh().interface_edges.size()); ++k)
    EXPECT_EQ(edge_jump(f, k, 0.3), 0.0);
}

TEST(BrokenSpace, JumpSignIsOmega2MinusOmega1) {
  const SpacePtr s = make_space(generate_slab(1, 1, 1, 1, 1));
  BrokenField f = BrokenField::zero(s);
  for (int d = 0; d < s->n_dofs(); ++d)
    f.coeffs[d] = s->dof_region(d) == Region::omega2 ? 1.5 : -0.5;
  for (int k = 0; k < static_cast<int>(s->mesh().interface_edges.size()); ++k) {
    EXPECT_DOUBLE_EQ(edge_jump(f, k, 0.0), 2.0);
    EXPECT_DOUBLE_EQ(edge_jump(f, k, 1.0), 2.0);
  }
}

TEST(BrokenSpace, EdgeJumpInterpolatesLinearly) {
  const SpacePtr s = make_space(generate_slab(1, 1, 1, 1, 1));
  BrokenField f = BrokenField::zero(s);
  const auto d2 = s->edge_dofs(0, Region::omega2);
  f.coeffs[d2[0]] = 1.0;
  f.coeffs[d2[1]] = 3.0;
  EXPECT_DOUBLE_EQ(edge_jump(f, 0, 0.25), 1.5);
}

TEST(Lift, SlabLiftIsLinearAndJumpFree) {
  const SpacePtr s = make_space(generate_slab(2, 1, 1.0, 3.0, 1.0));
  const BrokenField lift = lift_dirichlet(s, 1.0, 5.0);
  for (int d = 0; d < s->n_dofs(); ++d) {
    const double x = s->mesh().vertices[s->dof_vertex(d)].x();
    EXPECT_NEAR(lift.coeffs[d], 1.0 + x, 1e-14);
    if (s->is_dirichlet(d)) {
      EXPECT_EQ(lift.coeffs[d], s->dirichlet_marker(d) == BoundaryMarker::dirichlet_a ? 1.0 : 5.0);
    }
  }
  for (int k = 0; k < static_cast<int>(s->mesh().interface_edges.size()); ++k)
    EXPECT_EQ(edge_jump(lift, k, 0.5), 0.0);
}

TEST(FreeDofs, RestrictExtendRoundTrip) {
  const SpacePtr s = make_space(generate_slab(2, 2, 1, 1, 1));
  Eigen::VectorXd free(s->n_free());
  for (int i = 0; i < free.size(); ++i)
    free[i] = ot::uniform(-1, 1);
  const BrokenField f = extend_free(s, free);
  EXPECT_EQ(restrict_free(f), free);
  for (int d = 0; d < s->n_dofs(); ++d) {
    if (s->is_dirichlet(d)) {
      EXPECT_EQ(f.coeffs[d], 0.0);
      EXPECT_EQ(s->free_index(d), -1);
    } else {
      EXPECT_EQ(s->free_dofs()[s->free_index(d)], d);
    }
  }
}

TEST(FieldCsv, HeaderAndRows) {
  const SpacePtr s = make_space(generate_slab(1, 1, 1, 1, 1));
  std::ostringstream os;
  write_field_csv(lift_dirichlet(s, 0.0, 1.0), os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "vertex_index,region,x,y,value");
  int rows = 0;
  while (std::getline(is, line))
    ++rows;
  EXPECT_EQ(rows, s->n_dofs());
}

TEST(BrokenSpace, RejectsInvalidMesh) {
  InterfaceMesh m = generate_slab(1, 1, 1, 1, 1);
  m.interface_edges.clear();
  EXPECT_THROW(make_space(m), Error);
}
