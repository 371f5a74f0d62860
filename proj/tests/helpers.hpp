#pragma once

#include <oifem/mesh.hpp>

#include "oracles.hpp"

#include <set>
#include <sstream>
#include <string>

namespace oifem::testing {

/// Moves every vertex off the boundary and the interface by up to `amount`
/// of the local cell size, keeping the mesh valid.
inline InterfaceMesh jiggle_interior(InterfaceMesh m, double dx, double dy, double amount = 0.25) {
  std::set<int> pinned;
  for (const auto &e : m.boundary_edges)
    pinned.insert(e.v.begin(), e.v.end());
  for (const auto &e : m.interface_edges)
    pinned.insert(e.v.begin(), e.v.end());
  for (int v = 0; v < static_cast<int>(m.vertices.size()); ++v)
    if (!pinned.count(v))
      m.vertices[v] += Vec2(uniform(-amount, amount) * dx, uniform(-amount, amount) * dy);
  return m;
}

inline std::string mesh_text(const InterfaceMesh &m) {
  std::ostringstream os;
  write_mesh(m, os);
  return os.str();
}

inline InterfaceMesh mesh_from_text(const std::string &s) {
  std::istringstream is(s);
  return read_mesh(is);
}

/// 1-based line number of the first line starting with `prefix`.
inline int line_of(const std::string &text, const std::string &prefix) {
  std::istringstream is(text);
  std::string line;
  for (int n = 1; std::getline(is, line); ++n)
    if (line.rfind(prefix, 0) == 0)
      return n;
  return 0;
}

} // namespace oifem::testing
