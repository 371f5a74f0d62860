#pragma once

// Interface-conforming 2D triangulations split into two regions by an
// oriented interface, with Dirichlet/Neumann boundary markers.

#include <oifem/constitutive.hpp>
#include <oifem/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

namespace oifem {

enum class BoundaryMarker { dirichlet_a, dirichlet_b, neumann };

inline const char *to_string(BoundaryMarker m) {
  switch (m) {
  case BoundaryMarker::dirichlet_a:
    return "dirA";
  case BoundaryMarker::dirichlet_b:
    return "dirB";
  default:
    return "neu";
  }
}

struct Triangle {
  std::array<int, 3> v{};
  Region region = Region::omega1;
  bool operator==(const Triangle &) const = default;
};

struct BoundaryEdge {
  std::array<int, 2> v{};
  BoundaryMarker marker = BoundaryMarker::neumann;
  bool operator==(const BoundaryEdge &) const = default;
};

/// An edge of Gamma. tri1 lies in Omega_1, tri2 in Omega_2.
struct InterfaceEdge {
  std::array<int, 2> v{};
  int tri1 = -1;
  int tri2 = -1;
  bool operator==(const InterfaceEdge &) const = default;
};

struct InterfaceMesh {
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<InterfaceEdge> interface_edges;

  bool operator==(const InterfaceMesh &) const = default;

  double signed_area(int t) const {
    const auto &tri = triangles[t].v;
    const Vec2 a = vertices[tri[1]] - vertices[tri[0]];
    const Vec2 b = vertices[tri[2]] - vertices[tri[0]];
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
  }

  Vec2 centroid(int t) const {
    const auto &tri = triangles[t].v;
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
  }

  double edge_length(const std::array<int, 2> &e) const {
    return (vertices[e[1]] - vertices[e[0]]).norm();
  }

  /// Unit normal of interface edge k pointing from Omega_1 into Omega_2.
  Vec2 normal(int k) const {
    const auto &e = interface_edges[k];
    const Vec2 d = vertices[e.v[1]] - vertices[e.v[0]];
    Vec2 n(d.y(), -d.x());
    n.normalize();
    if (n.dot(centroid(e.tri1) - vertices[e.v[0]]) > 0.0)
      n = -n;
    return n;
  }
};

/// A violated mesh invariant, optionally tied to one mesh entity.
class MeshError : public Error {
public:
  enum class Entity { none, triangle, boundary_edge, interface_edge };

  MeshError(const std::string &what, Entity entity = Entity::none, int index = -1)
      : Error(what), entity_(entity), index_(index) {}

  Entity entity() const noexcept { return entity_; }
  int index() const noexcept { return index_; }

private:
  Entity entity_;
  int index_;
};

namespace detail {

using EdgeKey = std::pair<int, int>;

inline EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

inline bool triangle_has_edge(const Triangle &t, int a, int b) {
  const auto has = [&](int x) { return std::find(t.v.begin(), t.v.end(), x) != t.v.end(); };
  return a != b && has(a) && has(b);
}

// Union of triangles connected through edges not on the interface.
inline bool region_connected(const InterfaceMesh &m, Region r,
                             const std::map<EdgeKey, std::vector<int>> &edge_tris) {
  std::vector<int> members;
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
    if (m.triangles[t].region == r)
      members.push_back(t);
  if (members.empty())
    return false;
  std::vector<char> seen(m.triangles.size(), 0);
  std::queue<int> todo;
  todo.push(members.front());
  seen[members.front()] = 1;
  std::size_t count = 0;
  while (!todo.empty()) {
    const int t = todo.front();
    todo.pop();
    ++count;
    const auto &v = m.triangles[t].v;
    for (int i = 0; i < 3; ++i) {
      const auto it = edge_tris.find(edge_key(v[i], v[(i + 1) % 3]));
      for (int s : it->second)
        if (!seen[s] && m.triangles[s].region == r) {
          seen[s] = 1;
          todo.push(s);
        }
    }
  }
  return count == members.size();
}

} // namespace detail

/// Throws MeshError describing the first violated mesh invariant.
inline void validate(const InterfaceMesh &m) {
  using detail::edge_key;
  using detail::EdgeKey;
  const int nv = static_cast<int>(m.vertices.size());
  const int nt = static_cast<int>(m.triangles.size());
  if (nv < 3 || nt < 2)
    throw MeshError("mesh too small");

  for (const Vec2 &x : m.vertices)
    if (!x.allFinite())
      throw MeshError("non-finite vertex coordinate");

  std::map<EdgeKey, std::vector<int>> edge_tris;
  for (int t = 0; t < nt; ++t) {
    const auto &v = m.triangles[t].v;
    for (int i : v)
      if (i < 0 || i >= nv)
        throw MeshError("triangle " + std::to_string(t) + " references a missing vertex", MeshError::Entity::triangle, t);
    if (!(m.signed_area(t) > 0.0))
      throw MeshError("triangle " + std::to_string(t) + " has nonpositive signed area", MeshError::Entity::triangle, t);
    for (int i = 0; i < 3; ++i)
      edge_tris[edge_key(v[i], v[(i + 1) % 3])].push_back(t);
  }

  std::map<EdgeKey, int> bmark;
  for (int b = 0; b < static_cast<int>(m.boundary_edges.size()); ++b) {
    const auto &be = m.boundary_edges[b];
    const auto key = edge_key(be.v[0], be.v[1]);
    const auto it = edge_tris.find(key);
    if (it == edge_tris.end() || it->second.size() != 1)
      throw MeshError("boundary edge (" + std::to_string(be.v[0]) + "," + std::to_string(be.v[1]) +
                  ") is not on the boundary",
                      MeshError::Entity::boundary_edge, b);
    if (!bmark.emplace(key, static_cast<int>(be.marker)).second)
      throw MeshError("boundary edge marked twice", MeshError::Entity::boundary_edge, b);
  }

  std::map<EdgeKey, int> iedge;
  for (int k = 0; k < static_cast<int>(m.interface_edges.size()); ++k) {
    const auto &ie = m.interface_edges[k];
    if (ie.tri1 < 0 || ie.tri1 >= nt || ie.tri2 < 0 || ie.tri2 >= nt)
      throw MeshError("interface edge " + std::to_string(k) + " references a missing triangle", MeshError::Entity::interface_edge, k);
    if (!detail::triangle_has_edge(m.triangles[ie.tri1], ie.v[0], ie.v[1]) ||
        !detail::triangle_has_edge(m.triangles[ie.tri2], ie.v[0], ie.v[1]))
      throw MeshError("interface edge " + std::to_string(k) + " is not shared by its triangles", MeshError::Entity::interface_edge, k);
    if (m.triangles[ie.tri1].region != Region::omega1 || m.triangles[ie.tri2].region != Region::omega2)
      throw MeshError("interface orientation: edge " + std::to_string(k) +
                  " must separate an Omega_1 triangle (tri1) from an Omega_2 triangle (tri2)",
                      MeshError::Entity::interface_edge, k);
    if (!iedge.emplace(edge_key(ie.v[0], ie.v[1]), k).second)
      throw MeshError("interface edge listed twice", MeshError::Entity::interface_edge, k);
  }

  for (const auto &[key, tris] : edge_tris) {
    if (tris.size() > 2)
      throw MeshError("edge shared by more than two triangles");
    if (tris.size() == 1 && !bmark.count(key))
      throw MeshError("unmarked boundary edge (" + std::to_string(key.first) + "," +
                  std::to_string(key.second) + ")");
    if (tris.size() == 2) {
      const bool mixed = m.triangles[tris[0]].region != m.triangles[tris[1]].region;
      if (mixed != static_cast<bool>(iedge.count(key)))
        throw MeshError(mixed ? "region boundary edge missing from the interface list (non-conforming interface)"
                          : "interface edge inside a single region");
    }
  }

  if (m.interface_edges.empty())
    throw MeshError("empty interface");

  // Dirichlet components: nonempty, each touching its own region only.
  std::vector<char> on_a(nv, 0), on_b(nv, 0);
  bool has_a = false, has_b = false;
  for (const auto &be : m.boundary_edges) {
    if (be.marker == BoundaryMarker::neumann)
      continue;
    const int t = edge_tris.at(edge_key(be.v[0], be.v[1])).front();
    const bool is_a = be.marker == BoundaryMarker::dirichlet_a;
    const Region want = is_a ? Region::omega1 : Region::omega2;
    if (m.triangles[t].region != want)
      throw MeshError(std::string("Dirichlet component ") + to_string(be.marker) +
                  " must lie on the boundary of " + (is_a ? "Omega_1" : "Omega_2"));
    auto &flag = is_a ? on_a : on_b;
    flag[be.v[0]] = flag[be.v[1]] = 1;
    (is_a ? has_a : has_b) = true;
  }
  if (!has_a || !has_b)
    throw MeshError(std::string("missing Dirichlet component ") + (has_a ? "dirB" : "dirA"));

  // Gamma separates the two components.
  for (int i = 0; i < nv; ++i)
    if (on_a[i] && on_b[i])
      throw MeshError("Dirichlet components dirA and dirB touch at vertex " + std::to_string(i));
  for (const auto &t : m.triangles)
    for (int i : t.v)
      if ((t.region == Region::omega1 && on_b[i]) || (t.region == Region::omega2 && on_a[i]))
        throw MeshError("interface does not separate the Dirichlet components");

  if (!detail::region_connected(m, Region::omega1, edge_tris) ||
      !detail::region_connected(m, Region::omega2, edge_tris))
    throw MeshError("a region is not edge-connected");

  // Gamma connected through shared vertices.
  {
    const auto &ie = m.interface_edges;
    std::vector<char> seen(ie.size(), 0);
    std::queue<int> todo;
    todo.push(0);
    seen[0] = 1;
    std::size_t count = 0;
    while (!todo.empty()) {
      const int k = todo.front();
      todo.pop();
      ++count;
      for (int l = 0; l < static_cast<int>(ie.size()); ++l) {
        if (seen[l])
          continue;
        const bool touch = ie[l].v[0] == ie[k].v[0] || ie[l].v[0] == ie[k].v[1] ||
                           ie[l].v[1] == ie[k].v[0] || ie[l].v[1] == ie[k].v[1];
        if (touch) {
          seen[l] = 1;
          todo.push(l);
        }
      }
    }
    if (count != ie.size())
      throw MeshError("interface is not connected");
  }
}

/// Rectangle (0, length_1 + length_2) x (0, height) cut by the vertical
/// interface x = length_1.
///
/// Each region carries nx columns and 2 ny rows of rectangular cells, every
/// cell split along a diagonal whose direction alternates in a checkerboard.
/// Counts: 8 nx ny triangles, 2 ny interface edges, (2 nx + 1)(2 ny + 1)
/// vertices. x = 0 is dirA, x = length_1 + length_2 is dirB, the rest neu.
inline InterfaceMesh generate_slab(int nx, int ny, double length_1, double length_2, double height) {
  if (nx < 1 || ny < 1)
    throw Error("generate_slab: nx and ny must be at least 1");
  if (!(length_1 > 0.0) || !(length_2 > 0.0) || !(height > 0.0))
    throw Error("generate_slab: dimensions must be positive");

  InterfaceMesh m;
  const int cols = 2 * nx;
  const int rows = 2 * ny;
  const auto vid = [&](int i, int j) { return j * (cols + 1) + i; };
  for (int j = 0; j <= rows; ++j) {
    const double y = height * j / rows;
    for (int i = 0; i <= cols; ++i) {
      const double x = i <= nx ? length_1 * i / nx : length_1 + length_2 * (i - nx) / nx;
      m.vertices.emplace_back(x, y);
    }
  }

  // Triangle index of the cell half touching the cell's left (i) edge.
  std::vector<int> left_half(cols * rows), right_half(cols * rows);
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const Region r = i < nx ? Region::omega1 : Region::omega2;
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      const int cell = j * cols + i;
      const int first = static_cast<int>(m.triangles.size());
      if ((i + j) % 2 == 0) {
        // diagonal a-c
        m.triangles.push_back({{a, b, c}, r});
        m.triangles.push_back({{a, c, d}, r});
        right_half[cell] = first;
        left_half[cell] = first + 1;
      } else {
        // diagonal b-d
        m.triangles.push_back({{a, b, d}, r});
        m.triangles.push_back({{b, c, d}, r});
        left_half[cell] = first;
        right_half[cell] = first + 1;
      }
    }
  }

  for (int j = 0; j < rows; ++j) {
    m.boundary_edges.push_back({{vid(0, j), vid(0, j + 1)}, BoundaryMarker::dirichlet_a});
    m.boundary_edges.push_back({{vid(cols, j), vid(cols, j + 1)}, BoundaryMarker::dirichlet_b});
  }
  for (int i = 0; i < cols; ++i) {
    m.boundary_edges.push_back({{vid(i, 0), vid(i + 1, 0)}, BoundaryMarker::neumann});
    m.boundary_edges.push_back({{vid(i, rows), vid(i + 1, rows)}, BoundaryMarker::neumann});
  }
  for (int j = 0; j < rows; ++j) {
    const int cell1 = j * cols + (nx - 1);
    const int cell2 = j * cols + nx;
    m.interface_edges.push_back({{vid(nx, j), vid(nx, j + 1)}, right_half[cell1], left_half[cell2]});
  }
  return m;
}

/// Writes the "oimesh 1" text format.
inline void write_mesh(const InterfaceMesh &m, std::ostream &os) {
  os << "oimesh 1\n";
  os << std::setprecision(17);
  os << "vertices " << m.vertices.size() << '\n';
  for (const Vec2 &x : m.vertices)
    os << x.x() << ' ' << x.y() << '\n';
  os << "triangles " << m.triangles.size() << '\n';
  for (const auto &t : m.triangles)
    os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << static_cast<int>(t.region) << '\n';
  os << "bedges " << m.boundary_edges.size() << '\n';
  for (const auto &e : m.boundary_edges)
    os << e.v[0] << ' ' << e.v[1] << ' ' << to_string(e.marker) << '\n';
  os << "iedges " << m.interface_edges.size() << '\n';
  for (const auto &e : m.interface_edges)
    os << e.v[0] << ' ' << e.v[1] << ' ' << e.tri1 << ' ' << e.tri2 << '\n';
}

inline void write_mesh(const InterfaceMesh &m, const std::string &path) {
  std::ofstream os(path);
  if (!os)
    throw Error("cannot open '" + path + "' for writing");
  write_mesh(m, os);
  if (!os)
    throw Error("failed writing '" + path + "'");
}

/// Parses the "oimesh 1" format and validates all mesh invariants.
inline InterfaceMesh read_mesh(std::istream &is) {
  int lineno = 0;
  std::string line;
  // Next non-blank, non-comment line.
  const auto next = [&](const char *what) {
    while (std::getline(is, line)) {
      ++lineno;
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos != std::string::npos && line[pos] != '#')
        return;
    }
    throw ParseError(std::string("unexpected end of file, expected ") + what, lineno + 1);
  };
  const auto section = [&](const std::string &name) {
    next(name.c_str());
    std::istringstream ss(line);
    std::string word;
    long long count = -1;
    std::string extra;
    if (!(ss >> word >> count) || word != name || count < 0 || (ss >> extra))
      throw ParseError("expected '" + name + " <count>'", lineno);
    return static_cast<std::size_t>(count);
  };
  const auto finish = [&](std::istringstream &ss) {
    std::string extra;
    if (ss >> extra)
      throw ParseError("trailing content '" + extra + "'", lineno);
  };

  InterfaceMesh m;
  next("header");
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "oimesh" || version != 1)
      throw ParseError("expected header 'oimesh 1'", lineno);
  }

  const std::size_t nv = section("vertices");
  for (std::size_t i = 0; i < nv; ++i) {
    next("vertex");
    std::istringstream ss(line);
    double x = 0, y = 0;
    if (!(ss >> x >> y))
      throw ParseError("expected 'x y'", lineno);
    finish(ss);
    m.vertices.emplace_back(x, y);
  }

  const std::size_t nt = section("triangles");
  std::vector<int> tri_line(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    next("triangle");
    std::istringstream ss(line);
    Triangle tri;
    int region = 0;
    if (!(ss >> tri.v[0] >> tri.v[1] >> tri.v[2] >> region))
      throw ParseError("expected 'i j k region'", lineno);
    finish(ss);
    if (region != 1 && region != 2)
      throw ParseError("region must be 1 or 2", lineno);
    for (int v : tri.v)
      if (v < 0 || static_cast<std::size_t>(v) >= nv)
        throw ParseError("vertex index out of range", lineno);
    tri.region = static_cast<Region>(region);
    m.triangles.push_back(tri);
    tri_line[t] = lineno;
  }

  const std::size_t nb = section("bedges");
  std::vector<int> bedge_line(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    next("boundary edge");
    std::istringstream ss(line);
    BoundaryEdge e;
    std::string marker;
    if (!(ss >> e.v[0] >> e.v[1] >> marker))
      throw ParseError("expected 'i j marker'", lineno);
    finish(ss);
    if (marker == "dirA")
      e.marker = BoundaryMarker::dirichlet_a;
    else if (marker == "dirB")
      e.marker = BoundaryMarker::dirichlet_b;
    else if (marker == "neu")
      e.marker = BoundaryMarker::neumann;
    else
      throw ParseError("unknown marker '" + marker + "'", lineno);
    for (int v : e.v)
      if (v < 0 || static_cast<std::size_t>(v) >= nv)
        throw ParseError("vertex index out of range", lineno);
    m.boundary_edges.push_back(e);
    bedge_line[k] = lineno;
  }

  const std::size_t ni = section("iedges");
  std::vector<int> iedge_line(ni);
  for (std::size_t k = 0; k < ni; ++k) {
    next("interface edge");
    std::istringstream ss(line);
    InterfaceEdge e;
    if (!(ss >> e.v[0] >> e.v[1] >> e.tri1 >> e.tri2))
      throw ParseError("expected 'i j tri1 tri2'", lineno);
    finish(ss);
    for (int v : e.v)
      if (v < 0 || static_cast<std::size_t>(v) >= nv)
        throw ParseError("vertex index out of range", lineno);
    if (e.tri1 < 0 || static_cast<std::size_t>(e.tri1) >= nt || e.tri2 < 0 ||
        static_cast<std::size_t>(e.tri2) >= nt)
      throw ParseError("triangle index out of range", lineno);
    if (m.triangles[e.tri1].region != Region::omega1 || m.triangles[e.tri2].region != Region::omega2)
      throw ParseError("interface orientation: tri1 must be in region 1 and tri2 in region 2", lineno);
    m.interface_edges.push_back(e);
    iedge_line[k] = lineno;
  }

  while (std::getline(is, line)) {
    ++lineno;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos != std::string::npos && line[pos] != '#')
      throw ParseError("unexpected content after iedges section", lineno);
  }

  try {
    validate(m);
  } catch (const MeshError &e) {
    int at = 0;
    switch (e.entity()) {
    case MeshError::Entity::triangle:
      at = tri_line[e.index()];
      break;
    case MeshError::Entity::boundary_edge:
      at = bedge_line[e.index()];
      break;
    case MeshError::Entity::interface_edge:
      at = iedge_line[e.index()];
      break;
    default:
      break;
    }
    throw ParseError(std::string("invalid mesh: ") + e.what(), at);
  }
  return m;
}

inline InterfaceMesh read_mesh(const std::string &path) {
  std::ifstream is(path);
  if (!is)
    throw Error("cannot open mesh file '" + path + "'");
  return read_mesh(is);
}

} // namespace oifem
