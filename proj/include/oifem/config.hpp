#pragma once

// Run configuration: flat "key = value" text, one entry per line, '#' comments.

#include <oifem/constitutive.hpp>
#include <oifem/error.hpp>

#include <fstream>
#include <istream>
#include <set>
#include <string>

namespace oifem {

struct RunConfig {
  enum class MeshKind { slab, file };

  MeshKind mesh = MeshKind::slab;
  std::string mesh_file;
  int nx = 1;
  int ny = 1;
  double length1 = 1.0;
  double length2 = 1.0;
  double height = 1.0;

  std::string law = "sinh-bv";
  double phi_a = 0.0;
  double phi_b = 0.0;

  double tol = 1e-10;
  int max_iter = 100;
  int edge_points = 2;

  std::string output_prefix = "oifem";

  /// Bound on the Fenchel and energy-identity gaps (and on the slab checks).
  double gap_bound = 1e-8;
  /// Bound on the conservation and dual residuals; <= 0 means 10 * tol.
  double residual_bound = 0.0;

  double effective_residual_bound() const { return residual_bound > 0.0 ? residual_bound : 10.0 * tol; }
};

namespace detail {

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string &v, int line) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception &) {
    throw ParseError("expected a number, got '" + v + "'", line);
  }
  if (used != v.size())
    throw ParseError("expected a number, got '" + v + "'", line);
  return x;
}

inline int parse_int(const std::string &v, int line) {
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(v, &used);
  } catch (const std::exception &) {
    throw ParseError("expected an integer, got '" + v + "'", line);
  }
  if (used != v.size())
    throw ParseError("expected an integer, got '" + v + "'", line);
  return static_cast<int>(x);
}

} // namespace detail

/// Parses and validates a configuration. Unknown or repeated keys are errors.
inline RunConfig parse_config(std::istream &is) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", lineno);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (value.empty())
      throw ParseError("empty value for '" + key + "'", lineno);
    if (!seen.insert(key).second)
      throw ParseError("duplicate key '" + key + "'", lineno);

    if (key == "mesh") {
      if (value == "slab")
        cfg.mesh = RunConfig::MeshKind::slab;
      else if (value == "file")
        cfg.mesh = RunConfig::MeshKind::file;
      else
        throw ParseError("mesh must be 'slab' or 'file'", lineno);
    } else if (key == "mesh_file") {
      cfg.mesh_file = value;
    } else if (key == "nx") {
      cfg.nx = detail::parse_int(value, lineno);
    } else if (key == "ny") {
      cfg.ny = detail::parse_int(value, lineno);
    } else if (key == "length1") {
      cfg.length1 = detail::parse_double(value, lineno);
    } else if (key == "length2") {
      cfg.length2 = detail::parse_double(value, lineno);
    } else if (key == "height") {
      cfg.height = detail::parse_double(value, lineno);
    } else if (key == "law") {
      cfg.law = value;
    } else if (key == "phi_a") {
      cfg.phi_a = detail::parse_double(value, lineno);
    } else if (key == "phi_b") {
      cfg.phi_b = detail::parse_double(value, lineno);
    } else if (key == "tol") {
      cfg.tol = detail::parse_double(value, lineno);
    } else if (key == "max_iter") {
      cfg.max_iter = detail::parse_int(value, lineno);
    } else if (key == "edge_points") {
      cfg.edge_points = detail::parse_int(value, lineno);
    } else if (key == "output_prefix") {
      cfg.output_prefix = value;
    } else if (key == "gap_bound") {
      cfg.gap_bound = detail::parse_double(value, lineno);
    } else if (key == "residual_bound") {
      cfg.residual_bound = detail::parse_double(value, lineno);
    } else {
      throw ParseError("unknown key '" + key + "'", lineno);
    }
  }

  if (!(cfg.tol > 0.0))
    throw ParseError("tol must be positive", 0);
  if (cfg.max_iter < 0)
    throw ParseError("max_iter must be nonnegative", 0);
  if (cfg.edge_points < 1 || cfg.edge_points > 5)
    throw ParseError("edge_points must be between 1 and 5", 0);
  if (cfg.mesh == RunConfig::MeshKind::file && cfg.mesh_file.empty())
    throw ParseError("mesh = file needs mesh_file", 0);
  law_from_name(cfg.law);
  return cfg;
}

inline RunConfig parse_config_file(const std::string &path) {
  std::ifstream is(path);
  if (!is)
    throw Error("cannot open config '" + path + "'");
  return parse_config(is);
}

} // namespace oifem
