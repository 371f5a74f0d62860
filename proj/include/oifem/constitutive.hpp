#pragma once

// Radial volume laws h = grad F_h and scalar interface laws b = F_b', their
// inverses, and runtime checks of the structural assumptions on them.

#include <oifem/nfunction.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace oifem {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class Region : int { omega1 = 1, omega2 = 2 };

inline int region_index(Region r) { return static_cast<int>(r) - 1; }

/// Flux law of one subdomain, h(v) = F_h'(|v|) v/|v| with F_h radial.
struct VolumeLaw {
  Region region = Region::omega1;
  NFunction potential;
  /// (F_h')^{-1}(t)/t; falls back to bisection on the potential when empty.
  std::function<double(double)> inverse_ratio;
  double alpha = 0.5;
  double C = 1.0;

  Vec2 h(const Vec2 &v) const {
    const double r = v.norm();
    // deriv_ratio may blow up at 0 (p < 2) while h(0) = 0 always
    return r == 0.0 ? Vec2::Zero() : Vec2(potential.deriv_ratio(r) * v);
  }

  Vec2 f(const Vec2 &j) const {
    const double r = j.norm();
    if (inverse_ratio)
      return inverse_ratio(r) * j;
    if (r == 0.0)
      return Vec2::Zero();
    return (inverse_derivative(potential, r) / r) * j;
  }

  /// Hessian of F_h at v:
  /// psi'(r)/r (I - v v^T/r^2) + psi''(r) v v^T/r^2, with the limit psi''(0) I.
  Mat2 dh(const Vec2 &v) const {
    const double r = v.norm();
    if (r == 0.0)
      return potential.second(0.0) * Mat2::Identity();
    const Vec2 e = v / r;
    const Mat2 radial = e * e.transpose();
    return potential.deriv_ratio(r) * (Mat2::Identity() - radial) + potential.second(r) * radial;
  }

  double energy_density(const Vec2 &v) const { return potential.value(v.norm()); }
  double conjugate_density(const Vec2 &j) const { return conjugate(potential, j.norm()); }

  /// Scalar (1D) inverse slope: the gradient that carries flux j along a line.
  double scalar_inverse(double j) const { return f(Vec2(j, 0.0)).x(); }
};

/// Jump law on the interface, b(z) = sign(z) F_b'(|z|).
struct InterfaceLaw {
  NFunction potential;
  /// sign(w) (F_b')^{-1}(|w|); falls back to bisection when empty.
  std::function<double(double)> inverse;
  double alpha = 0.5;

  double b(double z) const { return std::copysign(potential.deriv(std::abs(z)), z); }
  double db(double z) const { return potential.second(std::abs(z)); }

  double g(double w) const {
    if (inverse)
      return inverse(w);
    return std::copysign(inverse_derivative(potential, std::abs(w)), w);
  }

  double energy_density(double z) const { return potential.value(std::abs(z)); }
  double conjugate_density(double w) const { return conjugate(potential, std::abs(w)); }
};

struct LawSet {
  std::string name;
  VolumeLaw omega1;
  VolumeLaw omega2;
  InterfaceLaw interface;

  const VolumeLaw &volume(Region r) const { return r == Region::omega1 ? omega1 : omega2; }
};

/// High-field conduction in Omega_1, Ohm's law in Omega_2, Butler-Volmer jump law.
inline LawSet make_prototype_laws() {
  LawSet laws;
  laws.name = "sinh-bv";

  laws.omega1.region = Region::omega1;
  laws.omega1.potential = cosh_minus_one();
  laws.omega1.inverse_ratio = [](double r) { return detail::asinhc(r); };

  laws.omega2.region = Region::omega2;
  laws.omega2.potential = power_function(2.0);
  laws.omega2.potential.label = "t^2/2";
  laws.omega2.inverse_ratio = [](double) { return 1.0; };

  laws.interface.potential = exp_minus_linear();
  laws.interface.inverse = [](double w) { return std::copysign(std::log1p(std::abs(w)), w); };
  return laws;
}

/// h(v) = |v|^{p-2} v in both regions with a linear interface law b(z) = z.
inline LawSet make_power_laws(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw Error("power law exponent must satisfy p > 1, got " + detail::format_number(p));
  const double q = p / (p - 1.0);
  LawSet laws;
  laws.name = "power:" + detail::format_number(p);
  for (VolumeLaw *law : {&laws.omega1, &laws.omega2}) {
    law->potential = power_function(p);
    law->inverse_ratio = [q](double r) {
      if (q == 2.0)
        return 1.0;
      return std::pow(r, q - 2.0);
    };
  }
  laws.omega1.region = Region::omega1;
  laws.omega2.region = Region::omega2;
  laws.interface.potential = power_function(2.0);
  laws.interface.inverse = [](double w) { return w; };
  return laws;
}

/// "sinh-bv" or "power:<p>".
inline LawSet law_from_name(const std::string &name) {
  if (name == "sinh-bv")
    return make_prototype_laws();
  const std::string prefix = "power:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string tail = name.substr(prefix.size());
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(tail, &used);
    } catch (const std::exception &) {
      throw Error("unknown law '" + name + "'");
    }
    if (used != tail.size())
      throw Error("unknown law '" + name + "'");
    return make_power_laws(p);
  }
  throw Error("unknown law '" + name + "'");
}

struct CoercivityReport {
  /// max |h(v).v - F(v) - F*(h(v))|
  double fenchel_abs = 0.0;
  /// the same residual divided by 1 + |h(v).v|
  double fenchel_rel = 0.0;
  /// min over probes of h(v).v - alpha (F*(h(v)) + F(v)) + C; negative means violated
  double worst_slack = std::numeric_limits<double>::infinity();
};

inline CoercivityReport check_coercivity(const VolumeLaw &law, std::span<const Vec2> probes) {
  CoercivityReport rep;
  for (const Vec2 &v : probes) {
    const Vec2 j = law.h(v);
    const double work = j.dot(v);
    const double sum = law.energy_density(v) + law.conjugate_density(j);
    const double res = std::abs(work - sum);
    rep.fenchel_abs = std::max(rep.fenchel_abs, res);
    rep.fenchel_rel = std::max(rep.fenchel_rel, res / (1.0 + std::abs(work)));
    rep.worst_slack = std::min(rep.worst_slack, work - law.alpha * sum + law.C);
  }
  return rep;
}

inline CoercivityReport check_coercivity(const InterfaceLaw &law, std::span<const double> probes,
                                         double C = 1.0) {
  CoercivityReport rep;
  for (double z : probes) {
    const double w = law.b(z);
    const double work = w * z;
    const double sum = law.energy_density(z) + law.conjugate_density(w);
    const double res = std::abs(work - sum);
    rep.fenchel_abs = std::max(rep.fenchel_abs, res);
    rep.fenchel_rel = std::max(rep.fenchel_rel, res / (1.0 + std::abs(work)));
    rep.worst_slack = std::min(rep.worst_slack, work - law.alpha * sum + C);
  }
  return rep;
}

/// Monotonicity and zero-at-zero: returns the smallest (h(v1)-h(v2)).(v1-v2)
/// over all probe pairs, or -inf if h(0) != 0.
inline double check_monotonicity(const VolumeLaw &law, std::span<const Vec2> probes) {
  if (law.h(Vec2::Zero()).norm() != 0.0)
    return -std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < probes.size(); ++a)
    for (std::size_t b = a + 1; b < probes.size(); ++b)
      worst = std::min(worst, (law.h(probes[a]) - law.h(probes[b])).dot(probes[a] - probes[b]));
  return worst;
}

inline double check_monotonicity(const InterfaceLaw &law, std::span<const double> probes) {
  if (law.b(0.0) != 0.0)
    return -std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < probes.size(); ++a)
    for (std::size_t b = a + 1; b < probes.size(); ++b)
      worst = std::min(worst, (law.b(probes[a]) - law.b(probes[b])) * (probes[a] - probes[b]));
  return worst;
}

/// Potential consistency: largest relative mismatch between the one-sided
/// difference quotient (F(v + eps u) - F(v))/eps and h(v).u.
inline double check_potential_consistency(const VolumeLaw &law,
                                          std::span<const std::pair<Vec2, Vec2>> probes,
                                          double eps = 1e-7) {
  double worst = 0.0;
  for (const auto &[v, u] : probes) {
    const double quotient = (law.energy_density(v + eps * u) - law.energy_density(v)) / eps;
    const double exact = law.h(v).dot(u);
    worst = std::max(worst, std::abs(quotient - exact) / (1.0 + std::abs(exact)));
  }
  return worst;
}

inline Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::yes && b == Verdict::yes)
    return Verdict::yes;
  if (a == Verdict::no || b == Verdict::no)
    return Verdict::no;
  return Verdict::inconclusive;
}

/// Delta_2 verdicts for Phi, Psi and their conjugates. Phi is x-dependent
/// (one profile per region), so it satisfies the condition iff both regions do.
struct DeltaAssumptionReport {
  Delta2Report phi[2];
  Delta2Report phi_star[2];
  Delta2Report psi;
  Delta2Report psi_star;
  GrowthReport phi_growth[2];
  GrowthReport psi_growth;

  Verdict phi_verdict() const { return combine(phi[0].satisfied, phi[1].satisfied); }
  Verdict phi_star_verdict() const { return combine(phi_star[0].satisfied, phi_star[1].satisfied); }
  Verdict primal_couple() const { return combine(phi_verdict(), psi.satisfied); }
  Verdict dual_couple() const { return combine(phi_star_verdict(), psi_star.satisfied); }

  /// At least one of the couples (Phi, Psi), (Phi*, Psi*) satisfies Delta_2.
  Verdict holds() const {
    const Verdict a = primal_couple();
    const Verdict b = dual_couple();
    if (a == Verdict::yes || b == Verdict::yes)
      return Verdict::yes;
    if (a == Verdict::no && b == Verdict::no)
      return Verdict::no;
    return Verdict::inconclusive;
  }
};

struct DeltaProbeSettings {
  double t_max = 1e6;
  double ratio_bound = 1e3;
  double threshold = 1.0;
  double growth_t_max = 300.0;
};

inline DeltaAssumptionReport check_delta_assumption(const LawSet &laws,
                                                    const DeltaProbeSettings &cfg = {}) {
  DeltaAssumptionReport rep;
  for (Region r : {Region::omega1, Region::omega2}) {
    const int k = region_index(r);
    const NFunction &phi = laws.volume(r).potential;
    rep.phi[k] = delta2_probe(phi, cfg.t_max, cfg.ratio_bound, cfg.threshold);
    rep.phi_star[k] = delta2_probe(conjugate_function(phi), cfg.t_max, cfg.ratio_bound, cfg.threshold);
    rep.phi_growth[k] = superquadratic_growth_check(phi, cfg.growth_t_max);
  }
  const NFunction &psi = laws.interface.potential;
  rep.psi = delta2_probe(psi, cfg.t_max, cfg.ratio_bound, cfg.threshold);
  rep.psi_star = delta2_probe(conjugate_function(psi), cfg.t_max, cfg.ratio_bound, cfg.threshold);
  rep.psi_growth = superquadratic_growth_check(psi, cfg.growth_t_max);
  return rep;
}

} // namespace oifem
