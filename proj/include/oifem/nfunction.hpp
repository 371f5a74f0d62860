#pragma once

// Scalar N-functions: evaluation with an overflow guard, numeric convex
// conjugation, Young gaps, Delta_2 probing and the Luxemburg norm.

#include <oifem/error.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace oifem {

namespace detail {

// sinh(t)/t, with the series below 1e-4 to avoid 0/0.
inline double sinhc(double t) {
  const double a = std::abs(t);
  if (a < 1e-4) {
    const double t2 = a * a;
    return 1.0 + t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sinh(a) / a;
}

// (e^t - 1)/t
inline double expm1c(double t) {
  if (std::abs(t) < 1e-4)
    return 1.0 + t / 2.0 + t * t / 6.0 + t * t * t / 24.0;
  return std::expm1(t) / t;
}

// asinh(t)/t
inline double asinhc(double t) {
  const double a = std::abs(t);
  if (a < 1e-4) {
    const double t2 = a * a;
    return 1.0 - t2 / 6.0 + 3.0 * t2 * t2 / 40.0;
  }
  return std::asinh(a) / a;
}

// ln(1+t)/t
inline double log1pc(double t) {
  if (std::abs(t) < 1e-4)
    return 1.0 - t / 2.0 + t * t / 3.0 - t * t * t / 4.0;
  return std::log1p(t) / t;
}

// e^t - t - 1 for t >= 0 without cancellation near 0.
inline double exp_minus_linear(double t) {
  if (t < 1e-2) {
    double term = t * t / 2.0;
    double sum = 0.0;
    for (int k = 3; k <= 9; ++k) {
      sum += term;
      term *= t / k;
    }
    return sum;
  }
  return std::expm1(t) - t;
}

inline std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

} // namespace detail

/// A scalar radial profile t >= 0 -> Phi(t) of an N-function, together with
/// its first and second derivatives.
///
/// Optional members fall back to generic numerics: the conjugate to
/// bisection on the derivative, deriv_ratio to deriv(t)/t (second(0) at 0).
/// Arguments above overflow_limit raise OverflowError instead of returning inf.
struct NFunction {
  std::string label;
  std::function<double(double)> value_fn;
  std::function<double(double)> deriv_fn;
  std::function<double(double)> second_fn;
  std::function<double(double)> deriv_ratio_fn;
  std::function<double(double)> analytic_conjugate;
  std::function<double(double)> inverse_deriv_fn;
  double overflow_limit = std::numeric_limits<double>::infinity();

  double value(double t) const {
    guard(t);
    return value_fn(t);
  }

  double deriv(double t) const {
    guard(t);
    return deriv_fn(t);
  }

  double second(double t) const {
    guard(t);
    return second_fn(t);
  }

  /// deriv(t)/t, finite at t = 0 whenever second(0) is.
  double deriv_ratio(double t) const {
    guard(t);
    if (deriv_ratio_fn)
      return deriv_ratio_fn(t);
    return t > 0.0 ? deriv_fn(t) / t : second_fn(0.0);
  }

  bool in_range(double t) const { return std::abs(t) <= overflow_limit; }

private:
  void guard(double t) const {
    if (!(std::abs(t) <= overflow_limit))
      throw OverflowError("N-function '" + label + "' evaluated at " + detail::format_number(t) +
                          " beyond its range " + detail::format_number(overflow_limit));
  }
};

/// Bisection tolerance (relative to the bracket scale) and iteration cap.
inline constexpr double kBisectionTol = 1e-12;
inline constexpr int kBisectionMaxIter = 200;

/// Largest argument at which exponential profiles are evaluated.
inline constexpr double kExpArgumentLimit = 700.0;

/// Phi(t) = cosh(t) - 1.
inline NFunction cosh_minus_one() {
  NFunction nf;
  nf.label = "cosh-1";
  nf.value_fn = [](double t) {
    const double s = std::sinh(0.5 * t);
    return 2.0 * s * s;
  };
  nf.deriv_fn = [](double t) { return std::sinh(t); };
  nf.second_fn = [](double t) { return std::cosh(t); };
  nf.deriv_ratio_fn = [](double t) { return detail::sinhc(t); };
  nf.overflow_limit = kExpArgumentLimit;
  return nf;
}

/// Psi(t) = e^t - t - 1.
inline NFunction exp_minus_linear() {
  NFunction nf;
  nf.label = "exp-t-1";
  nf.value_fn = [](double t) { return detail::exp_minus_linear(t); };
  nf.deriv_fn = [](double t) { return std::expm1(t); };
  nf.second_fn = [](double t) { return std::exp(t); };
  nf.deriv_ratio_fn = [](double t) { return detail::expm1c(t); };
  nf.overflow_limit = kExpArgumentLimit;
  return nf;
}

/// Phi(t) = t^p / p, with its closed-form conjugate s^q / q, 1/p + 1/q = 1.
inline NFunction power_function(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw Error("power N-function needs p > 1, got " + detail::format_number(p));
  const double q = p / (p - 1.0);
  NFunction nf;
  nf.label = "t^" + detail::format_number(p) + "/" + detail::format_number(p);
  nf.value_fn = [p](double t) { return std::pow(t, p) / p; };
  nf.deriv_fn = [p](double t) { return std::pow(t, p - 1.0); };
  nf.second_fn = [p](double t) {
    if (p == 2.0)
      return 1.0;
    return (p - 1.0) * std::pow(t, p - 2.0);
  };
  nf.deriv_ratio_fn = [p](double t) {
    if (p == 2.0)
      return 1.0;
    return std::pow(t, p - 2.0);
  };
  nf.analytic_conjugate = [q](double s) { return std::pow(s, q) / q; };
  nf.inverse_deriv_fn = [q](double s) { return std::pow(s, q - 1.0); };
  return nf;
}

/// Solves deriv(t) = s for t >= 0 (the maximiser in the conjugate supremum).
inline double inverse_derivative(const NFunction &nf, double s) {
  if (!(s >= 0.0) || !std::isfinite(s))
    throw Error("inverse derivative needs a finite s >= 0");
  if (nf.inverse_deriv_fn)
    return nf.inverse_deriv_fn(s);
  if (s == 0.0)
    return 0.0;

  double lo = 0.0;
  double hi = 1.0;
  while (nf.deriv(std::min(hi, nf.overflow_limit)) < s) {
    if (hi >= nf.overflow_limit)
      throw OverflowError("conjugate of '" + nf.label + "' at s=" + detail::format_number(s) +
                          " needs an argument beyond " + detail::format_number(nf.overflow_limit));
    if (hi > 1e300)
      throw DivergenceError("conjugate diverges: slope " + detail::format_number(s) +
                            " exceeds the range of '" + nf.label + "'");
    lo = hi;
    hi *= 2.0;
  }
  hi = std::min(hi, nf.overflow_limit);

  for (int it = 0; it < kBisectionMaxIter && hi - lo > kBisectionTol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    if (nf.deriv(mid) < s)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// sup_{t>=0} (s t - Phi(t)) by slope matching, ignoring any analytic conjugate.
inline double conjugate_numeric(const NFunction &nf, double s) {
  if (!(s >= 0.0) || !std::isfinite(s))
    throw Error("conjugate needs a finite s >= 0, got " + detail::format_number(s));
  if (!nf.value_fn || !nf.deriv_fn || nf.value(0.0) != 0.0)
    throw Error("conjugate of an invalid N-function '" + nf.label + "'");
  if (s == 0.0)
    return 0.0;
  const double t = inverse_derivative(nf, s);
  return std::max(0.0, s * t - nf.value(t));
}

/// Phi*(s), through the closed form when the profile carries one.
inline double conjugate(const NFunction &nf, double s) {
  if (nf.analytic_conjugate) {
    if (!(s >= 0.0) || !std::isfinite(s))
      throw Error("conjugate needs a finite s >= 0, got " + detail::format_number(s));
    return nf.analytic_conjugate(s);
  }
  return conjugate_numeric(nf, s);
}

/// The conjugate Phi* packaged as an N-function. Its derivative is the
/// inverse of Phi' and its second derivative 1/Phi''(t(s)).
inline NFunction conjugate_function(const NFunction &nf) {
  NFunction out;
  out.label = nf.label + "*";
  out.value_fn = [nf](double s) { return conjugate(nf, s); };
  out.deriv_fn = [nf](double s) { return inverse_derivative(nf, s); };
  out.second_fn = [nf](double s) { return 1.0 / nf.second(inverse_derivative(nf, s)); };
  out.deriv_ratio_fn = [nf](double s) {
    if (s == 0.0)
      return 1.0 / nf.second(0.0);
    const double t = inverse_derivative(nf, s);
    return 1.0 / nf.deriv_ratio(t);
  };
  out.inverse_deriv_fn = [nf](double t) { return nf.deriv(t); };
  out.analytic_conjugate = [nf](double t) { return nf.value(t); };
  return out;
}

/// Phi(t) + Phi*(s) - s t; nonnegative up to rounding, zero iff s = Phi'(t).
inline double young_gap(const NFunction &nf, double t, double s) {
  if (!(t >= 0.0) || !(s >= 0.0))
    throw Error("young_gap needs t, s >= 0");
  return nf.value(t) + conjugate(nf, s) - s * t;
}

/// Checks the sampled N-function invariants; returns the first violation found.
inline std::optional<std::string> nfunction_violation(const NFunction &nf) {
  if (!nf.value_fn || !nf.deriv_fn || !nf.second_fn)
    return "missing value/derivative callbacks";
  if (nf.value(0.0) != 0.0)
    return "value(0) != 0";
  const double top = std::min(30.0, nf.overflow_limit / 2.0);
  const int n = 64;
  double prev_deriv = nf.deriv(0.0);
  for (int i = 1; i <= n; ++i) {
    const double t = top * i / n;
    const double v = nf.value(t);
    const double d = nf.deriv(t);
    const double a = nf.value(t - 0.5 * top / n);
    const double b = nf.value(t + 0.5 * top / n);
    const double scale = 1.0 + std::abs(v);
    if (v < -1e-14 * scale)
      return "negative value at t=" + detail::format_number(t);
    if (2.0 * v > a + b + 1e-12 * scale)
      return "midpoint convexity fails at t=" + detail::format_number(t);
    if (d < prev_deriv - 1e-12 * (1.0 + std::abs(d)))
      return "derivative decreases at t=" + detail::format_number(t);
    if (d * t < v - 1e-12 * scale)
      return "deriv(t) t < value(t) at t=" + detail::format_number(t);
    prev_deriv = d;
  }
  const double far = std::min(1e6, nf.overflow_limit);
  const double r_small = nf.value(1e-6) / 1e-6;
  const double r_one = nf.value(1.0);
  const double r_far = nf.value(far) / far;
  if (!(r_small < r_one))
    return "value(t)/t does not decay towards t=0";
  if (!(r_far > r_one))
    return "value(t)/t does not grow towards large t";
  return std::nullopt;
}

enum class Verdict { yes, no, inconclusive };

inline const char *to_string(Verdict v) {
  switch (v) {
  case Verdict::yes:
    return "yes";
  case Verdict::no:
    return "no";
  default:
    return "inconclusive";
  }
}

struct Delta2Report {
  Verdict satisfied = Verdict::inconclusive;
  double witness_c = 0.0;
  double witness_K = 0.0;
  double max_ratio_seen = 0.0;
};

/// Samples Phi(2t)/Phi(t) on a geometric grid over [threshold, t_max].
///
/// This is a finite-grid heuristic: "yes" means the ratio stayed below
/// ratio_bound everywhere on the grid, "no" means it exceeded the bound and
/// was still growing at the end of the grid. Neither is a proof. The grid is
/// truncated where evaluation would overflow. threshold = 0 probes from 1e-6
/// (the global variant of the condition).
inline Delta2Report delta2_probe(const NFunction &nf, double t_max, double ratio_bound,
                                 double threshold = 1.0, int samples = 400) {
  Delta2Report report;
  report.witness_K = threshold;
  if (!(t_max > 1.0) || !(ratio_bound > 2.0) || samples < 2)
    return report;
  const double start = threshold > 0.0 ? threshold : 1e-6;
  if (!(start < t_max))
    return report;

  std::vector<double> ratios;
  ratios.reserve(samples);
  const double step = std::log(t_max / start) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const double t = start * std::exp(step * i);
    if (!nf.in_range(2.0 * t))
      break;
    const double base = nf.value(t);
    if (!(base > 0.0))
      continue;
    const double r = nf.value(2.0 * t) / base;
    if (!std::isfinite(r))
      break;
    ratios.push_back(r);
  }
  if (ratios.size() < 8)
    return report;

  report.max_ratio_seen = *std::max_element(ratios.begin(), ratios.end());
  if (report.max_ratio_seen <= ratio_bound) {
    report.satisfied = Verdict::yes;
    report.witness_c = report.max_ratio_seen;
    return report;
  }
  const std::size_t tail = 5;
  bool growing = true;
  for (std::size_t i = ratios.size() - tail; i < ratios.size(); ++i)
    growing = growing && ratios[i] > ratios[i - 1];
  report.satisfied = growing ? Verdict::no : Verdict::inconclusive;
  return report;
}

struct GrowthReport {
  bool satisfied = false;
  /// Largest K with 2 K Phi(t) <= Phi(2t) on every probe t >= 1.
  double witness_K = 0.0;
  /// The inequality with witness_K is tight on the whole grid (pure powers).
  bool equality = false;
};

/// Looks for K > 1 with 2 K Phi(t) <= Phi(2t) for all probed t in [1, t_max].
/// When found, the conjugate of Phi satisfies the Delta_2 condition.
inline GrowthReport superquadratic_growth_check(const NFunction &nf, double t_max, int samples = 400) {
  GrowthReport report;
  if (!(t_max > 1.0) || samples < 2)
    return report;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  const double step = std::log(t_max) / (samples - 1);
  int used = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = std::exp(step * i);
    if (!nf.in_range(2.0 * t))
      break;
    const double r = nf.value(2.0 * t) / nf.value(t);
    if (!std::isfinite(r))
      break;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    ++used;
  }
  if (used == 0)
    return report;
  report.witness_K = 0.5 * lo;
  report.satisfied = report.witness_K > 1.0;
  report.equality = hi - lo <= 1e-12 * lo;
  return report;
}

/// One quadrature sample of a field: |value| enters the modular.
struct WeightedSample {
  double value = 0.0;
  double weight = 0.0;
};

/// inf{ lambda > 0 : sum_i w_i Phi(|v_i| / lambda) <= 1 } by bisection.
inline double luxemburg_norm(const NFunction &nf, std::span<const WeightedSample> samples,
                             double measure_total) {
  double weight_sum = 0.0;
  double vmax = 0.0;
  for (const auto &s : samples) {
    if (!std::isfinite(s.value) || !std::isfinite(s.weight))
      throw Error("luxemburg_norm: non-finite sample");
    if (!(s.weight > 0.0))
      throw Error("luxemburg_norm: weights must be positive");
    weight_sum += s.weight;
    vmax = std::max(vmax, std::abs(s.value));
  }
  if (std::abs(weight_sum - measure_total) > 1e-12 * std::abs(measure_total))
    throw Error("luxemburg_norm: weights do not sum to the total measure");
  if (vmax == 0.0)
    return 0.0;

  const auto modular = [&](double lambda) {
    double sum = 0.0;
    for (const auto &s : samples) {
      const double arg = std::abs(s.value) / lambda;
      if (!nf.in_range(arg))
        return std::numeric_limits<double>::infinity();
      sum += s.weight * nf.value(arg);
    }
    return sum;
  };

  double hi = vmax;
  while (modular(hi) > 1.0)
    hi *= 2.0;
  double lo = hi;
  while (modular(lo) <= 1.0)
    lo *= 0.5;

  const double tol = std::max(kBisectionTol, 4.0 * std::numeric_limits<double>::epsilon() * hi);
  for (int it = 0; it < kBisectionMaxIter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (modular(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

} // namespace oifem
