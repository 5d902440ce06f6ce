#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "params.hpp"
#include "profile.hpp"
#include "specialfn.hpp"

namespace hh {

/// α ↦ ϑ = p(n−2σ) − (n+2σ+α) with the mapped parameters.
struct KelvinMap {
  ProblemParams source;
  double vartheta;
  ProblemParams mapped;
};

inline KelvinMap kelvin_exponent(const ProblemParams& q) {
  validate_params(q);
  const double vt = q.p * (q.n - 2 * q.sigma) - (q.n + 2 * q.sigma + q.alpha);
  ProblemParams m = q;
  m.alpha = vt;
  return {q, vt, m};
}

/// ρ^{−(n−2σ)} u(1/ρ).
inline double kelvin_point_transform(const RadialProfile& u, double rho, int n, double sigma) {
  if (!(rho > 0)) throw std::domain_error("kelvin_point_transform: rho must be positive");
  return std::pow(rho, -(n - 2 * sigma)) * u(1.0 / rho);
}

/// Kelvin transform as a profile: c r^{−a} ↦ c r^{−(n−2σ−a)} termwise, otherwise wrapped pointwise.
inline RadialProfile kelvin_transform_profile(const RadialProfile& u, int n, double sigma) {
  const double d = n - 2 * sigma;
  if (u.is_power_sum()) {
    std::vector<PowerTerm> t;
    for (const auto& term : u.terms()) t.push_back({term.coeff, d - term.exponent});
    return RadialProfile::power_sum(std::move(t));
  }
  return RadialProfile::generic([u, n, sigma](double r) { return kelvin_point_transform(u, r, n, sigma); },
                                d - u.outer_exponent(), d - u.inner_exponent(), u.smooth());
}

struct Equivalence {
  std::string predicate;  ///< "left <=> right"
  bool left;
  bool right;
  bool agrees() const { return left == right; }
};

/// The biconditionals relating conditions on ϑ to conditions on α. Comparisons use
/// compare_threshold, so threshold equalities are detected on both sides with the same tolerance.
inline std::vector<Equivalence> verify_equivalences(const ProblemParams& q, double rel_tol = 1e-12) {
  const auto km = kelvin_exponent(q);
  const double vt = km.vartheta, n = q.n, s = q.sigma, a = q.alpha, p = q.p, d = n - 2 * s;
  auto lt = [&](double x, double y) { return compare_threshold(x, y, rel_tol) < 0; };
  auto le = [&](double x, double y) { return compare_threshold(x, y, rel_tol) <= 0; };
  auto ne = [&](double x, double y) { return compare_threshold(x, y, rel_tol) != 0; };
  std::vector<Equivalence> out;
  out.push_back({"-2sigma < vartheta <=> (n+alpha)/(n-2sigma) < p", lt(-2 * s, vt), lt((n + a) / d, p)});
  out.push_back({"vartheta <= 0 <=> p <= (n+2sigma+alpha)/(n-2sigma)", le(vt, 0.0), le(p, (n + 2 * s + a) / d)});
  out.push_back({"(n+vartheta)/(n-2sigma) < p <=> -2sigma < alpha", lt((n + vt) / d, p), lt(-2 * s, a)});
  out.push_back({"p <= (n+2sigma+vartheta)/(n-2sigma) <=> alpha <= 0", le(p, (n + 2 * s + vt) / d), le(a, 0.0)});
  out.push_back({"p != (n+2sigma+2vartheta)/(n-2sigma) <=> p != (n+2sigma+2alpha)/(n-2sigma)",
                 ne(p, (n + 2 * s + 2 * vt) / d), ne(p, (n + 2 * s + 2 * a) / d)});
  out.push_back({"p > (n+vartheta)/(n-2sigma) <=> alpha > -2sigma", lt((n + vt) / d, p), lt(-2 * s, a)});
  out.push_back({"p < (n+2sigma+2vartheta)/(n-2sigma) <=> p > (n+2sigma+2alpha)/(n-2sigma)",
                 lt(p, (n + 2 * s + 2 * vt) / d), lt((n + 2 * s + 2 * a) / d, p)});
  return out;
}

/// |C_{p,σ,ϑ} − C_{p,σ,α}| / C_{p,σ,α}.
inline double constant_invariance(const ProblemParams& q) {
  const auto km = kelvin_exponent(q);
  try {
    require_singular_range(km.mapped);
  } catch (const PreconditionError& e) {
    throw PreconditionError(std::string("mapped exponent leaves the admissible range: ") + e.what());
  }
  const double c = singular_constant(q);
  const double ct = singular_constant(km.mapped);
  return std::fabs(ct - c) / c;
}

}  // namespace hh
