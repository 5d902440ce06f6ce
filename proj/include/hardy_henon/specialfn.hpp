#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "params.hpp"

namespace hh {

/// |Γ(x)| in log form plus its sign. Poles carry log_abs = +inf.
struct SignedLogValue {
  double log_abs = 0.0;
  int sign = 1;

  bool is_pole() const { return std::isinf(log_abs) && log_abs > 0; }
  double value() const {
    if (is_pole()) return std::numeric_limits<double>::infinity();
    return sign * std::exp(log_abs);
  }
};

namespace detail {

// Lanczos approximation, g = 7, nine terms.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_sum(double z) {  // z = x - 1
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + i);
  return a;
}

/// sin(πx) with exact argument reduction.
inline double sin_pi(double x) {
  const double k = std::nearbyint(x);
  const double f = x - k;  // exact, |f| <= 1/2
  const double s = std::sin(std::numbers::pi * f);
  return (std::fmod(k, 2.0) == 0.0) ? s : -s;
}

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

}  // namespace detail

inline SignedLogValue log_gamma_signed(double x) {
  using std::numbers::pi;
  if (std::isnan(x)) return {std::numeric_limits<double>::quiet_NaN(), 1};
  if (detail::is_nonpositive_integer(x)) return {std::numeric_limits<double>::infinity(), 1};
  if (x < 0.5) {
    const double s = detail::sin_pi(x);
    const SignedLogValue g = log_gamma_signed(1.0 - x);
    return {std::log(pi) - std::log(std::fabs(s)) - g.log_abs, s < 0 ? -g.sign : g.sign};
  }
  const double z = x - 1.0;
  const double t = z + detail::kLanczosG + 0.5;
  const double lg = 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t +
                    std::log(detail::lanczos_sum(z));
  return {lg, 1};
}

/// Γ(x) evaluated without passing through the logarithm (keeps full relative accuracy
/// near the overflow edge). Returns +inf at poles.
inline double gamma_fn(double x) {
  using std::numbers::pi;
  if (detail::is_nonpositive_integer(x)) return std::numeric_limits<double>::infinity();
  if (x < 0.5) return pi / (detail::sin_pi(x) * gamma_fn(1.0 - x));
  const double z = x - 1.0;
  const double t = z + detail::kLanczosG + 0.5;
  const double half = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * pi) * half * (half * std::exp(-t)) * detail::lanczos_sum(z);
}

enum class PoleStatus { Regular, InfiniteViaPole, ZeroViaPole, Indeterminate };

inline const char* to_string(PoleStatus s) {
  switch (s) {
    case PoleStatus::Regular: return "regular";
    case PoleStatus::InfiniteViaPole: return "infinite_via_pole";
    case PoleStatus::ZeroViaPole: return "zero_via_pole";
    case PoleStatus::Indeterminate: return "indeterminate";
  }
  return "?";
}

struct LambdaValue {
  double value;
  double log_abs;
  int sign;
  PoleStatus status;
};

/// Λ(τ) = 2^{2σ} Γ((n+2σ+2τ)/4) Γ((n+2σ−2τ)/4) / (Γ((n−2σ−2τ)/4) Γ((n−2σ+2τ)/4)).
inline LambdaValue lambda_multiplier(double tau, int n, double sigma) {
  const double nn = n;
  const auto a1 = log_gamma_signed((nn + 2 * sigma + 2 * tau) / 4);
  const auto a2 = log_gamma_signed((nn + 2 * sigma - 2 * tau) / 4);
  const auto b1 = log_gamma_signed((nn - 2 * sigma - 2 * tau) / 4);
  const auto b2 = log_gamma_signed((nn - 2 * sigma + 2 * tau) / 4);
  const bool top = a1.is_pole() || a2.is_pole();
  const bool bottom = b1.is_pole() || b2.is_pole();
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (top && bottom)
    return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 1,
            PoleStatus::Indeterminate};
  if (top) return {inf, inf, 1, PoleStatus::InfiniteViaPole};
  if (bottom) return {0.0, -inf, 1, PoleStatus::ZeroViaPole};
  const double la = 2 * sigma * std::log(2.0) + a1.log_abs + a2.log_abs - b1.log_abs - b2.log_abs;
  const int sg = a1.sign * a2.sign * b1.sign * b2.sign;
  return {sg * std::exp(la), la, sg, PoleStatus::Regular};
}

inline void require_singular_range(const ProblemParams& q) {
  const auto e = derive_exponents(q);
  if (!(q.alpha > -2 * q.sigma))
    throw PreconditionError("singular constant requires alpha > -2 sigma");
  if (!(q.p > e.serrin)) throw PreconditionError("singular constant requires p > (n+alpha)/(n-2 sigma)");
}

/// C_{p,σ,α} = Λ((n−2σ)/2 − β)^{1/(p−1)}.
inline double singular_constant(const ProblemParams& q) {
  require_singular_range(q);
  const auto e = derive_exponents(q);
  const auto lam = lambda_multiplier(e.tau, q.n, q.sigma);
  if (lam.status != PoleStatus::Regular || lam.sign < 0)
    throw PreconditionError("multiplier not positive at tau = (n-2 sigma)/2 - beta");
  return std::exp(lam.log_abs / (q.p - 1.0));
}

inline double kappa_sigma(double sigma) {
  if (!(sigma > 0 && sigma < 1)) throw PreconditionError("kappa_sigma requires 0 < sigma < 1");
  const double l = log_gamma_signed(1.0 - sigma).log_abs - log_gamma_signed(sigma).log_abs -
                   (2 * sigma - 1) * std::log(2.0);
  return std::exp(l);
}

/// p_{n,σ} = Γ((n+2σ)/2) / (π^{n/2} Γ(σ)).
inline double poisson_normalizer(int n, double sigma) {
  const double l = log_gamma_signed((n + 2 * sigma) / 2).log_abs -
                   0.5 * n * std::log(std::numbers::pi) - log_gamma_signed(sigma).log_abs;
  return std::exp(l);
}

/// c_{n,σ} = 2^{2σ} σ Γ((n+2σ)/2) / (π^{n/2} Γ(1−σ)).
inline double hypersingular_normalizer(int n, double sigma) {
  const double l = 2 * sigma * std::log(2.0) + std::log(sigma) +
                   log_gamma_signed((n + 2 * sigma) / 2).log_abs -
                   0.5 * n * std::log(std::numbers::pi) - log_gamma_signed(1 - sigma).log_abs;
  return std::exp(l);
}

/// Surface area of the unit sphere S^{d-1} in R^d.
inline double sphere_area(int d) {
  if (d < 1) throw PreconditionError("sphere_area requires d >= 1");
  return 2.0 * std::exp(0.5 * d * std::log(std::numbers::pi) - log_gamma_signed(0.5 * d).log_abs);
}

/// The σ = 1 Lane–Emden/Hénon singular constant C0.
inline double classical_limit_constant(int n, double alpha, double p) {
  if (n < 3) throw PreconditionError("classical constant requires n >= 3");
  if (!(alpha > -2 && alpha < 2)) throw PreconditionError("classical constant requires -2 < alpha < 2");
  const double lo = (n + alpha) / (n - 2.0), hi = (n + 2.0) / (n - 2.0);
  if (!(p > lo)) throw PreconditionError("classical constant requires p > (n+alpha)/(n-2)");
  if (!(p < hi)) throw PreconditionError("classical constant requires p < (n+2)/(n-2)");
  const double base = (2 + alpha) * (n - 2.0) / ((p - 1) * (p - 1)) * (p - lo);
  return std::pow(base, 1.0 / (p - 1));
}

}  // namespace hh
