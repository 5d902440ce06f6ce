#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hh {

/// coeff · r^{-exponent}
struct PowerTerm {
  double coeff;
  double exponent;
};

/// A radial function u(|x|) with asserted power-law behaviour at 0 and ∞.
///
/// Finite sums of powers are represented exactly, so their tails and the
/// differences u(r) − u(ρ) are evaluated without cancellation.
class RadialProfile {
 public:
  static RadialProfile power(double exponent, double coeff = 1.0) {
    return power_sum({{coeff, exponent}});
  }
  static RadialProfile constant(double c) { return power_sum({{c, 0.0}}); }

  static RadialProfile power_sum(std::vector<PowerTerm> terms) {
    RadialProfile u;
    for (const auto& t : terms) {
      if (!std::isfinite(t.coeff) || !std::isfinite(t.exponent))
        throw std::invalid_argument("RadialProfile: non-finite power term");
      if (t.coeff < 0) throw std::invalid_argument("RadialProfile: negative coefficient");
      if (t.coeff != 0) u.terms_.push_back(t);
    }
    u.inner_ = 0.0;
    u.outer_ = 0.0;
    if (!u.terms_.empty()) {
      u.inner_ = -std::numeric_limits<double>::infinity();
      u.outer_ = std::numeric_limits<double>::infinity();
      for (const auto& t : u.terms_) {
        u.inner_ = std::max(u.inner_, t.exponent);
        u.outer_ = std::min(u.outer_, t.exponent);
      }
    }
    return u;
  }

  /// Arbitrary evaluator; the asserted exponents drive the analytic tails.
  static RadialProfile generic(std::function<double(double)> f, double inner_exponent,
                               double outer_exponent, bool smooth = true) {
    RadialProfile u;
    u.fn_ = std::move(f);
    u.inner_ = inner_exponent;
    u.outer_ = outer_exponent;
    u.smooth_ = smooth;
    return u;
  }

  bool is_power_sum() const { return !fn_; }
  const std::vector<PowerTerm>& terms() const { return terms_; }
  double inner_exponent() const { return inner_; }
  double outer_exponent() const { return outer_; }
  bool smooth() const { return smooth_; }

  double operator()(double r) const {
    if (!(r > 0)) throw std::domain_error("RadialProfile: radius must be positive");
    if (fn_) {
      const double v = fn_(r);
      if (!std::isfinite(v) || v < 0) throw std::domain_error("RadialProfile: invalid value");
      return v;
    }
    double s = 0.0;
    for (const auto& t : terms_) s += t.exponent == 0 ? t.coeff : t.coeff * std::pow(r, -t.exponent);
    return s;
  }

  /// u(r) − u(r·e^{ell}).
  double deficit(double r, double ell) const {
    if (fn_) return fn_(r) - fn_(r * std::exp(ell));
    double s = 0.0;
    for (const auto& t : terms_) {
      if (t.exponent == 0) continue;
      s -= t.coeff * std::pow(r, -t.exponent) * std::expm1(-t.exponent * ell);
    }
    return s;
  }

  /// y^{n−1}(u(r) − u(ry)) + y^{2σ−1}(u(r) − u(r/y)) with y = e^{ell}, ell < 0.
  /// For power terms this is 4 c r^{−a} e^{mℓ} sinh((n−2σ−a)ℓ/2) sinh(aℓ/2), m = (n+2σ−2)/2,
  /// which stays accurate as y → 1.
  double paired_deficit(double r, double ell, int n, double sigma) const {
    if (fn_) {
      return std::exp((n - 1) * ell) * deficit(r, ell) +
             std::exp((2 * sigma - 1) * ell) * deficit(r, -ell);
    }
    const double m = 0.5 * (n + 2 * sigma - 2);
    double s = 0.0;
    for (const auto& t : terms_) {
      if (t.exponent == 0) continue;
      s += t.coeff * std::pow(r, -t.exponent) * std::sinh(0.5 * (n - 2 * sigma - t.exponent) * ell) *
           std::sinh(0.5 * t.exponent * ell);
    }
    return 4.0 * std::exp(m * ell) * s;
  }

  /// Power terms representing u on (0, rho_c]: exact for sums, one fitted term otherwise.
  std::vector<PowerTerm> inner_tail(double rho_c) const {
    if (!fn_) return terms_;
    return {{(*this)(rho_c) * std::pow(rho_c, inner_), inner_}};
  }
  /// Power terms representing u on [rho_c, ∞).
  std::vector<PowerTerm> outer_tail(double rho_c) const {
    if (!fn_) return terms_;
    return {{(*this)(rho_c) * std::pow(rho_c, outer_), outer_}};
  }

  RadialProfile scaled(double a) const {
    if (a < 0) throw std::invalid_argument("RadialProfile: negative scale");
    if (!fn_) {
      auto t = terms_;
      for (auto& x : t) x.coeff *= a;
      return power_sum(std::move(t));
    }
    auto f = fn_;
    return generic([f, a](double r) { return a * f(r); }, inner_, outer_, smooth_);
  }

  friend RadialProfile operator+(const RadialProfile& u, const RadialProfile& v) {
    if (!u.fn_ && !v.fn_) {
      auto t = u.terms_;
      t.insert(t.end(), v.terms_.begin(), v.terms_.end());
      return power_sum(std::move(t));
    }
    return generic([u, v](double r) { return u(r) + v(r); }, std::max(u.inner_, v.inner_),
                   std::min(u.outer_, v.outer_), u.smooth_ && v.smooth_);
  }

 private:
  std::vector<PowerTerm> terms_;
  std::function<double(double)> fn_;
  double inner_ = 0.0;
  double outer_ = 0.0;
  bool smooth_ = true;
};

/// ∫|u|(1+|x|)^{−n−2σ} < ∞, decided from the asserted exponents.
inline bool check_Lsigma_membership(const RadialProfile& u, int n, double sigma) {
  return u.inner_exponent() < n && u.outer_exponent() > -2.0 * sigma;
}

}  // namespace hh
