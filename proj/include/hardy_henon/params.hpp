#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hh {

enum class ParamErrorKind {
  NotFinite,
  DimensionNotInteger,
  DimensionBelowTwo,
  SigmaOutOfRange,
  ExponentNotAboveOne,
};

/// Raised by validate_params; kind() tells which invariant failed.
class ParamError : public std::invalid_argument {
 public:
  ParamError(ParamErrorKind kind, const std::string& what)
      : std::invalid_argument(what), kind_(kind) {}
  ParamErrorKind kind() const noexcept { return kind_; }

 private:
  ParamErrorKind kind_;
};

/// A violated precondition of a numerical operation (names the inequality).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ProblemParams {
  int n = 3;
  double sigma = 0.5;
  double alpha = 0.0;
  double p = 2.0;
};

inline ProblemParams validate_params(double n, double sigma, double alpha, double p) {
  if (!std::isfinite(n) || !std::isfinite(sigma) || !std::isfinite(alpha) || !std::isfinite(p))
    throw ParamError(ParamErrorKind::NotFinite, "non-finite parameter");
  if (n != std::floor(n))
    throw ParamError(ParamErrorKind::DimensionNotInteger, "dimension must be an integer");
  if (n < 2) throw ParamError(ParamErrorKind::DimensionBelowTwo, "dimension below 2");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw ParamError(ParamErrorKind::SigmaOutOfRange, "sigma out of range");
  if (!(p > 1.0)) throw ParamError(ParamErrorKind::ExponentNotAboveOne, "p must exceed 1");
  if (n > 1.0e6) throw ParamError(ParamErrorKind::NotFinite, "dimension too large");
  return ProblemParams{static_cast<int>(n), sigma, alpha, p};
}

inline ProblemParams validate_params(const ProblemParams& q) {
  return validate_params(q.n, q.sigma, q.alpha, q.p);
}

struct DerivedExponents {
  double beta;
  double serrin;
  double sobolev_crit;
  double hardy_sobolev_crit;
  double thm11_upper;
  double J1;
  double J2;
  double vartheta;
  double tau;
};

inline DerivedExponents derive_exponents(const ProblemParams& q) {
  const double n = q.n, s = q.sigma, a = q.alpha, p = q.p;
  const double d = n - 2.0 * s;
  DerivedExponents e{};
  e.beta = (2.0 * s + a) / (p - 1.0);
  e.serrin = (n + a) / d;
  e.sobolev_crit = (n + 2.0 * s) / d;
  e.hardy_sobolev_crit = (n + 2.0 * s + 2.0 * a) / d;
  e.thm11_upper = (n + 2.0 * s + a) / d;
  // (p_S - p)(n-2σ) written out so that J1 vanishes exactly at p = p_S when p is entered as p_S
  e.J1 = (n + 2.0 * s + 2.0 * a - p * d) / (p - 1.0);
  e.J2 = e.beta * (d - e.beta);
  e.vartheta = p * d - (n + 2.0 * s + a);
  e.tau = 0.5 * d - e.beta;
  return e;
}

/// Three-way comparison with a relative equality band.
inline int compare_threshold(double a, double b, double rel_tol = 1e-12) {
  const double band = rel_tol * std::max({1.0, std::fabs(a), std::fabs(b)});
  if (std::fabs(a - b) <= band) return 0;
  return a < b ? -1 : 1;
}

enum class RegimeLabel {
  NonexistenceAlphaBelowMinus2Sigma,
  ExteriorTriviality,
  Subcritical,
  HardySobolevCritical,
  Supercritical,
};

enum class TheoremTag { Thm1_1, Thm1_2, Thm1_3_1, Thm1_3_2, Thm1_4, Cor1_1, Cor2_1 };

inline const char* to_string(RegimeLabel l) {
  switch (l) {
    case RegimeLabel::NonexistenceAlphaBelowMinus2Sigma: return "NonexistenceAlphaBelowMinus2Sigma";
    case RegimeLabel::ExteriorTriviality: return "ExteriorTriviality";
    case RegimeLabel::Subcritical: return "Subcritical";
    case RegimeLabel::HardySobolevCritical: return "HardySobolevCritical";
    case RegimeLabel::Supercritical: return "Supercritical";
  }
  return "?";
}

inline const char* to_string(TheoremTag t) {
  switch (t) {
    case TheoremTag::Thm1_1: return "Thm1.1";
    case TheoremTag::Thm1_2: return "Thm1.2";
    case TheoremTag::Thm1_3_1: return "Thm1.3(1)";
    case TheoremTag::Thm1_3_2: return "Thm1.3(2)";
    case TheoremTag::Thm1_4: return "Thm1.4";
    case TheoremTag::Cor1_1: return "Cor1.1";
    case TheoremTag::Cor2_1: return "Cor2.1";
  }
  return "?";
}

struct RegimeVerdict {
  RegimeLabel label;
  std::set<TheoremTag> tags;
  double rate_fast;  ///< n - 2σ
  double rate_singular;  ///< β
  std::vector<std::string> thresholds_hit;
  std::vector<std::string> notes;

  bool has(TheoremTag t) const { return tags.count(t) != 0; }
};

inline RegimeVerdict classify_regime(const ProblemParams& q, double rel_tol = 1e-12) {
  const auto e = derive_exponents(q);
  const double n = q.n, s = q.sigma, a = q.alpha, p = q.p;
  const double d = n - 2.0 * s;

  RegimeVerdict v{};
  v.rate_fast = d;
  v.rate_singular = e.beta;

  const int c_alpha = compare_threshold(a, -2.0 * s, rel_tol);
  const int c_alpha0 = compare_threshold(a, 0.0, rel_tol);
  const int c_alpha2 = compare_threshold(a, 2.0 * s, rel_tol);
  const int c_serrin = compare_threshold(p, e.serrin, rel_tol);
  const int c_ps = compare_threshold(p, e.hardy_sobolev_crit, rel_tol);
  const int c_sob = compare_threshold(p, e.sobolev_crit, rel_tol);
  const int c_upper = compare_threshold(p, e.thm11_upper, rel_tol);
  const int c_laneemden = compare_threshold(p, n / d, rel_tol);

  if (c_alpha == 0) v.thresholds_hit.emplace_back("alpha=-2sigma");
  if (c_alpha0 == 0) v.thresholds_hit.emplace_back("alpha=0");
  if (c_alpha2 == 0) v.thresholds_hit.emplace_back("alpha=2sigma");
  if (c_serrin == 0) v.thresholds_hit.emplace_back("p=serrin");
  if (c_ps == 0) v.thresholds_hit.emplace_back("p=hardy_sobolev_crit");
  if (c_upper == 0) v.thresholds_hit.emplace_back("p=thm11_upper");
  if (c_sob == 0) v.thresholds_hit.emplace_back("p=sobolev_crit");
  if (c_laneemden == 0 && c_serrin != 0) v.thresholds_hit.emplace_back("p=n/(n-2sigma)");

  if (c_alpha < 0) {
    v.label = RegimeLabel::NonexistenceAlphaBelowMinus2Sigma;
  } else if (c_alpha > 0 && c_serrin < 0) {
    v.label = RegimeLabel::ExteriorTriviality;
  } else if (c_ps < 0) {
    v.label = RegimeLabel::Subcritical;
  } else if (c_ps == 0) {
    v.label = RegimeLabel::HardySobolevCritical;
  } else {
    v.label = RegimeLabel::Supercritical;
  }

  const bool below_sob = c_sob < 0;
  if (below_sob) {
    if (c_alpha < 0) v.tags.insert(TheoremTag::Cor2_1);
    if (c_alpha > 0 && c_alpha0 <= 0 && c_serrin > 0 && c_upper <= 0 && c_ps != 0) {
      v.tags.insert(TheoremTag::Thm1_1);
      v.tags.insert(TheoremTag::Thm1_4);
    }
    if (c_alpha > 0 && c_alpha2 < 0 && c_serrin > 0) v.tags.insert(TheoremTag::Thm1_2);
    if (c_alpha > 0 && c_serrin < 0) v.tags.insert(TheoremTag::Thm1_3_1);
    if (c_alpha > 0 && c_serrin > 0) v.tags.insert(TheoremTag::Thm1_3_2);
    if (c_alpha0 == 0 && c_laneemden > 0) v.tags.insert(TheoremTag::Cor1_1);
  } else {
    v.notes.emplace_back("p at or above (n+2sigma)/(n-2sigma): no theorem hypothesis holds");
  }
  if (c_alpha2 == 0) v.notes.emplace_back("alpha=2sigma: outside the covered range");
  if (c_alpha2 > 0 && c_alpha > 0) v.notes.emplace_back("alpha>2sigma: two-sided bounds not covered");
  return v;
}

}  // namespace hh
