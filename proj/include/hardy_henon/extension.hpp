#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "params.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "specialfn.hpp"

namespace hh {

struct ExtensionConfig {
  int cell_order = 16;     ///< GL nodes per radial cell
  int angular_order = 16;  ///< GL nodes per polar-angle cell
  double inner_cut = 1e-8;  ///< relative radius below which the trace tail is integrated exactly
  double outer_cut = 1e8;   ///< relative radius above which the trace tail is integrated exactly
};

namespace detail {

/// ∫_0^π (d² + 4q sin²(θ/2))^{−A} sin^{n−2}θ dθ
inline double poisson_angular(double d2, double q, int n, double A, int order) {
  auto f = [&](double th) {
    const double sh = std::sin(0.5 * th);
    const double sn = n == 2 ? 1.0 : std::pow(std::sin(th), n - 2);
    return std::pow(d2 + 4.0 * q * sh * sh, -A) * sn;
  };
  const double first = q > 0 ? 0.5 * std::sqrt(d2 / q) : std::numbers::pi;
  using std::numbers::pi;
  double a = 0.0, w = std::min(pi, first), s = 0.0;
  while (a < pi) {
    const double b = std::min(pi, a + w);
    s += integrate_gl(f, a, b, order);
    a = b;
    w = b;
  }
  return s;
}

/// Breakpoints as offsets δ = ρ − c, refined geometrically around the peak at ρ = c.
inline std::vector<double> poisson_breakpoints(double c, double t, const ExtensionConfig& cfg) {
  const double R = std::hypot(c, t);
  const double rmin = R * cfg.inner_cut, rmax = R * cfg.outer_cut;
  std::vector<double> pts;
  if (c > 0) {
    pts.push_back(0.0);
    for (double w = 0.5 * t; w < 0.5 * c; w *= 2) {
      pts.push_back(w);
      pts.push_back(-w);
    }
    pts.push_back(0.5 * c);
    pts.push_back(-0.5 * c);
    for (double rho = 0.25 * c; rho > rmin; rho *= 0.5) pts.push_back(rho - c);
    pts.push_back(rmin - c);
    for (double rho = 3.0 * c; rho < rmax; rho *= 2) pts.push_back(rho - c);
    pts.push_back(rmax - c);
  } else {
    for (double rho = rmin; rho < rmax; rho *= 2) pts.push_back(rho);
    pts.push_back(rmax);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

/// ∫_0^∞ g(ρ) ρ^{n−1} A(ρ) dρ with g = u (direct) or g = u − u(c) (subtracted).
inline double poisson_radial(const RadialProfile& u, double c, double t, int n, double sigma,
                             const ExtensionConfig& cfg, bool subtract) {
  const double A = 0.5 * (n + 2 * sigma);
  const double R = std::hypot(c, t);
  const double rmin = R * cfg.inner_cut, rmax = R * cfg.outer_cut;
  const auto pts = poisson_breakpoints(c, t, cfg);
  const Rule& g = gauss_legendre(cfg.cell_order);
  const double uc = subtract ? u(c) : 0.0;
  const double t2 = t * t;
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k], b = pts[k + 1], m = 0.5 * (a + b), h = 0.5 * (b - a);
    double cell = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double delta = m + h * g.nodes[i];
      const double rho = c + delta;
      const double val = subtract ? -u.deficit(c, std::log1p(delta / c)) : u(rho);
      if (val == 0.0) continue;
      const double ang = poisson_angular(delta * delta + t2, c * rho, n, A, cfg.angular_order);
      cell += g.weights[i] * val * std::pow(rho, n - 1) * ang;
    }
    s += h * cell;
  }
  // tails: A(ρ) → R^{−2A}·∫sin^{n−2} near 0 and ρ^{−2A}·∫sin^{n−2} at ∞, with O(ρ²) corrections
  const double ang0 = sphere_area(n) / sphere_area(n - 1);
  double in = 0.0;
  for (const auto& tm : u.inner_tail(rmin)) in += tm.coeff * std::pow(rmin, n - tm.exponent) / (n - tm.exponent);
  if (subtract) in -= uc * std::pow(rmin, n) / n;
  double out = 0.0;
  for (const auto& tm : u.outer_tail(rmax))
    out += tm.coeff * std::pow(rmax, -tm.exponent - 2 * sigma) / (tm.exponent + 2 * sigma);
  if (subtract) out -= uc * std::pow(rmax, -2 * sigma) / (2 * sigma);
  s += ang0 * (in * std::pow(R, -2 * A) + out);
  return s;
}

}  // namespace detail

/// U(x,t) − u(|x|) for the Poisson extension of a radial trace, at |x| = x > 0.
inline double poisson_deviation(const RadialProfile& u, double x, double t, int n, double sigma,
                                const ExtensionConfig& cfg = {}) {
  if (!(x > 0 && t > 0)) throw std::domain_error("poisson_deviation: need |x| > 0 and t > 0");
  if (!check_Lsigma_membership(u, n, sigma)) throw PreconditionError("trace is not in L_sigma");
  const double pref = poisson_normalizer(n, sigma) * std::pow(t, 2 * sigma) * sphere_area(n - 1);
  return pref * detail::poisson_radial(u, x, t, n, sigma, cfg, true);
}

/// U(x,t) at |x| = x ≥ 0, t > 0.
inline double poisson_extend_xt(const RadialProfile& u, double x, double t, int n, double sigma,
                                const ExtensionConfig& cfg = {}) {
  if (!(t > 0)) throw std::domain_error("poisson_extend: t must be positive (use the trace at t = 0)");
  if (!(x >= 0)) throw std::domain_error("poisson_extend: |x| must be nonnegative");
  if (!check_Lsigma_membership(u, n, sigma)) throw PreconditionError("trace is not in L_sigma");
  if (x > 0 && t <= x) return u(x) + poisson_deviation(u, x, t, n, sigma, cfg);
  const double pref = poisson_normalizer(n, sigma) * std::pow(t, 2 * sigma) * sphere_area(n - 1);
  return pref * detail::poisson_radial(u, x, t, n, sigma, cfg, false);
}

/// U at the point of radius R and elevation ψ ∈ (0, π/2] above the boundary.
inline double poisson_extend_radial(const RadialProfile& u, double R, double psi, int n, double sigma,
                                    const ExtensionConfig& cfg = {}) {
  if (!(psi > 0)) throw std::domain_error("poisson_extend_radial: psi = 0 is the trace itself");
  if (!(psi <= 0.5 * std::numbers::pi + 1e-15))
    throw std::domain_error("poisson_extend_radial: psi must not exceed pi/2");
  const double x = psi >= 0.5 * std::numbers::pi ? 0.0 : R * std::cos(psi);
  return poisson_extend_xt(u, x, R * std::sin(psi), n, sigma, cfg);
}

/// ∫_{R^n} P_σ(x − y, t) dy evaluated by the same radial quadrature (should be 1).
inline double poisson_kernel_mass(int n, double sigma, double x, double t, const ExtensionConfig& cfg = {}) {
  const auto one = RadialProfile::constant(1.0);
  const double pref = poisson_normalizer(n, sigma) * std::pow(t, 2 * sigma) * sphere_area(n - 1);
  return pref * detail::poisson_radial(one, x, t, n, sigma, cfg, false);
}

// ---------------------------------------------------------------------------------------------
// weighted Neumann flux

class ExtrapolationError : public std::runtime_error {
 public:
  ExtrapolationError(const std::string& what, std::vector<double> estimates)
      : std::runtime_error(what), estimates_(std::move(estimates)) {}
  const std::vector<double>& estimates() const noexcept { return estimates_; }

 private:
  std::vector<double> estimates_;
};

struct FluxConfig {
  double t0 = 0.05;  ///< first elevation, relative to |x|
  int levels = 9;    ///< t_k = t0·2^{−k}, k < levels
  int terms = 4;     ///< leading terms of the expansion kept in the fit
  double tolerance = 1e-6;  ///< allowed change in the limit when the last term is dropped
};

/// Exponents of (U − u)/t^{2σ} = a + b t^{2−2σ} + c t² + d t^{4−2σ} + e t⁴ + …, keeping the
/// first `terms` that are at least 0.3 apart (near-equal powers make the fit singular).
inline std::vector<double> flux_fit_exponents(double sigma, int terms) {
  const double ladder[] = {0.0, 2 - 2 * sigma, 2.0, 4 - 2 * sigma, 4.0, 6 - 2 * sigma, 6.0};
  std::vector<double> ex;
  for (double e : ladder) {
    if (static_cast<int>(ex.size()) >= terms) break;
    bool ok = true;
    for (double f : ex) ok = ok && std::fabs(e - f) >= 0.3;
    if (ok) ex.push_back(e);
  }
  return ex;
}

struct FluxResult {
  double flux;
  std::vector<double> t;
  std::vector<double> estimates;  ///< −2σ·(U − u)/t^{2σ} at each t_k
  double fit_residual;
  double fit_disagreement;
};

/// −lim t^{1−2σ}∂_tU from samples of U(x,t) − u(x) at t_k = t0·2^{−k}, fitting
/// (U − u)/t^{2σ} by Σ c_k t^{e_k}; the limit is −2σ c_0.
inline FluxResult extrapolate_flux(const std::function<double(double)>& deviation, double sigma,
                                   double t0, const FluxConfig& fc, std::vector<double> ex = {}) {
  if (ex.empty()) ex = flux_fit_exponents(sigma, fc.terms);
  FluxResult res{};
  std::vector<double> q;
  for (int k = 0; k < fc.levels; ++k) {
    const double t = t0 * std::ldexp(1.0, -k);
    const double Q = deviation(t) / std::pow(t, 2 * sigma);
    res.t.push_back(t);
    q.push_back(Q);
    res.estimates.push_back(-2 * sigma * Q);
  }
  if (static_cast<int>(ex.size()) > fc.levels) throw std::invalid_argument("extrapolate_flux: too few levels");
  const auto fit = fit_powers(res.t, q, ex);
  res.flux = -2 * sigma * fit.coeffs[0];
  res.fit_residual = fit.rms_residual;
  res.fit_disagreement = 0.0;
  if (ex.size() > 1) {
    const auto lower = fit_powers(res.t, q, {ex.begin(), ex.end() - 1});
    res.fit_disagreement = 2 * sigma * std::fabs(lower.coeffs[0] - fit.coeffs[0]);
  }
  double scale = 0.0;
  for (double v : res.estimates) scale = std::max(scale, std::fabs(v));
  if (!std::isfinite(res.flux) || res.fit_disagreement > fc.tolerance * std::max(scale, 1e-300))
    throw ExtrapolationError("weighted flux extrapolation did not converge", res.estimates);
  return res;
}

/// Coefficients b_k(r), k = 1..K, of the even part u + Σ b_k t^{2k} of the extension of a
/// power-sum trace: b_k = −Δb_{k−1} / (2k(2k − 2σ)).
inline std::vector<double> even_expansion(const RadialProfile& u, double r, int n, double sigma, int K) {
  std::vector<PowerTerm> terms = u.terms();
  std::vector<double> b;
  for (int k = 1; k <= K; ++k) {
    const double f = -1.0 / (2.0 * k * (2.0 * k - 2 * sigma));
    double v = 0.0;
    for (auto& t : terms) {
      t.coeff *= f * t.exponent * (t.exponent + 2 - n);
      t.exponent += 2;
      v += t.coeff * std::pow(r, -t.exponent);
    }
    b.push_back(v);
  }
  return b;
}

inline FluxResult neumann_flux(const RadialProfile& trace, double r, const ProblemParams& q,
                               const FluxConfig& fc = {}, const ExtensionConfig& cfg = {}) {
  if (!trace.is_power_sum()) {
    auto dev = [&](double t) { return poisson_deviation(trace, r, t, q.n, q.sigma, cfg); };
    return extrapolate_flux(dev, q.sigma, fc.t0 * r, fc);
  }
  // the even part is known in closed form; what remains is t^{2σ}(a + a₁t² + a₂t⁴ + …)
  const auto b = even_expansion(trace, r, q.n, q.sigma, 3);
  auto dev = [&](double t) {
    double e = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) e += b[k] * std::pow(t, 2.0 * (k + 1));
    return poisson_deviation(trace, r, t, q.n, q.sigma, cfg) - e;
  };
  std::vector<double> ex;
  for (int k = 0; k < std::max(1, fc.terms - 1); ++k) ex.push_back(2.0 * k);
  return extrapolate_flux(dev, q.sigma, fc.t0 * r, fc, ex);
}

// ---------------------------------------------------------------------------------------------
// fields

enum class FieldTag { PoissonEvaluated, CylinderSolved, ExactHomogeneous };

inline const char* to_string(FieldTag t) {
  switch (t) {
    case FieldTag::PoissonEvaluated: return "poisson_evaluated";
    case FieldTag::CylinderSolved: return "cylinder_solved";
    case FieldTag::ExactHomogeneous: return "exact_homogeneous";
  }
  return "?";
}

/// U sampled on (r_i, ψ_j), row-major in r.
struct ExtensionField {
  ProblemParams params;
  std::vector<double> r;
  std::vector<double> psi;
  std::vector<double> values;
  FieldTag tag = FieldTag::PoissonEvaluated;

  double& at(std::size_t i, std::size_t j) { return values[i * psi.size() + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * psi.size() + j]; }
};

/// V(s, ψ) = e^{βs} U(e^s, ψ), row-major in s.
struct FowlerField {
  ProblemParams params;
  std::vector<double> s;
  std::vector<double> psi;
  std::vector<double> values;

  double& at(std::size_t i, std::size_t j) { return values[i * psi.size() + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * psi.size() + j]; }
  std::vector<double> row(std::size_t i) const {
    return {values.begin() + i * psi.size(), values.begin() + (i + 1) * psi.size()};
  }
};

inline FowlerField fowler_map(const ExtensionField& f) {
  const double beta = derive_exponents(f.params).beta;
  FowlerField v{f.params, {}, f.psi, f.values};
  for (std::size_t i = 0; i < f.r.size(); ++i) {
    if (!(f.r[i] > 0)) throw std::domain_error("fowler_map: radii must be positive");
    v.s.push_back(std::log(f.r[i]));
    const double w = std::pow(f.r[i], beta);
    for (std::size_t j = 0; j < f.psi.size(); ++j) v.at(i, j) = w * f.at(i, j);
  }
  return v;
}

inline ExtensionField fowler_unmap(const FowlerField& v, FieldTag tag = FieldTag::CylinderSolved) {
  const double beta = derive_exponents(v.params).beta;
  ExtensionField f{v.params, {}, v.psi, v.values, tag};
  for (std::size_t i = 0; i < v.s.size(); ++i) {
    f.r.push_back(std::exp(v.s[i]));
    const double w = std::exp(-beta * v.s[i]);
    for (std::size_t j = 0; j < v.psi.size(); ++j) f.at(i, j) = w * v.at(i, j);
  }
  return f;
}

/// ψ_j = (π/2)(j/m)^γ, j = 0..m; γ > 1 clusters nodes at the boundary ψ = 0.
inline std::vector<double> graded_psi_grid(int intervals, double grading = 2.0) {
  if (intervals < 2) throw std::invalid_argument("graded_psi_grid: need at least 2 intervals");
  if (!(grading >= 1)) throw std::invalid_argument("graded_psi_grid: grading must be >= 1");
  std::vector<double> psi(intervals + 1);
  for (int j = 0; j <= intervals; ++j)
    psi[j] = 0.5 * std::numbers::pi * std::pow(static_cast<double>(j) / intervals, grading);
  psi.back() = 0.5 * std::numbers::pi;
  return psi;
}

inline std::vector<double> log_radius_grid(double r_min, double r_max, int intervals) {
  return geometric_points(r_min, r_max, intervals);
}

/// Samples the Poisson extension of a trace; the ψ = 0 column holds the trace itself.
inline ExtensionField poisson_extension_field(const RadialProfile& trace, const ProblemParams& q,
                                              const std::vector<double>& r, const std::vector<double>& psi,
                                              const ExtensionConfig& cfg = {}) {
  ExtensionField f{q, r, psi, std::vector<double>(r.size() * psi.size()), FieldTag::PoissonEvaluated};
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j)
      f.at(i, j) = psi[j] > 0 ? poisson_extend_radial(trace, r[i], psi[j], q.n, q.sigma, cfg) : trace(r[i]);
  return f;
}

inline RadialProfile exact_trace(const ProblemParams& q) {
  return RadialProfile::power(derive_exponents(q).beta, singular_constant(q));
}

/// Field r^{−β} φ(ψ) built from one sphere profile.
inline ExtensionField homogeneous_field(const ProblemParams& q, const std::vector<double>& r,
                                        const std::vector<double>& psi, const std::vector<double>& phi) {
  const double beta = derive_exponents(q).beta;
  ExtensionField f{q, r, psi, std::vector<double>(r.size() * psi.size()), FieldTag::ExactHomogeneous};
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j) f.at(i, j) = std::pow(r[i], -beta) * phi[j];
  return f;
}

// ---------------------------------------------------------------------------------------------
// homogeneous sphere profile

struct SphereProfile {
  std::vector<double> psi;
  std::vector<double> phi;
  double boundary_value;  ///< extrapolated from ψ > 0 samples
};

/// Fits φ ≈ a0 + a1 ψ^{2σ} + a2 ψ² on the nodes 0 < ψ ≤ psi_fit and returns a0.
inline double extrapolate_boundary_value(const std::vector<double>& psi, const std::vector<double>& phi,
                                         double sigma, double psi_fit = 0.1) {
  std::vector<double> t, y;
  for (std::size_t j = 1; j < psi.size(); ++j)
    if (psi[j] <= psi_fit || t.size() < 4) {
      t.push_back(psi[j]);
      y.push_back(phi[j]);
    }
  return fit_powers(t, y, {0.0, 2 * sigma, 2.0}).coeffs[0];
}

inline SphereProfile exact_sphere_profile(const ProblemParams& q, const std::vector<double>& psi,
                                          const ExtensionConfig& cfg = {}) {
  const auto u = exact_trace(q);
  SphereProfile sp{psi, std::vector<double>(psi.size()), 0.0};
  for (std::size_t j = 0; j < psi.size(); ++j)
    sp.phi[j] = psi[j] > 0 ? poisson_extend_radial(u, 1.0, psi[j], q.n, q.sigma, cfg) : u(1.0);
  sp.boundary_value = extrapolate_boundary_value(psi, sp.phi, q.sigma);
  return sp;
}

struct SphereResiduals {
  double interior;  ///< max |−(1/μ)(μφ')' + J₂φ| over nodes with psi_lo ≤ ψ ≤ π/2 − psi_lo
  double boundary;  ///< |flux − κ_σ φ(0)^p| / (κ_σ φ(0)^p)
  double flux;
};

/// Residuals of the sphere equation (1/μ)(μφ')' = J₂φ, μ = sin^{1−2σ}ψ cos^{n−1}ψ, and of
/// −lim sin^{1−2σ}ψ ∂_ψφ = κ_σ φ^p.
inline SphereResiduals verify_sphere_ode(const SphereProfile& sp, const ProblemParams& q,
                                         double psi_lo = 0.25, double psi_fit = 0.1) {
  const auto e = derive_exponents(q);
  const auto& x = sp.psi;
  const auto& f = sp.phi;
  const std::size_t m = x.size() - 1;
  auto mu = [&](double s) { return std::pow(std::sin(s), 1 - 2 * q.sigma) * std::pow(std::cos(s), q.n - 1); };
  SphereResiduals res{0.0, 0.0, 0.0};
  for (std::size_t j = 1; j < m; ++j) {
    if (x[j] < psi_lo || x[j] > 0.5 * std::numbers::pi - psi_lo) continue;
    const double hm = x[j] - x[j - 1], hp = x[j + 1] - x[j];
    const double fl = mu(x[j] + 0.5 * hp) * (f[j + 1] - f[j]) / hp - mu(x[j] - 0.5 * hm) * (f[j] - f[j - 1]) / hm;
    const double L = fl / (mu(x[j]) * 0.5 * (hm + hp));
    res.interior = std::max(res.interior, std::fabs(-L + e.J2 * f[j]));
  }
  std::vector<double> t, y;
  for (std::size_t j = 1; j < x.size(); ++j)
    if (x[j] <= psi_fit || t.size() < 4) {
      t.push_back(x[j]);
      y.push_back((f[j] - f[0]) / std::pow(std::sin(x[j]), 2 * q.sigma));
    }
  const double a = fit_powers(t, y, flux_fit_exponents(q.sigma, 3)).coeffs[0];
  res.flux = -2 * q.sigma * a;
  const double target = kappa_sigma(q.sigma) * std::pow(f[0], q.p);
  res.boundary = std::fabs(res.flux - target) / target;
  return res;
}

// ---------------------------------------------------------------------------------------------
// barrier Ψ_μ(X) = |X|^{−μ}(1 − δ(t/|X|)^{2σ})

struct BarrierResiduals {
  double interior;
  double neumann;
};

inline double barrier_value(double mu, double delta, double sigma, double x, double t) {
  const double R = std::hypot(x, t);
  return std::pow(R, -mu) * (1 - delta * std::pow(t / R, 2 * sigma));
}

/// residual₁: centred differences of div(t^{1−2σ}∇Ψ) at X = (|x|, t) with step h against the
/// closed-form right side; residual₂: extrapolated weighted flux at |x| (t-sequence from h)
/// against 2σδ|x|^{−2σ}Ψ(x, 0).
inline BarrierResiduals verify_barrier_identity(double mu, double delta, double x, double t,
                                                const ProblemParams& q, double h) {
  const double s = q.sigma, n = q.n;
  if (!(mu > 0 && mu < n - 2 * s)) throw PreconditionError("barrier requires 0 < mu < n - 2 sigma");
  if (!(delta > 0 && delta < 0.5)) throw PreconditionError("barrier requires 0 < delta < 1/2");
  if (!(x > h && t > h && h > 0)) throw PreconditionError("barrier stencil must stay off the axes");
  auto P = [&](double a, double b) { return barrier_value(mu, delta, s, a, b); };
  const double c = P(x, t);
  const double urr = (P(x + h, t) - 2 * c + P(x - h, t)) / (h * h);
  const double ur = (P(x + h, t) - P(x - h, t)) / (2 * h);
  const double wp = std::pow(t + 0.5 * h, 1 - 2 * s), wm = std::pow(t - 0.5 * h, 1 - 2 * s);
  const double tt = (wp * (P(x, t + h) - c) - wm * (c - P(x, t - h))) / (h * h);
  const double div = std::pow(t, 1 - 2 * s) * (urr + (n - 1) / x * ur) + tt;
  const double R = std::hypot(x, t);
  const double rhs = std::pow(t, 1 - 2 * s) * std::pow(R, -(mu + 2)) *
                     (mu * (n - 2 * s - mu) - delta * (mu + 2 * s) * (n - mu) * std::pow(t / R, 2 * s));
  BarrierResiduals res{};
  res.interior = std::fabs(-div - rhs);

  // Ψ(x,τ) − Ψ(x,0), written to avoid cancellation in |X|^{−μ} − |x|^{−μ}
  auto dev = [&](double tau) {
    const double l = std::log1p((tau / x) * (tau / x));
    return std::pow(x, -mu) * std::expm1(-0.5 * mu * l) -
           delta * std::pow(tau, 2 * s) * std::pow(x, -mu - 2 * s) * std::exp(-0.5 * (mu + 2 * s) * l);
  };
  FluxConfig fc;
  fc.terms = 2;
  fc.tolerance = 1e300;
  const auto fl = extrapolate_flux(dev, s, h, fc);
  const double target = 2 * s * delta * std::pow(x, -2 * s) * std::pow(x, -mu);
  res.neumann = std::fabs(fl.flux - target);
  return res;
}

}  // namespace hh
