#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cylinder.hpp"
#include "extension.hpp"
#include "params.hpp"
#include "specialfn.hpp"

namespace hh {

namespace detail {

inline double uniform_step(const std::vector<double>& s) {
  if (s.size() < 3) throw std::invalid_argument("energy: need at least 3 s-nodes");
  const double h = (s.back() - s.front()) / (s.size() - 1);
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (std::fabs(s[i + 1] - s[i] - h) > 1e-9 * h) throw std::invalid_argument("energy: s-grid must be uniform");
  return h;
}

inline void check_shapes(const FowlerField& V, const AngularFem& fem) {
  if (V.psi.size() != fem.size()) throw std::invalid_argument("energy: field and angular grid disagree");
  if (V.values.size() != V.s.size() * V.psi.size()) throw std::invalid_argument("energy: field has wrong size");
}

inline std::size_t node_index(const std::vector<double>& grid, double x, const char* what) {
  const double tol = 1e-10 * std::max(1.0, std::fabs(x));
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::fabs(grid[i] - x) <= tol) return i;
  throw std::out_of_range(std::string("energy: ") + what + " is not a grid node");
}

}  // namespace detail

/// Ẽ at node i with V_s by centred differences:
/// |S^{n−1}|[½V_sᵀMV_s − ½Vᵀ(A + J₂M)V + κ_σ/(p+1)·V(s,0)^{p+1}].
inline double energy_cylinder(const FowlerField& V, const AngularFem& fem, std::size_t i) {
  detail::check_shapes(V, fem);
  if (i == 0 || i + 1 >= V.s.size()) throw std::out_of_range("energy_cylinder: s at the grid edge");
  const auto& q = V.params;
  const auto e = derive_exponents(q);
  const std::size_t m = fem.size();
  const double hm = V.s[i] - V.s[i - 1], hp = V.s[i + 1] - V.s[i];
  std::vector<double> vs(m), v = V.row(i);
  for (std::size_t j = 0; j < m; ++j) {
    // three-point derivative, exact for quadratics on nonuniform spacing
    vs[j] = (-hp / (hm * (hm + hp))) * V.at(i - 1, j) + ((hp - hm) / (hm * hp)) * V.at(i, j) +
            (hm / (hp * (hm + hp))) * V.at(i + 1, j);
  }
  const double b = std::pow(std::max(v[0], 0.0), q.p + 1);
  return sphere_area(q.n) * (0.5 * fem.mass_form(vs.data(), vs.data()) - 0.5 * fem.K_form(v.data(), v.data(), e.J2) +
                             kappa_sigma(q.sigma) / (q.p + 1) * b);
}

inline double energy_cylinder(const FowlerField& V, const AngularFem& fem, double s) {
  return energy_cylinder(V, fem, detail::node_index(V.s, s, "s"));
}

inline double energy_cylinder(const FowlerField& V, double s) {
  return energy_cylinder(V, build_angular_fem(V.params.n, V.params.sigma, V.psi), s);
}

/// Half-step energy between nodes i and i+1, conserved by the cylinder scheme up to the J₁ term:
/// |S^{n−1}|[½DᵀMD − ½V_iᵀ(A + J₂M)V_{i+1} + κ_σ/(p+1)·½(V_{i,0}^{p+1} + V_{i+1,0}^{p+1})].
inline double energy_cylinder_half(const FowlerField& V, const AngularFem& fem, std::size_t i) {
  detail::check_shapes(V, fem);
  if (i + 1 >= V.s.size()) throw std::out_of_range("energy_cylinder_half: index out of range");
  const auto& q = V.params;
  const auto e = derive_exponents(q);
  const std::size_t m = fem.size();
  const double h = V.s[i + 1] - V.s[i];
  std::vector<double> d(m), a = V.row(i), b = V.row(i + 1);
  for (std::size_t j = 0; j < m; ++j) d[j] = (b[j] - a[j]) / h;
  const double g = 0.5 * (std::pow(std::max(a[0], 0.0), q.p + 1) + std::pow(std::max(b[0], 0.0), q.p + 1));
  return sphere_area(q.n) * (0.5 * fem.mass_form(d.data(), d.data()) - 0.5 * fem.K_form(a.data(), b.data(), e.J2) +
                             kappa_sigma(q.sigma) / (q.p + 1) * g);
}

/// E(r;U) as the five-term surface integral over the half-sphere of radius r = field.r[i]:
///   r^{e₁}[r I(U_r²) + β I(U U_r)] + β(β − (n−2σ)/2) r^{e₁−1} I(U²) − ½ r^{e₁+1} I(|∇U|²)
///   + κ_σ/(p+1) r^{e₂} |S^{n−1}| r^{n−1} u(r)^{p+1},
/// I(F) = r^{n+1−2σ}|S^{n−1}|∫ sin^{1−2σ}ψ cos^{n−1}ψ F dψ, e₁ = (2σ(p+1)+2α)/(p−1) − n,
/// e₂ = (2σ+α)(p+1)/(p−1) − n + 1. U_r uses centred differences in ln r.
inline double energy_halfsphere(const ExtensionField& U, const AngularFem& fem, std::size_t i) {
  if (U.psi.size() != fem.size()) throw std::invalid_argument("energy_halfsphere: field and angular grid disagree");
  if (i == 0 || i + 1 >= U.r.size()) throw std::out_of_range("energy_halfsphere: r outside the grid interior");
  const auto& q = U.params;
  const auto e = derive_exponents(q);
  const double beta = e.beta, n = q.n, sg = q.sigma;
  const double e1 = (2 * sg * (q.p + 1) + 2 * q.alpha) / (q.p - 1) - n;
  const double e2 = (2 * sg + q.alpha) * (q.p + 1) / (q.p - 1) - n + 1;
  const double r = U.r[i];
  const double lm = std::log(U.r[i - 1]), l0 = std::log(r), lp = std::log(U.r[i + 1]);
  const double hm = l0 - lm, hp = lp - l0;
  const std::size_t m = fem.size();
  std::vector<double> u(m), ur(m);
  for (std::size_t j = 0; j < m; ++j) {
    u[j] = U.at(i, j);
    const double ds = (-hp / (hm * (hm + hp))) * U.at(i - 1, j) + ((hp - hm) / (hm * hp)) * U.at(i, j) +
                      (hm / (hp * (hm + hp))) * U.at(i + 1, j);
    ur[j] = ds / r;
  }
  const double area = sphere_area(q.n);
  const double Iw = std::pow(r, n + 1 - 2 * sg) * area;
  const double I_ur2 = Iw * fem.mass_form(ur.data(), ur.data());
  const double I_uur = Iw * fem.mass_form(u.data(), ur.data());
  const double I_u2 = Iw * fem.mass_form(u.data(), u.data());
  const double I_grad = I_ur2 + Iw * fem.stiff_form(u.data(), u.data()) / (r * r);
  const double trace = std::pow(std::max(u[0], 0.0), q.p + 1);
  return std::pow(r, e1) * (r * I_ur2 + beta * I_uur) + beta * (beta - 0.5 * (n - 2 * sg)) * std::pow(r, e1 - 1) * I_u2 -
         0.5 * std::pow(r, e1 + 1) * I_grad +
         kappa_sigma(sg) / (q.p + 1) * std::pow(r, e2) * area * std::pow(r, n - 1) * trace;
}

inline double energy_halfsphere(const ExtensionField& U, const AngularFem& fem, double r) {
  if (!(r > 0)) throw std::out_of_range("energy_halfsphere: r outside the grid");
  return energy_halfsphere(U, fem, detail::node_index(U.r, r, "r"));
}

inline double energy_halfsphere(const ExtensionField& U, double r) {
  return energy_halfsphere(U, build_angular_fem(U.params.n, U.params.sigma, U.psi), r);
}

enum class EnergyScheme { Nodal, Conservative };

inline const char* to_string(EnergyScheme s) { return s == EnergyScheme::Nodal ? "nodal" : "conservative"; }

struct EnergyTrace {
  std::vector<double> s;
  std::vector<double> E;
  std::vector<double> dE_formula;  ///< J₁|S^{n−1}|∫μ V_s²
  std::vector<double> dE_fd;
  double J1 = 0.0;
  EnergyScheme scheme = EnergyScheme::Nodal;

  std::size_t size() const { return s.size(); }
  double scale() const {
    double m = 0.0;
    for (double x : E) m = std::max(m, std::fabs(x));
    return m;
  }
};

/// Nodal scheme: E at nodes, dE_fd = (E_{i+1} − E_{i−1})/2h, samples on nodes 2..ns−3.
/// Conservative scheme: dE_fd = (Ê_{i+½} − Ê_{i−½})/h, E = mean of the two half-step values,
/// samples on nodes 1..ns−2. Samples are restricted to [s_lo, s_hi].
inline EnergyTrace energy_trace(const FowlerField& V, const AngularFem& fem, EnergyScheme scheme = EnergyScheme::Nodal,
                                double s_lo = -std::numeric_limits<double>::infinity(),
                                double s_hi = std::numeric_limits<double>::infinity()) {
  detail::check_shapes(V, fem);
  const double h = detail::uniform_step(V.s);
  const auto& q = V.params;
  const auto e = derive_exponents(q);
  const std::size_t ns = V.s.size(), m = fem.size();
  EnergyTrace tr;
  tr.J1 = e.J1;
  tr.scheme = scheme;
  auto formula = [&](std::size_t i) {
    std::vector<double> w(m);
    for (std::size_t j = 0; j < m; ++j) w[j] = (V.at(i + 1, j) - V.at(i - 1, j)) / (2 * h);
    return e.J1 * sphere_area(q.n) * fem.mass_form(w.data(), w.data());
  };
  if (scheme == EnergyScheme::Nodal) {
    if (ns < 5) throw std::invalid_argument("energy_trace: need at least 5 s-nodes");
    std::vector<double> E(ns, 0.0);
    for (std::size_t i = 1; i + 1 < ns; ++i) E[i] = energy_cylinder(V, fem, i);
    for (std::size_t i = 2; i + 2 < ns; ++i) {
      if (V.s[i] < s_lo || V.s[i] > s_hi) continue;
      tr.s.push_back(V.s[i]);
      tr.E.push_back(E[i]);
      tr.dE_fd.push_back((E[i + 1] - E[i - 1]) / (2 * h));
      tr.dE_formula.push_back(formula(i));
    }
  } else {
    std::vector<double> Eh(ns - 1);
    for (std::size_t i = 0; i + 1 < ns; ++i) Eh[i] = energy_cylinder_half(V, fem, i);
    for (std::size_t i = 1; i + 1 < ns; ++i) {
      if (V.s[i] < s_lo || V.s[i] > s_hi) continue;
      tr.s.push_back(V.s[i]);
      tr.E.push_back(0.5 * (Eh[i - 1] + Eh[i]));
      tr.dE_fd.push_back((Eh[i] - Eh[i - 1]) / h);
      tr.dE_formula.push_back(formula(i));
    }
  }
  if (tr.s.empty()) throw std::invalid_argument("energy_trace: range contains no interior samples");
  return tr;
}

inline EnergyTrace energy_trace(const FowlerField& V, EnergyScheme scheme = EnergyScheme::Nodal) {
  return energy_trace(V, build_angular_fem(V.params.n, V.params.sigma, V.psi), scheme);
}

/// max_i |dE_fd − dE_formula| / (|dE_formula| + 10⁻¹⁰·scale).
inline double derivative_identity_check(const EnergyTrace& tr) {
  const double floor = 1e-10 * std::max(tr.scale(), std::numeric_limits<double>::min());
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    worst = std::max(worst, std::fabs(tr.dE_fd[i] - tr.dE_formula[i]) / (std::fabs(tr.dE_formula[i]) + floor));
  return worst;
}

/// max_i |dE_fd − dE_formula| in absolute terms.
inline double derivative_identity_abs(const EnergyTrace& tr) {
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) worst = std::max(worst, std::fabs(tr.dE_fd[i] - tr.dE_formula[i]));
  return worst;
}

enum class Monotonicity { NonDecreasing, NonIncreasing, Constant, Violated };

inline const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::NonDecreasing: return "NonDecreasing";
    case Monotonicity::NonIncreasing: return "NonIncreasing";
    case Monotonicity::Constant: return "Constant";
    case Monotonicity::Violated: return "Violated";
  }
  return "?";
}

/// Default budget when none is measured: 10⁻⁸·max(1, scale).
inline double default_energy_budget(const EnergyTrace& tr) { return 1e-8 * std::max(1.0, tr.scale()); }

/// Constant when every |dE_fd| ≤ budget; otherwise the sign of J₁ decides, and Violated means some
/// dE_fd opposes sign(J₁) by more than the budget (or J₁ = 0 with a drift beyond it).
inline Monotonicity monotonicity_verdict(const EnergyTrace& tr, double budget) {
  bool all_small = true;
  double worst_against = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double d = tr.dE_fd[i];
    if (std::fabs(d) > budget) all_small = false;
    if (tr.J1 > 0) worst_against = std::max(worst_against, -d);
    if (tr.J1 < 0) worst_against = std::max(worst_against, d);
  }
  if (all_small) return Monotonicity::Constant;
  if (tr.J1 == 0.0 || worst_against > budget) return Monotonicity::Violated;
  return tr.J1 > 0 ? Monotonicity::NonDecreasing : Monotonicity::NonIncreasing;
}

inline Monotonicity monotonicity_verdict(const EnergyTrace& tr) {
  return monotonicity_verdict(tr, default_energy_budget(tr));
}

/// Largest gap between two traces at shared s-values; the coarse-vs-fine estimate of the
/// discretization error in dE_fd.
inline double refinement_budget(const EnergyTrace& coarse, const EnergyTrace& fine) {
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    for (std::size_t k = 0; k < fine.size(); ++k) {
      if (std::fabs(fine.s[k] - coarse.s[i]) <= 1e-9 * std::max(1.0, std::fabs(coarse.s[i]))) {
        worst = std::max(worst, std::fabs(fine.dE_fd[k] - coarse.dE_fd[i]));
        break;
      }
    }
  }
  return worst;
}

/// max E − min E over the trace.
inline double energy_drift(const EnergyTrace& tr) {
  if (tr.E.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(tr.E.begin(), tr.E.end());
  return *hi - *lo;
}

}  // namespace hh
