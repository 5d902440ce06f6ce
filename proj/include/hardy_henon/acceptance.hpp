#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cylinder.hpp"
#include "energy.hpp"
#include "extension.hpp"
#include "fraclap.hpp"
#include "kelvin.hpp"
#include "params.hpp"
#include "specialfn.hpp"

namespace hh {

struct Metric {
  std::string name;
  double value;
  double limit;
  bool upper = true;  ///< pass when value ≤ limit; otherwise when value ≥ limit
  bool pass() const { return std::isfinite(value) && (upper ? value <= limit : value >= limit); }
};

struct CriterionResult {
  int id = 0;
  std::string title;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::vector<Metric> metrics;
  std::vector<std::string> notes;
  std::string error;  ///< set when the check threw

  bool pass() const {
    if (!error.empty() || seconds > time_limit || metrics.empty()) return false;
    for (const auto& m : metrics)
      if (!m.pass()) return false;
    return true;
  }
};

/// ψ-grid grading exponent: 2 for σ ≥ 1/2, growing like 1/σ below (capped at 5).
inline double default_psi_grading(double sigma) { return std::clamp(1.0 / sigma, 2.0, 5.0); }

namespace acceptance {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

template <class Body>
CriterionResult run(int id, std::string title, double time_limit, Body&& body) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  r.time_limit = time_limit;
  Timer tm;
  try {
    body(r);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = tm.seconds();
  return r;
}

inline std::string tuple_name(const ProblemParams& q) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%d,%g,%g,%g)", q.n, q.sigma, q.alpha, q.p);
  return buf;
}

/// Discrete profile on the default angular grid.
struct CylinderSetup {
  std::vector<double> psi;
  AngularFem fem;
  std::vector<double> phi;
};

inline CylinderSetup cylinder_setup(const ProblemParams& q, int intervals = 64) {
  auto psi = graded_psi_grid(intervals, default_psi_grading(q.sigma));
  auto fem = build_angular_fem(q.n, q.sigma, psi);
  auto phi = discrete_sphere_profile(q, fem, exact_sphere_profile(q, psi).phi).phi;
  return {std::move(psi), std::move(fem), std::move(phi)};
}

inline FowlerField solve_perturbed(const ProblemParams& q, const CylinderSetup& cs, double s_min, double s_max,
                                   int ns, Perturbation kind, double eps = 0.05) {
  auto pb = perturbed_problem(q, cs.psi, cs.phi, eps, s_min, s_max, ns, kind);
  return solve_cylinder_pde(q, pb).field;
}

}  // namespace acceptance

inline CriterionResult criterion_lambda_symmetry() {
  return acceptance::run(1, "Lambda symmetry", 1.0, [](CriterionResult& r) {
    double worst = 0.0;
    int count = 0;
    for (int n : {2, 3, 4, 5})
      for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const double half = 0.5 * (n - 2 * s) - 0.01;
        for (int k = 0; k <= 200; ++k) {
          const double tau = -half + 2 * half * k / 200.0;
          const auto a = lambda_multiplier(tau, n, s), b = lambda_multiplier(-tau, n, s);
          worst = std::max(worst, std::fabs(a.value - b.value) / std::max(std::fabs(a.value), 1e-300));
          ++count;
        }
      }
    r.metrics.push_back({"max_relative_asymmetry", worst, 1e-12});
    r.notes.push_back(std::to_string(count) + " (n,sigma,tau) samples");
  });
}

inline CriterionResult criterion_fall_identity() {
  return acceptance::run(2, "Fall identity", 60.0, [](CriterionResult& r) {
    const std::vector<ProblemParams> tuples = {{3, 0.5, 0, 2},      {4, 0.75, -0.5, 1.9}, {2, 0.3, 0, 2.5},
                                               {3, 0.25, -0.3, 2.2}, {3, 0.9, 0.5, 3.2},  {3, 0.1, 0, 2}};
    const std::vector<double> radii = {0.5, 1.0, 2.0};
    double slowest = 0.0;
    for (const auto& q : tuples) {
      acceptance::Timer t;
      const auto rep = verify_fall_identity(q, radii);
      slowest = std::max(slowest, t.seconds());
      r.metrics.push_back({"max_rel_error " + acceptance::tuple_name(q), rep.max_rel_error, 1e-6});
    }
    r.metrics.push_back({"C(3,0.5,0,2) - 2/pi", std::fabs(singular_constant({3, 0.5, 0, 2}) - 2 / std::numbers::pi),
                         1e-14});
    r.metrics.push_back({"slowest_tuple_seconds", slowest, 10.0});
  });
}

inline CriterionResult criterion_normalizations() {
  return acceptance::run(3, "kappa and Poisson kernel mass", 5.0, [](CriterionResult& r) {
    r.metrics.push_back({"|kappa_1/2 - 1|", std::fabs(kappa_sigma(0.5) - 1.0), 1e-14});
    for (auto [n, s] : {std::pair{2, 0.3}, std::pair{3, 0.5}, std::pair{4, 0.75}}) {
      double worst = 0.0;
      for (auto [x, t] : {std::pair{0.0, 1.0}, std::pair{1.0, 1.0}, std::pair{1.0, 0.1}, std::pair{2.0, 3.0}})
        worst = std::max(worst, std::fabs(poisson_kernel_mass(n, s, x, t) - 1.0));
      char buf[64];
      std::snprintf(buf, sizeof buf, "kernel_mass_error (n=%d,sigma=%g)", n, s);
      r.metrics.push_back({buf, worst, 1e-8});
    }
  });
}

inline CriterionResult criterion_classical_limit() {
  return acceptance::run(4, "Classical limit", 1.0, [](CriterionResult& r) {
    double worst = 0.0;
    for (int n : {3, 4})
      for (double a : {-0.5, 0.0, 0.5}) {
        const double lo = (n + a) / (n - 2.0), hi = (n + 2.0) / (n - 2.0);
        const double p = 0.5 * (lo + hi);
        const double c0 = (2 + a) * ((n - 2) * p - n - a) / ((p - 1) * (p - 1));
        const double d3 = std::fabs(std::pow(singular_constant({n, 0.999, a, p}), p - 1) - c0) / c0;
        const double d4 = std::fabs(std::pow(singular_constant({n, 0.9999, a, p}), p - 1) - c0) / c0;
        worst = std::max(worst, d3);
        char buf[128];
        std::snprintf(buf, sizeof buf, "n=%d alpha=%g p=%g: %.3e at sigma=0.999, %.3e at sigma=0.9999", n, a, p, d3, d4);
        r.notes.push_back(buf);
      }
    r.metrics.push_back({"max_rel_diff C^{p-1} vs C0^{p-1} at sigma=0.999", worst, 5e-3});
  });
}

/// E(r) for the exact singular solution on r ∈ [0.25, 4] and the closed-form value.
struct ExactEnergyReport {
  std::vector<double> radii;
  std::vector<double> halfsphere;
  std::vector<double> cylinder;
  double target;
};

inline ExactEnergyReport exact_energy_profile(const ProblemParams& q, int psi_intervals = 64, int samples = 9,
                                              double stencil = 1e-2) {
  auto psi = graded_psi_grid(psi_intervals, default_psi_grading(q.sigma));
  const auto fem = build_angular_fem(q.n, q.sigma, psi);
  const auto u = exact_trace(q);
  ExactEnergyReport rep;
  rep.target = kappa_sigma(q.sigma) * (1.0 / (q.p + 1) - 0.5) * std::pow(singular_constant(q), q.p + 1) *
               sphere_area(q.n);
  for (double r : log_radius_grid(0.25, 4.0, samples - 1)) {
    const std::vector<double> rs = {r * std::exp(-stencil), r, r * std::exp(stencil)};
    const auto U = poisson_extension_field(u, q, rs, psi);
    rep.radii.push_back(r);
    rep.halfsphere.push_back(energy_halfsphere(U, fem, std::size_t{1}));
    rep.cylinder.push_back(energy_cylinder(fowler_map(U), fem, std::size_t{1}));
  }
  return rep;
}

inline CriterionResult criterion_exact_energy() {
  return acceptance::run(5, "Exact-solution energy", 30.0, [](CriterionResult& r) {
    for (const auto& q : {ProblemParams{3, 0.5, 0, 2}, ProblemParams{4, 0.75, -0.5, 1.9}, ProblemParams{3, 0.9, 0.5, 3.2}}) {
      const auto rep = exact_energy_profile(q);
      const auto [lo, hi] = std::minmax_element(rep.halfsphere.begin(), rep.halfsphere.end());
      double err = 0.0, agree = 0.0;
      for (std::size_t i = 0; i < rep.radii.size(); ++i) {
        err = std::max(err, std::fabs(rep.halfsphere[i] - rep.target) / std::fabs(rep.target));
        agree = std::max(agree, std::fabs(rep.halfsphere[i] - rep.cylinder[i]) / std::fabs(rep.target));
      }
      const std::string tn = acceptance::tuple_name(q);
      r.metrics.push_back({"relative_drift " + tn, (*hi - *lo) / std::fabs(rep.target), 1e-3});
      r.metrics.push_back({"relative_error_vs_closed_form " + tn, err, 1e-3});
      r.metrics.push_back({"halfsphere_vs_cylinder " + tn, agree, 1e-3});
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s target %.9f, E(1) %.9f", tn.c_str(), rep.target,
                    rep.halfsphere[rep.radii.size() / 2]);
      r.notes.push_back(buf);
    }
  });
}

inline CriterionResult criterion_monotonicity() {
  return acceptance::run(6, "Monotonicity signs", 120.0, [](CriterionResult& r) {
    struct Case {
      ProblemParams q;
      double s_min, s_max;
    };
    // the J1 = 0 case uses [-3,3]: on [-4,4] its oscillatory mode sits 0.09 from a Dirichlet resonance
    const std::vector<Case> cases = {{{3, 0.5, 0, 1.8}, -4, 4}, {{3, 0.5, -0.5, 1.5}, -3, 3}, {{3, 0.5, -0.5, 1.7}, -4, 4}};
    for (const auto& c : cases) {
      const auto e = derive_exponents(c.q);
      const auto cs = acceptance::cylinder_setup(c.q);
      const int ns = static_cast<int>(std::lround((c.s_max - c.s_min) / 0.05)) + 1;
      const auto Vc = acceptance::solve_perturbed(c.q, cs, c.s_min, c.s_max, ns, Perturbation::LeftScaling);
      const auto Vf = acceptance::solve_perturbed(c.q, cs, c.s_min, c.s_max, 2 * ns - 1, Perturbation::LeftScaling);
      const auto tc = energy_trace(Vc, cs.fem, EnergyScheme::Nodal);
      const auto tf = energy_trace(Vf, cs.fem, EnergyScheme::Nodal);
      const std::string tn = acceptance::tuple_name(c.q);
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s J1=%.6g resonance margin %.3f", tn.c_str(), e.J1,
                    resonance_margin(c.q, cs.fem, cs.phi, c.s_max - c.s_min));
      r.notes.push_back(buf);
      if (compare_threshold(c.q.p, e.hardy_sobolev_crit) == 0) {
        const auto cons = energy_trace(Vc, cs.fem, EnergyScheme::Conservative);
        r.metrics.push_back({"J1=0 energy drift " + tn, energy_drift(cons), 1e-6});
        std::snprintf(buf, sizeof buf, "%s nodal-energy drift %.3e", tn.c_str(), energy_drift(tc));
        r.notes.push_back(buf);
        continue;
      }
      const int sg = e.J1 > 0 ? 1 : -1;
      int wrong = 0;
      for (double f : tc.dE_formula)
        if (!(sg * f > 0)) ++wrong;
      r.metrics.push_back({"dE_formula sign mismatches " + tn, static_cast<double>(wrong), 0.0});
      const double budget = refinement_budget(tc, tf);
      double against = 0.0;
      for (double d : tc.dE_fd) against = std::max(against, -sg * d);
      r.metrics.push_back({"dE_fd excess against sign(J1) over budget " + tn, against - budget, 0.0});
      const auto verdict = monotonicity_verdict(tc, budget);
      const bool ok = verdict == (sg > 0 ? Monotonicity::NonDecreasing : Monotonicity::NonIncreasing);
      r.metrics.push_back({std::string("verdict ") + to_string(verdict) + " " + tn, ok ? 0.0 : 1.0, 0.0});
      std::snprintf(buf, sizeof buf, "%s refinement budget %.3e, energy range %.3e", tn.c_str(), budget,
                    energy_drift(tc));
      r.notes.push_back(buf);
    }
  });
}

/// A smooth positive field that does not solve the cylinder equation.
inline FowlerField non_solution_field(const ProblemParams& q, const std::vector<double>& psi,
                                      const std::vector<double>& phi, double s_min, double s_max, int ns) {
  auto V = constant_fowler_field(q, s_min, s_max, ns, psi, phi);
  for (int i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < psi.size(); ++j)
      V.at(i, j) = phi[j] * (1 + 0.2 * std::sin(V.s[i]) * std::cos(psi[j]));
  return V;
}

inline CriterionResult criterion_derivative_identity() {
  return acceptance::run(7, "Derivative identity", 120.0, [](CriterionResult& r) {
    struct Case {
      ProblemParams q;
      double s_min, s_max;
    };
    const std::vector<Case> cases = {{{3, 0.5, 0, 1.6}, -4, 4}, {{3, 0.5, -0.9, 1.9}, -2, 2}};
    for (const auto& c : cases) {
      const auto cs = acceptance::cylinder_setup(c.q);
      const int ns = static_cast<int>(std::lround((c.s_max - c.s_min) / 0.05)) + 1;
      const auto Vc = acceptance::solve_perturbed(c.q, cs, c.s_min, c.s_max, ns, Perturbation::LinearMode);
      const auto Vf = acceptance::solve_perturbed(c.q, cs, c.s_min, c.s_max, 2 * ns - 1, Perturbation::LinearMode);
      const double mc = derivative_identity_check(energy_trace(Vc, cs.fem));
      const double mf = derivative_identity_check(energy_trace(Vf, cs.fem));
      const std::string tn = acceptance::tuple_name(c.q);
      r.metrics.push_back({"relative_mismatch default grid " + tn, mc, 0.05});
      r.metrics.push_back({"refinement ratio coarse/fine " + tn, mc / mf, 2.0, false});
      char buf[128];
      std::snprintf(buf, sizeof buf, "%s mismatch %.3e -> %.3e", tn.c_str(), mc, mf);
      r.notes.push_back(buf);
    }
    const ProblemParams q{3, 0.5, 0, 1.6};
    const auto cs = acceptance::cylinder_setup(q);
    const auto bad = non_solution_field(q, cs.psi, cs.phi, -4, 4, 161);
    r.metrics.push_back({"negative control mismatch", derivative_identity_check(energy_trace(bad, cs.fem)), 0.5, false});
  });
}

inline CriterionResult criterion_equivalences(std::uint64_t seed = 20240917) {
  return acceptance::run(8, "Exponent equivalences and Kelvin invariance", 5.0, [seed](CriterionResult& r) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dn(2, 8);
    std::uniform_real_distribution<double> ds(0.01, 0.99), da(-4.0, 4.0), dp(1.001, 8.0);
    int violations = 0;
    for (int k = 0; k < 100000; ++k) {
      const ProblemParams q{dn(rng), ds(rng), da(rng), dp(rng)};
      for (const auto& eq : verify_equivalences(q))
        if (!eq.agrees()) ++violations;
    }
    r.metrics.push_back({"equivalence violations over 1e5 draws", static_cast<double>(violations), 0.0});
    double worst_c = 0.0, worst_inv = 0.0, worst_exp = 0.0;
    int admissible = 0;
    while (admissible < 100) {
      ProblemParams q{dn(rng), ds(rng), 0.0, 0.0};
      q.alpha = std::uniform_real_distribution<double>(-2 * q.sigma + 0.01, 2.0)(rng);
      const double lo = (q.n + q.alpha) / (q.n - 2 * q.sigma);
      q.p = std::uniform_real_distribution<double>(lo + 0.01, lo + 4.0)(rng);
      ++admissible;
      worst_c = std::max(worst_c, constant_invariance(q));
      const auto km = kelvin_exponent(q), back = kelvin_exponent(km.mapped);
      worst_exp = std::max(worst_exp, std::fabs(back.vartheta - q.alpha) / std::max(1.0, std::fabs(q.alpha)));
      const auto u = exact_trace(q);
      const auto ut = kelvin_transform_profile(u, q.n, q.sigma);
      for (double rho : {0.1, 0.7, 1.0, 3.0, 25.0}) {
        const double twice = kelvin_point_transform(ut, rho, q.n, q.sigma);
        worst_inv = std::max(worst_inv, std::fabs(twice - u(rho)) / u(rho));
      }
    }
    r.metrics.push_back({"Kelvin constant invariance over 100 draws", worst_c, 1e-12});
    r.metrics.push_back({"Kelvin involution (trace)", worst_inv, 1e-12});
    r.metrics.push_back({"Kelvin exponent map twice", worst_exp, 1e-12});
  });
}

inline CriterionResult criterion_barrier() {
  return acceptance::run(9, "Barrier identities", 10.0, [](CriterionResult& r) {
    const ProblemParams q{3, 0.5, 0, 2};
    for (const auto& [mu, delta, x, t, q2] :
         {std::tuple{1.0, 0.25, 1.0, 0.5, q}, std::tuple{0.7, 0.4, 1.5, 0.8, ProblemParams{4, 0.75, 0, 1.9}},
          std::tuple{0.5, 0.1, 0.8, 0.6, ProblemParams{3, 0.3, 0, 2}}}) {
      const double h = 0.04;
      const auto r0 = verify_barrier_identity(mu, delta, x, t, q2, h);
      const auto r1 = verify_barrier_identity(mu, delta, x, t, q2, h / 2);
      const auto r2 = verify_barrier_identity(mu, delta, x, t, q2, h / 4);
      char buf[96];
      std::snprintf(buf, sizeof buf, "(mu=%g,delta=%g,n=%d,sigma=%g)", mu, delta, q2.n, q2.sigma);
      const std::string tag = buf;
      r.metrics.push_back({"interior order step1 " + tag, std::log2(r0.interior / r1.interior), 1.8, false});
      r.metrics.push_back({"interior order step2 " + tag, std::log2(r1.interior / r2.interior), 1.8, false});
      r.metrics.push_back({"neumann order step1 " + tag, std::log2(r0.neumann / r1.neumann), 1.8, false});
      r.metrics.push_back({"neumann order step2 " + tag, std::log2(r1.neumann / r2.neumann), 1.8, false});
      std::snprintf(buf, sizeof buf, "%s interior %.2e %.2e %.2e neumann %.2e %.2e %.2e", tag.c_str(), r0.interior,
                    r1.interior, r2.interior, r0.neumann, r1.neumann, r2.neumann);
      r.notes.push_back(buf);
    }
  });
}

struct TruthRow {
  ProblemParams q;
  RegimeLabel label;
  std::set<TheoremTag> tags;
  std::set<std::string> thresholds;
};

/// Hand-checked verdicts at n = 3, σ = 1/2, where serrin = (3+α)/2, p_S = 2+α,
/// thm11_upper = (4+α)/2, sobolev_crit = 2 and n/(n−2σ) = 3/2.
inline const std::vector<TruthRow>& classifier_truth_table() {
  using T = TheoremTag;
  using L = RegimeLabel;
  static const std::vector<TruthRow> rows = {
      {{3, 0.5, -1.5, 1.5}, L::NonexistenceAlphaBelowMinus2Sigma, {T::Cor2_1}, {"p=n/(n-2sigma)"}},
      {{3, 0.5, -1.0, 1.5}, L::Supercritical, {}, {"alpha=-2sigma", "p=thm11_upper", "p=n/(n-2sigma)"}},
      {{3, 0.5, 0.0, 1.2}, L::ExteriorTriviality, {T::Thm1_3_1}, {"alpha=0"}},
      {{3, 0.5, 0.0, 1.5}, L::Subcritical, {}, {"alpha=0", "p=serrin"}},
      {{3, 0.5, 0.0, 1.8}, L::Subcritical, {T::Thm1_1, T::Thm1_4, T::Thm1_2, T::Thm1_3_2, T::Cor1_1}, {"alpha=0"}},
      {{3, 0.5, 0.0, 2.0},
       L::HardySobolevCritical,
       {},
       {"alpha=0", "p=hardy_sobolev_crit", "p=thm11_upper", "p=sobolev_crit"}},
      {{3, 0.5, -0.5, 1.5}, L::HardySobolevCritical, {T::Thm1_2, T::Thm1_3_2}, {"p=hardy_sobolev_crit", "p=n/(n-2sigma)"}},
      {{3, 0.5, -0.5, 1.75}, L::Supercritical, {T::Thm1_1, T::Thm1_4, T::Thm1_2, T::Thm1_3_2}, {"p=thm11_upper"}},
      {{3, 0.5, -0.5, 1.9}, L::Supercritical, {T::Thm1_2, T::Thm1_3_2}, {}},
      {{3, 0.5, 0.5, 1.9}, L::Subcritical, {T::Thm1_2, T::Thm1_3_2}, {}},
      {{3, 0.5, 1.0, 1.9}, L::ExteriorTriviality, {T::Thm1_3_1}, {"alpha=2sigma"}},
      {{3, 0.5, 0.0, 2.5}, L::Supercritical, {}, {"alpha=0"}},
  };
  return rows;
}

inline CriterionResult criterion_classifier() {
  return acceptance::run(10, "Classifier truth table", 1.0, [](CriterionResult& r) {
    int wrong = 0;
    for (const auto& row : classifier_truth_table()) {
      const auto v = classify_regime(row.q);
      const std::set<std::string> th(v.thresholds_hit.begin(), v.thresholds_hit.end());
      if (v.label != row.label || v.tags != row.tags || th != row.thresholds) {
        ++wrong;
        r.notes.push_back("mismatch at " + acceptance::tuple_name(row.q) + ": got " + to_string(v.label));
      }
    }
    r.metrics.push_back({"rows disagreeing with hand-checked verdicts (of 12)", static_cast<double>(wrong), 0.0});
  });
}

inline std::vector<std::function<CriterionResult()>> acceptance_criteria() {
  return {criterion_lambda_symmetry, criterion_fall_identity,   criterion_normalizations, criterion_classical_limit,
          criterion_exact_energy,    criterion_monotonicity,    criterion_derivative_identity,
          [] { return criterion_equivalences(); }, criterion_barrier, criterion_classifier};
}

}  // namespace hh
