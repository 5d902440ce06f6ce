#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hardy_henon.hpp"

namespace {

using hh::Json;
using hh::RunReport;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  double n = 3, sigma = 0.5, alpha = 0.0, p = 2.0;
  std::string radii = "0.5,1,2";
  std::string s_range = "-4,4";
  std::string grid = "161,64";
  std::string perturbation = "left";
  double eps = 0.05;
  std::string scheme = "auto";
  std::string config_file;
  std::string out;
  std::string format = "json";
  std::string only;
  double mu = 1.0, delta = 0.25, x = 1.0, t = 0.5, h = 0.04;
  int levels = 3;

  double tol_threshold = 1e-12;
  double tol_lemma = 1e-6;
  double tol_trace = 1e-4;
  double tol_solver = 1e-12;
  double tol_identity = 0.05;
  double tol_drift = 1e-6;
  double tol_order = 1.8;
  double tol_kelvin = 1e-12;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("malformed number in ") + flag + ": '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + " is empty");
  return out;
}

hh::ProblemParams params_of(const Options& o) {
  try {
    return hh::validate_params(o.n, o.sigma, o.alpha, o.p);
  } catch (const hh::ParamError& e) {
    throw UsageError(std::string("invalid parameters: ") + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open --out file " + path);
  f << text;
}

// classify -------------------------------------------------------------------------------------

void run_classify(const Options& o, RunReport& r) {
  const auto q = params_of(o);
  const auto e = hh::derive_exponents(q);
  const auto v = hh::classify_regime(q, o.tol_threshold);
  r.tolerances["tol_threshold"] = o.tol_threshold;
  r.info("label", hh::to_string(v.label));
  Json tags = Json::array();
  for (auto t : v.tags) tags.push_back(hh::to_string(t));
  r.info("tags", tags);
  r.info("thresholds_hit", v.thresholds_hit);
  r.info("rate_fast", v.rate_fast);
  r.info("rate_singular", v.rate_singular);
  r.info("notes", v.notes);
  r.info("beta", e.beta);
  r.info("serrin", e.serrin);
  r.info("sobolev_crit", e.sobolev_crit);
  r.info("hardy_sobolev_crit", e.hardy_sobolev_crit);
  r.info("thm11_upper", e.thm11_upper);
  r.info("J1", e.J1);
  r.info("J2", e.J2);
  r.info("vartheta", e.vartheta);
  r.info("tau", e.tau);
}

// constants ------------------------------------------------------------------------------------

void run_constants(const Options& o, RunReport& r) {
  const auto q = params_of(o);
  const auto e = hh::derive_exponents(q);
  r.info("kappa_sigma", hh::kappa_sigma(q.sigma));
  r.info("c_n_sigma", hh::hypersingular_normalizer(q.n, q.sigma));
  r.info("p_n_sigma", hh::poisson_normalizer(q.n, q.sigma));
  const auto lam = hh::lambda_multiplier(e.tau, q.n, q.sigma);
  r.info("lambda_tau", lam.value);
  try {
    r.info("C_p_sigma_alpha", hh::singular_constant(q));
  } catch (const hh::PreconditionError& err) {
    r.info("C_p_sigma_alpha", nullptr);
    r.info("C_p_sigma_alpha_note", err.what());
  }
  try {
    r.info("C0_classical", hh::classical_limit_constant(q.n, q.alpha, q.p));
  } catch (const hh::PreconditionError&) {
    r.info("C0_classical", nullptr);
  }
}

// verify-lemma ---------------------------------------------------------------------------------

void run_verify_lemma(const Options& o, RunReport& r) {
  const auto q = params_of(o);
  const auto radii = parse_list(o.radii, "--radii");
  const auto rep = hh::verify_fall_identity(q, radii);
  r.info("radii", radii);
  r.info("per_radius_errors", rep.rel_errors);
  r.info("mean_ratio", rep.mean_ratio);
  r.check_le("max_rel_error", rep.max_rel_error, "tol_lemma", o.tol_lemma);
}

// extend ---------------------------------------------------------------------------------------

void run_extend(const Options& o, RunReport& r) {
  const auto q = params_of(o);
  const auto radii = parse_list(o.radii, "--radii");
  const auto g = parse_list(o.grid, "--grid");
  const int m = static_cast<int>(g.back());
  if (m < 2) throw UsageError("--grid needs at least 2 psi intervals");
  const auto psi = hh::graded_psi_grid(m, hh::default_psi_grading(q.sigma));
  const auto U = hh::poisson_extension_field(hh::exact_trace(q), q, radii, psi);
  const auto sp = hh::exact_sphere_profile(q, psi);
  const double C = hh::singular_constant(q);
  const double beta = hh::derive_exponents(q).beta;
  double homog = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j)
      homog = std::max(homog, std::fabs(U.at(i, j) * std::pow(radii[i], beta) - sp.phi[j]) / sp.phi[j]);
  r.info("psi_intervals", m);
  r.info("boundary_value", sp.boundary_value);
  r.info("C_p_sigma_alpha", C);
  r.check_le("trace_recovery_rel_error", std::fabs(sp.boundary_value - C) / C, "tol_trace", o.tol_trace);
  r.check_le("homogeneity_rel_error", homog, "tol_homogeneity", 1e-8);
  if (!o.out.empty()) {
    std::vector<double> cr, cp, cv;
    for (std::size_t i = 0; i < radii.size(); ++i)
      for (std::size_t j = 0; j < psi.size(); ++j) {
        cr.push_back(radii[i]);
        cp.push_back(psi[j]);
        cv.push_back(U.at(i, j));
      }
    write_file(o.out, hh::csv_table({"r", "psi", "value"}, {cr, cp, cv}));
    r.info("out", o.out);
  }
}

// solve-cylinder / energy ----------------------------------------------------------------------

struct CylinderRun {
  hh::ProblemParams q;
  double s_min, s_max;
  int ns, m;
  std::string perturbation;
  double eps;
};

CylinderRun cylinder_run(const Options& o) {
  CylinderRun c{params_of(o), 0, 0, 0, 0, o.perturbation, o.eps};
  auto s = parse_list(o.s_range, "--s-range");
  auto g = parse_list(o.grid, "--grid");
  if (!o.config_file.empty()) {
    std::ifstream f(o.config_file);
    if (!f) throw UsageError("cannot read --config " + o.config_file);
    Json j;
    try {
      j = Json::parse(f);
      if (j.contains("params")) {
        const auto& pj = j["params"];
        c.q = hh::validate_params(pj.value("n", 3.0), pj.value("sigma", 0.5), pj.value("alpha", 0.0), pj.value("p", 2.0));
      }
      if (j.contains("s_range")) s = j["s_range"].get<std::vector<double>>();
      if (j.contains("grid")) g = j["grid"].get<std::vector<double>>();
      if (j.contains("perturbation")) c.perturbation = j["perturbation"].get<std::string>();
      if (j.contains("eps")) c.eps = j["eps"].get<double>();
    } catch (const hh::ParamError& e) {
      throw UsageError(std::string("invalid parameters in --config: ") + e.what());
    } catch (const std::exception& e) {
      throw UsageError(std::string("malformed --config: ") + e.what());
    }
  }
  if (s.size() != 2 || !(s[0] < s[1])) throw UsageError("--s-range must be 'a,b' with a < b");
  if (g.size() != 2 || g[0] < 5 || g[1] < 2) throw UsageError("--grid must be 'ns,m' with ns >= 5, m >= 2");
  c.s_min = s[0];
  c.s_max = s[1];
  c.ns = static_cast<int>(g[0]);
  c.m = static_cast<int>(g[1]);
  if (c.perturbation != "none" && c.perturbation != "left" && c.perturbation != "mode")
    throw UsageError("--perturbation must be none, left or mode");
  return c;
}

struct Solved {
  hh::CylinderSolution sol;
  hh::AngularFem fem;
  std::vector<double> phi;
};

Solved solve(const CylinderRun& c, int ns, const Options& o) {
  const auto psi = hh::graded_psi_grid(c.m, hh::default_psi_grading(c.q.sigma));
  auto fem = hh::build_angular_fem(c.q.n, c.q.sigma, psi);
  hh::SolverOptions opt;
  opt.tolerance = o.tol_solver;
  auto phi = hh::discrete_sphere_profile(c.q, fem, hh::exact_sphere_profile(c.q, psi).phi, opt).phi;
  hh::CylinderProblem pb;
  if (c.perturbation == "none") {
    pb.s_min = c.s_min;
    pb.s_max = c.s_max;
    pb.ns = ns;
    pb.psi = psi;
    pb.left = phi;
    pb.right = phi;
  } else {
    const auto kind = c.perturbation == "left" ? hh::Perturbation::LeftScaling : hh::Perturbation::LinearMode;
    pb = hh::perturbed_problem(c.q, psi, phi, c.eps, c.s_min, c.s_max, ns, kind);
  }
  auto sol = hh::solve_cylinder_pde(c.q, pb, opt);
  return {std::move(sol), std::move(fem), std::move(phi)};
}

/// Distance of the lowest oscillatory mode from a Dirichlet resonance of the truncated cylinder.
double margin_of(const CylinderRun& c) {
  const auto psi = hh::graded_psi_grid(c.m, hh::default_psi_grading(c.q.sigma));
  const auto fem = hh::build_angular_fem(c.q.n, c.q.sigma, psi);
  const auto phi = hh::discrete_sphere_profile(c.q, fem, hh::exact_sphere_profile(c.q, psi).phi).phi;
  return hh::resonance_margin(c.q, fem, phi, c.s_max - c.s_min);
}

void report_solver_error(const CylinderRun& c, const hh::SolverError& e, const Options& o, RunReport& r) {
  r.info("solver_error", e.what());
  r.info("resonance_margin", margin_of(c));
  const auto& h = e.residual_history();
  r.check_le("final_residual", h.empty() ? INFINITY : h.back(), "tol_solver", o.tol_solver);
}

void field_csv(const hh::FowlerField& V, const std::string& path) {
  std::vector<double> cs, cp, cv;
  for (std::size_t i = 0; i < V.s.size(); ++i)
    for (std::size_t j = 0; j < V.psi.size(); ++j) {
      cs.push_back(V.s[i]);
      cp.push_back(V.psi[j]);
      cv.push_back(V.at(i, j));
    }
  write_file(path, hh::csv_table({"s", "psi", "value"}, {cs, cp, cv}));
}

void report_solve(const CylinderRun& c, const Solved& s, const Options& o, RunReport& r) {
  r.info("s_range", std::vector<double>{c.s_min, c.s_max});
  r.info("grid", std::vector<int>{c.ns, c.m});
  r.info("perturbation", c.perturbation);
  r.info("eps", c.eps);
  r.info("newton_iterations", static_cast<int>(s.sol.residual_history.size()) - 1);
  r.info("residual_history", s.sol.residual_history);
  r.info("projections", s.sol.projections);
  r.info("diagnostics", s.sol.diagnostics);
  r.check_le("final_residual", s.sol.residual_history.back(), "tol_solver", o.tol_solver);
}

void run_solve_cylinder(const Options& o, RunReport& r) {
  const auto c = cylinder_run(o);
  r.params = c.q;
  Solved s;
  try {
    s = solve(c, c.ns, o);
  } catch (const hh::SolverError& e) {
    report_solver_error(c, e, o, r);
    return;
  }
  report_solve(c, s, o, r);
  const auto& V = s.sol.field;
  double vmin = INFINITY, dev = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < V.s.size(); ++i)
    for (std::size_t j = 0; j < V.psi.size(); ++j) {
      vmin = std::min(vmin, V.at(i, j));
      dev = std::max(dev, std::fabs(V.at(i, j) - s.phi[j]));
      scale = std::max(scale, s.phi[j]);
    }
  r.info("min_value", vmin);
  r.info("max_deviation_from_profile", dev / scale);
  r.check_true("positive", vmin > 0, "maximum_principle", 0.0, vmin);
  if (!o.out.empty()) {
    field_csv(V, o.out);
    r.info("out", o.out);
  }
}

void run_energy(const Options& o, RunReport& r) {
  const auto c = cylinder_run(o);
  r.params = c.q;
  const auto e = hh::derive_exponents(c.q);
  const bool critical = hh::compare_threshold(c.q.p, e.hardy_sobolev_crit, o.tol_threshold) == 0;
  hh::EnergyScheme scheme;
  if (o.scheme == "auto")
    scheme = critical ? hh::EnergyScheme::Conservative : hh::EnergyScheme::Nodal;
  else if (o.scheme == "nodal")
    scheme = hh::EnergyScheme::Nodal;
  else if (o.scheme == "conservative")
    scheme = hh::EnergyScheme::Conservative;
  else
    throw UsageError("--scheme must be auto, nodal or conservative");

  Solved coarse, fine;
  try {
    coarse = solve(c, c.ns, o);
    fine = solve(c, 2 * c.ns - 1, o);
  } catch (const hh::SolverError& err) {
    report_solver_error(c, err, o, r);
    return;
  }
  report_solve(c, coarse, o, r);
  const auto tc = hh::energy_trace(coarse.sol.field, coarse.fem, scheme);
  const auto tf = hh::energy_trace(fine.sol.field, fine.fem, scheme);
  const double budget = hh::refinement_budget(tc, tf) + hh::default_energy_budget(tc);
  const auto verdict = hh::monotonicity_verdict(tc, budget);
  r.info("scheme", hh::to_string(scheme));
  r.info("J1", e.J1);
  r.info("verdict", hh::to_string(verdict));
  r.info("refinement_budget", budget);
  r.info("energy_drift", hh::energy_drift(tc));
  if (critical) {
    r.check_le("energy_drift", hh::energy_drift(tc), "tol_drift", o.tol_drift);
  } else {
    const double mc = hh::derivative_identity_check(tc), mf = hh::derivative_identity_check(tf);
    r.check_le("derivative_identity_mismatch", mc, "tol_identity", o.tol_identity);
    r.info("derivative_identity_mismatch_refined", mf);
    double worst = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < tc.size(); ++i) {
      worst = std::max(worst, std::fabs(tc.dE_fd[i] - tc.dE_formula[i]));
      peak = std::max(peak, std::fabs(tc.dE_formula[i]));
    }
    r.info("derivative_identity_mismatch_vs_peak", worst / peak);
    int wrong = 0;
    for (double f : tc.dE_formula)
      if (!((e.J1 > 0 ? f : -f) >= 0)) ++wrong;
    r.check_true("dE_formula_sign_matches_J1", wrong == 0, "sign_rule", 0.0, wrong);
  }
  r.check_true("verdict_consistent_with_J1", verdict != hh::Monotonicity::Violated, "refinement_budget",
               budget, hh::to_string(verdict));
  if (!o.out.empty()) {
    write_file(o.out, hh::csv_table({"s", "E", "dE_formula", "dE_fd"}, {tc.s, tc.E, tc.dE_formula, tc.dE_fd}));
    r.info("out", o.out);
  }
}

// barrier --------------------------------------------------------------------------------------

void run_barrier(const Options& o, RunReport& r) {
  const auto q = params_of(o);
  if (o.levels < 2) throw UsageError("--levels must be at least 2");
  r.info("mu", o.mu);
  r.info("delta", o.delta);
  r.info("x", o.x);
  r.info("t", o.t);
  std::vector<double> hs, ri, rn;
  for (int k = 0; k < o.levels; ++k) {
    const double h = o.h / std::pow(2.0, k);
    const auto b = hh::verify_barrier_identity(o.mu, o.delta, o.x, o.t, q, h);
    hs.push_back(h);
    ri.push_back(b.interior);
    rn.push_back(b.neumann);
  }
  r.info("h", hs);
  r.info("interior_residuals", ri);
  r.info("neumann_residuals", rn);
  for (int k = 1; k < o.levels; ++k) {
    r.tolerances["tol_order"] = o.tol_order;
    const double oi = std::log2(ri[k - 1] / ri[k]), on = std::log2(rn[k - 1] / rn[k]);
    const std::string sfx = " step " + std::to_string(k);
    r.results.push_back({"interior_order" + sfx, oi, "tol_order", o.tol_order, oi >= o.tol_order});
    r.results.push_back({"neumann_order" + sfx, on, "tol_order", o.tol_order, on >= o.tol_order});
  }
  if (!o.out.empty()) {
    write_file(o.out, hh::csv_table({"h", "interior", "neumann"}, {hs, ri, rn}));
    r.info("out", o.out);
  }
}

// kelvin ---------------------------------------------------------------------------------------

void run_kelvin(const Options& o, RunReport& r) {
  const auto q = params_of(o);
  const auto km = hh::kelvin_exponent(q);
  r.info("vartheta", km.vartheta);
  r.info("mapped", hh::params_json(km.mapped));
  r.info("tau_source", hh::derive_exponents(q).tau);
  r.info("tau_mapped", hh::derive_exponents(km.mapped).tau);
  Json table = Json::array();
  bool all = true;
  for (const auto& eq : hh::verify_equivalences(q, o.tol_threshold)) {
    table.push_back({{"predicate", eq.predicate}, {"left", eq.left}, {"right", eq.right}});
    all = all && eq.agrees();
  }
  r.info("equivalences", table);
  r.check_true("equivalences_agree", all, "tol_threshold", o.tol_threshold);
  r.tolerances["tol_threshold"] = o.tol_threshold;
  try {
    r.check_le("constant_invariance", hh::constant_invariance(q), "tol_kelvin", o.tol_kelvin);
  } catch (const hh::PreconditionError& e) {
    r.info("constant_invariance", nullptr);
    r.info("constant_invariance_note", e.what());
  }
}

// suite ----------------------------------------------------------------------------------------

void run_suite(const Options& o, RunReport& r) {
  std::vector<int> ids;
  if (!o.only.empty())
    for (double v : parse_list(o.only, "--only")) {
      if (v < 1 || v > 10 || v != std::floor(v)) throw UsageError("--only takes criterion numbers 1..10");
      ids.push_back(static_cast<int>(v));
    }
  const auto all = hh::acceptance_criteria();
  for (int id = 1; id <= 10; ++id) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    const auto c = all[id - 1]();
    const std::string tag = "criterion_" + std::to_string(id);
    for (const auto& m : c.metrics) {
      const std::string name = tag + ": " + m.name;
      r.results.push_back({name, m.value, name, m.limit, m.pass()});
      r.tolerances[name] = m.limit;
    }
    r.results.push_back({tag + ": runtime_seconds", c.seconds, tag + "_time", c.time_limit, c.seconds <= c.time_limit});
    if (!c.error.empty()) r.results.push_back({tag + ": error", c.error, tag, std::nullopt, false});
    r.results.push_back({tag + ": " + c.title, c.pass(), tag, std::nullopt, c.pass()});
    r.tolerances[tag + "_time"] = c.time_limit;
    r.tolerances[tag] = 0.0;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for the fractional Hardy-Henon equation"};
  app.require_subcommand(1);
  Options o;

  auto add_params = [&](CLI::App* sc) {
    sc->add_option("--n", o.n, "dimension (integer >= 2)");
    sc->add_option("--sigma", o.sigma, "fractional order in (0,1)");
    sc->add_option("--alpha", o.alpha, "weight exponent");
    sc->add_option("--p", o.p, "nonlinearity exponent > 1");
    sc->add_option("--tol-threshold", o.tol_threshold, "relative band for threshold equalities");
  };
  auto add_output = [&](CLI::App* sc) {
    sc->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_out = [&](CLI::App* sc) { sc->add_option("--out", o.out, "CSV payload file"); };
  auto add_cylinder = [&](CLI::App* sc) {
    sc->add_option("--s-range", o.s_range, "s interval 'a,b' (use --s-range=-4,4)");
    sc->add_option("--grid", o.grid, "'ns,m': s-nodes and psi intervals");
    sc->add_option("--perturbation", o.perturbation, "none, left or mode");
    sc->add_option("--eps", o.eps, "perturbation size");
    sc->add_option("--config", o.config_file, "JSON file {params, s_range, grid, perturbation}");
    sc->add_option("--tol-solver", o.tol_solver, "Newton residual tolerance");
  };

  std::map<std::string, void (*)(const Options&, RunReport&)> commands;
  auto sub = [&](const char* name, const char* help, void (*fn)(const Options&, RunReport&)) {
    auto* sc = app.add_subcommand(name, help);
    commands[name] = fn;
    add_output(sc);
    return sc;
  };

  auto* c_classify = sub("classify", "regime label and theorem tags", run_classify);
  add_params(c_classify);
  auto* c_constants = sub("constants", "normalizing constants", run_constants);
  add_params(c_constants);
  auto* c_lemma = sub("verify-lemma", "fractional Laplacian of the singular solution", run_verify_lemma);
  add_params(c_lemma);
  c_lemma->add_option("--radii", o.radii, "comma list of radii");
  c_lemma->add_option("--tol-lemma", o.tol_lemma, "max relative error");
  auto* c_extend = sub("extend", "Poisson extension of the singular trace", run_extend);
  add_params(c_extend);
  add_out(c_extend);
  c_extend->add_option("--radii", o.radii, "comma list of radii");
  c_extend->add_option("--grid", o.grid, "psi intervals (last entry used)");
  c_extend->add_option("--tol-trace", o.tol_trace, "boundary value vs C");
  auto* c_solve = sub("solve-cylinder", "Newton solve on the truncated cylinder", run_solve_cylinder);
  add_params(c_solve);
  add_out(c_solve);
  add_cylinder(c_solve);
  auto* c_energy = sub("energy", "energy trace and monotonicity verdict", run_energy);
  add_params(c_energy);
  add_out(c_energy);
  add_cylinder(c_energy);
  c_energy->add_option("--scheme", o.scheme, "auto, nodal or conservative");
  c_energy->add_option("--tol-identity", o.tol_identity, "derivative identity mismatch");
  c_energy->add_option("--tol-drift", o.tol_drift, "energy drift when J1 = 0");
  auto* c_barrier = sub("barrier", "barrier function identities", run_barrier);
  add_params(c_barrier);
  add_out(c_barrier);
  c_barrier->add_option("--mu", o.mu);
  c_barrier->add_option("--delta", o.delta);
  c_barrier->add_option("--x", o.x);
  c_barrier->add_option("--t", o.t);
  c_barrier->add_option("--step", o.h, "coarsest finite-difference step");
  c_barrier->add_option("--levels", o.levels, "number of step halvings + 1");
  c_barrier->add_option("--tol-order", o.tol_order, "minimum observed order");
  auto* c_kelvin = sub("kelvin", "Kelvin exponent map and equivalences", run_kelvin);
  add_params(c_kelvin);
  c_kelvin->add_option("--tol-kelvin", o.tol_kelvin, "constant invariance");
  auto* c_suite = sub("suite", "acceptance battery", run_suite);
  c_suite->add_option("--only", o.only, "comma list of criterion numbers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << app.help();
    return kExitUsage;
  }

  const auto* chosen = app.get_subcommands().front();
  RunReport report;
  report.command = chosen->get_name();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (report.command != "suite") report.params = params_of(o);
    commands.at(report.command)(o, report);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << chosen->help();
    return kExitUsage;
  } catch (const hh::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  report.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << hh::serialize_report(report, o.format == "csv" ? hh::ReportFormat::Csv : hh::ReportFormat::Json);
  if (!report.all_pass()) {
    for (const auto& f : report.failures()) std::cerr << "tolerance violation: " << f << "\n";
    return kExitViolation;
  }
  return kExitOk;
}
