#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>

#include "hardy_henon/acceptance.hpp"

using namespace hh;

TEST(AngularFem, MassIsTheWeightIntegral) {
  // ∫_0^{π/2} sin^{1−2σ}ψ cos^{n−1}ψ dψ = B(1−σ, n/2)/2
  for (auto [n, s] : {std::pair{2, 0.3}, std::pair{3, 0.5}, std::pair{4, 0.75}, std::pair{3, 0.1}}) {
    const auto fem = build_angular_fem(n, s, graded_psi_grid(40, 2.0));
    double m = 0.0;
    for (double v : fem.mass) m += v;
    EXPECT_NEAR(m / (0.5 * boost::math::beta(1 - s, 0.5 * n)), 1.0, 1e-13);
  }
}

TEST(AngularFem, StiffnessOfLinearFunctionIsTheWeightIntegral) {
  const int n = 3;
  const double s = 0.35;
  const auto psi = graded_psi_grid(30, 2.0);
  const auto fem = build_angular_fem(n, s, psi);
  EXPECT_NEAR(fem.stiff_form(psi.data(), psi.data()) / (0.5 * boost::math::beta(1 - s, 0.5 * n)), 1.0, 1e-13);
  std::vector<double> c(psi.size(), 2.0);
  EXPECT_EQ(fem.stiff_form(c.data(), c.data()), 0.0);
}

TEST(AngularFem, RejectsBadGrids) {
  EXPECT_THROW(build_angular_fem(3, 0.5, {0.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(build_angular_fem(3, 0.5, {0.1, 0.5, 0.5 * std::numbers::pi}), std::invalid_argument);
  EXPECT_THROW(build_angular_fem(3, 0.5, {0.0, 0.9, 0.5, 0.5 * std::numbers::pi}), std::invalid_argument);
}

TEST(DiscreteProfile, CloseToExactProfileAndConverges) {
  const ProblemParams q{3, 0.5, 0, 2};
  double prev = 1.0;
  for (int m : {32, 64, 128}) {
    const auto psi = graded_psi_grid(m, 2.0);
    const auto fem = build_angular_fem(q.n, q.sigma, psi);
    const auto exact = exact_sphere_profile(q, psi).phi;
    const auto dp = discrete_sphere_profile(q, fem, exact);
    double err = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) err = std::max(err, std::fabs(dp.phi[j] - exact[j]) / exact[0]);
    EXPECT_LT(err, 1e-3);
    EXPECT_LT(err, prev);
    prev = err;
    EXPECT_LT(dp.residual_history.back(), 1e-12);
  }
}

TEST(CylinderSolver, ProfileDataGivesSIndependentSolution) {
  const ProblemParams q{3, 0.5, 0, 1.8};
  const auto cs = acceptance::cylinder_setup(q, 32);
  CylinderProblem pb;
  pb.s_min = -2;
  pb.s_max = 2;
  pb.ns = 41;
  pb.psi = cs.psi;
  pb.left = cs.phi;
  pb.right = cs.phi;
  const auto sol = solve_cylinder_pde(q, pb);
  const auto exact = exact_sphere_profile(q, cs.psi).phi;
  for (int i = 0; i < pb.ns; ++i)
    for (std::size_t j = 0; j < cs.psi.size(); ++j) {
      EXPECT_NEAR(sol.field.at(i, j), cs.phi[j], 1e-12 * cs.phi[0]);
      EXPECT_NEAR(sol.field.at(i, j), exact[j], 1e-3 * exact[0]);
    }
}

TEST(CylinderSolver, PerturbedSolutionStaysPositiveAndConverges) {
  const ProblemParams q{3, 0.5, -0.5, 1.7};
  const auto cs = acceptance::cylinder_setup(q, 32);
  const auto pb = perturbed_problem(q, cs.psi, cs.phi, 0.05, -3, 3, 61, Perturbation::LeftScaling);
  for (std::size_t j = 0; j < cs.psi.size(); ++j) {
    EXPECT_NEAR(pb.left[j], 1.05 * cs.phi[j], 1e-15);
    EXPECT_EQ(pb.right[j], cs.phi[j]);
  }
  const auto sol = solve_cylinder_pde(q, pb);
  EXPECT_LT(sol.residual_history.back(), 1e-12);
  EXPECT_EQ(sol.projections, 0);
  for (double v : sol.field.values) EXPECT_GT(v, 0.0);
  // the perturbation decays into the interior
  const auto mid = sol.field.row(30);
  EXPECT_LT(std::fabs(mid[0] - cs.phi[0]), 0.05 * cs.phi[0]);
}

TEST(CylinderSolver, ReportsHistoryWhenNewtonCannotFinish) {
  const ProblemParams q{3, 0.5, 0, 1.8};
  const auto cs = acceptance::cylinder_setup(q, 16);
  const auto pb = perturbed_problem(q, cs.psi, cs.phi, 0.05, -2, 2, 21, Perturbation::LeftScaling);
  SolverOptions opt;
  opt.max_iterations = 1;
  opt.tolerance = 1e-15;
  try {
    solve_cylinder_pde(q, pb, opt);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_FALSE(e.residual_history().empty());
  }
}

TEST(CylinderSolver, RejectsNonPositiveBoundaryData) {
  const ProblemParams q{3, 0.5, 0, 1.8};
  const auto cs = acceptance::cylinder_setup(q, 16);
  auto pb = perturbed_problem(q, cs.psi, cs.phi, 0.05, -2, 2, 21, Perturbation::LeftScaling);
  pb.left[3] = -1.0;
  EXPECT_ANY_THROW(solve_cylinder_pde(q, pb));
}

TEST(AngularMode, ExponentSolvesCharacteristicEquation) {
  for (const auto& q : {ProblemParams{3, 0.5, 0, 1.6}, ProblemParams{3, 0.5, 0, 1.8}, ProblemParams{3, 0.5, -0.9, 1.9}}) {
    const auto cs = acceptance::cylinder_setup(q, 64);
    const auto md = lowest_angular_mode(q, cs.fem, cs.phi);
    const double J1 = derive_exponents(q).J1;
    // μ² − J₁μ − λ = 0 with μ = μ_re + iω
    const double re = md.mu_re * md.mu_re - md.mu_im * md.mu_im - J1 * md.mu_re - md.lambda;
    const double im = 2 * md.mu_re * md.mu_im - J1 * md.mu_im;
    EXPECT_NEAR(re, 0.0, 1e-12);
    EXPECT_NEAR(im, 0.0, 1e-12);
    EXPECT_LT(md.lambda, 0.0);
    for (double w : md.shape) EXPECT_GE(w, 0.0);
  }
}

TEST(AngularMode, RealAndOscillatoryCases) {
  const auto c1 = acceptance::cylinder_setup({3, 0.5, 0, 1.6}, 64);
  EXPECT_FALSE(lowest_angular_mode({3, 0.5, 0, 1.6}, c1.fem, c1.phi).oscillatory());
  const auto c2 = acceptance::cylinder_setup({3, 0.5, 0, 1.8}, 64);
  EXPECT_TRUE(lowest_angular_mode({3, 0.5, 0, 1.8}, c2.fem, c2.phi).oscillatory());
}

TEST(ResonanceMargin, WithinHalfAndSmallNearResonance) {
  const ProblemParams q{3, 0.5, -0.5, 1.5};
  const auto cs = acceptance::cylinder_setup(q, 64);
  const double m8 = resonance_margin(q, cs.fem, cs.phi, 8.0), m6 = resonance_margin(q, cs.fem, cs.phi, 6.0);
  EXPECT_GE(m8, 0.0);
  EXPECT_LE(m6, 0.5);
  EXPECT_LT(m8, 0.15);
  EXPECT_GT(m6, 0.3);
}

TEST(DiscreteGradient, MatchesPowerDifferenceQuotient) {
  const double p = 1.7;
  const auto g = detail::discrete_gradient(1.3, 0.8, p);
  EXPECT_NEAR(g.F, (std::pow(1.3, p + 1) - std::pow(0.8, p + 1)) / ((p + 1) * 0.5), 1e-14);
  const auto d = detail::discrete_gradient(0.9, 0.9, p);
  EXPECT_NEAR(d.F, std::pow(0.9, p), 1e-14);
}
