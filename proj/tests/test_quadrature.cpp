#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>

#include "hardy_henon/quadrature.hpp"

using namespace hh;

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
  for (int n : {1, 2, 5, 16, 24}) {
    const Rule& g = gauss_legendre(n);
    ASSERT_EQ(g.size(), static_cast<std::size_t>(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(s, exact, 1e-14) << n << " " << k;
    }
  }
}

TEST(GaussLegendre, IntegratesSmoothFunction) {
  EXPECT_NEAR(integrate_gl([](double x) { return std::exp(x); }, 0.0, 1.0, 16), std::expm1(1.0), 1e-15);
}

TEST(GaussJacobi, MomentsMatchBetaFunction) {
  for (auto [a, b] : {std::pair{0.0, 0.0}, std::pair{-0.5, 0.3}, std::pair{0.8, -0.9}, std::pair{0.0, 0.4}}) {
    const Rule r = gauss_jacobi(12, a, b);
    // ∫_{-1}^{1} (1−x)^a (1+x)^b ((1+x)/2)^k dx = 2^{a+b+1} B(a+1, b+k+1)
    for (int k = 0; k < 20; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(0.5 * (1 + r.nodes[i]), k);
      const double ref = std::pow(2.0, a + b + 1) * boost::math::beta(a + 1, b + k + 1);
      EXPECT_NEAR(s / ref, 1.0, 1e-13) << a << " " << b << " " << k;
    }
  }
}

TEST(GaussJacobi, LeftWeightOnUnitInterval) {
  for (double c : {-0.8, -0.3, 0.0, 0.5}) {
    const Rule r = gauss_jacobi_left(10, c);
    for (int k = 0; k < 20; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      EXPECT_NEAR(s * (c + k + 1), 1.0, 1e-13);
    }
  }
}

TEST(GaussJacobi, RejectsBadExponents) {
  EXPECT_THROW(gauss_jacobi(4, -1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(gauss_jacobi(0, 0.0, 0.0), std::invalid_argument);
}

TEST(GeometricPoints, EndpointsAndRatio) {
  const auto p = geometric_points(0.25, 4.0, 4);
  ASSERT_EQ(p.size(), 5u);
  EXPECT_EQ(p.front(), 0.25);
  EXPECT_EQ(p.back(), 4.0);
  for (std::size_t i = 1; i < p.size(); ++i) EXPECT_NEAR(p[i] / p[i - 1], 2.0, 1e-14);
}

TEST(FitPowers, RecoversCoefficientsOfFractionalPowers) {
  std::vector<double> t, y;
  const std::vector<double> ex = {0.0, 0.6, 2.0};
  for (int k = 0; k < 9; ++k) {
    const double x = 0.05 * std::pow(0.5, k);
    t.push_back(x);
    y.push_back(1.5 - 2.0 * std::pow(x, 0.6) + 0.25 * x * x);
  }
  const auto fit = fit_powers(t, y, ex);
  EXPECT_NEAR(fit.coeffs[0], 1.5, 1e-12);
  EXPECT_NEAR(fit.coeffs[1], -2.0, 1e-10);
  EXPECT_NEAR(fit.coeffs[2], 0.25, 1e-6);
  EXPECT_LT(fit.rms_residual, 1e-13);
}

TEST(FitPowers, NeedsEnoughSamples) {
  EXPECT_THROW(fit_powers({1.0}, {1.0}, {0.0, 1.0}), std::invalid_argument);
}
