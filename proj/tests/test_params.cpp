#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hardy_henon/params.hpp"

using namespace hh;

TEST(ValidateParams, AcceptsTypicalValues) {
  const auto q = validate_params(3, 0.5, 0.0, 2.0);
  EXPECT_EQ(q.n, 3);
  EXPECT_DOUBLE_EQ(q.sigma, 0.5);
}

TEST(ValidateParams, RejectsEachInvariantWithItsKind) {
  auto kind_of = [](double n, double s, double a, double p) {
    try {
      validate_params(n, s, a, p);
    } catch (const ParamError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error for " << n << " " << s << " " << a << " " << p;
    return ParamErrorKind::NotFinite;
  };
  EXPECT_EQ(kind_of(3.5, 0.5, 0, 2), ParamErrorKind::DimensionNotInteger);
  EXPECT_EQ(kind_of(1, 0.5, 0, 2), ParamErrorKind::DimensionBelowTwo);
  EXPECT_EQ(kind_of(3, 0.0, 0, 2), ParamErrorKind::SigmaOutOfRange);
  EXPECT_EQ(kind_of(3, 1.0, 0, 2), ParamErrorKind::SigmaOutOfRange);
  EXPECT_EQ(kind_of(3, 0.5, 0, 1.0), ParamErrorKind::ExponentNotAboveOne);
  EXPECT_EQ(kind_of(3, 0.5, NAN, 2), ParamErrorKind::NotFinite);
  EXPECT_EQ(kind_of(3, 0.5, 0, INFINITY), ParamErrorKind::NotFinite);
}

TEST(DeriveExponents, WorkedExample) {
  const auto e = derive_exponents({3, 0.5, 0, 1.8});
  EXPECT_NEAR(e.beta, 1.25, 1e-15);
  EXPECT_NEAR(e.vartheta, -0.4, 1e-15);
  EXPECT_NEAR(e.tau, -0.25, 1e-15);
  EXPECT_NEAR(e.serrin, 1.5, 1e-15);
  EXPECT_NEAR(e.sobolev_crit, 2.0, 1e-15);
  EXPECT_NEAR(e.hardy_sobolev_crit, 2.0, 1e-15);
  EXPECT_NEAR(e.J1, 2.0 / 0.8 * (2.0 - 1.8), 1e-15);
  EXPECT_NEAR(e.J2, 1.25 * 0.75, 1e-15);
}

TEST(DeriveExponents, J1VanishesAtHardySobolevExponent) {
  for (int n : {2, 3, 5})
    for (double s : {0.2, 0.5, 0.8})
      for (double a : {-0.3, 0.0, 0.7}) {
        const double ps = (n + 2 * s + 2 * a) / (n - 2 * s);
        if (ps <= 1) continue;
        EXPECT_NEAR(derive_exponents({n, s, a, ps}).J1, 0.0, 1e-14);
      }
}

TEST(DeriveExponents, RandomDrawBiconditionals) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dn(2, 9);
  std::uniform_real_distribution<double> ds(0.01, 0.99), da(-3, 3), dp(1.01, 10);
  for (int k = 0; k < 100000; ++k) {
    const ProblemParams q{dn(rng), ds(rng), da(rng), dp(rng)};
    const auto e = derive_exponents(q);
    ASSERT_EQ(e.beta > 0, q.alpha > -2 * q.sigma);
    ASSERT_EQ(e.beta < q.n - 2 * q.sigma, q.p > e.serrin);
  }
}

TEST(CompareThreshold, DetectsDecimalEquality) {
  EXPECT_EQ(compare_threshold(0.1 + 0.2, 0.3), 0);
  EXPECT_EQ(compare_threshold(1.0, 1.0 + 1e-9), -1);
  EXPECT_EQ(compare_threshold(2.0, 1.0), 1);
  EXPECT_EQ(compare_threshold(1e6, 1e6 * (1 + 1e-13)), 0);
}

TEST(ClassifyRegime, AlphaBelowMinusTwoSigmaForcesNonexistence) {
  for (double p : {1.2, 2.0, 5.0}) {
    const auto v = classify_regime({3, 0.5, -1.5, p});
    EXPECT_EQ(v.label, RegimeLabel::NonexistenceAlphaBelowMinus2Sigma);
  }
  EXPECT_TRUE(classify_regime({3, 0.5, -1.5, 1.9}).has(TheoremTag::Cor2_1));
}

TEST(ClassifyRegime, CriticalPointIsLabelledWithThresholds) {
  const auto v = classify_regime({3, 0.5, 0, 2});
  EXPECT_EQ(v.label, RegimeLabel::HardySobolevCritical);
  EXPECT_FALSE(v.has(TheoremTag::Thm1_1));
  // p = 2 is also the Sobolev exponent, so hypotheses requiring p below it fail
  EXPECT_FALSE(v.has(TheoremTag::Thm1_2));
  const auto& th = v.thresholds_hit;
  EXPECT_NE(std::find(th.begin(), th.end(), "p=hardy_sobolev_crit"), th.end());
  EXPECT_NE(std::find(th.begin(), th.end(), "p=sobolev_crit"), th.end());
}

TEST(ClassifyRegime, BelowSerrinIsExteriorTriviality) {
  const auto v = classify_regime({3, 0.5, 0, 1.2});
  EXPECT_EQ(v.label, RegimeLabel::ExteriorTriviality);
  EXPECT_TRUE(v.has(TheoremTag::Thm1_3_1));
}

TEST(ClassifyRegime, SubcriticalLaneEmdenCarriesAllTags) {
  const auto v = classify_regime({3, 0.5, 0, 1.8});
  EXPECT_EQ(v.label, RegimeLabel::Subcritical);
  for (auto t : {TheoremTag::Thm1_1, TheoremTag::Thm1_2, TheoremTag::Thm1_3_2, TheoremTag::Thm1_4, TheoremTag::Cor1_1})
    EXPECT_TRUE(v.has(t)) << to_string(t);
  EXPECT_DOUBLE_EQ(v.rate_fast, 2.0);
  EXPECT_DOUBLE_EQ(v.rate_singular, 1.25);
}

TEST(ClassifyRegime, AboveSobolevHasNoTags) {
  const auto v = classify_regime({3, 0.5, -0.2, 2.5});
  EXPECT_TRUE(v.tags.empty());
  EXPECT_FALSE(v.notes.empty());
}

TEST(ClassifyRegime, TotalOverRandomDraws) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dn(2, 9);
  std::uniform_real_distribution<double> ds(0.01, 0.99), da(-3, 3), dp(1.01, 10);
  for (int k = 0; k < 20000; ++k) {
    const ProblemParams q{dn(rng), ds(rng), da(rng), dp(rng)};
    const auto v = classify_regime(q);
    const int l = static_cast<int>(v.label);
    ASSERT_GE(l, 0);
    ASSERT_LE(l, static_cast<int>(RegimeLabel::Supercritical));
    if (q.alpha < -2 * q.sigma) ASSERT_EQ(v.label, RegimeLabel::NonexistenceAlphaBelowMinus2Sigma);
  }
}
