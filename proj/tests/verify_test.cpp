#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "svlpn/verify.hpp"

namespace svlpn {
namespace {

SecretKey key(const std::string& bits) {
  SecretKey sk;
  sk.bits = BitVector::from_string(bits);
  return sk;
}

TEST(ChiSquare, HandComputedValue) {
  const auto t = chi_square_gof("coin", {60, 40}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(t.statistic, 4.0);
  EXPECT_EQ(t.dof, 1);
  EXPECT_EQ(t.total, 100u);
  EXPECT_DOUBLE_EQ(t.min_expected, 50.0);
  EXPECT_NEAR(t.p_value, 0.0455, 5e-4);
}

TEST(ChiSquare, PerfectFitHasHighPValue) {
  const auto t = chi_square_gof("fit", {250, 250, 250, 250}, {0.25, 0.25, 0.25, 0.25});
  EXPECT_DOUBLE_EQ(t.statistic, 0.0);
  EXPECT_DOUBLE_EQ(t.p_value, 1.0);
}

TEST(ChiSquare, Preconditions) {
  EXPECT_THROW(chi_square_gof("x", {10}, {1.0}), std::invalid_argument);
  EXPECT_THROW(chi_square_gof("x", {10, 10}, {0.5}), std::invalid_argument);
  EXPECT_THROW(chi_square_gof("x", {0, 0}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(chi_square_gof("x", {3, 997}, {0.001, 0.999}), std::invalid_argument);
}

TEST(PmfDigest, ContentSensitive) {
  const RationalPmf a = RationalPmf::uniform(2);
  const RationalPmf b(2, {Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)});
  EXPECT_EQ(pmf_digest(a), pmf_digest(b));
  EXPECT_NE(pmf_digest(a), pmf_digest(RationalPmf::uniform(3)));
  EXPECT_NE(pmf_digest(a),
            pmf_digest(RationalPmf(2, {Rational(1, 2), Rational(1, 4), Rational(1, 8),
                                       Rational(1, 8)})));
}

TEST(ExactCheck, PassesOnSvSources) {
  RandomStream rng(301);
  for (int k = 1; k <= 3; ++k) {
    const Rational delta = pow2(-(k + 4));
    const RationalPmf p = random_sv_pmf(k, delta, rng);
    const auto r = check_reduction_exact(2, p, delta, key("10"));
    EXPECT_TRUE(r.pass) << "k=" << k;
    EXPECT_EQ(*r.tv_exact, Rational(0));
    EXPECT_EQ(r.mode, "exact");
    EXPECT_EQ(r.k, k);
    EXPECT_EQ(r.p_digest, pmf_digest(p));
  }
}

TEST(ExactCheck, NegativeControlFails) {
  RandomStream rng(302);
  const Rational delta(1, 64);
  RationalPmf p = random_sv_pmf(2, delta, rng);
  while (sv_parameter(p) == 0) p = random_sv_pmf(2, delta, rng);
  const auto r =
      check_reduction_exact(1, p, delta, key("1"), {input_bias(2, delta) / 2});
  EXPECT_FALSE(r.pass);
  EXPECT_GT(*r.tv_exact, Rational(0));
}

TEST(ExactCheck, UniformSourceIgnoresInputLevel) {
  // Uniform noise makes every step table uniform, so the output is the
  // uniform batch law no matter what the inputs carry; the negative
  // control is only meaningful for sources with a nonzero SV parameter.
  const Rational delta(1, 64);
  const auto r = check_reduction_exact(1, RationalPmf::uniform(2), delta, key("1"),
                                       {input_bias(2, delta) / 2});
  EXPECT_TRUE(r.pass);
}

TEST(StatisticalCheck, PassesAndReproduces) {
  const Rational delta(1, 128);
  RandomStream prng(303);
  const RationalPmf p = random_sv_pmf(3, delta, prng);
  const SecretKey sk = key("1011001110100101");

  RandomStream a(404);
  const auto ra = check_reduction_statistical(16, p, delta, sk, 20000, 1e-3, a);
  EXPECT_TRUE(ra.pass);
  EXPECT_EQ(ra.chi_square.size(), 4u);
  EXPECT_EQ(ra.chi_square[0].name, "residual_joint");
  EXPECT_EQ(ra.chi_square[1].name, "u_uniform_1");
  EXPECT_DOUBLE_EQ(ra.bonferroni_threshold, 1e-3 / 4);
  EXPECT_EQ(ra.seed, 404u);
  EXPECT_LT(*ra.tv_empirical, 0.05);

  RandomStream b(404);
  const auto rb = check_reduction_statistical(16, p, delta, sk, 20000, 1e-3, b);
  for (std::size_t i = 0; i < ra.chi_square.size(); ++i) {
    EXPECT_DOUBLE_EQ(ra.chi_square[i].statistic, rb.chi_square[i].statistic);
    EXPECT_DOUBLE_EQ(ra.chi_square[i].p_value, rb.chi_square[i].p_value);
  }
  EXPECT_DOUBLE_EQ(*ra.tv_empirical, *rb.tv_empirical);

  RandomStream c(405);
  const auto rc = check_reduction_statistical(16, p, delta, sk, 20000, 1e-3, c);
  EXPECT_NE(ra.chi_square[0].statistic, rc.chi_square[0].statistic);
}

TEST(StatisticalCheck, Preconditions) {
  const RationalPmf p = RationalPmf::uniform(2);
  const Rational delta(1, 64);
  RandomStream rng(1);
  EXPECT_THROW(check_reduction_statistical(4, p, delta, key("1010"), 10, 1e-3, rng),
               std::invalid_argument);
  EXPECT_THROW(check_reduction_statistical(4, p, delta, key("1010"), 1000, 0.0, rng),
               std::invalid_argument);
  EXPECT_THROW(check_reduction_statistical(4, p, delta, key("10"), 1000, 1e-3, rng),
               std::invalid_argument);
  EXPECT_EQ(rng.position(), 0u);  // all rejections happen before any draw
}

TEST(StatisticalCheck, DetectsMismatchedTarget) {
  // Power probe for the histogram test: batches drawn from the true joint
  // law must be rejected against a target 1/8 away in TV with 10^4 draws.
  const RationalPmf p(3, {Rational(1, 4), Rational(1, 16), Rational(1, 16), Rational(1, 8),
                          Rational(1, 8), Rational(1, 8), Rational(1, 8), Rational(1, 8)});
  const RationalPmf wrong = RationalPmf::uniform(3);
  EXPECT_EQ(tv_distance(p, wrong), Rational(1, 8));

  const SecretKey sk = key("10110100");
  RandomStream rng(406);
  std::vector<std::uint64_t> joint(8, 0);
  for (int b = 0; b < 10000; ++b)
    ++joint[residuals(sample_batch_lpn(8, p, sk, rng), sk).index()];
  const auto good = chi_square_gof("against_p", joint, to_float(p).table());
  const auto bad = chi_square_gof("against_wrong", joint, to_float(wrong).table());
  EXPECT_GT(good.p_value, 1e-6);
  EXPECT_LT(bad.p_value, 1e-6);
}

TEST(InnerProductMatrix, AllIdentitiesHold) {
  for (int k = 1; k <= 6; ++k) {
    const auto r = check_lemma2(k);
    EXPECT_TRUE(r.pass) << "k=" << k;
    EXPECT_TRUE(r.row_sums_ok);
    EXPECT_TRUE(r.square_ok);
    EXPECT_TRUE(r.inverse_ok);
    EXPECT_TRUE(r.meets_bound);
    EXPECT_EQ(r.size, (std::size_t{1} << k) - 1);
    EXPECT_EQ(r.bound_squared, pow2(k - 2));
    EXPECT_NE(r.implication.find("sigma_min"), std::string::npos);
  }
}

TEST(InnerProductMatrix, SpectralEdgeCases) {
  const auto k1 = check_lemma2(1);
  EXPECT_EQ(k1.sigma_min_squared, Rational(1));
  EXPECT_EQ(k1.bound_squared, Rational(1, 2));
  EXPECT_FALSE(k1.equality);  // strictly above the bound

  const auto k2 = check_lemma2(2);
  EXPECT_EQ(k2.sigma_min_squared, Rational(1));
  EXPECT_TRUE(k2.equality);
  const auto k5 = check_lemma2(5);
  EXPECT_EQ(k5.sigma_min_squared, Rational(8));
  EXPECT_TRUE(k5.equality);
}

TEST(InnerProductMatrix, Guard) {
  EXPECT_THROW(check_lemma2(0), std::invalid_argument);
  EXPECT_THROW(check_lemma2(13), std::invalid_argument);
}

TEST(Counterexample, ExactValuesAtOneOver64) {
  const auto r = counterexample_report(Rational(1, 64));
  EXPECT_EQ(r.eta, Rational(1, 8));
  EXPECT_EQ(r.sv_param, Rational(1, 32));
  EXPECT_EQ(r.tv_xor, Rational(1, 32));
  EXPECT_EQ(r.implied_min_product_bias, Rational(1, 8));
  EXPECT_TRUE(r.tv_matches_2delta);
  // Marginals stay perfectly fair even though the pair is detectable.
  EXPECT_EQ(marginal_prefix(r.p, 1), RationalPmf::uniform(1));
  EXPECT_EQ(pushforward_xor(r.p, BitVector::of({0, 1})), RationalPmf::uniform(1));
}

TEST(Counterexample, GridOfSquareDeltas) {
  for (int j = 1; j <= 7; ++j) {
    const Rational delta(j * j, 1024);
    const auto r = counterexample_report(delta);
    EXPECT_EQ(r.eta, Rational(j, 32));
    EXPECT_EQ(r.tv_xor, 2 * delta);
    EXPECT_EQ(r.implied_min_product_bias, r.eta);
    EXPECT_TRUE(r.tv_matches_2delta);
    // The gap: the source sits at SV level 2 delta, any product source
    // explaining the XOR needs per-bit bias sqrt(delta) >> delta.
    EXPECT_EQ(r.sv_param, 2 * delta);
    EXPECT_GT(r.implied_min_product_bias, r.sv_param);
  }
}

TEST(Counterexample, Preconditions) {
  EXPECT_THROW(counterexample_report(Rational(1, 16)), std::invalid_argument);
  EXPECT_THROW(counterexample_report(Rational(0)), std::invalid_argument);
  try {
    counterexample_report(Rational(1, 48));
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("square"), std::string::npos);
  }
}

}  // namespace
}  // namespace svlpn
