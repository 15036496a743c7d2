#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "svlpn/dist.hpp"

namespace svlpn {
namespace {

TEST(Pmf, ConstructionValidation) {
  EXPECT_NO_THROW(RationalPmf(1, {Rational(1, 4), Rational(3, 4)}));
  EXPECT_THROW(RationalPmf(1, {Rational(1)}), std::invalid_argument);  // wrong size
  EXPECT_THROW(RationalPmf(1, {Rational(-1, 4), Rational(5, 4)}), std::invalid_argument);
  EXPECT_THROW(RationalPmf(1, {Rational(1, 4), Rational(1, 4)}), std::invalid_argument);
  EXPECT_THROW(RationalPmf(-1, {}), std::invalid_argument);
}

TEST(Pmf, FloatMassTolerance) {
  EXPECT_NO_THROW(FloatPmf(1, {0.25, 0.75 + 1e-13}));
  EXPECT_THROW(FloatPmf(1, {0.25, 0.75 + 1e-9}), std::invalid_argument);
}

TEST(Pmf, Constructors) {
  const RationalPmf u = RationalPmf::uniform(2);
  for (std::size_t z = 0; z < 4; ++z) EXPECT_EQ(u.at(z), Rational(1, 4));

  const RationalPmf pm = RationalPmf::point_mass(2, 3);
  EXPECT_EQ(pm.at(3), Rational(1));
  EXPECT_EQ(pm.at(0), Rational(0));

  const RationalPmf b = RationalPmf::bernoulli(Rational(1, 3));
  EXPECT_EQ(b.at(0), Rational(2, 3));
  EXPECT_EQ(b.at(1), Rational(1, 3));

  // index bit i corresponds to coordinate i+1
  const RationalPmf prod =
      RationalPmf::product_bernoulli({Rational(1, 2), Rational(1, 4)});
  EXPECT_EQ(prod.at(0), Rational(3, 8));   // (0,0)
  EXPECT_EQ(prod.at(1), Rational(3, 8));   // (1,0)
  EXPECT_EQ(prod.at(2), Rational(1, 8));   // (0,1)
  EXPECT_EQ(prod.at(3), Rational(1, 8));   // (1,1)
}

TEST(Pmf, PrefixMass) {
  const RationalPmf p =
      RationalPmf(2, {Rational(1, 8), Rational(1, 4), Rational(1, 2), Rational(1, 8)});
  EXPECT_EQ(p.prefix_mass(BitVector(0)), Rational(1));
  EXPECT_EQ(p.prefix_mass(BitVector::from_string("0")), Rational(5, 8));
  EXPECT_EQ(p.prefix_mass(BitVector::from_string("1")), Rational(3, 8));
  EXPECT_EQ(p.prefix_mass(BitVector::from_string("01")), Rational(1, 2));
}

TEST(ConditionalBit, KnownValues) {
  const RationalPmf p =
      RationalPmf(2, {Rational(1, 8), Rational(1, 4), Rational(1, 2), Rational(1, 8)});
  EXPECT_EQ(conditional_bit(p, 1, BitVector(0)), Rational(3, 8));
  EXPECT_EQ(conditional_bit(p, 2, BitVector::from_string("0")), Rational(4, 5));
  EXPECT_EQ(conditional_bit(p, 2, BitVector::from_string("1")), Rational(1, 3));
  EXPECT_THROW(conditional_bit(p, 3, BitVector::from_string("00")), std::invalid_argument);
  EXPECT_THROW(conditional_bit(p, 2, BitVector(0)), std::invalid_argument);
}

TEST(ConditionalBit, ZeroMassPrefixIsAnError) {
  const RationalPmf pm = RationalPmf::point_mass(2, 0);
  try {
    conditional_bit(pm, 2, BitVector::from_string("1"));
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("support"), std::string::npos);
  }
}

// Chain rule p(z) = prod_i P[Z_i = z_i | z_{<i}] over full-support tables.
TEST(Dist, ChainRuleExhaustive) {
  RandomStream rng(314);
  for (int k = 1; k <= 4; ++k) {
    const RationalPmf p = random_sv_pmf(k, Rational(1, 4), rng);
    for (std::uint64_t z = 0; z < p.size(); ++z)
      EXPECT_EQ(chain_rule_mass(p, decode(z, k)), p.at(z));
  }
}

TEST(SvParameter, ProductBernoulliIsMaxBias) {
  // Exhaustive over a dyadic grid of per-coordinate biases.
  const std::vector<Rational> grid = {Rational(0), Rational(1, 8), Rational(-1, 8),
                                      Rational(1, 4), Rational(-3, 8)};
  for (const Rational& d1 : grid)
    for (const Rational& d2 : grid)
      for (const Rational& d3 : grid) {
        const RationalPmf p = RationalPmf::product_bernoulli(
            {half<Rational>() - d1, half<Rational>() - d2, half<Rational>() - d3});
        const Rational expect =
            std::max({rational_abs(d1), rational_abs(d2), rational_abs(d3)});
        EXPECT_EQ(sv_parameter(p), expect);
      }
}

TEST(SvParameter, UniformAndPointMass) {
  EXPECT_EQ(sv_parameter(RationalPmf::uniform(3)), Rational(0));
  // A point mass has conditionals 0/1 along its support path.
  EXPECT_EQ(sv_parameter(RationalPmf::point_mass(2, 2)), Rational(1, 2));
}

TEST(SvParameter, CertificateWitnessIsConsistent) {
  RandomStream rng(2718);
  const RationalPmf p = random_sv_pmf(3, Rational(1, 8), rng);
  const auto w = sv_certificate(p);
  EXPECT_EQ(conditional_bit(p, w.index, w.prefix), w.conditional);
  const Rational diff = w.conditional - half<Rational>();
  EXPECT_EQ(rational_abs(diff), w.delta_star);
  EXPECT_LE(w.delta_star, Rational(1, 8));
}

TEST(Dist, ConvolveBernoulliMatchesEnumeration) {
  // Brute force: law of X xor Y for independent X, Y.
  for (int j1 = -16; j1 <= 16; ++j1)
    for (int j2 = -16; j2 <= 16; ++j2) {
      const Rational d1(j1, 64), d2(j2, 64);
      const RationalPmf prod = RationalPmf::product_bernoulli(
          {half<Rational>() - d1, half<Rational>() - d2});
      const RationalPmf x = pushforward_xor(prod, BitVector::of({1, 1}));
      const Rational combined = convolve_bernoulli(d1, d2);
      EXPECT_EQ(x.at(1), half<Rational>() - combined);
    }
  EXPECT_THROW(convolve_bernoulli(Rational(3, 4), Rational(1, 4)), std::invalid_argument);
}

TEST(TvDistance, MetricProperties) {
  RandomStream rng(99);
  const RationalPmf a = random_sv_pmf(3, Rational(1, 4), rng);
  const RationalPmf b = random_sv_pmf(3, Rational(1, 4), rng);
  const RationalPmf c = random_sv_pmf(3, Rational(1, 4), rng);
  EXPECT_EQ(tv_distance(a, a), Rational(0));
  EXPECT_EQ(tv_distance(a, b), tv_distance(b, a));
  EXPECT_LE(tv_distance(a, c), tv_distance(a, b) + tv_distance(b, c));
  EXPECT_EQ(tv_distance(RationalPmf::point_mass(2, 0), RationalPmf::point_mass(2, 3)),
            Rational(1));
  EXPECT_THROW(tv_distance(a, RationalPmf::uniform(2)), std::invalid_argument);
}

TEST(Dist, PushforwardXor) {
  const RationalPmf p =
      RationalPmf(2, {Rational(1, 8), Rational(1, 4), Rational(1, 2), Rational(1, 8)});
  // weights (1,0): law of Z_1
  EXPECT_EQ(pushforward_xor(p, BitVector::of({1, 0})).at(1), Rational(3, 8));
  // weights (1,1): P[Z_1 xor Z_2 = 1] = 1/4 + 1/2
  EXPECT_EQ(pushforward_xor(p, BitVector::of({1, 1})).at(1), Rational(3, 4));
  EXPECT_EQ(pushforward_xor(p, BitVector::of({0, 0})).at(1), Rational(0));
}

TEST(Dist, SharedCoinTable) {
  const Rational eta(1, 8);
  const RationalPmf p = shared_coin_pmf(2, eta);
  const Rational corner = Rational(1, 4) + eta * eta;  // 1/4 + eta^2
  const Rational edge = Rational(1, 4) - eta * eta;
  EXPECT_EQ(p.at(0), corner);
  EXPECT_EQ(p.at(1), edge);
  EXPECT_EQ(p.at(2), edge);
  EXPECT_EQ(p.at(3), corner);
  // Single coordinates are uniform; the pair is not.
  EXPECT_EQ(pushforward_xor(p, BitVector::of({1, 0})).at(1), half<Rational>());
  EXPECT_EQ(pushforward_xor(p, BitVector::of({0, 1})).at(1), half<Rational>());
  EXPECT_EQ(sv_parameter(p), 2 * eta * eta);
}

TEST(Dist, RandomSvPmf) {
  RandomStream rng(12);
  const Rational delta(1, 64);
  for (int rep = 0; rep < 10; ++rep) {
    const RationalPmf p = random_sv_pmf(3, delta, rng);
    EXPECT_LE(sv_parameter(p), delta);
    for (std::uint64_t z = 0; z < p.size(); ++z) EXPECT_GT(p.at(z), Rational(0));
  }
  RandomStream r1(5), r2(5);
  EXPECT_EQ(random_sv_pmf(2, delta, r1), random_sv_pmf(2, delta, r2));
}

TEST(Dist, MarginalPrefix) {
  const RationalPmf p =
      RationalPmf(2, {Rational(1, 8), Rational(1, 4), Rational(1, 2), Rational(1, 8)});
  const RationalPmf m = marginal_prefix(p, 1);
  EXPECT_EQ(m.at(0), Rational(5, 8));
  EXPECT_EQ(m.at(1), Rational(3, 8));
  EXPECT_EQ(marginal_prefix(p, 2), p);
}

TEST(Dist, FloatExactRoundTrip) {
  const RationalPmf p =
      RationalPmf(2, {Rational(1, 8), Rational(1, 4), Rational(1, 2), Rational(1, 8)});
  // Dyadic entries survive the float round trip unchanged.
  EXPECT_EQ(to_exact(to_float(p)), p);
  // Non-dyadic entries come back close and still exactly mass 1.
  const RationalPmf q = RationalPmf(1, {Rational(1, 3), Rational(2, 3)});
  const RationalPmf back = to_exact(to_float(q));
  Rational sum(0);
  for (std::size_t z = 0; z < back.size(); ++z) sum += back.at(z);
  EXPECT_EQ(sum, Rational(1));
  EXPECT_LT(to_double(rational_abs(back.at(0) - q.at(0))), 1e-12);
}

}  // namespace
}  // namespace svlpn
