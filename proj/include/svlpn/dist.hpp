#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "svlpn/bitvec.hpp"
#include "svlpn/random.hpp"
#include "svlpn/rational.hpp"

namespace svlpn {

template <class S>
inline constexpr bool is_exact_scalar = std::is_same_v<S, Rational>;

template <class S>
inline S half() {
  return S(1) / S(2);
}

template <class S>
inline S scalar_abs(const S& x) {
  if constexpr (is_exact_scalar<S>) return rational_abs(x);
  else return std::abs(x);
}

// Mass-1 tolerance for floating tables; exact tables admit none.
inline constexpr double kFloatMassTolerance = 1e-12;

// Dense probability table over F_2^k, indexed by encode(z). S is Rational
// on the verification path and double on the sampling path. Entries are
// validated at construction: non-negative, total mass 1 (exactly for
// Rational, within 1e-12 for double).
template <class S>
class Pmf {
 public:
  Pmf(int k, std::vector<S> table) : k_(k), table_(std::move(table)) {
    if (k < 0 || k > 30) throw std::invalid_argument("Pmf: k out of range");
    if (table_.size() != (std::size_t{1} << k))
      throw std::invalid_argument("Pmf: table size must be 2^k");
    S sum(0);
    for (const S& v : table_) {
      if (v < S(0)) throw std::invalid_argument("Pmf: negative entry");
      sum += v;
    }
    if constexpr (is_exact_scalar<S>) {
      if (sum != S(1)) throw std::invalid_argument("Pmf: entries must sum to 1 exactly");
    } else {
      if (std::abs(sum - 1.0) > kFloatMassTolerance)
        throw std::invalid_argument("Pmf: entries must sum to 1 within 1e-12");
    }
  }

  static Pmf uniform(int k) {
    const std::size_t size = std::size_t{1} << k;
    if constexpr (is_exact_scalar<S>)
      return Pmf(k, std::vector<S>(size, Rational(1, BigInt(size))));
    else
      return Pmf(k, std::vector<S>(size, 1.0 / static_cast<double>(size)));
  }

  static Pmf point_mass(int k, std::uint64_t z) {
    std::vector<S> t(std::size_t{1} << k, S(0));
    t.at(z) = S(1);
    return Pmf(k, std::move(t));
  }

  // k = 1, P[1] = prob_one.
  static Pmf bernoulli(const S& prob_one) {
    return Pmf(1, {S(1) - prob_one, prob_one});
  }

  // Independent coordinates, P[z_i = 1] = prob_one[i-1].
  static Pmf product_bernoulli(const std::vector<S>& prob_one) {
    const int k = static_cast<int>(prob_one.size());
    std::vector<S> t(std::size_t{1} << k);
    for (std::size_t z = 0; z < t.size(); ++z) {
      S w(1);
      for (int i = 0; i < k; ++i)
        w *= ((z >> i) & 1u) ? prob_one[i] : S(1) - prob_one[i];
      t[z] = w;
    }
    return Pmf(k, std::move(t));
  }

  int k() const { return k_; }
  std::size_t size() const { return table_.size(); }
  const std::vector<S>& table() const { return table_; }
  const S& at(std::uint64_t z) const { return table_.at(z); }

  // P[Z_{1:len} = prefix], summing over the remaining coordinates.
  S prefix_mass(const BitVector& prefix) const {
    const std::size_t len = prefix.size();
    if (len > static_cast<std::size_t>(k_))
      throw std::invalid_argument("prefix longer than k");
    const std::uint64_t base = prefix.index();
    S acc(0);
    const std::uint64_t hi_count = std::uint64_t{1} << (k_ - len);
    for (std::uint64_t hi = 0; hi < hi_count; ++hi) acc += table_[base | (hi << len)];
    return acc;
  }

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  int k_;
  std::vector<S> table_;
};

using RationalPmf = Pmf<Rational>;
using FloatPmf = Pmf<double>;

inline FloatPmf to_float(const RationalPmf& p) {
  std::vector<double> t(p.size());
  for (std::size_t z = 0; z < p.size(); ++z) t[z] = to_double(p.at(z));
  return FloatPmf(p.k(), std::move(t));
}

// Lossless: every double is a dyadic rational.
inline RationalPmf to_exact(const FloatPmf& p) {
  std::vector<Rational> t(p.size());
  Rational sum(0);
  for (std::size_t z = 0; z < p.size(); ++z) {
    t[z] = Rational(p.at(z));
    sum += t[z];
  }
  // Renormalize the (at most 1e-12) float slack onto the largest entry so
  // the exact table is a true distribution.
  if (sum != 1) {
    std::size_t argmax = 0;
    for (std::size_t z = 1; z < t.size(); ++z)
      if (t[z] > t[argmax]) argmax = z;
    t[argmax] += Rational(1) - sum;
    if (t[argmax] < 0) throw std::invalid_argument("float table too far from mass 1");
  }
  return RationalPmf(p.k(), std::move(t));
}

// P[Z_i = 1 | Z_{<i} = prefix], i in [k], prefix of length i-1.
// A zero-mass prefix is an error: it already rules out every
// conditional-bias bound below 1/2.
template <class S>
S conditional_bit(const Pmf<S>& p, int i, const BitVector& prefix) {
  if (i < 1 || i > p.k()) throw std::invalid_argument("conditional_bit: index out of range");
  if (prefix.size() != static_cast<std::size_t>(i - 1))
    throw std::invalid_argument("conditional_bit: prefix must have length i-1");
  const S denom = p.prefix_mass(prefix);
  if (denom == S(0))
    throw std::invalid_argument("conditional_bit: prefix " + prefix.str() +
                                " has zero mass (full support required)");
  BitVector extended(prefix.size() + 1);
  for (std::size_t j = 0; j < prefix.size(); ++j) extended.set_bit(j, prefix.bit(j));
  extended.set_bit(prefix.size(), 1);
  return p.prefix_mass(extended) / denom;
}

// Witness for the SV (worst conditional-bias) parameter: the prefix and
// index whose conditional is farthest from 1/2.
template <class S>
struct SvWitness {
  S delta_star;
  int index = 1;         // i achieving the max
  BitVector prefix;      // length index-1
  S conditional{};       // P[Z_index = 1 | prefix]
};

// delta* = max over i and positive-mass prefixes of |P[Z_i=1|prefix] - 1/2|.
// p is a delta-SV source iff delta >= delta*.
template <class S>
SvWitness<S> sv_certificate(const Pmf<S>& p) {
  SvWitness<S> best{S(0), 1, BitVector(0), half<S>()};
  for (int i = 1; i <= p.k(); ++i) {
    const std::uint64_t prefix_count = std::uint64_t{1} << (i - 1);
    for (std::uint64_t pre = 0; pre < prefix_count; ++pre) {
      const BitVector prefix = decode(pre, i - 1);
      if (p.prefix_mass(prefix) == S(0)) continue;
      const S c = conditional_bit(p, i, prefix);
      const S diff = c - half<S>();
      const S bias = scalar_abs(diff);
      if (bias > best.delta_star) best = SvWitness<S>{bias, i, prefix, c};
    }
  }
  return best;
}

template <class S>
S sv_parameter(const Pmf<S>& p) {
  return sv_certificate(p).delta_star;
}

// Marginal of the first i coordinates.
template <class S>
Pmf<S> marginal_prefix(const Pmf<S>& p, int i) {
  if (i < 1 || i > p.k()) throw std::invalid_argument("marginal_prefix: index out of range");
  std::vector<S> t(std::size_t{1} << i);
  for (std::uint64_t z = 0; z < t.size(); ++z) t[z] = p.prefix_mass(decode(z, i));
  return Pmf<S>(i, std::move(t));
}

// Ber(1/2 - d1) xor Ber(1/2 - d2) = Ber(1/2 - 2 d1 d2); returns the
// combined bias 2 d1 d2.
template <class S>
S convolve_bernoulli(const S& d1, const S& d2) {
  if (scalar_abs(d1) > half<S>() || scalar_abs(d2) > half<S>())
    throw std::invalid_argument("convolve_bernoulli: bias out of [-1/2, 1/2]");
  return S(2) * d1 * d2;
}

template <class S>
S tv_distance(const Pmf<S>& p, const Pmf<S>& q) {
  if (p.k() != q.k()) throw std::invalid_argument("tv_distance: dimension mismatch");
  S acc(0);
  for (std::size_t z = 0; z < p.size(); ++z) {
    const S diff = p.at(z) - q.at(z);
    acc += scalar_abs(diff);
  }
  return acc / S(2);
}

// Law of <weights, Z> mod 2 for Z ~ p, as a distribution over F_2^1.
template <class S>
Pmf<S> pushforward_xor(const Pmf<S>& p, const BitVector& weights) {
  if (weights.size() != static_cast<std::size_t>(p.k()))
    throw std::invalid_argument("pushforward_xor: length mismatch");
  const std::uint64_t w = weights.index();
  S mass_one(0);
  for (std::uint64_t z = 0; z < p.size(); ++z)
    if (__builtin_parityll(w & z)) mass_one += p.at(z);
  return Pmf<S>(1, {S(1) - mass_one, mass_one});
}

// Law of (e_1+b, ..., e_k+b) over F_2^k with e_i ~ Ber(1/2 - eta) iid and
// b ~ Ber(1/2) a shared fair coin. The coin makes every single coordinate
// uniform while the pairwise XORs keep bias 2*eta^2.
template <class S>
Pmf<S> shared_coin_pmf(int k, const S& eta) {
  if (scalar_abs(eta) > half<S>())
    throw std::invalid_argument("shared_coin_pmf: bias out of range");
  std::vector<S> t(std::size_t{1} << k);
  const S p1 = half<S>() - eta;  // P[e = 1]
  for (std::uint64_t z = 0; z < t.size(); ++z) {
    S w0(1), w1(1);  // b = 0 and b = 1 branches
    for (int i = 0; i < k; ++i) {
      const bool zi = (z >> i) & 1u;
      w0 *= zi ? p1 : S(1) - p1;
      w1 *= zi ? S(1) - p1 : p1;
    }
    t[z] = (w0 + w1) / S(2);
  }
  return Pmf<S>(k, std::move(t));
}

// Random delta-SV source with dyadic-rational conditionals: for every
// prefix, P[Z_i = 1 | prefix] = 1/2 + j*delta/16 with j drawn uniformly
// from {-16, ..., 16}. Exact, full support, sv_parameter <= delta.
inline RationalPmf random_sv_pmf(int k, const Rational& delta, RandomStream& rng) {
  if (delta < 0 || delta >= half<Rational>())
    throw std::invalid_argument("random_sv_pmf: delta must be in [0, 1/2)");
  std::vector<Rational> t(std::size_t{1} << k, Rational(1));
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t prefix_count = std::uint64_t{1} << (i - 1);
    for (std::uint64_t pre = 0; pre < prefix_count; ++pre) {
      const int j = static_cast<int>(rng.next_word() % 33) - 16;
      const Rational cond = half<Rational>() + delta * j / 16;
      // Fold P[Z_i | prefix] into every full vector extending this prefix.
      const std::uint64_t mask = prefix_count - 1;
      for (std::uint64_t z = 0; z < t.size(); ++z) {
        if ((z & mask) != pre) continue;
        t[z] *= ((z >> (i - 1)) & 1u) ? cond : Rational(1) - cond;
      }
    }
  }
  return RationalPmf(k, std::move(t));
}

// Chain-rule reconstruction P[z] = prod_i P[Z_i = z_i | z_{<i}]; test oracle.
template <class S>
S chain_rule_mass(const Pmf<S>& p, const BitVector& z) {
  S acc(1);
  for (int i = 1; i <= p.k(); ++i) {
    const S c = conditional_bit(p, i, z.prefix(i - 1));
    acc *= z.bit(i - 1) ? c : S(1) - c;
  }
  return acc;
}

}  // namespace svlpn
