#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "svlpn/bitvec.hpp"
#include "svlpn/dist.hpp"
#include "svlpn/linearize.hpp"
#include "svlpn/lpn.hpp"
#include "svlpn/random.hpp"
#include "svlpn/rational.hpp"

namespace svlpn {

// Noise bias required of the independent-noise input samples: the
// reduction consumes samples at level 1/2 - 2^{k+2} delta.
inline Rational input_bias(int k, const Rational& delta) { return pow2(k + 2) * delta; }

// Validates the reduction parameters: 0 < delta < 2^{-(k+3)} and p a
// delta-SV source. Error messages carry the witness prefix so callers can
// report which conditional breaks the bound.
inline void validate_reduction_params(const RationalPmf& p, const Rational& delta) {
  const int k = p.k();
  if (!(delta > 0 && delta < pow2(-(k + 3))))
    throw std::invalid_argument("reduction: delta must be in (0, 2^-(k+3)), got " +
                                rational_to_string(delta) + " for k=" + std::to_string(k));
  const auto w = sv_certificate(p);
  if (w.delta_star > delta)
    throw std::invalid_argument(
        "reduction: p is not a delta-SV source for delta=" + rational_to_string(delta) +
        ": P[Z_" + std::to_string(w.index) + "=1 | prefix \"" + w.prefix.str() +
        "\"] = " + rational_to_string(w.conditional) + " has bias " +
        rational_to_string(w.delta_star));
}

// Reduction parameters; the CLI descriptor serializes exactly these.
struct ReductionConfig {
  std::size_t n = 0;
  int k = 0;
  Rational delta;
  RationalPmf p;

  void validate() const {
    if (p.k() != k) throw std::invalid_argument("ReductionConfig: p has wrong arity");
    if (n < 1) throw std::invalid_argument("ReductionConfig: n must be >= 1");
    validate_reduction_params(p, delta);
  }
};

// Rescaled conditional-bias table feeding step i: over prefixes
// z in F_2^{i-1},
//   value(z) = 1/2 - (1/2 - P[Z_i=1 | Z_{<i}=z]) / (2^{k+3} delta).
// For a delta-SV source every value lands in [1/2 - 2^{-(k+3)},
// 1/2 + 2^{-(k+3)}], the exact range the affine-coefficient construction
// requires.
template <class S>
BiasFunction<S> step_bias(const Pmf<S>& p, int i, const S& delta) {
  if (i < 1 || i > p.k()) throw std::invalid_argument("step_bias: step index out of range");
  const S scale = detail::from_rational<S>(pow2(p.k() + 3)) * delta;
  BiasFunction<S> q{i - 1, std::vector<S>(std::size_t{1} << (i - 1))};
  for (std::uint64_t pre = 0; pre < q.values.size(); ++pre) {
    const S cond = conditional_bit(p, i, decode(pre, i - 1));
    q.values[pre] = half<S>() - (half<S>() - cond) / scale;
  }
  if constexpr (is_exact_scalar<S>) {
    if (!bias_range_ok(q))
      throw std::invalid_argument("step_bias: p is not a delta-SV source at step " +
                                  std::to_string(i));
  }
  return q;
}

// One construction step: given the already-built prefix of the output
// batch and a fresh input sample, applies the affine coefficients
// f = (F_0, ..., F_{i-1}):
//   a'_i = a_i + sum_j F_j a'_j,   y'_i = y_i + F_0 + sum_j F_j y'_j.
// Step 1 is the f = (F_0) case: a'_1 = a_1, y'_1 = y_1 + F_0.
inline LpnSample apply_step(const Batch& built, const LpnSample& input, const BitVector& f) {
  if (f.size() != built.samples.size() + 1)
    throw std::invalid_argument("apply_step: coefficient length must be step index");
  LpnSample out;
  out.u = input.u;
  out.y = input.y ^ f.bit(0);
  for (std::size_t j = 0; j < built.samples.size(); ++j) {
    if (!f.bit(j + 1)) continue;
    out.u = xor_vectors(out.u, built.samples[j].u);
    out.y ^= built.samples[j].y;
  }
  return out;
}

// Deterministic executor shared by the sampler and the enumeration
// oracle: coeffs[i-1] holds the step-i coefficients (length i).
inline Batch apply_reduction_steps(const Batch& input, const std::vector<BitVector>& coeffs) {
  Batch out;
  out.samples.reserve(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    out.samples.push_back(apply_step(out, input.samples.at(i), coeffs[i]));
  return out;
}

// Transforms k independent-noise LPN samples at level 1/2 - 2^{k+2} delta
// into one batch whose joint law is the batch LPN distribution with noise
// p, for any secret. The secret never enters: all adjustments are affine
// in the input samples.
//
// Construction tables are precomputed once: step 1 draws the extra noise
// bit from Ber(1/2 - (1/2 - p_1(1)) / (2^{k+3} delta)) directly; step
// i > 1 draws affine coefficients from the distribution built for the
// rescaled conditional-bias table of step i. Sampling draws one word per
// step.
class Reducer {
 public:
  Reducer(const RationalPmf& p, const Rational& delta) : k_(p.k()), delta_(delta), p_(p) {
    validate_reduction_params(p, delta);

    // Step 1, explicit branch: e'_1 ~ Ber(1/2 - (1/2)(1/2 - p_1(1)) / (2^{k+2} delta)).
    const Rational p1 = conditional_bit(p, 1, BitVector(0));
    const Rational e1_prob =
        half<Rational>() - half<Rational>() * (half<Rational>() - p1) / input_bias(k_, delta);
    exact_tables_.push_back(RationalPmf::bernoulli(e1_prob));

    for (int i = 2; i <= k_; ++i)
      exact_tables_.push_back(build_mu_star(step_bias(p, i, delta)));

    // Float twins drive the sampling path.
    const FloatPmf pf = to_float(p);
    const double deltaf = to_double(delta);
    float_tables_.push_back(FloatPmf::bernoulli(to_double(e1_prob)));
    for (int i = 2; i <= k_; ++i)
      float_tables_.push_back(build_mu_star(step_bias(pf, i, deltaf)));
    for (const FloatPmf& t : float_tables_) cdfs_.push_back(cumulative(t.table()));
  }

  int k() const { return k_; }
  const Rational& delta() const { return delta_; }
  const RationalPmf& p() const { return p_; }

  // Exact coefficient distribution of step i (over F_2^i).
  const RationalPmf& step_table_exact(int i) const { return exact_tables_.at(i - 1); }
  const FloatPmf& step_table_float(int i) const { return float_tables_.at(i - 1); }

  std::vector<BitVector> draw_coeffs(RandomStream& rng) const {
    std::vector<BitVector> coeffs;
    coeffs.reserve(k_);
    for (int i = 1; i <= k_; ++i)
      coeffs.push_back(decode(sample_index(cdfs_[i - 1], rng), i));
    return coeffs;
  }

  Batch operator()(const Batch& input, RandomStream& rng) const {
    if (input.k() != k_)
      throw std::invalid_argument("Reducer: input batch must have exactly k samples");
    input.validate();
    return apply_reduction_steps(input, draw_coeffs(rng));
  }

 private:
  int k_;
  Rational delta_;
  RationalPmf p_;
  std::vector<RationalPmf> exact_tables_;
  std::vector<FloatPmf> float_tables_;
  std::vector<std::vector<double>> cdfs_;
};

struct ExactReductionOptions {
  // Override the input noise bias (default 2^{k+2} delta); the negative
  // control feeds 2^{k+1} delta to confirm the oracle notices.
  std::optional<Rational> input_bias_override;
  // Stop after this many steps (default k); the truncated law is the
  // per-step invariant of the construction.
  std::optional<int> steps;
};

// Exact law of the reduction output when the inputs are iid
// independent-noise LPN samples under `sk`: every combination of input
// vectors, input noise bits, and per-step coefficient draws is executed
// through apply_step and its weight pushed into a 2^{(n+1)t} table.
// Outcomes are merged after each step, which keeps the enumeration
// polynomial in the table size instead of the raw path count.
// Guarded at (n+1)k <= 16.
inline RationalPmf reduce_exact_distribution(std::size_t n, const RationalPmf& p,
                                             const Rational& delta, const SecretKey& sk,
                                             const ExactReductionOptions& opts = {}) {
  const int k = p.k();
  check_batch_table_guard(n, k, 16);
  if (sk.n() != n) throw std::invalid_argument("reduce_exact_distribution: secret length");
  const Reducer reducer(p, delta);
  const int t = opts.steps.value_or(k);
  if (t < 1 || t > k) throw std::invalid_argument("reduce_exact_distribution: bad step count");

  const Rational bias = opts.input_bias_override.value_or(input_bias(k, delta));
  if (!(bias > 0 && bias < half<Rational>()))
    throw std::invalid_argument("reduce_exact_distribution: input bias out of (0, 1/2)");
  const Rational e_one = half<Rational>() - bias;  // P[input noise bit = 1]
  const Rational u_weight = pow2(-static_cast<int>(n));

  // law over (F_2^n x F_2)^i after step i; start with the empty batch.
  std::vector<Rational> law{Rational(1)};
  for (int i = 1; i <= t; ++i) {
    const RationalPmf& table = reducer.step_table_exact(i);
    const std::size_t out_bits = (n + 1) * i;
    std::vector<Rational> next(std::size_t{1} << out_bits, Rational(0));
    for (std::uint64_t prev = 0; prev < law.size(); ++prev) {
      if (law[prev] == 0) continue;
      const Batch built = batch_from_index(prev, n, i - 1);
      for (std::uint64_t u = 0; u < (std::uint64_t{1} << n); ++u) {
        LpnSample input;
        input.u = decode(u, n);
        const int clean = inner_product(input.u, sk.bits);
        for (int e = 0; e <= 1; ++e) {
          input.y = clean ^ e;
          const Rational input_weight =
              law[prev] * u_weight * (e ? e_one : Rational(1) - e_one);
          for (std::uint64_t f = 0; f < table.size(); ++f) {
            if (table.at(f) == 0) continue;
            const LpnSample out = apply_step(built, input, decode(f, i));
            const std::uint64_t idx =
                prev | (out.u.index() << ((n + 1) * (i - 1))) |
                (static_cast<std::uint64_t>(out.y) << ((n + 1) * (i - 1) + n));
            next[idx] += input_weight * table.at(f);
          }
        }
      }
    }
    law = std::move(next);
  }
  return RationalPmf(static_cast<int>((n + 1) * t), std::move(law));
}

}  // namespace svlpn
