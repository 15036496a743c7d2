#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "svlpn/chisq.hpp"
#include "svlpn/digest.hpp"
#include "svlpn/dist.hpp"
#include "svlpn/lpn.hpp"
#include "svlpn/random.hpp"
#include "svlpn/rational.hpp"
#include "svlpn/reduce.hpp"

namespace svlpn {

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Canonical content key of a noise distribution, used to tie reports to
// the exact table they were run against.
inline std::string pmf_digest(const RationalPmf& p) {
  std::string s = "k=" + std::to_string(p.k()) + ";";
  for (std::size_t z = 0; z < p.size(); ++z) {
    s += rational_to_string(p.at(z));
    s += ',';
  }
  return digest_string(s);
}

struct VerificationReport {
  std::size_t n = 0;
  int k = 0;
  Rational delta;
  std::string p_digest;
  std::optional<BitVector> sk;
  std::string mode;  // "exact" or "statistical"

  std::optional<Rational> tv_exact;    // exact mode: TV of the two laws
  std::optional<double> tv_empirical;  // statistical mode: TV of residual histogram vs p

  std::optional<std::uint64_t> seed;
  std::uint64_t num_batches = 0;
  double significance = 0;
  double bonferroni_threshold = 0;
  std::vector<ChiSquareTest> chi_square;  // residual fit plus per-coordinate uniformity

  bool pass = false;
  double runtime_seconds = 0;
};

struct ExactCheckOptions {
  std::optional<Rational> input_bias_override;
};

// Exact end-to-end check: the full output law of the construction,
// enumerated over all inputs and internal draws, must equal the batch
// law with noise p under the same secret. Zero tolerance; any nonzero
// rational TV fails.
inline VerificationReport check_reduction_exact(std::size_t n, const RationalPmf& p,
                                                const Rational& delta, const SecretKey& sk,
                                                const ExactCheckOptions& opts = {}) {
  const detail::Stopwatch timer;
  ReductionConfig{n, p.k(), delta, p}.validate();
  if (sk.n() != n) throw std::invalid_argument("check_reduction_exact: secret length");

  const RationalPmf produced =
      reduce_exact_distribution(n, p, delta, sk, {opts.input_bias_override, std::nullopt});
  const RationalPmf target = exact_target_distribution(n, p, sk);

  VerificationReport r;
  r.n = n;
  r.k = p.k();
  r.delta = delta;
  r.p_digest = pmf_digest(p);
  r.sk = sk.bits;
  r.mode = "exact";
  r.tv_exact = tv_distance(produced, target);
  r.pass = (*r.tv_exact == 0);
  r.runtime_seconds = timer.seconds();
  return r;
}

// Sampling check for dimensions where enumeration is impossible: run the
// construction num_batches times on freshly drawn independent-noise
// samples, recover the residuals with the known secret, and test
//   - the joint residual histogram against p, and
//   - each output vector's low min(n, 8) bits against uniform.
// Bonferroni across the k+1 sub-tests; pass iff every p-value clears
// significance / (k+1). Identical seeds reproduce identical statistics.
inline VerificationReport check_reduction_statistical(std::size_t n, const RationalPmf& p,
                                                      const Rational& delta, const SecretKey& sk,
                                                      std::uint64_t num_batches,
                                                      double significance, RandomStream& rng) {
  const detail::Stopwatch timer;
  ReductionConfig{n, p.k(), delta, p}.validate();
  if (sk.n() != n) throw std::invalid_argument("check_reduction_statistical: secret length");
  if (!(significance > 0 && significance < 1))
    throw std::invalid_argument("check_reduction_statistical: significance must be in (0, 1)");

  const int k = p.k();
  const FloatPmf pf = to_float(p);
  const std::size_t low_bits = std::min<std::size_t>(n, 8);
  const std::uint64_t low_mask = (std::uint64_t{1} << low_bits) - 1;

  // Fail fast if the histogram cannot satisfy the expected-count rule.
  double min_prob = 1.0 / static_cast<double>(std::uint64_t{1} << low_bits);
  for (double v : pf.table()) min_prob = std::min(min_prob, v);
  if (static_cast<double>(num_batches) * min_prob < 5.0)
    throw std::invalid_argument(
        "check_reduction_statistical: num_batches too small, smallest expected cell count " +
        std::to_string(static_cast<double>(num_batches) * min_prob) + " is below 5");

  const Reducer reducer(p, delta);
  const double in_bias = to_double(input_bias(k, delta));

  std::vector<std::uint64_t> joint(std::size_t{1} << k, 0);
  std::vector<std::vector<std::uint64_t>> u_low(
      k, std::vector<std::uint64_t>(std::size_t{1} << low_bits, 0));

  for (std::uint64_t b = 0; b < num_batches; ++b) {
    Batch in;
    in.samples.reserve(k);
    for (int i = 0; i < k; ++i) in.samples.push_back(sample_lpn(n, in_bias, sk, rng));
    const Batch out = reducer(in, rng);
    ++joint[residuals(out, sk).index()];
    for (int i = 0; i < k; ++i) ++u_low[i][out.samples[i].u.index() & low_mask];
  }

  VerificationReport r;
  r.n = n;
  r.k = k;
  r.delta = delta;
  r.p_digest = pmf_digest(p);
  r.sk = sk.bits;
  r.mode = "statistical";
  r.seed = rng.seed();
  r.num_batches = num_batches;
  r.significance = significance;
  r.bonferroni_threshold = significance / (k + 1);

  r.chi_square.push_back(chi_square_gof("residual_joint", joint, pf.table()));
  const std::vector<double> unif(std::size_t{1} << low_bits,
                                 1.0 / static_cast<double>(std::uint64_t{1} << low_bits));
  for (int i = 0; i < k; ++i)
    r.chi_square.push_back(chi_square_gof("u_uniform_" + std::to_string(i + 1), u_low[i], unif));

  double tv = 0;
  for (std::size_t z = 0; z < joint.size(); ++z)
    tv += std::abs(static_cast<double>(joint[z]) / static_cast<double>(num_batches) - pf.at(z));
  r.tv_empirical = tv / 2;

  r.pass = std::all_of(r.chi_square.begin(), r.chi_square.end(),
                       [&](const ChiSquareTest& t) { return t.p_value > r.bonferroni_threshold; });
  r.runtime_seconds = timer.seconds();
  return r;
}

struct Lemma2Report {
  int k = 0;
  std::size_t size = 0;  // 2^k - 1
  bool row_sums_ok = false;
  bool square_ok = false;
  bool inverse_ok = false;
  Rational sigma_min_squared;
  Rational bound_squared;  // 2^{k-2}
  bool meets_bound = false;
  bool equality = false;  // sigma_min^2 == bound^2 (holds for k >= 2)
  std::string implication;
  bool pass = false;
  double runtime_seconds = 0;
};

// Certifies the structured matrix B over nonzero index vectors,
// B_{uv} = <u,v> mod 2, through exact integer identities:
//   B 1 = 2^{k-1} 1,   B^2 = 2^{k-2} (J + I),   B (2B - J) = 2^{k-1} I.
// The last line is the closed-form inverse B^{-1} = 2^{2-k} (B - J/2) in
// integer clothing. Rows are packed into 64-bit words so B^2 entries are
// popcounts of ANDed rows; nothing here floats.
//
// The spectral conclusion rides on the second identity: J has eigenvalues
// 2^k - 1 (once, on the all-ones vector) and 0, so B^2 has eigenvalues
// 2^{2k-2} (once) and 2^{k-2} (multiplicity 2^k - 2). B is symmetric,
// hence sigma_min(B)^2 = min eigenvalue of B^2. For k >= 2 that minimum
// is 2^{k-2}, matching the bound with equality; for k = 1 the matrix is
// the single entry [1] and sigma_min = 1 clears the bound 2^{-1/2}
// strictly.
inline Lemma2Report check_lemma2(int k) {
  if (k < 1 || k > 12)
    throw std::invalid_argument("check_lemma2: k must be in [1, 12], table has 2^k - 1 rows");
  const detail::Stopwatch timer;
  Lemma2Report r;
  r.k = k;
  const std::size_t m = (std::size_t{1} << k) - 1;
  r.size = m;

  const std::size_t words = (m + 63) / 64;
  std::vector<std::uint64_t> rows(m * words, 0);
  std::vector<std::uint64_t> row_sum(m, 0);
  for (std::size_t u = 1; u <= m; ++u)
    for (std::size_t v = 1; v <= m; ++v)
      if (__builtin_parityll(u & v)) {
        rows[(u - 1) * words + (v - 1) / 64] |= std::uint64_t{1} << ((v - 1) % 64);
        ++row_sum[u - 1];
      }

  const std::uint64_t half_rows = std::uint64_t{1} << (k - 1);
  r.row_sums_ok = std::all_of(row_sum.begin(), row_sum.end(),
                              [&](std::uint64_t s) { return s == half_rows; });

  r.square_ok = true;
  r.inverse_ok = true;
  for (std::size_t u = 0; u < m && (r.square_ok || r.inverse_ok); ++u) {
    for (std::size_t v = u; v < m; ++v) {
      std::uint64_t dot = 0;
      for (std::size_t w = 0; w < words; ++w)
        dot += static_cast<std::uint64_t>(
            __builtin_popcountll(rows[u * words + w] & rows[v * words + w]));
      // (B^2)_{uv}: 2^{k-1} on the diagonal, 2^{k-2} off it.
      const std::uint64_t expect_sq = (u == v) ? half_rows : half_rows / 2;
      if (dot != expect_sq) r.square_ok = false;
      // (B (2B - J))_{uv} = 2 (B^2)_{uv} - row_sum: 2^{k-1} delta_{uv}.
      const std::uint64_t expect_inv = (u == v) ? half_rows : 0;
      if (2 * dot - row_sum[u] != expect_inv || 2 * dot - row_sum[v] != expect_inv)
        r.inverse_ok = false;
    }
  }

  r.bound_squared = pow2(k - 2);
  r.sigma_min_squared = (m >= 2) ? pow2(k - 2) : pow2(2 * k - 2);
  r.meets_bound = r.sigma_min_squared >= r.bound_squared;
  r.equality = (m >= 2);
  r.implication =
      "B1 = 2^(k-1) 1 and B^2 = 2^(k-2)(J+I) verified entrywise in exact integers; "
      "J has eigenvalues 2^k-1 (multiplicity 1) and 0, so B^2 has eigenvalues "
      "2^(2k-2) (multiplicity 1) and 2^(k-2) (multiplicity 2^k-2); B is symmetric, "
      "so sigma_min(B)^2 equals the least eigenvalue of B^2, which is " +
      rational_to_string(r.sigma_min_squared) + " >= 2^(k-2) = " +
      rational_to_string(r.bound_squared) + ".";
  r.pass = r.row_sums_ok && r.square_ok && r.inverse_ok && r.meets_bound;
  r.runtime_seconds = timer.seconds();
  return r;
}

struct CounterexampleReport {
  Rational delta;
  Rational eta;  // sqrt(delta), the per-bit bias of the construction
  RationalPmf p = RationalPmf::uniform(2);
  Rational sv_param;
  Rational tv_xor;
  Rational implied_min_product_bias;
  bool tv_matches_2delta = false;
};

// The two-bit obstruction: Z = (e1 + b, e2 + b) with e_i ~ Ber(1/2 -
// sqrt(delta)) iid and b a shared fair coin. Each coordinate alone is
// uniform and the source is O(delta)-SV, yet Z1 + Z2 = e1 + e2 carries
// bias 2*delta (two Ber(1/2 - sqrt(delta)) convolved), so TV to a fair
// coin is 2*delta. Any independent product noise Ber(1/2 - eta)^{x2}
// matching that XOR statistic needs 2*eta^2 >= 2*delta, i.e. eta >=
// sqrt(delta): per-bit bias cannot be O(delta).
inline CounterexampleReport counterexample_report(const Rational& delta) {
  if (!(delta > 0 && delta < Rational(1, 16)))
    throw std::invalid_argument("counterexample_report: delta must be in (0, 1/16)");
  const auto eta = exact_sqrt(delta);
  if (!eta)
    throw std::invalid_argument(
        "counterexample_report: delta must be a perfect rational square (e.g. 1/64) so "
        "Ber(1/2 - sqrt(delta)) stays exact");

  CounterexampleReport r;
  r.delta = delta;
  r.eta = *eta;
  r.p = shared_coin_pmf(2, r.eta);
  r.sv_param = sv_parameter(r.p);
  r.tv_xor = tv_distance(pushforward_xor(r.p, BitVector::of({1, 1})), RationalPmf::uniform(1));
  const auto implied = exact_sqrt(r.tv_xor / 2);
  if (!implied) throw std::logic_error("counterexample_report: tv_xor/2 not a square");
  r.implied_min_product_bias = *implied;
  r.tv_matches_2delta = (r.tv_xor == 2 * delta);
  return r;
}

}  // namespace svlpn
