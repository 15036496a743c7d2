#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "svlpn/bitvec.hpp"
#include "svlpn/dist.hpp"
#include "svlpn/random.hpp"
#include "svlpn/rational.hpp"

namespace svlpn {

struct SecretKey {
  BitVector bits;
  std::size_t n() const { return bits.size(); }
};

// One sample (u, y) with u in F_2^n and y = <u, sk> + e.
struct LpnSample {
  BitVector u;
  int y = 0;
  friend bool operator==(const LpnSample&, const LpnSample&) = default;
};

// Ordered k-tuple of samples sharing one dimension n.
struct Batch {
  std::vector<LpnSample> samples;

  int k() const { return static_cast<int>(samples.size()); }
  std::size_t n() const { return samples.empty() ? 0 : samples.front().u.size(); }

  void validate() const {
    for (const LpnSample& s : samples) {
      if (s.u.size() != n()) throw std::invalid_argument("Batch: mixed dimensions");
      if (s.y != 0 && s.y != 1) throw std::invalid_argument("Batch: y must be a bit");
    }
  }

  friend bool operator==(const Batch&, const Batch&) = default;
};

// Single sample from the independent-noise LPN distribution: u uniform,
// y = <u, sk> + e with e ~ Ber(1/2 - delta). The noiseless limit
// delta = 1/2 (e identically 0) is a test-only oracle and must be enabled
// explicitly. Draws ceil(n/64) + 1 words.
inline LpnSample sample_lpn(std::size_t n, double delta, const SecretKey& sk,
                            RandomStream& rng, bool allow_noiseless = false) {
  if (sk.n() != n) throw std::invalid_argument("sample_lpn: secret length mismatch");
  const bool noiseless = allow_noiseless && delta == 0.5;
  if (!noiseless && !(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("sample_lpn: delta must be in (0, 1/2)");
  LpnSample s;
  s.u = sample_uniform(n, rng);
  const int e = noiseless ? (rng.next_word(), 0) : sample_bernoulli(0.5 - delta, rng);
  s.y = inner_product(s.u, sk.bits) ^ e;
  return s;
}

// One batch from the joint-noise LPN distribution: u^1..u^k iid uniform,
// noise vector drawn jointly from p, y^i = <u^i, sk> + e^i.
inline Batch sample_batch_lpn(std::size_t n, const FloatPmf& p, const SecretKey& sk,
                              RandomStream& rng) {
  if (sk.n() != n) throw std::invalid_argument("sample_batch_lpn: secret length mismatch");
  Batch batch;
  batch.samples.reserve(p.k());
  for (int i = 0; i < p.k(); ++i) {
    LpnSample s;
    s.u = sample_uniform(n, rng);
    batch.samples.push_back(std::move(s));
  }
  const std::uint64_t z = sample_index(cumulative(p.table()), rng);
  for (int i = 0; i < p.k(); ++i) {
    LpnSample& s = batch.samples[i];
    s.y = inner_product(s.u, sk.bits) ^ static_cast<int>((z >> i) & 1u);
  }
  return batch;
}

inline Batch sample_batch_lpn(std::size_t n, const RationalPmf& p, const SecretKey& sk,
                              RandomStream& rng) {
  return sample_batch_lpn(n, to_float(p), sk, rng);
}

// Noise vector under the true key: coordinate i is y^i + <u^i, sk>.
inline BitVector residuals(const Batch& batch, const SecretKey& sk) {
  BitVector r(batch.samples.size());
  for (std::size_t i = 0; i < batch.samples.size(); ++i) {
    const LpnSample& s = batch.samples[i];
    if (s.u.size() != sk.n()) throw std::invalid_argument("residuals: dimension mismatch");
    r.set_bit(i, s.y ^ inner_product(s.u, sk.bits));
  }
  return r;
}

// Canonical index of a batch outcome in (F_2^n x F_2)^k: the bits
// u^1_1..u^1_n, y^1, u^2_1, ..., y^k concatenated least-significant-first,
// encoded like any other bit vector. Every exact batch law is a Pmf over
// F_2^{(n+1)k} under this index.
inline std::uint64_t batch_to_index(const Batch& batch) {
  const std::size_t n = batch.n();
  std::uint64_t idx = 0;
  std::size_t pos = 0;
  for (const LpnSample& s : batch.samples) {
    idx |= s.u.index() << pos;
    pos += n;
    idx |= static_cast<std::uint64_t>(s.y) << pos;
    ++pos;
  }
  return idx;
}

inline Batch batch_from_index(std::uint64_t idx, std::size_t n, int k) {
  Batch batch;
  batch.samples.resize(k);
  std::size_t pos = 0;
  for (LpnSample& s : batch.samples) {
    s.u = decode((idx >> pos) & ((std::uint64_t{1} << n) - 1), n);
    pos += n;
    s.y = static_cast<int>((idx >> pos) & 1u);
    ++pos;
  }
  return batch;
}

inline void check_batch_table_guard(std::size_t n, int k, std::size_t limit) {
  if ((n + 1) * static_cast<std::size_t>(k) > limit)
    throw std::invalid_argument("exact batch law: (n+1)k exceeds the size guard of " +
                                std::to_string(limit));
}

// Exact law of the joint-noise batch distribution, as a rational table
// over all 2^{(n+1)k} outcomes: P[(u, y)] = 2^{-nk} * p(residuals).
// Guarded at (n+1)k <= 24.
inline RationalPmf exact_target_distribution(std::size_t n, const RationalPmf& p,
                                             const SecretKey& sk) {
  if (sk.n() != n) throw std::invalid_argument("exact_target_distribution: secret length");
  const int k = p.k();
  check_batch_table_guard(n, k, 24);
  const int bits = static_cast<int>((n + 1) * k);
  const Rational u_weight = pow2(-static_cast<int>(n) * k);
  std::vector<Rational> t(std::size_t{1} << bits);
  for (std::uint64_t idx = 0; idx < t.size(); ++idx) {
    const Batch b = batch_from_index(idx, n, k);
    t[idx] = u_weight * p.at(residuals(b, sk).index());
  }
  return RationalPmf(bits, std::move(t));
}

// Pushforward of an exact batch law through residual extraction; for a
// law equal to the target this returns p itself.
inline RationalPmf residual_pushforward(const RationalPmf& law, std::size_t n, int k,
                                        const SecretKey& sk) {
  std::vector<Rational> t(std::size_t{1} << k, Rational(0));
  for (std::uint64_t idx = 0; idx < law.size(); ++idx) {
    const Batch b = batch_from_index(idx, n, k);
    t[residuals(b, sk).index()] += law.at(idx);
  }
  return RationalPmf(k, std::move(t));
}

// Marginal law of u^i (i in [k]) under an exact batch law.
inline RationalPmf u_marginal(const RationalPmf& law, std::size_t n, int k, int i) {
  if (i < 1 || i > k) throw std::invalid_argument("u_marginal: index out of range");
  std::vector<Rational> t(std::size_t{1} << n, Rational(0));
  for (std::uint64_t idx = 0; idx < law.size(); ++idx) {
    const Batch b = batch_from_index(idx, n, k);
    t[b.samples[i - 1].u.index()] += law.at(idx);
  }
  return RationalPmf(static_cast<int>(n), std::move(t));
}

}  // namespace svlpn
