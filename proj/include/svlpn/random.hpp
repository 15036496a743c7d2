#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "svlpn/bitvec.hpp"

namespace svlpn {

// Seeded deterministic random stream. The generator algorithm is frozen:
// std::mt19937_64 (fully specified by the C++ standard, so byte-identical
// across platforms), consumed one 64-bit word at a time. Each sampling
// primitive documents exactly how many words it draws, so identical seeds
// give identical output sequences everywhere. Streams are single-owner;
// parallel work needs independent streams from distinct seeds.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return position_; }

  std::uint64_t next_word() {
    ++position_;
    return engine_();
  }

  // Uniform in [0, 1) with 53 bits of precision. One word.
  double next_unit() { return static_cast<double>(next_word() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
};

// Uniform on F_2^m. Draws ceil(m/64) words; bit i comes from bit i%64 of
// word i/64.
inline BitVector sample_uniform(std::size_t m, RandomStream& rng) {
  if (m < 1) throw std::invalid_argument("sample_uniform: m must be >= 1");
  BitVector v(m);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i % 64 == 0) word = rng.next_word();
    v.set_bit(i, static_cast<int>((word >> (i % 64)) & 1u));
  }
  return v;
}

// Returns 1 with probability prob_one. One word.
inline int sample_bernoulli(double prob_one, RandomStream& rng) {
  if (!(prob_one >= 0.0 && prob_one <= 1.0))
    throw std::invalid_argument("sample_bernoulli: probability must be in [0,1]");
  return rng.next_unit() < prob_one ? 1 : 0;
}

// Inverse-CDF draw from a cumulative table (cdf.back() ~ 1). One word.
inline std::size_t sample_index(const std::vector<double>& cdf, RandomStream& rng) {
  if (cdf.empty()) throw std::invalid_argument("sample_index: empty table");
  const double x = rng.next_unit();
  for (std::size_t i = 0; i + 1 < cdf.size(); ++i)
    if (x < cdf[i]) return i;
  return cdf.size() - 1;
}

inline std::vector<double> cumulative(const std::vector<double>& probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  return cdf;
}

}  // namespace svlpn
