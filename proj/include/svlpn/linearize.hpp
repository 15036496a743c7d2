#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "svlpn/bitvec.hpp"
#include "svlpn/dist.hpp"
#include "svlpn/random.hpp"
#include "svlpn/rational.hpp"

namespace svlpn {

// Dense matrix with exact rational entries.
class RationalMatrix {
 public:
  RationalMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, Rational(0)) {}

  static RationalMatrix identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const Rational& at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  RationalMatrix operator*(const RationalMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    RationalMatrix out(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t l = 0; l < cols_; ++l) {
        const Rational& v = at(i, l);
        if (v == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) out.at(i, j) += v * o.at(l, j);
      }
    return out;
  }

  std::vector<Rational> apply(const std::vector<Rational>& x) const {
    if (x.size() != cols_) throw std::invalid_argument("matrix apply: shape mismatch");
    std::vector<Rational> y(rows_, Rational(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[i] += at(i, j) * x[j];
    return y;
  }

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t rows_, cols_;
  std::vector<Rational> a_;
};

// Exact inverse by Gauss-Jordan elimination; throws if singular.
inline RationalMatrix invert_gauss(RationalMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("invert: matrix not square");
  const std::size_t n = m.rows();
  RationalMatrix inv = RationalMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m.at(pivot, col) == 0) ++pivot;
    if (pivot == n) throw std::invalid_argument("invert: singular matrix");
    if (pivot != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m.at(pivot, j), m.at(col, j));
        std::swap(inv.at(pivot, j), inv.at(col, j));
      }
    const Rational d = m.at(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      m.at(col, j) /= d;
      inv.at(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m.at(r, col) == 0) continue;
      const Rational f = m.at(r, col);
      for (std::size_t j = 0; j < n; ++j) {
        m.at(r, j) -= f * m.at(col, j);
        inv.at(r, j) -= f * inv.at(col, j);
      }
    }
  }
  return inv;
}

inline int affine_eval(std::uint64_t f, std::uint64_t z) {
  // f encodes (f_0, ..., f_k) with f_0 least significant; the evaluation
  // f_0 + f_1 z_1 + ... + f_k z_k mod 2 is the parity of f & (z<<1 | 1).
  return __builtin_parityll(f & ((z << 1) | 1u));
}

// Affine evaluation indicator matrix: 2^{k+1} x 2^k, rows indexed by
// encode(f), columns by encode(z); entry 1 iff the affine function f
// evaluates to 1 at z.
inline RationalMatrix build_matrix_A(int k) {
  if (k < 1) throw std::invalid_argument("build_matrix_A: k must be >= 1");
  RationalMatrix a(std::size_t{1} << (k + 1), std::size_t{1} << k);
  for (std::uint64_t f = 0; f < a.rows(); ++f)
    for (std::uint64_t z = 0; z < a.cols(); ++z) a.at(f, z) = affine_eval(f, z);
  return a;
}

// Mod-2 inner-product matrix over the nonzero vectors of F_2^k, as a real
// matrix: row/column index i corresponds to the vector with encode value
// i+1. Symmetric, with row sums 2^{k-1} and B^2 = 2^{k-2}(J + I).
inline RationalMatrix build_matrix_B(int k) {
  if (k < 1) throw std::invalid_argument("build_matrix_B: k must be >= 1");
  const std::size_t m = (std::size_t{1} << k) - 1;
  RationalMatrix b(m, m);
  for (std::uint64_t u = 1; u <= m; ++u)
    for (std::uint64_t v = 1; v <= m; ++v) b.at(u - 1, v - 1) = __builtin_parityll(u & v);
  return b;
}

// Exact inverse of B via the closed form B^{-1} = 2^{2-k} (B - J/2),
// i.e. entry (2 B_uv - 1) / 2^{k-1}. Validated against invert_gauss and
// the exact identity B B^{-1} = I in the test suite.
inline RationalMatrix invert_matrix_B(int k) {
  if (k < 1) throw std::invalid_argument("invert_matrix_B: k must be >= 1");
  const std::size_t m = (std::size_t{1} << k) - 1;
  const Rational scale = pow2(1 - k);  // 1 / 2^{k-1}
  RationalMatrix inv(m, m);
  for (std::uint64_t u = 1; u <= m; ++u)
    for (std::uint64_t v = 1; v <= m; ++v) {
      const int buv = __builtin_parityll(u & v);
      inv.at(u - 1, v - 1) = Rational(2 * buv - 1) * scale;
    }
  return inv;
}

// Target evaluation-probability table q: F_2^k -> [1/2 - 2^{-(k+3)},
// 1/2 + 2^{-(k+3)}], indexed by encode(z). The range is the hypothesis
// under which the affine-coefficient construction stays in the simplex;
// it is validated where required, not at construction (tables of this
// shape also arise as raw outputs of apply_A_transpose).
template <class S>
struct BiasFunction {
  int k = 0;
  std::vector<S> values;  // size 2^k

  static BiasFunction constant_half(int k) {
    return BiasFunction{k, std::vector<S>(std::size_t{1} << k, half<S>())};
  }

  friend bool operator==(const BiasFunction&, const BiasFunction&) = default;
};

using RationalBiasFunction = BiasFunction<Rational>;

namespace detail {
template <class S>
S from_rational(const Rational& r) {
  if constexpr (is_exact_scalar<S>) return r;
  else return to_double(r);
}
}  // namespace detail

template <class S>
S max_bias(const BiasFunction<S>& q) {
  S m(0);
  for (const S& v : q.values) {
    const S diff = v - half<S>();
    const S b = scalar_abs(diff);
    if (b > m) m = b;
  }
  return m;
}

template <class S>
bool bias_range_ok(const BiasFunction<S>& q) {
  if (q.values.size() != (std::size_t{1} << q.k)) return false;
  const S bound = detail::from_rational<S>(pow2(-(q.k + 3)));
  if constexpr (is_exact_scalar<S>) return max_bias(q) <= bound;
  else return max_bias(q) <= bound + 1e-12;
}

// The correction B^{-1}(q_Z - 1/2 1) applied to the f_0 = 0 block, indexed
// by encode(z) - 1 over the nonzero z. Its sup norm is at most twice the
// sup norm of q_Z - 1/2 1.
template <class S>
std::vector<S> linearize_perturbation(const BiasFunction<S>& q) {
  if (q.k < 1) throw std::invalid_argument("linearize_perturbation: arity must be >= 1");
  const RationalMatrix inv = invert_matrix_B(q.k);
  const std::size_t m = inv.rows();
  std::vector<S> d(m, S(0));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c)
      d[r] += detail::from_rational<S>(inv.at(r, c)) * (q.values[c + 1] - half<S>());
  return d;
}

// Distribution mu* over the affine coefficients (F_0, ..., F_k) in
// F_2^{k+1} such that for every z, P[F_0 + <F_{1:k}, z> = 1] = q(z).
// Starts from the product Ber(q(0)) x Ber(1/2)^k, shifts the f_0 = 0
// block by B^{-1}(q_Z - 1/2 1), and balances the zero entry. Arity 0 is
// the degenerate case mu* = Ber(q()).
template <class S>
Pmf<S> build_mu_star(const BiasFunction<S>& q) {
  if (q.values.size() != (std::size_t{1} << q.k))
    throw std::invalid_argument("build_mu_star: table size must be 2^k");
  if (!bias_range_ok(q))
    throw std::invalid_argument("build_mu_star: q out of range, |q - 1/2| exceeds 2^-(k+3)");
  const S q0 = q.values[0];
  if (q.k == 0) return Pmf<S>(1, {S(1) - q0, q0});

  const std::size_t size = std::size_t{1} << (q.k + 1);
  std::vector<S> mu(size);
  const S base_scale = detail::from_rational<S>(pow2(-q.k));
  for (std::uint64_t f = 0; f < size; ++f)
    mu[f] = ((f & 1u) ? q0 : S(1) - q0) * base_scale;

  const std::vector<S> d = linearize_perturbation(q);
  S d_total(0);
  for (std::uint64_t z = 1; z < (std::uint64_t{1} << q.k); ++z) {
    mu[2 * z] += d[z - 1];  // f = (0, z)
    d_total += d[z - 1];
  }
  mu[0] -= d_total;

  // The range hypothesis guarantees a simplex element; a violation here
  // is an internal error, not bad input.
  S sum(0);
  for (const S& v : mu) {
    if (v < S(0)) throw std::logic_error("build_mu_star: negative mass (internal error)");
    sum += v;
  }
  if constexpr (is_exact_scalar<S>) {
    if (sum != S(1)) throw std::logic_error("build_mu_star: mass not 1 (internal error)");
  }
  return Pmf<S>(q.k + 1, std::move(mu));
}

// Exact evaluation-probability table of an affine-coefficient
// distribution: entry z is P_{F~mu}[F_0 + <F_{1:k}, z> = 1].
template <class S>
BiasFunction<S> apply_A_transpose(const Pmf<S>& mu) {
  const int k = mu.k() - 1;
  BiasFunction<S> q{k, std::vector<S>(std::size_t{1} << k, S(0))};
  for (std::uint64_t z = 0; z < q.values.size(); ++z)
    for (std::uint64_t f = 0; f < mu.size(); ++f)
      if (affine_eval(f, z)) q.values[z] += mu.at(f);
  return q;
}

// Inverse-CDF draw of affine coefficients; returns (F_0, ..., F_k) as a
// bit vector of length k+1 with F_0 in coordinate 1. One word.
inline BitVector sample_affine_coeffs(const FloatPmf& mu, RandomStream& rng) {
  const std::uint64_t f = sample_index(cumulative(mu.table()), rng);
  return decode(f, mu.k());
}

}  // namespace svlpn
