#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace svlpn {

// Element of F_2^m. Coordinates are 1-based in the math and 0-based in
// code: bit(0) is coordinate 1, which is the least significant bit of the
// integer encoding. Every probability table in the library is indexed by
// that encoding.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t len) : bits_(len, 0) {}

  static BitVector of(std::initializer_list<int> coords) {
    BitVector v(coords.size());
    std::size_t i = 0;
    for (int b : coords) v.set_bit(i++, b);
    return v;
  }

  // Parses a '0'/'1' string, coordinate 1 first ("101" = (1,0,1)).
  static BitVector from_string(std::string_view s) {
    BitVector v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1')
        throw std::invalid_argument("bit string must contain only '0'/'1'");
      v.bits_[i] = static_cast<std::uint8_t>(s[i] - '0');
    }
    return v;
  }

  // Inverse of index(): coordinate i holds bit i-1 of `idx`.
  static BitVector from_index(std::uint64_t idx, std::size_t len) {
    if (len < 64 && (idx >> len) != 0)
      throw std::invalid_argument("index out of range for bit vector length");
    BitVector v(len);
    for (std::size_t i = 0; i < len; ++i) v.bits_[i] = (idx >> i) & 1u;
    return v;
  }

  std::size_t size() const { return bits_.size(); }

  int bit(std::size_t i) const {
    if (i >= bits_.size()) throw std::out_of_range("bit index out of range");
    return bits_[i];
  }

  void set_bit(std::size_t i, int b) {
    if (i >= bits_.size()) throw std::out_of_range("bit index out of range");
    if (b != 0 && b != 1) throw std::invalid_argument("bit must be 0 or 1");
    bits_[i] = static_cast<std::uint8_t>(b);
  }

  // Sum v_i 2^{i-1}; bijection with {0, ..., 2^m - 1}. Requires m <= 63.
  std::uint64_t index() const {
    if (bits_.size() > 63) throw std::invalid_argument("bit vector too long to encode");
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      x |= static_cast<std::uint64_t>(bits_[i]) << i;
    return x;
  }

  std::string str() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
    return s;
  }

  // First len coordinates.
  BitVector prefix(std::size_t len) const {
    if (len > bits_.size()) throw std::invalid_argument("prefix longer than vector");
    BitVector v(len);
    for (std::size_t i = 0; i < len; ++i) v.bits_[i] = bits_[i];
    return v;
  }

  bool is_zero() const {
    for (auto b : bits_)
      if (b) return false;
    return true;
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

inline std::uint64_t encode(const BitVector& v) { return v.index(); }
inline BitVector decode(std::uint64_t idx, std::size_t len) {
  return BitVector::from_index(idx, len);
}

inline BitVector xor_vectors(const BitVector& u, const BitVector& v) {
  if (u.size() != v.size()) throw std::invalid_argument("xor: length mismatch");
  BitVector w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w.set_bit(i, u.bit(i) ^ v.bit(i));
  return w;
}

inline int inner_product(const BitVector& u, const BitVector& v) {
  if (u.size() != v.size()) throw std::invalid_argument("inner_product: length mismatch");
  int acc = 0;
  for (std::size_t i = 0; i < u.size(); ++i) acc ^= u.bit(i) & v.bit(i);
  return acc;
}

}  // namespace svlpn
