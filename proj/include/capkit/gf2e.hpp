#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "capkit/errors.hpp"

namespace capkit {

using elem = std::uint16_t;

inline constexpr int kMinDegree = 1;
inline constexpr int kMaxDegree = 7;

// Fixed modulus per extension degree: the lexicographically least primitive
// polynomial, as a coefficient bitmask (bit i = coefficient of x^i). Any
// primitive choice gives an isomorphic field and hence the same geometry;
// fixing one keeps every table, point index and witness reproducible.
inline constexpr unsigned kModulus[kMaxDegree + 1] = {
    0u,
    0b11u,        // x + 1
    0b111u,       // x^2 + x + 1
    0b1011u,      // x^3 + x + 1
    0b10011u,     // x^4 + x + 1
    0b100101u,    // x^5 + x^2 + 1
    0b1000011u,   // x^6 + x + 1
    0b10000011u,  // x^7 + x + 1
};

// GF(2^h) arithmetic through log/antilog tables. Addition is XOR; the tables
// carry multiplication, inversion and trace. Elements are integers in [0, q)
// encoding polynomial coefficients bitwise.
class FieldTable {
 public:
  explicit FieldTable(int h) : h_(h) {
    if (h < kMinDegree || h > kMaxDegree)
      throw unsupported_field_error("GF(2^h): h must be in [" +
                                    std::to_string(kMinDegree) + "," +
                                    std::to_string(kMaxDegree) + "], got " +
                                    std::to_string(h));
    q_ = 1u << h;
    modulus_ = kModulus[h];
    exp_.resize(q_ - 1);
    log_.assign(q_, -1);
    unsigned b = 1;
    for (unsigned i = 0; i + 1 < q_; ++i) {
      exp_[i] = static_cast<elem>(b);
      log_[b] = static_cast<int>(i);
      b <<= 1;
      if (b & q_) b ^= modulus_;
    }
  }

  int h() const { return h_; }
  unsigned q() const { return q_; }
  unsigned modulus() const { return modulus_; }
  const std::vector<elem>& exp_table() const { return exp_; }
  const std::vector<int>& log_table() const { return log_; }

  static elem add(elem a, elem b) { return a ^ b; }

  // pre: a, b in [0, q)
  elem mul(elem a, elem b) const {
    if (a == 0 || b == 0) return 0;
    int s = log_[a] + log_[b];
    const int m = static_cast<int>(q_) - 1;
    if (s >= m) s -= m;
    return exp_[s];
  }

  elem inv(elem a) const {
    if (a == 0) throw division_by_zero_error("GF(2^h): inverse of 0");
    const int m = static_cast<int>(q_) - 1;
    int l = m - log_[a];
    if (l == m) l = 0;
    return exp_[l];
  }

  // absolute trace onto GF(2): a + a^2 + a^4 + ... + a^(2^(h-1))
  elem trace(elem a) const {
    elem t = 0, x = a;
    for (int i = 0; i < h_; ++i) {
      t = add(t, x);
      x = mul(x, x);
    }
    return t;
  }

  std::string modulus_string() const {
    std::string s;
    for (int i = h_; i >= 0; --i) {
      if (!((modulus_ >> i) & 1u)) continue;
      if (!s.empty()) s += "+";
      if (i == 0)
        s += "1";
      else if (i == 1)
        s += "x";
      else
        s += "x^" + std::to_string(i);
    }
    return s;
  }

 private:
  int h_;
  unsigned q_;
  unsigned modulus_;
  std::vector<elem> exp_;
  std::vector<int> log_;
};

inline FieldTable make_field(int h) { return FieldTable(h); }

// q -> h for supported orders; rejects everything else
inline int degree_for_order(long long q) {
  for (int h = kMinDegree; h <= kMaxDegree; ++h)
    if ((1ll << h) == q) return h;
  throw unsupported_field_error("GF(q): q must be 2^h with h in [1,7], got " +
                                std::to_string(q));
}

inline FieldTable make_field_q(long long q) {
  return FieldTable(degree_for_order(q));
}

}  // namespace capkit
