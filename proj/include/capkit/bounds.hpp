#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "capkit/errors.hpp"

namespace capkit {

namespace detail {

using u128 = unsigned __int128;
using i128 = __int128;

inline u128 checked_mul(u128 a, u128 b) {
  u128 r;
  if (__builtin_mul_overflow(a, b, &r))
    throw range_error("bound magnitude exceeds the exact 128-bit range");
  return r;
}

inline u128 checked_pow(u128 base, int e) {
  u128 r = 1;
  for (int i = 0; i < e; ++i) r = checked_mul(r, base);
  return r;
}

// largest s with s*s <= x
inline u128 isqrt(u128 x) {
  if (x == 0) return 0;
  u128 r = 0, bit = u128(1) << 126;
  while (bit > x) bit >>= 2;
  while (bit != 0) {
    if (x >= r + bit) {
      x -= r + bit;
      r = (r >> 1) + bit;
    } else {
      r >>= 1;
    }
    bit >>= 2;
  }
  return r;
}

inline long long to_ll(u128 x) {
  if (x > u128(INT64_MAX))
    throw range_error("bound value exceeds the 64-bit integer range");
  return static_cast<long long>(x);
}

// largest integer k with k < C + sqrt(R): d = max{d : d^2 < R} added to C.
// Handles perfect-square R (strict integral bound drops by one) and R = 0.
inline long long cap_below_plus_sqrt(u128 C, u128 R) {
  if (R == 0) return to_ll(C) - 1;
  return to_ll(C + isqrt(R - 1));
}

// largest integer k with k < A - sqrt(R): the deficit e = A - k must
// satisfy e^2 > R, so e = isqrt(R) + 1
inline long long cap_below_minus_sqrt(u128 A, u128 R) {
  const u128 e = isqrt(R) + 1;
  if (e > A) throw range_error("bound is negative over its whole range");
  return to_ll(A - e);
}

// sign of C + D*sqrt(q) with q not a perfect square: -1, 0 (impossible
// for D != 0), or +1
inline int sign_c_plus_d_sqrtq(i128 C, i128 D, u128 q) {
  if (D == 0) return C < 0 ? -1 : (C > 0 ? 1 : 0);
  if (C >= 0 && D >= 0) return 1;
  if (C <= 0 && D <= 0) return -1;
  const u128 c2 = checked_mul(C < 0 ? u128(-C) : u128(C),
                              C < 0 ? u128(-C) : u128(C));
  const u128 d2q = checked_mul(
      checked_mul(D < 0 ? u128(-D) : u128(D), D < 0 ? u128(-D) : u128(D)), q);
  if (c2 == d2q) return 0;  // perfect-square case, caller handles
  const bool positive_radical = D > 0;
  if (positive_radical) return d2q > c2 ? 1 : -1;
  return c2 > d2q ? 1 : -1;
}

inline bool is_power_of_two(long long q) { return q > 0 && (q & (q - 1)) == 0; }

inline void require_even_prime_power(long long q) {
  if (q < 2 || q > 65536 || !is_power_of_two(q))
    throw domain_error("q must be a power of 2 in [2, 65536], got " +
                       std::to_string(q));
}

}  // namespace detail

struct BoundValue {
  std::string name;           // formula slug
  std::string claim;          // the inequality in words
  std::string applicability;  // hypothesis on (n, q)
  std::string strictness;     // "<", "<=", or "="
  bool disputed = false;      // listed but excluded from the minimum
  long double value = 0;      // display value of the right-hand side
  bool value_integral = false;
  long long integer_cap = 0;  // implied best integer bound, computed exactly
};

struct BoundTable {
  int n = 0;
  long long q = 0;
  std::vector<BoundValue> m2_rows;
  std::vector<BoundValue> mp2_rows;  // second-largest complete size
  bool m2_has_min = false, mp2_has_min = false;
  long long m2_min = 0, mp2_min = 0;
  std::vector<std::string> m2_min_names, mp2_min_names;
};

namespace detail {

// 1 + q + ... + q^e, the point count of PG(e, q)
inline u128 geom_sum(u128 q, int e) {
  u128 s = 0;
  for (int i = 0; i <= e; ++i) s += checked_pow(q, i);
  return s;
}

inline BoundValue make_exact(std::string name, std::string claim,
                             std::string applicability, long long v) {
  BoundValue b;
  b.name = std::move(name);
  b.claim = std::move(claim);
  b.applicability = std::move(applicability);
  b.strictness = "=";
  b.value = static_cast<long double>(v);
  b.value_integral = true;
  b.integer_cap = v;
  return b;
}

inline BoundValue make_le(std::string name, std::string claim,
                          std::string applicability, long long v) {
  BoundValue b;
  b.name = std::move(name);
  b.claim = std::move(claim);
  b.applicability = std::move(applicability);
  b.strictness = "<=";
  b.value = static_cast<long double>(v);
  b.value_integral = true;
  b.integer_cap = v;
  return b;
}

inline BoundValue make_lt_integral(std::string name, std::string claim,
                                   std::string applicability, long long v) {
  BoundValue b;
  b.name = std::move(name);
  b.claim = std::move(claim);
  b.applicability = std::move(applicability);
  b.strictness = "<";
  b.value = static_cast<long double>(v);
  b.value_integral = true;
  b.integer_cap = v - 1;
  return b;
}

// strict bound with an exactly computed cap; the float display value is
// cross-checked against the exact route and near-integer drift escalates
// to the exact result
inline BoundValue make_lt_radical(std::string name, std::string claim,
                                  std::string applicability, long double value,
                                  long long exact_cap) {
  BoundValue b;
  b.name = std::move(name);
  b.claim = std::move(claim);
  b.applicability = std::move(applicability);
  b.strictness = "<";
  b.value = value;
  b.value_integral = std::floor(value) == value;  // square q makes these land
  b.integer_cap = exact_cap;
  const long double nearest = std::nearbyint(value);
  const bool near_integer =
      std::fabs(value - nearest) <= 1e-6L * (std::fabs(value) + 1);
  if (static_cast<long long>(std::floor(value)) != exact_cap && !near_integer)
    throw consistency_error("float and exact routes disagree for " + b.name);
  return b;
}

}  // namespace detail

// all bounds whose hypothesis covers (n, q), largest-cap tables for m2
// and for the second-largest complete size, and the tightest caps with
// provenance; disputed rows are listed but never enter the minimum
inline BoundTable evaluate_bounds(int n, long long q) {
  detail::require_even_prime_power(q);
  if (n < 2) throw dimension_error("bounds need n >= 2, got " + std::to_string(n));
  if (n > 8) throw range_error("bounds are tabulated for n <= 8");
  using namespace detail;
  const u128 Q = static_cast<u128>(q);
  const long double qf = static_cast<long double>(q);
  const long double sqrt5 = std::sqrt(5.0L);
  const long double sqrtq = std::sqrt(qf);
  BoundTable tab;
  tab.n = n;
  tab.q = q;

  // ---- m2 rows ----
  if (n == 2)
    tab.m2_rows.push_back(make_exact("m2-plane", "max arc size = q + 2",
                                     "n = 2, q even", to_ll(Q + 2)));
  if (n == 3 && q > 2)
    tab.m2_rows.push_back(make_exact("m2-solid", "max cap size = q^2 + 1",
                                     "n = 3, q even, q > 2",
                                     to_ll(Q * Q + 1)));
  if (n >= 3 && q == 2)
    tab.m2_rows.push_back(make_exact("m2-binary", "max cap size = 2^n",
                                     "q = 2, n >= 3", 1LL << n));
  if (n == 4 && q == 4)
    tab.m2_rows.push_back(make_exact("m2-44", "max cap size = 41",
                                     "n = 4, q = 4", 41));
  if (n == 4 && q == 8)
    tab.m2_rows.push_back(make_le("m2-48", "max cap size <= 479",
                                  "n = 4, q = 8", 479));
  if (n == 4 && q > 8) {
    const u128 C = checked_pow(Q, 3) - checked_pow(Q, 2) - 8;
    const long long cap = cap_below_plus_sqrt(C, checked_mul(20, Q * Q));
    tab.m2_rows.push_back(make_lt_radical(
        "m2-4q-sqrt5",
        "max cap size < q^3 - q^2 + 2*sqrt(5)*q - 8",
        "n = 4, q even, q > 8",
        qf * qf * qf - qf * qf + 2 * sqrt5 * qf - 8, cap));
  }
  if (n == 4 && q >= 2048) {
    // radical part (3q - 9)*sqrt(q), integer part q^3 - 2q^2 + 8q - 6
    const u128 C = checked_pow(Q, 3) - 2 * Q * Q + 8 * Q - 6;
    const u128 D = 3 * Q - 9;
    const long long cap = cap_below_plus_sqrt(C, checked_mul(D * D, Q));
    tab.m2_rows.push_back(make_lt_radical(
        "m2-4q-interval",
        "max cap size < q^3 - 2q^2 + 3q*sqrt(q) + 8q - 9*sqrt(q) - 6",
        "n = 4, q even, q >= 2048",
        qf * qf * qf - 2 * qf * qf + (3 * qf - 9) * sqrtq + 8 * qf - 6, cap));
  }
  if (n >= 5 && q == 4) {
    const u128 v = (118 * checked_pow(4, n - 4) + 5) / 3;
    if ((118 * checked_pow(4, n - 4) + 5) % 3 != 0)
      throw consistency_error("(118*4^(n-4) + 5)/3 must be integral");
    tab.m2_rows.push_back(make_le("m2-nq4",
                                  "max cap size <= (118*4^(n-4) + 5)/3",
                                  "n >= 5, q = 4", to_ll(v)));
  }
  if (n >= 5 && q == 8) {
    const u128 v = 478 * checked_pow(8, n - 4) - 2 * geom_sum(8, n - 5) + 1;
    tab.m2_rows.push_back(
        make_le("m2-nq8",
                "max cap size <= 478*8^(n-4) - 2*(8^(n-5) + ... + 1) + 1",
                "n >= 5, q = 8", to_ll(v)));
  }
  if (n >= 5 && q > 8) {
    const u128 C = checked_pow(Q, n - 1) - checked_pow(Q, n - 2) -
                   9 * checked_pow(Q, n - 4) - 2 * geom_sum(Q, n - 5) + 1;
    const u128 D = 2 * checked_pow(Q, n - 3);
    const long long cap = cap_below_plus_sqrt(C, checked_mul(checked_mul(D, D), 5));
    long double v = 0;
    for (int i = 0; i <= n - 5; ++i) v += std::pow(qf, i);
    v = std::pow(qf, n - 1) - std::pow(qf, n - 2) +
        2 * sqrt5 * std::pow(qf, n - 3) - 9 * std::pow(qf, n - 4) - 2 * v + 1;
    tab.m2_rows.push_back(make_lt_radical(
        "m2-nq-sqrt5",
        "max cap size < q^(n-1) - q^(n-2) + 2*sqrt(5)*q^(n-3) - 9q^(n-4) "
        "- 2*(q^(n-5) + ... + 1) + 1",
        "n >= 5, q even, q > 8", v, cap));
  }
  if (n >= 5 && q >= 2048) {
    // radical part (3q - 9)*q^(n-4)*sqrt(q)
    const u128 C = checked_pow(Q, n - 1) - 2 * checked_pow(Q, n - 2) +
                   8 * checked_pow(Q, n - 3) - 7 * checked_pow(Q, n - 4) -
                   2 * geom_sum(Q, n - 5) + 1;
    const u128 D = checked_mul(3 * Q - 9, checked_pow(Q, n - 4));
    const long long cap = cap_below_plus_sqrt(C, checked_mul(checked_mul(D, D), Q));
    long double v = 0;
    for (int i = 0; i <= n - 5; ++i) v += std::pow(qf, i);
    v = std::pow(qf, n - 1) - 2 * std::pow(qf, n - 2) +
        3 * std::pow(qf, n - 3) * sqrtq + 8 * std::pow(qf, n - 3) -
        9 * std::pow(qf, n - 4) * sqrtq - 7 * std::pow(qf, n - 4) - 2 * v + 1;
    tab.m2_rows.push_back(make_lt_radical(
        "m2-nq-interval",
        "max cap size < q^(n-1) - 2q^(n-2) + 3q^(n-3)*sqrt(q) + 8q^(n-3) "
        "- 9q^(n-4)*sqrt(q) - 7q^(n-4) - 2*(q^(n-5) + ... + 1) + 1",
        "n >= 5, q even, q >= 2048", v, cap));
  }

  // ---- second-largest complete size rows ----
  if (n >= 3 && q == 2)
    tab.mp2_rows.push_back(
        make_exact("mp-exact-binary",
                   "second-largest complete cap size = 2^(n-1) + 2^(n-3)",
                   "q = 2, n >= 3", (1LL << (n - 1)) + (1LL << (n - 3))));
  if (n == 3 && q == 4)
    tab.mp2_rows.push_back(make_exact(
        "mp-exact-q4", "second-largest complete cap size = 14", "n = 3, q = 4",
        14));
  if (n == 3 && q >= 8) {
    tab.mp2_rows.push_back(
        make_le("mp-q2-q+5", "second-largest complete cap size <= q^2 - q + 5",
                "n = 3, q even, q >= 8", to_ll(Q * Q - Q + 5)));
    tab.mp2_rows.push_back(
        make_le("mp-q2-q+3", "second-largest complete cap size <= q^2 - q + 3",
                "n = 3, q even, q >= 8", to_ll(Q * Q - Q + 3)));
    const long long cap = cap_below_minus_sqrt(Q * Q + Q + 5,
                                               checked_mul(5, Q * Q));
    tab.mp2_rows.push_back(make_lt_radical(
        "mp-sqrt5",
        "second-largest complete cap size < q^2 - (sqrt(5) - 1)q + 5",
        "n = 3, q even, q >= 8", qf * qf - (sqrt5 - 1) * qf + 5, cap));
  }
  if (n == 3 && q >= 2048) {
    const long long cap =
        cap_below_plus_sqrt(Q * Q - 2 * Q + 2, checked_mul(9, Q));
    tab.mp2_rows.push_back(make_lt_radical(
        "mp-interval",
        "second-largest complete cap size < q^2 - 2q + 3*sqrt(q) + 2",
        "n = 3, q even, q >= 2048", qf * qf - 2 * qf + 3 * sqrtq + 2, cap));
  }
  if (n == 3 && q >= 128) {
    BoundValue b = make_lt_integral(
        "mp-disputed", "second-largest complete cap size < q^2 - 2q + 8",
        "n = 3, q even, q >= 128", to_ll(Q * Q - 2 * Q + 8));
    b.disputed = true;  // published proof contested, kept out of the minimum
    tab.mp2_rows.push_back(b);
  }

  auto reduce = [](const std::vector<BoundValue>& rows, bool& has_min,
                   long long& min, std::vector<std::string>& names) {
    for (const auto& r : rows) {
      if (r.disputed) continue;
      if (!has_min || r.integer_cap < min) {
        has_min = true;
        min = r.integer_cap;
        names = {r.name};
      } else if (r.integer_cap == min) {
        names.push_back(r.name);
      }
    }
  };
  reduce(tab.m2_rows, tab.m2_has_min, tab.m2_min, tab.m2_min_names);
  reduce(tab.mp2_rows, tab.mp2_has_min, tab.mp2_min, tab.mp2_min_names);
  return tab;
}

struct ForbiddenInterval {
  long long q = 0;
  long long a = 0;
  // endpoints as base + coeff*sqrt(q), exactly
  long long lo_base = 0, lo_sqrtq_coeff = 0;
  long long hi_base = 0, hi_sqrtq_coeff = 0;
  long double lo = 0, hi = 0;
  bool admissible = false;
  long double a_limit = 0;  // right end of the admissible range for a
};

namespace detail {

// a <= (-2*sqrt(q) + 3 + sqrt(16q*sqrt(q) + 12q - 44*sqrt(q) - 7)) / (4*sqrt(q) + 2)
// decided exactly: with L = a(4*sqrt(q) + 2) - 3 + 2*sqrt(q) > 0 the test
// is L^2 <= 16q*sqrt(q) + 12q - 44*sqrt(q) - 7, and both sides live in
// Z + Z*sqrt(q)
inline bool admissible_exact(long long q, long long a) {
  const i128 A = a;
  const i128 lc = 2 * A - 3;          // integer part of L
  const i128 ld = 4 * A + 2;          // sqrt(q) part of L
  const i128 l2c = lc * lc + ld * ld * q;
  const i128 l2d = 2 * lc * ld;
  const i128 rc = 12 * static_cast<i128>(q) - 7;
  const i128 rd = 16 * static_cast<i128>(q) - 44;
  // RHS - LHS = (rc - l2c) + (rd - l2d)*sqrt(q) must be >= 0
  const u128 root = isqrt(static_cast<u128>(q));
  if (root * root == static_cast<u128>(q)) {
    const i128 diff = (rc - l2c) + (rd - l2d) * static_cast<i128>(root);
    return diff >= 0;
  }
  return sign_c_plus_d_sqrtq(rc - l2c, rd - l2d, static_cast<u128>(q)) >= 0;
}

}  // namespace detail

// the interval of complete-cap sizes excluded for each admissible a
inline ForbiddenInterval ss_interval(long long q, long long a) {
  detail::require_even_prime_power(q);
  if (q < 64) throw hypothesis_error("the interval result needs q >= 64");
  if (a < 2) throw range_error("interval parameter a must be >= 2");
  if (a > 1000000) throw range_error("interval parameter a is out of range");
  ForbiddenInterval iv;
  iv.q = q;
  iv.a = a;
  iv.lo_base = q * q - (a - 1) * q + 2 - a + a * (a - 1) / 2;
  iv.lo_sqrtq_coeff = a;
  iv.hi_base = q * q - (a - 2) * q;
  iv.hi_sqrtq_coeff = -a * a;
  const long double sq = std::sqrt(static_cast<long double>(q));
  iv.lo = static_cast<long double>(iv.lo_base) +
          static_cast<long double>(iv.lo_sqrtq_coeff) * sq;
  iv.hi = static_cast<long double>(iv.hi_base) +
          static_cast<long double>(iv.hi_sqrtq_coeff) * sq;
  iv.admissible = detail::admissible_exact(q, a);
  iv.a_limit = (-2 * sq + 3 +
                std::sqrt(16 * q * sq + 12 * q - 44 * sq - 7)) /
               (4 * sq + 2);
  return iv;
}

inline long long largest_admissible_a(long long q) {
  detail::require_even_prime_power(q);
  if (q < 64) throw hypothesis_error("the interval result needs q >= 64");
  long long a = 2;
  if (!detail::admissible_exact(q, a))
    throw consistency_error("a = 2 must be admissible for q >= 64");
  while (detail::admissible_exact(q, a + 1)) ++a;
  return a;
}

struct ConsistencyRow {
  std::string id;
  long long q = 0;
  bool pass = false;
  std::string detail;
};

// cross-checks between bounds, and of constructions against bounds,
// swept over every q = 2^h up to 2^16
inline std::vector<ConsistencyRow> consistency_matrix() {
  using namespace detail;
  std::vector<ConsistencyRow> rows;
  auto add = [&](std::string id, long long q, bool pass, std::string det) {
    rows.push_back({std::move(id), q, pass, std::move(det)});
  };
  for (long long q = 8; q <= 65536; q *= 2) {
    // strict-improvement row: q^2 + q + 5 - sqrt(5)q < q^2 - q + 5
    // amounts to 4q^2 < 5q^2
    const u128 Q = static_cast<u128>(q);
    add("improved-below-prior", q, 4 * Q * Q < 5 * Q * Q,
        "sqrt(5)-bound value below the q^2-q+5 value");
  }
  for (long long q = 2048; q <= 65536; q *= 2) {
    BoundTable t = evaluate_bounds(3, q);
    long double sqrt5_value = 0, interval_value = 0;
    for (auto& r : t.mp2_rows) {
      if (r.name == "mp-sqrt5") sqrt5_value = r.value;
      if (r.name == "mp-interval") interval_value = r.value;
    }
    add("interval-below-sqrt5", q,
        interval_value < sqrt5_value * (1 - 1e-12L),
        "interval-derived value below the sqrt(5)-bound value");
  }
  for (long long q = 4; q <= 65536; q *= 2) {
    // an ovoid meets every applicable max-cap row with equality allowed
    BoundTable t = evaluate_bounds(3, q);
    const long long ovoid = q * q + 1;
    bool ok = true;
    for (auto& r : t.m2_rows) ok = ok && ovoid <= r.integer_cap;
    add("ovoid-within-bounds", q, ok, "q^2 + 1 fits every max-cap row");
  }
  for (int n = 3; n <= 8; ++n) {
    BoundTable t = evaluate_bounds(n, 2);
    bool ok = t.m2_has_min && t.m2_min == (1LL << n);
    add("binary-cap-within-bounds", 2, ok,
        "2^n attains the n-dimensional binary row at n = " + std::to_string(n));
  }
  for (long long q = 2; q <= 65536; q *= 2) {
    // hyperovals attain the plane maximum
    BoundTable t = evaluate_bounds(2, q);
    add("hyperoval-within-bounds", q,
        t.m2_has_min && t.m2_min == q + 2, "q + 2 attains the plane row");
  }
  for (long long q = 8; q <= 65536; q *= 2) {
    // tangent lower bound 2q - 7/4 from the section bound:
    // sqrt(1 + 16q(q-2)) >= 4q - 9/2, i.e. 4(1 + 16q(q-2)) >= (8q-9)^2,
    // which reduces to 16q >= 77
    const i128 lhs = 4 * (1 + 16 * static_cast<i128>(q) * (q - 2));
    const i128 rhs = static_cast<i128>(8 * q - 9) * (8 * q - 9);
    add("tangent-floor-2q", q, lhs >= rhs, "4(1+16q(q-2)) >= (8q-9)^2");
  }
  for (long long q = 32; q <= 65536; q *= 2) {
    // 7*sqrt(5)q >= 15q + 12 for q > 16, squared: 245q^2 >= (15q+12)^2
    const u128 lhs = checked_mul(245, checked_mul(q, q));
    const u128 rhs = checked_mul(15 * q + 12, 15 * q + 12);
    add("quadratic-step-alpha3", q, lhs >= rhs, "245q^2 >= (15q+12)^2");
  }
  return rows;
}

inline bool consistency_all_pass(const std::vector<ConsistencyRow>& rows) {
  for (auto& r : rows)
    if (!r.pass) return false;
  return true;
}

}  // namespace capkit
