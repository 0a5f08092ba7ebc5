#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "capkit/bounds.hpp"

using namespace capkit;
using detail::u128;

namespace {

const BoundValue* find_row(const std::vector<BoundValue>& rows,
                           const std::string& name) {
  for (auto& r : rows)
    if (r.name == name) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("128-bit integer square root") {
  CHECK(detail::isqrt(0) == 0u);
  CHECK(detail::isqrt(1) == 1u);
  CHECK(detail::isqrt(2) == 1u);
  CHECK(detail::isqrt(3) == 1u);
  CHECK(detail::isqrt(4) == 2u);
  CHECK(detail::isqrt(80) == 8u);
  const u128 big = u128(1) << 63;
  CHECK(detail::isqrt(big * big) == big);
  CHECK(detail::isqrt(big * big - 1) == big - 1);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const u128 r = rng() >> (trial % 32);
    if (r == 0) continue;
    CHECK(detail::isqrt(r * r) == r);
    CHECK(detail::isqrt(r * r - 1) == r - 1);
    CHECK(detail::isqrt(r * r + 1) == r);
  }
}

TEST_CASE("integer caps under radicals") {
  // k < C + sqrt(R)
  CHECK(detail::cap_below_plus_sqrt(10, 0) == 9);
  CHECK(detail::cap_below_plus_sqrt(10, 1) == 10);
  CHECK(detail::cap_below_plus_sqrt(10, 4) == 11);  // perfect square: 12 - 1
  CHECK(detail::cap_below_plus_sqrt(10, 5) == 12);
  // k < A - sqrt(R)
  CHECK(detail::cap_below_minus_sqrt(77, 320) == 59);
  CHECK(detail::cap_below_minus_sqrt(10, 4) == 7);
  CHECK(detail::cap_below_minus_sqrt(10, 3) == 8);
}

TEST_CASE("bounds table at (3, 8)") {
  BoundTable t = evaluate_bounds(3, 8);
  REQUIRE(t.mp2_rows.size() == 3u);

  const auto* chao = find_row(t.mp2_rows, "mp-q2-q+5");
  REQUIRE(chao);
  CHECK(chao->integer_cap == 61);
  CHECK(chao->strictness == "<=");

  const auto* improved = find_row(t.mp2_rows, "mp-q2-q+3");
  REQUIRE(improved);
  CHECK(improved->integer_cap == 59);

  const auto* main = find_row(t.mp2_rows, "mp-sqrt5");
  REQUIRE(main);
  CHECK(main->strictness == "<");
  CHECK_FALSE(main->value_integral);
  CHECK(main->value == Catch::Approx(59.111456).epsilon(1e-6));
  CHECK(main->integer_cap == 59);

  REQUIRE(t.mp2_has_min);
  CHECK(t.mp2_min == 59);
  CHECK(t.mp2_min_names == std::vector<std::string>{"mp-q2-q+3", "mp-sqrt5"});

  REQUIRE(t.m2_has_min);
  CHECK(t.m2_min == 65);  // q^2 + 1
  CHECK(t.m2_min_names == std::vector<std::string>{"m2-solid"});
}

TEST_CASE("exact table entries") {
  SECTION("binary spaces") {
    for (int n = 3; n <= 8; ++n) {
      BoundTable t = evaluate_bounds(n, 2);
      const auto* m = find_row(t.m2_rows, "m2-binary");
      REQUIRE(m);
      CHECK(m->integer_cap == (1LL << n));
      const auto* p = find_row(t.mp2_rows, "mp-exact-binary");
      REQUIRE(p);
      CHECK(p->integer_cap == (1LL << (n - 1)) + (1LL << (n - 3)));
      CHECK(p->strictness == "=");
    }
    CHECK(evaluate_bounds(3, 2).mp2_min == 5);
  }
  SECTION("PG(3,4)") {
    BoundTable t = evaluate_bounds(3, 4);
    REQUIRE(t.mp2_has_min);
    CHECK(t.mp2_min == 14);
    CHECK(t.mp2_min_names == std::vector<std::string>{"mp-exact-q4"});
    CHECK(t.m2_min == 17);
  }
  SECTION("plane") {
    BoundTable t = evaluate_bounds(2, 8);
    CHECK(t.m2_min == 10);
    CHECK(t.m2_min_names == std::vector<std::string>{"m2-plane"});
    CHECK_FALSE(t.mp2_has_min);
  }
  SECTION("four-dimensional exact and near-exact entries") {
    CHECK(evaluate_bounds(4, 4).m2_min == 41);
    BoundTable t = evaluate_bounds(4, 8);
    CHECK(t.m2_min == 479);
    CHECK(t.m2_min_names == std::vector<std::string>{"m2-48"});
  }
  SECTION("higher dimensions at q = 4 and q = 8") {
    CHECK(evaluate_bounds(5, 4).m2_min == 159);   // (118*4 + 5)/3
    CHECK(evaluate_bounds(6, 4).m2_min == 631);   // (118*16 + 5)/3
    CHECK(evaluate_bounds(5, 8).m2_min == 3823);  // 478*8 - 2 + 1
    CHECK(evaluate_bounds(6, 8).m2_min == 30575);
  }
}

TEST_CASE("interval-derived rows and the square-q edge") {
  SECTION("q = 2048: irrational right-hand side") {
    BoundTable t = evaluate_bounds(3, 2048);
    const auto* iv = find_row(t.mp2_rows, "mp-interval");
    REQUIRE(iv);
    CHECK_FALSE(iv->value_integral);
    CHECK(iv->value == Catch::Approx(4190345.7645L).epsilon(1e-9));
    CHECK(iv->integer_cap == 4190345);
    const auto* main = find_row(t.mp2_rows, "mp-sqrt5");
    REQUIRE(main);
    CHECK(main->value == Catch::Approx(4191777.5329L).epsilon(1e-9));
    CHECK(iv->value < main->value);
    CHECK(t.mp2_min == 4190345);
    CHECK(t.mp2_min_names == std::vector<std::string>{"mp-interval"});
  }
  SECTION("q = 4096: sqrt(q) integral, strict bound drops by one") {
    BoundTable t = evaluate_bounds(3, 4096);
    const auto* iv = find_row(t.mp2_rows, "mp-interval");
    REQUIRE(iv);
    CHECK(iv->value_integral);
    CHECK(iv->value == 16769218.0L);
    CHECK(iv->integer_cap == 16769217);
  }
}

TEST_CASE("disputed row is listed but never wins") {
  BoundTable t = evaluate_bounds(3, 128);
  const auto* d = find_row(t.mp2_rows, "mp-disputed");
  REQUIRE(d);
  CHECK(d->disputed);
  CHECK(d->integer_cap == 128 * 128 - 2 * 128 + 7);  // 16135, the smallest cap
  CHECK(t.mp2_min == 16230);                         // sqrt(5) row wins instead
  CHECK(t.mp2_min_names == std::vector<std::string>{"mp-sqrt5"});
  for (auto& name : t.mp2_min_names) CHECK(name != "mp-disputed");
  // absent below its q >= 128 hypothesis
  CHECK(find_row(evaluate_bounds(3, 64).mp2_rows, "mp-disputed") == nullptr);
}

TEST_CASE("strictness drives the integer cap") {
  for (long long q : {8LL, 32LL, 2048LL, 65536LL}) {
    BoundTable t = evaluate_bounds(3, q);
    for (auto rows : {&t.m2_rows, &t.mp2_rows})
      for (auto& r : *rows) {
        if (r.strictness == "<" && !r.value_integral) {
          CHECK(r.integer_cap ==
                static_cast<long long>(std::floor(r.value)));
          // float face is never deceptively close to an integer
          CHECK(std::fabs(r.value - std::nearbyint(r.value)) > 1e-6L);
        } else if (r.strictness == "<" && r.value_integral) {
          CHECK(static_cast<long double>(r.integer_cap) == r.value - 1);
        } else {
          CHECK(static_cast<long double>(r.integer_cap) == r.value);
        }
      }
  }
}

TEST_CASE("radical rows agree between float and exact routes everywhere") {
  for (long long q = 8; q <= 65536; q *= 2) {
    for (int n : {3, 4}) {
      BoundTable t = evaluate_bounds(n, q);  // construction asserts agreement
      for (auto rows : {&t.m2_rows, &t.mp2_rows})
        for (auto& r : *rows)
          if (r.strictness == "<" && !r.value_integral)
            CHECK(r.integer_cap == static_cast<long long>(std::floor(r.value)));
    }
  }
  // the five-dimensional interval row at q = 2048: exact cap from u128,
  // float only confirms the neighborhood
  BoundTable t = evaluate_bounds(5, 2048);
  const auto* r = find_row(t.m2_rows, "m2-nq-interval");
  REQUIRE(r);
  CHECK(r->value == Catch::Approx(static_cast<double>(r->integer_cap) + 0.5)
                        .margin(0.5000001));
}

TEST_CASE("four-dimensional interval bound, dual route") {
  BoundTable t = evaluate_bounds(4, 2048);
  const auto* r = find_row(t.m2_rows, "m2-4q-interval");
  REQUIRE(r);
  CHECK(r->integer_cap == 8581840000LL);
  CHECK(r->value == Catch::Approx(8581840000.41L).epsilon(1e-9));
  const auto* s = find_row(t.m2_rows, "m2-4q-sqrt5");
  REQUIRE(s);
  CHECK(r->integer_cap < s->integer_cap);  // the improvement is real
  CHECK(t.m2_min_names == std::vector<std::string>{"m2-4q-interval"});
}

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(evaluate_bounds(3, 6), domain_error);
  CHECK_THROWS_AS(evaluate_bounds(3, 0), domain_error);
  CHECK_THROWS_AS(evaluate_bounds(3, 131072), domain_error);
  CHECK_THROWS_AS(evaluate_bounds(1, 8), dimension_error);
  CHECK_THROWS_AS(evaluate_bounds(9, 8), range_error);
}

TEST_CASE("forbidden intervals") {
  SECTION("a = 3 lower endpoint matches the interval-derived bound formula") {
    ForbiddenInterval iv = ss_interval(2048, 3);
    // coefficient identity 2 - a + a(a-1)/2 = 2 at a = 3
    CHECK(iv.lo_base == 2048LL * 2048 - 2 * 2048 + 2);
    CHECK(iv.lo_sqrtq_coeff == 3);
    CHECK(iv.admissible);
    CHECK(iv.hi_base == 2048LL * 2048 - 2048);
    CHECK(iv.hi_sqrtq_coeff == -9);
    CHECK(iv.lo < iv.hi);
    // its floor is exactly the integer cap of the derived bound
    BoundTable t = evaluate_bounds(3, 2048);
    const auto* r = find_row(t.mp2_rows, "mp-interval");
    REQUIRE(r);
    CHECK(static_cast<long long>(std::floor(iv.lo)) == r->integer_cap);
  }
  SECTION("a = 2 at q = 64") {
    ForbiddenInterval iv = ss_interval(64, 2);
    CHECK(iv.lo_base == 64 * 64 - 64 + 1);  // constant part collapses to 1
    CHECK(iv.lo_sqrtq_coeff == 2);
    CHECK(iv.lo == 64.0L * 64 - 64 + 2 * 8 + 1);  // sqrt(64) = 8
    CHECK(iv.admissible);
    CHECK(iv.a_limit == Catch::Approx(2.345).margin(0.01));
  }
  SECTION("largest admissible a") {
    CHECK(largest_admissible_a(64) == 2);
    CHECK(largest_admissible_a(2048) == 6);
    ForbiddenInterval ok = ss_interval(2048, 6);
    CHECK(ok.admissible);
    ForbiddenInterval too_big = ss_interval(2048, 7);
    CHECK_FALSE(too_big.admissible);
    CHECK(ok.a_limit == Catch::Approx(6.2259).margin(0.001));
  }
  SECTION("admissibility agrees with the float route away from ties") {
    for (long long q = 64; q <= 65536; q *= 2)
      for (long long a = 2; a <= 12; ++a) {
        ForbiddenInterval iv = ss_interval(q, a);
        if (std::fabs(iv.a_limit - static_cast<long double>(a)) > 1e-3)
          CHECK(iv.admissible ==
                (static_cast<long double>(a) <= iv.a_limit));
      }
  }
  SECTION("hypothesis and range gates") {
    CHECK_THROWS_AS(ss_interval(32, 3), hypothesis_error);
    CHECK_THROWS_AS(ss_interval(2048, 1), range_error);
    CHECK_THROWS_AS(ss_interval(100, 3), domain_error);
    CHECK_THROWS_AS(largest_admissible_a(32), hypothesis_error);
  }
}

TEST_CASE("consistency matrix") {
  auto rows = consistency_matrix();
  CHECK(consistency_all_pass(rows));
  std::map<std::string, int> by_id;
  for (auto& r : rows) {
    ++by_id[r.id];
    CHECK(r.pass);
  }
  CHECK(by_id["improved-below-prior"] == 14);   // q = 8 .. 2^16
  CHECK(by_id["interval-below-sqrt5"] == 6);    // q = 2048 .. 2^16
  CHECK(by_id["ovoid-within-bounds"] == 15);    // q = 4 .. 2^16
  CHECK(by_id["binary-cap-within-bounds"] == 6);  // n = 3 .. 8
  CHECK(by_id["hyperoval-within-bounds"] == 16);  // q = 2 .. 2^16
  CHECK(by_id["tangent-floor-2q"] == 14);
  CHECK(by_id["quadratic-step-alpha3"] == 12);  // q = 32 .. 2^16
}
