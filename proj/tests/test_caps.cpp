#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "capkit/caps.hpp"
#include "capkit/constructions.hpp"

using namespace capkit;

namespace {

point_set frame_cap(const Geometry& G) {
  point_set K = {G.index_of({1, 0, 0, 0}), G.index_of({0, 1, 0, 0}),
                 G.index_of({0, 0, 1, 0}), G.index_of({0, 0, 0, 1}),
                 G.index_of({1, 1, 1, 1})};
  return canonical_set(G, K);
}

// grows a random cap by rejection sampling; not necessarily complete
point_set random_cap(const Geometry& G, int target, std::mt19937_64& rng) {
  point_set K;
  std::vector<char> mask(G.num_points(), 0);
  std::vector<std::int32_t> buf(G.q() + 1);
  int stall = 0;
  while (static_cast<int>(K.size()) < target && stall < 500) {
    const int x = static_cast<int>(rng() % G.num_points());
    if (mask[x] || !extends_set(G, K, mask, x, buf.data())) {
      ++stall;
      continue;
    }
    K.push_back(x);
    mask[x] = 1;
    stall = 0;
  }
  std::sort(K.begin(), K.end());
  return K;
}

long long comb2(long long n) { return n * (n - 1) / 2; }

}  // namespace

TEST_CASE("is_cap recognizes caps and rejects collinear triples") {
  Geometry G = build_pg(3, 1);
  CHECK(is_cap(G, frame_cap(G)).ok);
  CHECK(is_cap(G, binary_affine_cap(G)).ok);
  Line l = G.line_through(0, 7);
  auto res = is_cap(G, l.pts);
  REQUIRE_FALSE(res.ok);
  CHECK(res.witness == std::array<std::int32_t, 3>{l.pts[0], l.pts[1], l.pts[2]});
  CHECK_THROWS_AS(is_cap(build_pg(2, 2), {0, 1}), dimension_error);

  Geometry Q4 = build_pg(3, 2);
  CHECK(is_cap(Q4, elliptic_quadric(Q4)).ok);
}

TEST_CASE("tangent counts at members") {
  SECTION("ovoid q = 4: t = 5 at every member") {
    Geometry G = build_pg(3, 2);
    point_set K = elliptic_quadric(G);
    REQUIRE(K.size() == 17u);
    for (auto m : K) CHECK(tangent_count_at(G, K, m) == 5);
  }
  SECTION("ovoid q = 8: t = 9") {
    Geometry G = build_pg(3, 3);
    point_set K = elliptic_quadric(G);
    REQUIRE(K.size() == 65u);
    for (auto m : K) CHECK(tangent_count_at(G, K, m) == 9);
  }
  SECTION("5-cap in PG(3,2): t = 3") {
    Geometry G = build_pg(3, 1);
    point_set K = frame_cap(G);
    for (auto m : K) CHECK(tangent_count_at(G, K, m) == 3);
  }
  SECTION("non-member is rejected") {
    Geometry G = build_pg(3, 1);
    point_set K = frame_cap(G);
    int outside = 0;
    while (std::binary_search(K.begin(), K.end(), outside)) ++outside;
    CHECK_THROWS_AS(tangent_count_at(G, K, outside), precondition_error);
  }
}

TEST_CASE("sigma1 at external points") {
  SECTION("ovoid q = 4: every external point sees exactly q+1 tangents") {
    Geometry G = build_pg(3, 2);
    point_set K = elliptic_quadric(G);
    const auto mask = member_mask(G, K);
    int externals = 0;
    for (int x = 0; x < G.num_points(); ++x) {
      if (mask[x]) continue;
      ++externals;
      CHECK(sigma1(G, K, x) == 5);
    }
    CHECK(externals == 68);
  }
  SECTION("single-point cap: one tangent from every other point") {
    Geometry G = build_pg(3, 1);
    point_set K = {3};
    for (int x = 0; x < G.num_points(); ++x)
      if (x != 3) CHECK(sigma1(G, K, x) == 1);
  }
  SECTION("complete 5-cap in PG(3,2): sigma1 >= 1 everywhere off the cap") {
    Geometry G = build_pg(3, 1);
    point_set K = frame_cap(G);
    const auto mask = member_mask(G, K);
    for (int x = 0; x < G.num_points(); ++x)
      if (!mask[x]) CHECK(sigma1(G, K, x) >= 1);
  }
  SECTION("members are rejected") {
    Geometry G = build_pg(3, 1);
    CHECK_THROWS_AS(sigma1(G, frame_cap(G), frame_cap(G)[0]), precondition_error);
    CHECK_THROWS_AS(sigma1(G, frame_cap(G), -1), range_error);
  }
}

TEST_CASE("secant counts agree with direct tangent walks") {
  std::mt19937_64 rng(97);
  for (int h : {1, 2}) {
    Geometry G = build_pg(3, h);
    const long long q = G.q();
    point_set K = random_cap(G, 3 + h, rng);
    const long long k = static_cast<long long>(K.size());
    const auto secants = secant_counts(G, K);
    const auto mask = member_mask(G, K);
    long long total = 0;
    for (int x = 0; x < G.num_points(); ++x) {
      if (mask[x]) {
        CHECK(secants[x] == 0);  // members are not recorded
        continue;
      }
      total += secants[x];
      CHECK(sigma1(G, K, x) == k - 2 * secants[x]);
    }
    CHECK(total == comb2(k) * (q - 1));  // each secant carries q-1 externals
  }
}

TEST_CASE("completeness by extender scan") {
  SECTION("ovoid q = 4 is complete") {
    Geometry G = build_pg(3, 2);
    auto res = is_complete(G, elliptic_quadric(G));
    CHECK(res.complete);
    CHECK(res.extenders.empty());
  }
  SECTION("ovoid minus a point re-extends by exactly that point") {
    Geometry G = build_pg(3, 2);
    point_set K = elliptic_quadric(G);
    for (std::size_t drop : {std::size_t{0}, K.size() / 2, K.size() - 1}) {
      point_set M = K;
      const auto removed = M[drop];
      M.erase(M.begin() + static_cast<std::ptrdiff_t>(drop));
      auto res = is_complete(G, M);
      REQUIRE_FALSE(res.complete);
      CHECK(res.extenders == point_set{removed});
    }
  }
  SECTION("PG(3,2): frame 5-cap and affine 8-cap are complete") {
    Geometry G = build_pg(3, 1);
    CHECK(is_complete(G, frame_cap(G)).complete);
    CHECK(is_complete(G, binary_affine_cap(G)).complete);
  }
}

TEST_CASE("section profiles") {
  SECTION("ovoid q = 4") {
    Geometry G = build_pg(3, 2);
    auto prof = section_profile(G, elliptic_quadric(G));
    CHECK(prof == std::map<int, long long>{{1, 17}, {5, 68}});
  }
  SECTION("ovoid q = 8") {
    Geometry G = build_pg(3, 3);
    auto prof = section_profile(G, elliptic_quadric(G));
    CHECK(prof == std::map<int, long long>{{1, 65}, {9, 520}});
  }
  SECTION("PG(3,2) caps") {
    Geometry G = build_pg(3, 1);
    CHECK(section_profile(G, frame_cap(G)) ==
          std::map<int, long long>{{1, 5}, {3, 10}});
    CHECK(section_profile(G, binary_affine_cap(G)) ==
          std::map<int, long long>{{0, 1}, {4, 14}});
    CHECK(section_profile(G, {}) == std::map<int, long long>{{0, 15}});
  }
  SECTION("counting identities on random caps") {
    std::mt19937_64 rng(41);
    for (int h : {1, 2, 3}) {
      Geometry G = build_pg(3, h);
      const long long q = G.q();
      for (int trial = 0; trial < 4; ++trial) {
        point_set K = random_cap(G, 3 + 2 * h + trial, rng);
        const long long k = static_cast<long long>(K.size());
        auto prof = section_profile(G, K);
        long long planes = 0, points_on = 0, pairs_on = 0;
        for (auto& [x, c] : prof) {
          planes += c;
          points_on += x * c;
          pairs_on += comb2(x) * c;
        }
        CHECK(planes == G.num_planes());
        CHECK(points_on == k * (q * q + q + 1));
        CHECK(pairs_on == comb2(k) * (q + 1));
      }
    }
  }
}

TEST_CASE("plane section bound on complete caps") {
  SECTION("ovoids meet it with zero slack") {
    for (int h : {2, 3}) {
      Geometry G = build_pg(3, h);
      auto res = check_section_bound(G, elliptic_quadric(G));
      CHECK(res.applies);
      CHECK(res.pass);
      CHECK(res.margin == 0);
    }
  }
  SECTION("PG(3,2) complete caps") {
    Geometry G = build_pg(3, 1);
    auto r5 = check_section_bound(G, frame_cap(G));
    CHECK((r5.pass && r5.margin == 0 && r5.worst_value == 3));
    auto r8 = check_section_bound(G, binary_affine_cap(G));
    CHECK((r8.pass && r8.margin == 0));
  }
  SECTION("incomplete cap violates the hypothesis") {
    Geometry G = build_pg(3, 2);
    point_set K = elliptic_quadric(G);
    K.pop_back();
    CHECK_THROWS_AS(check_section_bound(G, K), hypothesis_error);
  }
}

TEST_CASE("sigma1 bound on complete caps") {
  SECTION("ovoids: max sigma1 = t exactly") {
    for (int h : {2, 3}) {
      Geometry G = build_pg(3, h);
      auto res = check_sigma1_bound(G, elliptic_quadric(G));
      CHECK(res.applies);
      CHECK(res.pass);
      CHECK(res.margin == 0);
      CHECK(res.worst_value == G.q() + 1);
    }
  }
  SECTION("complete 5-cap in PG(3,2)") {
    Geometry G = build_pg(3, 1);
    auto res = check_sigma1_bound(G, frame_cap(G));
    CHECK((res.pass && res.margin == 0 && res.worst_value == 3));
  }
  SECTION("incomplete cap violates the hypothesis") {
    Geometry G = build_pg(3, 2);
    point_set K = elliptic_quadric(G);
    K.pop_back();
    CHECK_THROWS_AS(check_sigma1_bound(G, K), hypothesis_error);
  }
}

TEST_CASE("cap report bundles every check") {
  Geometry G = build_pg(3, 2);
  point_set K = elliptic_quadric(G);

  SECTION("complete cap") {
    CapReport rep = cap_report(G, K);
    CHECK(rep.k == 17);
    CHECK(rep.t == 5);
    CHECK(rep.complete);
    CHECK(rep.extenders.empty());
    CHECK(rep.section_profile == std::map<int, long long>{{1, 17}, {5, 68}});
    CHECK(rep.sigma1_max == 5);
    CHECK(rep.sigma1_exhaustive);
    CHECK((rep.section_bound.applies && rep.section_bound.pass));
    CHECK((rep.sigma1_bound.applies && rep.sigma1_bound.pass));
    // the reported witness is the smallest external point hitting the max
    int first = 0;
    while (std::binary_search(K.begin(), K.end(), first)) ++first;
    CHECK(rep.sigma1_witness == first);
  }
  SECTION("incomplete cap: bound checks do not apply") {
    point_set M = K;
    M.pop_back();
    CapReport rep = cap_report(G, M);
    CHECK_FALSE(rep.complete);
    CHECK(rep.extenders == point_set{K.back()});
    CHECK_FALSE(rep.section_bound.applies);
    CHECK_FALSE(rep.sigma1_bound.applies);
  }
  SECTION("sampled external scan still finds the constant maximum") {
    CapReport rep = cap_report(G, K, false, 12345);
    CHECK_FALSE(rep.sigma1_exhaustive);
    CHECK(rep.sigma1_max == 5);  // sigma1 is constant on externals here
    CHECK((rep.sigma1_bound.applies && rep.sigma1_bound.pass));
  }
}

TEST_CASE("tangent identity holds at every member of random caps") {
  std::mt19937_64 rng(202);
  for (int h : {1, 2, 3}) {
    Geometry G = build_pg(3, h);
    const long long q = G.q();
    for (int trial = 0; trial < 3; ++trial) {
      point_set K = random_cap(G, 4 + 2 * h + trial, rng);
      const long long k = static_cast<long long>(K.size());
      for (auto m : K) CHECK(tangent_count_at(G, K, m) == q * q + q + 2 - k);
    }
  }
}
