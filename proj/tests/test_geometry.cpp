#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <vector>

#include "capkit/geometry.hpp"

using capkit::Geometry;
using capkit::Line;
using capkit::build_pg;
using capkit::build_pg_q;
using capkit::coords;

namespace {

long long gaussian_points(long long q, int n) {
  long long s = 0, p = 1;
  for (int i = 0; i <= n; ++i) {
    s += p;
    p *= q;
  }
  return s;
}

std::set<std::vector<std::int32_t>> all_lines(const Geometry& G) {
  std::set<std::vector<std::int32_t>> ls;
  for (int a = 0; a < G.num_points(); ++a)
    for (int b = a + 1; b < G.num_points(); ++b)
      ls.insert(G.line_through(a, b).pts);
  return ls;
}

}  // namespace

TEST_CASE("point and plane counts") {
  CHECK(build_pg(2, 1).num_points() == 7);
  CHECK(build_pg(2, 2).num_points() == 21);
  CHECK(build_pg(2, 3).num_points() == 73);

  Geometry g32 = build_pg(3, 1);
  CHECK(g32.num_points() == 15);
  CHECK(g32.num_planes() == 15);

  Geometry g34 = build_pg(3, 2);
  CHECK(g34.num_points() == 85);
  CHECK(g34.num_planes() == 85);

  Geometry g38 = build_pg(3, 3);
  CHECK(g38.num_points() == 585);
  CHECK(g38.num_planes() == 585);

  for (int h = 1; h <= 5; ++h)
    CHECK(build_pg(3, h).num_points() == gaussian_points(1ll << h, 3));
  for (int h = 1; h <= 7; ++h)
    CHECK(build_pg(2, h).num_points() == gaussian_points(1ll << h, 2));
}

TEST_CASE("line counts match exhaustive enumeration") {
  CHECK(build_pg(3, 1).num_lines() == 35);
  CHECK(build_pg(3, 2).num_lines() == 357);
  CHECK(build_pg(3, 3).num_lines() == 4745);
  CHECK(build_pg(2, 2).num_lines() == 21);

  CHECK(all_lines(build_pg(3, 1)).size() == 35);
  CHECK(all_lines(build_pg(3, 2)).size() == 357);
  CHECK(all_lines(build_pg(2, 2)).size() == 21);
  CHECK(all_lines(build_pg(2, 3)).size() == 73);
}

TEST_CASE("points are normalized and lexicographically ordered") {
  for (const auto* G : {new Geometry(build_pg(3, 2)), new Geometry(build_pg(2, 3))}) {
    const auto& pts = G->points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      int lead = 0;
      while (pts[i][lead] == 0) ++lead;
      CHECK(pts[i][lead] == 1);
      if (i + 1 < pts.size()) CHECK(pts[i] < pts[i + 1]);
      CHECK(G->index_of(pts[i]) == static_cast<int>(i));
    }
    delete G;
  }
}

TEST_CASE("index_of normalizes its argument") {
  Geometry G = build_pg(2, 2);
  // (2,2,0) ~ (1,1,0)
  CHECK(G.index_of({2, 2, 0, 0}) == G.index_of({1, 1, 0, 0}));
  CHECK(G.index_of({0, 3, 3, 0}) == G.index_of({0, 1, 1, 0}));
  CHECK_THROWS_AS(G.index_of({0, 0, 0, 0}), capkit::precondition_error);
}

TEST_CASE("frozen line in PG(3,2)") {
  Geometry G = build_pg(3, 1);
  const int e0 = G.index_of({1, 0, 0, 0});
  const int e1 = G.index_of({0, 1, 0, 0});
  const int s = G.index_of({1, 1, 0, 0});
  Line l = G.line_through(e0, e1);
  std::vector<std::int32_t> want{e1, e0, s};
  std::sort(want.begin(), want.end());
  CHECK(l.pts == want);
}

TEST_CASE("line properties") {
  std::mt19937_64 rng(4242);
  for (int h : {1, 2, 3}) {
    Geometry G = build_pg(3, h);
    const long long q = G.q();
    for (int trial = 0; trial < 60; ++trial) {
      int a = static_cast<int>(rng() % G.num_points());
      int b = static_cast<int>(rng() % G.num_points());
      if (a == b) continue;
      Line l = G.line_through(a, b);
      REQUIRE(l.pts.size() == static_cast<std::size_t>(q + 1));
      CHECK(std::is_sorted(l.pts.begin(), l.pts.end()));
      CHECK(std::set<std::int32_t>(l.pts.begin(), l.pts.end()).size() == l.pts.size());
      CHECK(std::binary_search(l.pts.begin(), l.pts.end(), a));
      CHECK(std::binary_search(l.pts.begin(), l.pts.end(), b));
      CHECK(G.line_through(b, a) == l);
      // one line through two points: every member pair spans the same line
      CHECK(G.line_through(l.pts[0], l.pts.back()) == l);
      for (auto c : l.pts)
        if (c != a) CHECK(G.line_through(a, c) == l);
    }
  }
  Geometry G = build_pg(3, 1);
  CHECK_THROWS_AS(G.line_through(3, 3), capkit::degenerate_line_error);
}

TEST_CASE("line cache is transparent") {
  Geometry G = build_pg(3, 2);
  Line cached = G.line_through(10, 20);
  G.set_line_cache(false);
  CHECK(G.line_through(10, 20) == cached);
  G.set_line_cache(true);
  CHECK(G.line_through(10, 20) == cached);
}

TEST_CASE("every point lies on the expected number of lines") {
  Geometry g34 = build_pg(3, 2);
  int count = 0;
  g34.for_each_line_through(7, [&](const std::int32_t*, int) { ++count; });
  CHECK(count == 21);  // q^2 + q + 1

  Geometry g24 = build_pg(2, 2);
  count = 0;
  g24.for_each_line_through(0, [&](const std::int32_t*, int) { ++count; });
  CHECK(count == 5);  // q + 1

  // the walk partitions the remaining points
  Geometry g38 = build_pg(3, 3);
  std::set<std::int32_t> touched;
  int lines = 0;
  g38.for_each_line_through(100, [&](const std::int32_t* pts, int cnt) {
    ++lines;
    CHECK(pts[0] == 100);
    for (int i = 1; i < cnt; ++i) touched.insert(pts[i]);
  });
  CHECK(lines == 73);
  CHECK(touched.size() == 584u);
}

TEST_CASE("plane membership agrees with dual form") {
  Geometry G = build_pg(3, 1);
  for (int d = 0; d < G.num_planes(); ++d) {
    auto pts = G.plane_points(d);
    CHECK(pts.size() == 7u);  // q^2 + q + 1
    std::set<std::int32_t> s(pts.begin(), pts.end());
    for (int p = 0; p < G.num_points(); ++p) {
      const bool in = G.dot(G.plane_dual(d), G.point(p)) == 0;
      CHECK(G.plane_contains(d, p) == in);
      CHECK(s.count(p) == static_cast<std::size_t>(in));
    }
  }
}

TEST_CASE("pencil of planes through a line") {
  // q = 8: the q+1 planes through a line partition the points off the line
  Geometry G = build_pg(3, 3);
  Line l = G.line_through(17, 200);
  auto pencil = G.planes_through_line(l);
  REQUIRE(pencil.size() == 9u);
  std::vector<int> hit(G.num_points(), 0);
  for (int d : pencil)
    for (int p : G.plane_points(d)) ++hit[p];
  std::set<std::int32_t> lp(l.pts.begin(), l.pts.end());
  for (int p = 0; p < G.num_points(); ++p)
    CHECK(hit[p] == (lp.count(p) ? 9 : 1));

  Geometry g34 = build_pg(3, 2);
  for (int trial : {0, 1, 2}) {
    Line m = g34.line_through(3 * trial + 1, 40 + trial);
    CHECK(g34.planes_through_line(m).size() == 5u);
  }
}

TEST_CASE("two distinct planes meet in exactly one line") {
  Geometry G = build_pg(3, 1);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    int d1 = static_cast<int>(rng() % G.num_planes());
    int d2 = static_cast<int>(rng() % G.num_planes());
    if (d1 == d2) continue;
    auto p1 = G.plane_points(d1), p2 = G.plane_points(d2);
    std::vector<std::int32_t> common;
    std::set_intersection(p1.begin(), p1.end(), p2.begin(), p2.end(),
                          std::back_inserter(common));
    REQUIRE(common.size() == 3u);  // q + 1
    CHECK(G.line_through(common[0], common[1]).pts == common);
  }
}

TEST_CASE("capacity and dimension guards") {
  CHECK_THROWS_AS(build_pg(3, 6), capkit::capacity_error);
  CHECK_THROWS_AS(build_pg(3, 7), capkit::capacity_error);
  CHECK_THROWS_AS(Geometry(1, capkit::make_field(2)), capkit::dimension_error);
  CHECK_THROWS_AS(Geometry(4, capkit::make_field(2)), capkit::dimension_error);
  CHECK_THROWS_AS(build_pg_q(3, 6), capkit::unsupported_field_error);

  Geometry plane = build_pg(2, 2);
  CHECK_THROWS_AS(plane.num_planes(), capkit::dimension_error);
  CHECK_THROWS_AS(plane.plane_points(0), capkit::dimension_error);
  CHECK_THROWS_AS(plane.planes_through_line(plane.line_through(0, 1)),
                  capkit::dimension_error);
}

TEST_CASE("large geometries stay within the envelope") {
  // PG(3,32): plane point lists are computed on demand
  Geometry G = build_pg(3, 5);
  CHECK(G.num_points() == 33825);
  CHECK(G.num_planes() == 33825);
  auto pts = G.plane_points(12345);
  CHECK(pts.size() == 1057u);  // q^2 + q + 1
  for (int p : {pts[0], pts[500], pts[1056]}) CHECK(G.plane_contains(12345, p));
  Line l = G.line_through(5, 31337);
  CHECK(l.pts.size() == 33u);

  // PG(2,128)
  Geometry P = build_pg(2, 7);
  CHECK(P.num_points() == 16513);
  CHECK(P.line_through(0, 16000).pts.size() == 129u);
}

TEST_CASE("construction is deterministic") {
  Geometry a = build_pg(3, 2), b = build_pg(3, 2);
  CHECK(a.points() == b.points());
  CHECK(a.plane_points(17) == b.plane_points(17));
  CHECK(a.line_through(2, 50) == b.line_through(2, 50));
}
