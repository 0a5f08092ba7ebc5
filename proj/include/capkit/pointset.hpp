#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "capkit/errors.hpp"
#include "capkit/geometry.hpp"

namespace capkit {

// arcs and caps are sorted lists of distinct point indices
using point_set = std::vector<std::int32_t>;
using Arc = point_set;
using Cap = point_set;

// sorted copy; rejects out-of-range indices and duplicates
inline point_set canonical_set(const Geometry& G, point_set s) {
  for (auto i : s)
    if (i < 0 || i >= G.num_points())
      throw precondition_error("point index out of range: " + std::to_string(i));
  std::sort(s.begin(), s.end());
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] == s[i - 1])
      throw precondition_error("duplicate point index: " + std::to_string(s[i]));
  return s;
}

inline std::vector<char> member_mask(const Geometry& G, const point_set& s) {
  std::vector<char> m(G.num_points(), 0);
  for (auto i : s) m[i] = 1;
  return m;
}

struct CollinearityCheck {
  bool ok = true;
  std::array<std::int32_t, 3> witness{-1, -1, -1};  // valid when !ok
};

// full pair scan; when violations exist the lexicographically smallest
// collinear triple is reported
inline CollinearityCheck no_three_collinear(const Geometry& G, const point_set& s) {
  const auto mask = member_mask(G, s);
  CollinearityCheck res;
  std::vector<std::int32_t> buf(G.q() + 1);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const int cnt = G.line_points(s[i], s[j], buf.data());
      for (int r = 2; r < cnt; ++r) {
        if (!mask[buf[r]]) continue;
        std::array<std::int32_t, 3> t{s[i], s[j], buf[r]};
        std::sort(t.begin(), t.end());
        if (res.ok || t < res.witness) {
          res.ok = false;
          res.witness = t;
        }
      }
    }
  return res;
}

// count of members of `mask` on the line through x and m, m a member;
// early-exits at 2 (secant). Used by extendability scans.
inline bool blocks_extension(const Geometry& G, const std::vector<char>& mask,
                             int x, int m, std::int32_t* buf) {
  const int cnt = G.line_points(x, m, buf);
  for (int r = 2; r < cnt; ++r)
    if (mask[buf[r]]) return true;
  return false;
}

// true iff s (a no-3-collinear set) stays one after adding x
inline bool extends_set(const Geometry& G, const point_set& s,
                        const std::vector<char>& mask, int x,
                        std::int32_t* buf) {
  for (auto m : s)
    if (blocks_extension(G, mask, x, m, buf)) return false;
  return true;
}

}  // namespace capkit
