#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "capkit/geometry.hpp"
#include "capkit/pointset.hpp"

namespace capkit {

struct ArcCheck {
  bool ok = true;
  std::array<std::int32_t, 3> witness{-1, -1, -1};
};

inline void require_plane_geometry(const Geometry& G) {
  if (G.n() != 2) throw dimension_error("arc operations need PG(2,q)");
}

// no three collinear; on failure the witness is the lexicographically
// smallest collinear triple
inline ArcCheck is_arc(const Geometry& G, const point_set& A) {
  require_plane_geometry(G);
  const auto s = canonical_set(G, A);
  const auto c = no_three_collinear(G, s);
  return ArcCheck{c.ok, c.witness};
}

namespace detail {

// tangent = line meeting the set in exactly one point (x itself may be that
// point). Walks the q+1 lines through x once each.
inline int tangent_count(const Geometry& G, const std::vector<char>& mask, int x) {
  int tangents = 0;
  G.for_each_line_through(x, [&](const std::int32_t* pts, int cnt) {
    int members = 0;
    for (int i = 0; i < cnt; ++i) members += mask[pts[i]];
    if (members == 1) ++tangents;
  });
  return tangents;
}

inline void require_arc(const Geometry& G, const point_set& A) {
  if (!no_three_collinear(G, A).ok)
    throw precondition_error("point set is not an arc");
}

}  // namespace detail

// number of tangent lines of A through X; X may or may not belong to A
inline int tangents_through(const Geometry& G, const point_set& A, int x) {
  require_plane_geometry(G);
  const auto s = canonical_set(G, A);
  detail::require_arc(G, s);
  if (x < 0 || x >= G.num_points())
    throw precondition_error("point index out of range: " + std::to_string(x));
  return detail::tangent_count(G, member_mask(G, s), x);
}

struct ArcTangentReport {
  int k = 0;
  int per_member = 0;  // q + 2 - k, the same at every member
  std::vector<std::pair<std::int32_t, int>> member;
  std::vector<std::pair<std::int32_t, int>> external;
};

inline ArcTangentReport arc_tangent_report(const Geometry& G, const point_set& A) {
  require_plane_geometry(G);
  const auto s = canonical_set(G, A);
  detail::require_arc(G, s);
  const auto mask = member_mask(G, s);
  ArcTangentReport rep;
  rep.k = static_cast<int>(s.size());
  rep.per_member = static_cast<int>(G.q()) + 2 - rep.k;
  for (int x = 0; x < G.num_points(); ++x) {
    const int t = detail::tangent_count(G, mask, x);
    if (mask[x]) {
      if (t != rep.per_member)
        throw consistency_error("member tangent count violates q+2-k");
      rep.member.emplace_back(x, t);
    } else {
      rep.external.emplace_back(x, t);
    }
  }
  return rep;
}

// the unique point completing a (q+1)-arc to a (q+2)-arc (q even): all q+1
// tangents concur there, so two tangents pin it down; the result is verified
inline std::int32_t nucleus(const Geometry& G, const point_set& A) {
  require_plane_geometry(G);
  const auto s = canonical_set(G, A);
  if (s.size() != static_cast<std::size_t>(G.q()) + 1 ||
      !no_three_collinear(G, s).ok)
    throw precondition_error("nucleus needs a (q+1)-arc");
  const auto mask = member_mask(G, s);

  auto tangent_at = [&](int m) {
    std::optional<Line> found;
    G.for_each_line_through(m, [&](const std::int32_t* pts, int cnt) {
      int members = 0;
      for (int i = 0; i < cnt; ++i) members += mask[pts[i]];
      if (members == 1) {
        if (found) throw consistency_error("member of a (q+1)-arc has two tangents");
        Line l;
        l.pts.assign(pts, pts + cnt);
        std::sort(l.pts.begin(), l.pts.end());
        found = std::move(l);
      }
    });
    if (!found) throw consistency_error("member of a (q+1)-arc has no tangent");
    return *found;
  };

  const Line t0 = tangent_at(s[0]);
  const Line t1 = tangent_at(s[1]);
  std::vector<std::int32_t> common;
  std::set_intersection(t0.pts.begin(), t0.pts.end(), t1.pts.begin(),
                        t1.pts.end(), std::back_inserter(common));
  if (common.size() != 1)
    throw uniqueness_error("tangents of a (q+1)-arc must meet in one point");
  const std::int32_t N = common[0];

  point_set extended = s;
  extended.push_back(N);
  if (!is_arc(G, extended).ok)
    throw uniqueness_error("tangent intersection does not extend the arc");
  return N;
}

// completes a k-arc in the forced range to its (q+2)-arc. Applicability is
// decided in integers: for k <= q, k > q - sqrt(q) + 1 iff (q+1-k)^2 < q.
// Every extension point recorded along the way must land in the final arc;
// anything else means the completion was not forced.
inline point_set complete_to_hyperoval(const Geometry& G, const point_set& A) {
  require_plane_geometry(G);
  const long long q = G.q();
  auto s = canonical_set(G, A);
  if (!no_three_collinear(G, s).ok)
    throw precondition_error("point set is not an arc");
  const long long k = static_cast<long long>(s.size());
  if (k == q + 2) return s;
  if (q <= 2) throw range_error("forced completion needs q > 2");
  const long long d = q + 1 - k;
  if (k > q + 1 || (d > 0 && d * d >= q))
    throw range_error("k = " + std::to_string(k) +
                      " is outside the forced-completion range for q = " +
                      std::to_string(q));

  std::vector<point_set> step_extenders;
  auto current = s;
  auto mask = member_mask(G, current);
  std::vector<std::int32_t> buf(G.q() + 1);
  while (current.size() < static_cast<std::size_t>(q) + 2) {
    point_set ext;
    for (int x = 0; x < G.num_points(); ++x)
      if (!mask[x] && extends_set(G, current, mask, x, buf.data()))
        ext.push_back(x);
    if (ext.empty())
      throw uniqueness_error("arc admits no extension inside the forced range");
    step_extenders.push_back(ext);
    const std::int32_t chosen = ext.front();
    current.insert(std::lower_bound(current.begin(), current.end(), chosen),
                   chosen);
    mask[chosen] = 1;
  }

  for (const auto& ext : step_extenders)
    for (auto x : ext)
      if (!mask[x])
        throw uniqueness_error("extension order changed the completion");
  return current;
}

// q even: through every point off an arc the tangent count has the parity of k
inline bool tangent_parity_ok(const Geometry& G, const point_set& A) {
  require_plane_geometry(G);
  const auto s = canonical_set(G, A);
  detail::require_arc(G, s);
  const auto mask = member_mask(G, s);
  const int parity = static_cast<int>(s.size()) & 1;
  for (int x = 0; x < G.num_points(); ++x)
    if (!mask[x] && (detail::tangent_count(G, mask, x) & 1) != parity)
      return false;
  return true;
}

// relabels a plane of PG(3,q) as a standalone PG(2,q) through the
// lexicographically first projective frame of that plane
struct PlaneEmbedding {
  Geometry pg2;
  std::vector<std::int32_t> to_local;   // PG(3,q) index -> local index or -1
  std::vector<std::int32_t> to_global;  // local index -> PG(3,q) index
};

inline PlaneEmbedding plane_to_pg2(const Geometry& G, int plane) {
  if (G.n() != 3) throw dimension_error("plane_to_pg2 needs PG(3,q)");
  if (plane < 0 || plane >= G.num_planes())
    throw precondition_error("plane index out of range");
  const auto& F = G.field();
  const auto pts = G.plane_points(plane);
  const auto on_line = [&](int a, int b, int x) {
    std::vector<std::int32_t> buf(G.q() + 1);
    const int cnt = G.line_points(a, b, buf.data());
    for (int i = 0; i < cnt; ++i)
      if (buf[i] == x) return true;
    return false;
  };

  const int p0 = pts[0], p1 = pts[1];
  int p2 = -1, p3 = -1;
  for (auto x : pts)
    if (x != p0 && x != p1 && !on_line(p0, p1, x)) {
      p2 = x;
      break;
    }
  for (auto x : pts)
    if (x != p0 && x != p1 && x != p2 && !on_line(p0, p1, x) &&
        !on_line(p0, p2, x) && !on_line(p1, p2, x)) {
      p3 = x;
      break;
    }
  if (p2 < 0 || p3 < 0)
    throw consistency_error("plane has no projective frame");

  // scale the basis so the unit point gets coordinates (1,1,1): solve
  // alpha*P0 + beta*P1 + gamma*P2 = P3 by elimination over GF(q)
  std::array<coords, 3> base{G.point(p0), G.point(p1), G.point(p2)};
  coords target = G.point(p3);
  std::array<elem, 3> coef{0, 0, 0};
  {
    // rows: 4 equations in 3 unknowns; reduce the 4x4 augmented system
    std::array<std::array<elem, 4>, 4> M{};
    for (int eq = 0; eq < 4; ++eq) {
      for (int u = 0; u < 3; ++u) M[eq][u] = base[u][eq];
      M[eq][3] = target[eq];
    }
    int row = 0;
    std::array<int, 3> pivot_row{-1, -1, -1};
    for (int col = 0; col < 3 && row < 4; ++col) {
      int pr = -1;
      for (int r = row; r < 4; ++r)
        if (M[r][col] != 0) {
          pr = r;
          break;
        }
      if (pr < 0) continue;
      std::swap(M[row], M[pr]);
      const elem s = F.inv(M[row][col]);
      for (int c = col; c < 4; ++c) M[row][c] = F.mul(s, M[row][c]);
      for (int r = 0; r < 4; ++r) {
        if (r == row || M[r][col] == 0) continue;
        const elem f = M[r][col];
        for (int c = col; c < 4; ++c)
          M[r][c] = FieldTable::add(M[r][c], F.mul(f, M[row][c]));
      }
      pivot_row[col] = row;
      ++row;
    }
    for (int u = 0; u < 3; ++u) {
      if (pivot_row[u] < 0) throw consistency_error("frame basis is degenerate");
      coef[u] = M[pivot_row[u]][3];
      if (coef[u] == 0) throw consistency_error("frame unit point is degenerate");
    }
  }
  std::array<coords, 3> basis{};
  for (int u = 0; u < 3; ++u)
    for (int j = 0; j < 4; ++j) basis[u][j] = F.mul(coef[u], base[u][j]);

  // pivot columns of the basis matrix let local coordinates be read off and
  // then verified against the remaining column
  std::array<std::array<elem, 3>, 3> inv{};
  std::array<int, 3> cols{-1, -1, -1};
  {
    std::array<std::array<elem, 3>, 4> colv{};  // candidate columns
    for (int j = 0; j < 4; ++j)
      for (int u = 0; u < 3; ++u) colv[j][u] = basis[u][j];
    // pick the lexicographically first independent column triple
    for (int j0 = 0; j0 < 4 && cols[2] < 0; ++j0)
      for (int j1 = j0 + 1; j1 < 4 && cols[2] < 0; ++j1)
        for (int j2 = j1 + 1; j2 < 4 && cols[2] < 0; ++j2) {
          std::array<std::array<elem, 3>, 3> m{colv[j0], colv[j1], colv[j2]};
          // invert m^T? we need, for x restricted to these columns, y with
          // y * B_cols = x_cols, i.e. y = x_cols * inv(B_cols)
          std::array<std::array<elem, 3>, 3> a{};
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) a[r][c] = m[c][r];  // a = B restricted
          // invert a over GF(q)
          std::array<std::array<elem, 6>, 3> w{};
          for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) w[r][c] = a[r][c];
            w[r][3 + r] = 1;
          }
          bool ok = true;
          for (int col = 0; col < 3 && ok; ++col) {
            int pr = -1;
            for (int r = col; r < 3; ++r)
              if (w[r][col] != 0) {
                pr = r;
                break;
              }
            if (pr < 0) {
              ok = false;
              break;
            }
            std::swap(w[col], w[pr]);
            const elem sc = F.inv(w[col][col]);
            for (int c = 0; c < 6; ++c) w[col][c] = F.mul(sc, w[col][c]);
            for (int r = 0; r < 3; ++r) {
              if (r == col || w[r][col] == 0) continue;
              const elem f = w[r][col];
              for (int c = 0; c < 6; ++c)
                w[r][c] = FieldTable::add(w[r][c], F.mul(f, w[col][c]));
            }
          }
          if (!ok) continue;
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) inv[r][c] = w[r][3 + c];
          cols = {j0, j1, j2};
        }
    if (cols[2] < 0) throw consistency_error("frame basis is degenerate");
  }

  PlaneEmbedding emb{Geometry(2, FieldTable(F.h())),
                     std::vector<std::int32_t>(G.num_points(), -1),
                     std::vector<std::int32_t>(pts.size(), -1)};
  for (auto x : pts) {
    const coords& xc = G.point(x);
    std::array<elem, 3> xr{xc[cols[0]], xc[cols[1]], xc[cols[2]]};
    coords local{};
    for (int u = 0; u < 3; ++u) {
      elem acc = 0;
      for (int r = 0; r < 3; ++r)
        acc = FieldTable::add(acc, F.mul(xr[r], inv[r][u]));
      local[u] = acc;
    }
    // verify on all four columns
    for (int j = 0; j < 4; ++j) {
      elem acc = 0;
      for (int u = 0; u < 3; ++u)
        acc = FieldTable::add(acc, F.mul(local[u], basis[u][j]));
      if (acc != xc[j])
        throw consistency_error("plane point escapes its frame span");
    }
    const int li = emb.pg2.index_of(local);
    emb.to_local[x] = li;
    emb.to_global[li] = x;
  }
  return emb;
}

}  // namespace capkit
