#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "capkit/pointset.hpp"

namespace capkit {

namespace detail {

inline void require_solid_geometry(const Geometry& G) {
  if (G.n() != 3)
    throw dimension_error("cap operations require PG(3,q), got n = " +
                          std::to_string(G.n()));
}

inline void require_cap(const Geometry& G, const point_set& K) {
  auto res = no_three_collinear(G, K);
  if (!res.ok) throw precondition_error("point set is not a cap");
}

}  // namespace detail

inline CollinearityCheck is_cap(const Geometry& G, const point_set& S) {
  detail::require_solid_geometry(G);
  return no_three_collinear(G, S);
}

// lines through P meeting K only in P; always q^2+q+2-k for cap members
inline int tangent_count_at(const Geometry& G, const point_set& K, int P) {
  detail::require_solid_geometry(G);
  detail::require_cap(G, K);
  const auto mask = member_mask(G, K);
  if (!mask[P]) throw precondition_error("point is not a cap member");
  int count = 0;
  G.for_each_line_through(P, [&](const std::int32_t* pts, int n) {
    int members = 0;
    for (int i = 0; i < n; ++i) members += mask[pts[i]];
    if (members == 1) ++count;
  });
  const long long k = static_cast<long long>(K.size());
  const long long q = G.q();
  if (count != q * q + q + 2 - k)
    throw consistency_error("tangent count at member deviates from q^2+q+2-k");
  return count;
}

// number of tangents of K through an external point
inline int sigma1(const Geometry& G, const point_set& K, int Q) {
  detail::require_solid_geometry(G);
  detail::require_cap(G, K);
  const auto mask = member_mask(G, K);
  if (Q < 0 || Q >= G.num_points()) throw range_error("point index out of range");
  if (mask[Q]) throw precondition_error("sigma1 requires an external point");
  int count = 0;
  G.for_each_line_through(Q, [&](const std::int32_t* pts, int n) {
    int members = 0;
    for (int i = 0; i < n; ++i) members += mask[pts[i]];
    if (members == 1) ++count;
  });
  return count;
}

// per-point count of secants of K through that point.
// Every line meets a cap in at most 2 points, so walking the C(k,2)
// member pairs visits each secant exactly once; a point X then extends
// K exactly when X is external and secants[X] = 0, and an external X
// has sigma1(X) = k - 2*secants[X].
inline std::vector<std::int32_t> secant_counts(const Geometry& G,
                                               const point_set& K) {
  detail::require_cap(G, K);
  std::vector<std::int32_t> counts(G.num_points(), 0);
  const auto mask = member_mask(G, K);
  std::vector<std::int32_t> buf(G.q() + 1);
  for (std::size_t i = 0; i < K.size(); ++i)
    for (std::size_t j = i + 1; j < K.size(); ++j) {
      const int n = G.line_points(K[i], K[j], buf.data());
      for (int u = 0; u < n; ++u)
        if (!mask[buf[u]]) ++counts[buf[u]];
    }
  return counts;
}

struct CompletionCheck {
  bool complete = false;
  point_set extenders;  // every point whose addition keeps a cap
};

inline CompletionCheck is_complete(const Geometry& G, const point_set& K) {
  detail::require_solid_geometry(G);
  const auto secants = secant_counts(G, K);
  const auto mask = member_mask(G, K);
  CompletionCheck res;
  for (int x = 0; x < G.num_points(); ++x)
    if (!mask[x] && secants[x] == 0) res.extenders.push_back(x);
  res.complete = res.extenders.empty();
  return res;
}

// histogram x -> number of planes meeting K in exactly x points
inline std::map<int, long long> section_profile(const Geometry& G,
                                                const point_set& K) {
  detail::require_solid_geometry(G);
  detail::require_cap(G, K);
  std::map<int, long long> profile;
  for (int p = 0; p < G.num_planes(); ++p) {
    const coords& d = G.plane_dual(p);
    int x = 0;
    for (auto m : K)
      if (G.dot(d, G.point(m)) == 0) ++x;
    ++profile[x];
  }
  return profile;
}

struct BoundCheck {
  bool applies = false;  // hypothesis met (complete cap)
  bool pass = false;
  long long margin = 0;   // slack at the worst witness; negative iff failed
  std::int32_t witness = -1;
  long long worst_value = 0;
};

namespace detail {

inline long long tangents_per_member(const Geometry& G, const point_set& K) {
  const long long q = G.q();
  return q * q + q + 2 - static_cast<long long>(K.size());
}

// t(t-1) >= q(q+2-x)x over every plane section size x
inline BoundCheck section_bound_check(const Geometry& G, const point_set& K) {
  const long long q = G.q();
  const long long t = tangents_per_member(G, K);
  BoundCheck res;
  res.applies = true;
  for (int p = 0; p < G.num_planes(); ++p) {
    const coords& d = G.plane_dual(p);
    long long x = 0;
    for (auto m : K)
      if (G.dot(d, G.point(m)) == 0) ++x;
    const long long margin = t * (t - 1) - q * (q + 2 - x) * x;
    if (res.witness < 0 || margin < res.margin) {
      res.margin = margin;
      res.witness = p;
      res.worst_value = x;
    }
  }
  res.pass = res.witness >= 0 && res.margin >= 0;
  return res;
}

// max sigma1 over external points <= t
inline BoundCheck sigma1_bound_check(const Geometry& G, const point_set& K,
                                     const std::vector<std::int32_t>& secants,
                                     const std::vector<char>& mask,
                                     bool exhaustive, std::uint64_t seed) {
  const long long k = static_cast<long long>(K.size());
  const long long t = tangents_per_member(G, K);
  BoundCheck res;
  res.applies = true;
  auto consider = [&](int x) {
    const long long s = k - 2 * secants[x];
    if (res.witness < 0 || s > res.worst_value) {
      res.worst_value = s;
      res.witness = x;
    }
  };
  if (exhaustive) {
    for (int x = 0; x < G.num_points(); ++x)
      if (!mask[x]) consider(x);
  } else {
    std::mt19937_64 rng(seed);
    const int n = G.num_points();
    for (int trial = 0; trial < 4096; ++trial) {
      const int x = static_cast<int>(rng() % n);
      if (!mask[x]) consider(x);
    }
  }
  res.margin = t - res.worst_value;
  res.pass = res.witness >= 0 && res.margin >= 0;
  return res;
}

}  // namespace detail

inline BoundCheck check_section_bound(const Geometry& G, const point_set& K) {
  detail::require_solid_geometry(G);
  detail::require_cap(G, K);
  if (!is_complete(G, K).complete)
    throw hypothesis_error("section bound requires a complete cap");
  return detail::section_bound_check(G, K);
}

inline BoundCheck check_sigma1_bound(const Geometry& G, const point_set& K) {
  detail::require_solid_geometry(G);
  detail::require_cap(G, K);
  if (!is_complete(G, K).complete)
    throw hypothesis_error("sigma1 bound requires a complete cap");
  return detail::sigma1_bound_check(G, K, secant_counts(G, K),
                                    member_mask(G, K), true, 0);
}

struct CapReport {
  int k = 0;
  long long t = 0;
  bool complete = false;
  point_set extenders;  // empty iff complete
  std::map<int, long long> section_profile;
  long long sigma1_max = 0;
  std::int32_t sigma1_witness = -1;
  bool sigma1_exhaustive = true;
  BoundCheck section_bound;  // applies only to complete caps
  BoundCheck sigma1_bound;
};

// scans are exhaustive unless told otherwise; callers drop to sampled
// external-point scans only at q = 32
inline CapReport cap_report(const Geometry& G, const point_set& K,
                            bool exhaustive = true, std::uint64_t seed = 0) {
  detail::require_solid_geometry(G);
  detail::require_cap(G, K);
  CapReport rep;
  rep.k = static_cast<int>(K.size());
  rep.t = detail::tangents_per_member(G, K);
  const auto mask = member_mask(G, K);
  const auto secants = secant_counts(G, K);
  for (int x = 0; x < G.num_points(); ++x)
    if (!mask[x] && secants[x] == 0) rep.extenders.push_back(x);
  rep.complete = rep.extenders.empty();
  rep.section_profile = section_profile(G, K);
  rep.sigma1_exhaustive = exhaustive;
  if (rep.k > 0) {
    auto s1 = detail::sigma1_bound_check(G, K, secants, mask, exhaustive, seed);
    rep.sigma1_max = s1.worst_value;
    rep.sigma1_witness = s1.witness;
    if (rep.complete) {
      rep.sigma1_bound = s1;
      rep.section_bound = detail::section_bound_check(G, K);
    }
  }
  return rep;
}

}  // namespace capkit
