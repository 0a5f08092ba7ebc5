#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "capkit/errors.hpp"
#include "capkit/gf2e.hpp"

namespace capkit {

// homogeneous coordinates c[0..n]; entries past n stay zero
using coords = std::array<elem, 4>;

struct Line {
  std::vector<std::int32_t> pts;  // sorted point indices, q+1 of them
  bool operator==(const Line& o) const { return pts == o.pts; }
};

// PG(n,q) for n in {2,3}, q = 2^h. Points are normalized coordinate vectors
// (first nonzero entry scaled to 1) indexed in lexicographic order. For n = 3
// planes are enumerated by dual coordinates under the same order, so plane i
// has dual coordinates point(i).
//
// Size guards: n = 2 accepts q <= 128, n = 3 accepts q <= 32. Plane point
// lists are materialized at build for q <= 16 and computed on demand at
// q = 32 (materializing them there would cost ~150 MB).
class Geometry {
 public:
  Geometry(int n, FieldTable F) : n_(n), F_(std::move(F)) {
    if (n != 2 && n != 3)
      throw dimension_error("PG(n,q): n must be 2 or 3, got " + std::to_string(n));
    q_ = F_.q();
    if (n == 3 && q_ > 32)
      throw capacity_error("PG(3,q): q <= 32 required, got " + std::to_string(q_));
    // n == 2 accepts every supported field (q <= 128)

    for (int lead = n_; lead >= 0; --lead) {
      coords c{};
      c[lead] = 1;
      const int tail = n_ - lead;
      std::vector<unsigned> suffix(tail, 0);
      while (true) {
        for (int j = 0; j < tail; ++j) c[lead + 1 + j] = static_cast<elem>(suffix[j]);
        points_.push_back(c);
        int j = tail - 1;
        while (j >= 0 && suffix[j] + 1 == q_) suffix[j--] = 0;
        if (j < 0) break;
        ++suffix[j];
      }
    }

    index_.assign(1u << ((n_ + 1) * F_.h()), -1);
    for (std::size_t i = 0; i < points_.size(); ++i)
      index_[pack(points_[i])] = static_cast<std::int32_t>(i);

    if (n_ == 3 && q_ <= 16) {
      plane_pts_.resize(points_.size());
      for (std::size_t d = 0; d < points_.size(); ++d)
        for (std::size_t p = 0; p < points_.size(); ++p)
          if (dot(points_[d], points_[p]) == 0)
            plane_pts_[d].push_back(static_cast<std::int32_t>(p));
    }

    cache_ = std::make_unique<LineCache>();
    cache_->enabled = q_ <= 16;
  }

  int n() const { return n_; }
  const FieldTable& field() const { return F_; }
  long long q() const { return q_; }

  int num_points() const { return static_cast<int>(points_.size()); }
  int num_planes() const {
    if (n_ != 3) throw dimension_error("planes exist only in PG(3,q)");
    return static_cast<int>(points_.size());
  }
  long long num_lines() const {
    const long long qq = q_;
    return n_ == 2 ? qq * qq + qq + 1 : (qq * qq + 1) * (qq * qq + qq + 1);
  }

  const std::vector<coords>& points() const { return points_; }
  const coords& point(int i) const { return points_[i]; }

  elem dot(const coords& a, const coords& b) const {
    elem s = 0;
    for (int j = 0; j <= n_; ++j) s = FieldTable::add(s, F_.mul(a[j], b[j]));
    return s;
  }

  coords normalized(coords c) const {
    int i = 0;
    while (i <= n_ && c[i] == 0) ++i;
    if (i > n_) throw precondition_error("normalize: zero vector");
    if (c[i] != 1) {
      const elem s = F_.inv(c[i]);
      for (int j = i; j <= n_; ++j) c[j] = F_.mul(s, c[j]);
    }
    return c;
  }

  int index_of(const coords& c) const { return index_[pack(normalized(c))]; }

  // raw line: out[0] = a, out[1] = b, remaining q-1 combinations unsorted;
  // returns q+1. out must hold q+1 entries.
  int line_points(int a, int b, std::int32_t* out) const {
    if (a == b)
      throw degenerate_line_error("line through equal points " + std::to_string(a));
    const coords& A = points_[a];
    const coords& B = points_[b];
    out[0] = a;
    out[1] = b;
    int cnt = 2;
    coords c{};
    for (unsigned lam = 1; lam < q_; ++lam) {
      for (int j = 0; j <= n_; ++j)
        c[j] = FieldTable::add(A[j], F_.mul(static_cast<elem>(lam), B[j]));
      out[cnt++] = index_[pack(normalized(c))];
    }
    return cnt;
  }

  Line line_through(int a, int b) const {
    check_point(a);
    check_point(b);
    if (cache_->enabled) {
      const std::uint64_t key = pair_key(a, b);
      std::lock_guard<std::mutex> lock(cache_->mu);
      auto it = cache_->map.find(key);
      if (it != cache_->map.end()) return it->second;
    }
    Line l;
    l.pts.resize(q_ + 1);
    line_points(a, b, l.pts.data());
    std::sort(l.pts.begin(), l.pts.end());
    if (cache_->enabled) {
      std::lock_guard<std::mutex> lock(cache_->mu);
      cache_->map.emplace(pair_key(a, b), l);
    }
    return l;
  }

  void set_line_cache(bool enabled) {
    std::lock_guard<std::mutex> lock(cache_->mu);
    cache_->enabled = enabled;
    if (!enabled) cache_->map.clear();
  }

  // visits every line through x exactly once; fn(pts, cnt) with pts[0] == x
  template <class Fn>
  void for_each_line_through(int x, Fn&& fn) const {
    check_point(x);
    std::vector<char> seen(points_.size(), 0);
    seen[x] = 1;
    std::vector<std::int32_t> buf(q_ + 1);
    for (int r = 0; r < num_points(); ++r) {
      if (seen[r]) continue;
      const int cnt = line_points(x, r, buf.data());
      for (int i = 0; i < cnt; ++i) seen[buf[i]] = 1;
      fn(buf.data(), cnt);
    }
  }

  const coords& plane_dual(int i) const {
    if (n_ != 3) throw dimension_error("planes exist only in PG(3,q)");
    return points_[i];
  }

  bool plane_contains(int plane, int point) const {
    return dot(plane_dual(plane), points_[point]) == 0;
  }

  std::vector<std::int32_t> plane_points(int i) const {
    if (n_ != 3) throw dimension_error("planes exist only in PG(3,q)");
    if (!plane_pts_.empty()) return plane_pts_[i];
    std::vector<std::int32_t> out;
    out.reserve(q_ * q_ + q_ + 1);
    for (int p = 0; p < num_points(); ++p)
      if (dot(points_[i], points_[p]) == 0) out.push_back(p);
    return out;
  }

  std::vector<std::int32_t> planes_through_line(const Line& l) const {
    if (n_ != 3) throw dimension_error("planes exist only in PG(3,q)");
    if (l.pts.size() < 2) throw precondition_error("planes_through_line: not a line");
    std::vector<std::int32_t> out;
    for (int d = 0; d < num_points(); ++d)
      if (plane_contains(d, l.pts[0]) && plane_contains(d, l.pts[1]))
        out.push_back(d);
    return out;
  }

 private:
  void check_point(int i) const {
    if (i < 0 || i >= num_points())
      throw precondition_error("point index out of range: " + std::to_string(i));
  }

  std::uint32_t pack(const coords& c) const {
    const int h = F_.h();
    std::uint32_t key = 0;
    for (int j = 0; j <= n_; ++j) key = (key << h) | c[j];
    return key;
  }

  static std::uint64_t pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  }

  struct LineCache {
    std::mutex mu;
    std::unordered_map<std::uint64_t, Line> map;
    bool enabled = false;
  };

  int n_;
  FieldTable F_;
  unsigned q_;
  std::vector<coords> points_;
  std::vector<std::int32_t> index_;
  std::vector<std::vector<std::int32_t>> plane_pts_;
  std::unique_ptr<LineCache> cache_;
};

inline Geometry build_pg(int n, int h) { return Geometry(n, make_field(h)); }
inline Geometry build_pg_q(int n, long long q) {
  return Geometry(n, make_field_q(q));
}

}  // namespace capkit
