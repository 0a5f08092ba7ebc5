#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "capkit/pointset.hpp"

namespace capkit {

// fixed 64-bit mixing permutation (splitmix64 step); run i of a multi-run
// operation draws its stream from run_seed(seed, i), documented in README
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run) {
  return mix64(seed ^ run);
}

enum class Strategy { uniform_random, max_extender_elimination };

inline Strategy strategy_from_string(const std::string& s) {
  if (s == "uniform" || s == "uniform_random") return Strategy::uniform_random;
  if (s == "elim" || s == "max_extender_elimination")
    return Strategy::max_extender_elimination;
  throw usage_error("unknown strategy: " + s);
}

inline std::string to_string(Strategy s) {
  return s == Strategy::uniform_random ? "uniform_random"
                                       : "max_extender_elimination";
}

struct SearchConfig {
  std::uint64_t seed = 0;
  int restarts = 1;
  Strategy strategy = Strategy::uniform_random;
  point_set start;
};

namespace detail {

// live extender bookkeeping for one growing cap.
// alive[x] = 1 while x can still be added; adding X kills exactly the
// alive points collinear with X and a member, which all lie on the k
// lines joining X to the current members.
struct GreedyState {
  const Geometry& G;
  std::vector<char> mask;   // members
  std::vector<char> alive;  // current extenders
  point_set members;
  int alive_count = 0;
  std::vector<std::int32_t> buf;

  GreedyState(const Geometry& g, const point_set& K0)
      : G(g), mask(member_mask(g, K0)), alive(g.num_points(), 0),
        buf(static_cast<std::size_t>(g.q()) + 1) {
    members = K0;
    std::sort(members.begin(), members.end());
    auto res = no_three_collinear(G, members);
    if (!res.ok) throw precondition_error("start set is not a cap");
    for (int x = 0; x < G.num_points(); ++x)
      if (!mask[x] && extends_set(G, members, mask, x, buf.data())) {
        alive[x] = 1;
        ++alive_count;
      }
  }

  void add(int X) {
    alive[X] = 0;
    --alive_count;
    for (auto m : members) {
      const int n = G.line_points(X, m, buf.data());
      for (int r = 2; r < n; ++r)
        if (alive[buf[r]]) {
          alive[buf[r]] = 0;
          --alive_count;
        }
    }
    mask[X] = 1;
    members.push_back(X);
  }

  // alive points killed by adding X; distinct lines through X meet only
  // at X, so no point is counted twice
  int elimination_count(int X) {
    int killed = 0;
    for (auto m : members) {
      const int n = G.line_points(X, m, buf.data());
      for (int r = 2; r < n; ++r) killed += alive[buf[r]];
    }
    return killed;
  }

  int pick_uniform(std::mt19937_64& rng) {
    auto want = static_cast<int>(rng() % static_cast<std::uint64_t>(alive_count));
    for (int x = 0; x < G.num_points(); ++x)
      if (alive[x] && want-- == 0) return x;
    throw consistency_error("extender bookkeeping lost a live point");
  }

  int pick_max_elimination() {
    int best = -1, best_killed = -1;
    for (int x = 0; x < G.num_points(); ++x) {
      if (!alive[x]) continue;
      const int killed = elimination_count(x);
      if (killed > best_killed) {  // ties keep the lowest index
        best_killed = killed;
        best = x;
      }
    }
    return best;
  }
};

// definitional re-check; search results are never trusted as returned
inline void verify_complete_cap(const Geometry& G, const point_set& K) {
  if (!no_three_collinear(G, K).ok)
    throw consistency_error("search produced a non-cap");
  const auto mask = member_mask(G, K);
  std::vector<std::int32_t> buf(static_cast<std::size_t>(G.q()) + 1);
  for (int x = 0; x < G.num_points(); ++x)
    if (!mask[x] && extends_set(G, K, mask, x, buf.data()))
      throw consistency_error("search produced an extendable cap");
}

}  // namespace detail

// grows K0 one extender at a time until none remain; deterministic in
// (G, K0, strategy, seed)
inline point_set greedy_complete(const Geometry& G, const point_set& K0,
                                 Strategy strategy, std::uint64_t seed) {
  detail::GreedyState st(G, K0);
  std::mt19937_64 rng(seed);
  while (st.alive_count > 0) {
    const int x = strategy == Strategy::uniform_random
                      ? st.pick_uniform(rng)
                      : st.pick_max_elimination();
    st.add(x);
  }
  std::sort(st.members.begin(), st.members.end());
  detail::verify_complete_cap(G, st.members);
  return st.members;
}

inline point_set greedy_complete(const Geometry& G, const point_set& K0,
                                 const SearchConfig& cfg) {
  return greedy_complete(G, K0, cfg.strategy, cfg.seed);
}

// a (usually partial) cap grown to target size with uniform random picks
inline point_set random_cap(const Geometry& G, std::uint64_t seed, int target) {
  if (target < 0) throw range_error("random cap size must be nonnegative");
  detail::GreedyState st(G, {});
  std::mt19937_64 rng(seed);
  while (st.alive_count > 0 && std::ssize(st.members) < target)
    st.add(st.pick_uniform(rng));
  std::sort(st.members.begin(), st.members.end());
  return st.members;
}

struct Spectrum {
  std::map<int, long long> counts;     // complete-cap size -> multiplicity
  std::map<int, point_set> witnesses;  // lex-first witness per size
  SearchConfig config;
  bool exhaustive = false;
};

namespace detail {

inline long long max_cap_size(const Geometry& G) {
  if (G.n() == 2) return G.q() + 2;
  return G.q() == 2 ? 8 : G.q() * G.q() + 1;  // binary spaces are the outlier
}

inline void spectrum_guard(const Geometry& G, const point_set& K) {
  if (std::ssize(K) > max_cap_size(G))
    throw consistency_error("complete cap exceeds the space maximum");
}

}  // namespace detail

// cfg.restarts independent completions of cfg.start; run i draws from
// run_seed(cfg.seed, i); the merge is ordered by run index, so the
// thread count never changes the result
inline Spectrum spectrum_sample(const Geometry& G, const SearchConfig& cfg,
                                int threads = 1) {
  if (cfg.restarts < 1) throw precondition_error("restarts must be >= 1");
  if (threads < 1) throw precondition_error("threads must be >= 1");
  std::vector<point_set> runs(static_cast<std::size_t>(cfg.restarts));
  auto work = [&](int first, int step) {
    for (int i = first; i < cfg.restarts; i += step)
      runs[static_cast<std::size_t>(i)] =
          greedy_complete(G, cfg.start, cfg.strategy, run_seed(cfg.seed,
                          static_cast<std::uint64_t>(i)));
  };
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  Spectrum spec;
  spec.config = cfg;
  for (auto& K : runs) {
    detail::spectrum_guard(G, K);
    const int k = static_cast<int>(K.size());
    ++spec.counts[k];
    auto [it, inserted] = spec.witnesses.try_emplace(k, K);
    if (!inserted && K < it->second) it->second = K;
  }
  return spec;
}

// exact complete-cap census of PG(3,2) by lexicographic DFS; when
// `within` is nonempty only complete caps containing it are listed
inline Spectrum exhaustive_complete_caps(const Geometry& G,
                                         const point_set& within = {}) {
  if (G.n() != 3 || G.q() != 2)
    throw capacity_error("exhaustive enumeration is gated to PG(3,2)");
  point_set K0 = within;
  std::sort(K0.begin(), K0.end());
  if (!no_three_collinear(G, K0).ok)
    throw precondition_error("start set is not a cap");

  Spectrum spec;
  spec.exhaustive = true;
  spec.config.start = K0;

  point_set cur = K0;
  auto mask = member_mask(G, K0);
  std::vector<std::int32_t> buf(static_cast<std::size_t>(G.q()) + 1);
  point_set cand;  // complement of K0, the only points a superset can add
  for (int x = 0; x < G.num_points(); ++x)
    if (!mask[x]) cand.push_back(x);

  auto dfs = [&](auto&& self, std::size_t next) -> void {
    bool extendable = false;
    for (std::size_t pos = 0; pos < cand.size(); ++pos) {
      const int x = cand[pos];
      if (mask[x] || !extends_set(G, cur, mask, x, buf.data())) continue;
      extendable = true;
      if (pos < next) continue;  // the branch below `next` was walked already
      cur.push_back(x);
      mask[x] = 1;
      self(self, pos + 1);
      mask[x] = 0;
      cur.pop_back();
    }
    if (!extendable) {
      point_set K = cur;
      std::sort(K.begin(), K.end());
      detail::spectrum_guard(G, K);
      ++spec.counts[static_cast<int>(K.size())];
      auto [it, inserted] =
          spec.witnesses.try_emplace(static_cast<int>(K.size()), K);
      if (!inserted && K < it->second) it->second = K;
    }
  };
  dfs(dfs, 0);
  return spec;
}

}  // namespace capkit
