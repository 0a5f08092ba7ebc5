#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "capkit/arcs.hpp"
#include "capkit/bounds.hpp"
#include "capkit/caps.hpp"
#include "capkit/config.hpp"
#include "capkit/constructions.hpp"
#include "capkit/json_io.hpp"
#include "capkit/search.hpp"
#include "capkit/version.hpp"

// One-shot verification pipeline: runs every check the test suite pins,
// against geometries chosen by the config, and emits a JSON report with
// one entry per check. Exit policy: success iff every REQUIRED entry
// passes. EXPECTED entries record stochastic findings and never gate.
namespace capkit {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// sub-seed for a named pipeline step, documented in the README:
// derive_seed(base, tag) = mix64(base xor fnv1a64(tag))
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return mix64(base ^ fnv1a64(tag));
}

struct VerifyEntry {
  std::string id;
  std::string claim;
  std::string severity;  // REQUIRED, EXPECTED, or INFO
  std::string verdict;   // pass, fail, or error
  json witness;
  long long runtime_ms = 0;
};

struct VerifyOutcome {
  json report;
  bool required_pass = true;
};

namespace detail {

struct CheckResult {
  bool pass = false;
  json witness;
};

// every complete plane arc containing A, by lexicographic DFS over the
// points whose addition keeps an arc (desk scale, used at q = 4 only)
inline std::vector<point_set> complete_arc_supersets(const Geometry& G,
                                                     const point_set& A) {
  std::vector<point_set> found;
  point_set cur = canonical_set(G, A);
  auto mask = member_mask(G, cur);
  std::vector<std::int32_t> buf(static_cast<std::size_t>(G.q()) + 1);
  auto dfs = [&](auto&& self, int next) -> void {
    bool extendable = false;
    for (int x = 0; x < G.num_points(); ++x) {
      if (mask[x] || !extends_set(G, cur, mask, x, buf.data())) continue;
      extendable = true;
      if (x < next) continue;
      cur.push_back(x);
      mask[x] = 1;
      self(self, x + 1);
      mask[x] = 0;
      cur.pop_back();
    }
    if (!extendable) {
      point_set s = cur;
      std::sort(s.begin(), s.end());
      found.push_back(std::move(s));
    }
  };
  dfs(dfs, 0);
  return found;
}

}  // namespace detail

class VerifyPipeline {
 public:
  VerifyPipeline(const VerifyConfig& cfg, std::string command_line)
      : cfg_(cfg), command_line_(std::move(command_line)) {
    validate_verify_config(cfg_);
  }

  VerifyOutcome run() {
    const auto t0 = std::chrono::steady_clock::now();

    gated(true, "00-field-tables",
          "multiplication tables invert and the trace-zero set is half the "
          "field",
          "REQUIRED", [&] { return field_tables(); });
    gated(true, "01-geometry-counts",
          "point, line, and plane counts match the closed forms",
          "REQUIRED", [&] { return geometry_counts(); });
    gated(has_any({4, 8, 16, 32}), "02-quadric-cap",
          "the quadric construction is a complete cap of size q^2 + 1",
          "REQUIRED", [&] { return quadric_cap(); });
    gated(has_any({4, 8, 16, 32}), "03-section-equality",
          "the plane-section bound is tight on the quadric cap, sections "
          "have sizes 1 and q + 1 only",
          "REQUIRED", [&] { return section_equality(); });
    gated(has_any({2, 4, 8}), "04-tangent-ceiling",
          "no point off a complete cap lies on more tangents than a member "
          "does",
          "REQUIRED", [&] { return tangent_ceiling(); });
    gated(has(2), "05-binary-census",
          "exhaustive census: complete caps in PG(3,2) have sizes 5 and 8 "
          "only",
          "REQUIRED", [&] { return binary_census(); });
    gated(has(4), "06-q4-size-gap",
          "seeded completions in PG(3,4) never produce sizes 15 or 16 and "
          "never exceed 17",
          "REQUIRED", [&] { return q4_size_gap(); });
    gated(has(8), "07-q8-size-gap",
          "seeded completions in PG(3,8) never produce sizes 60 through 64",
          "REQUIRED", [&] { return q8_size_gap(); });
    gated(true, "08-solid-q8-table",
          "second-largest-complete-cap table at (3,8) caps at 61/59/59 with "
          "a two-way tie at 59",
          "REQUIRED", [&] { return solid_q8_table(); });
    gated(true, "09-forbidden-interval",
          "interval lower endpoint reproduces the derived cap; largest "
          "admissible step at q = 2048 is 6",
          "REQUIRED", [&] { return forbidden_interval(); });
    gated(has_any({2, 4, 8}), "10-counting-identities",
          "tangent and plane-section counting identities hold on random "
          "caps; random plane arcs satisfy tangent parity",
          "REQUIRED", [&] { return counting_identities(); });
    gated(has_any({4, 8}), "11-hyperoval-completion",
          "random plane arcs complete to hyperovals with zero tangents; "
          "the completion is unique at q = 4",
          "REQUIRED", [&] { return hyperoval_completion(); });
    gated(true, "12-consistency-matrix",
          "bound tables, constructions, and step inequalities agree over "
          "q = 2 .. 2^16",
          "REQUIRED", [&] { return consistency_check(); });
    gated(has_any({2, 4}), "13-spectrum-variety",
          "sampling finds the known spread of complete sizes (5 and 8 at "
          "q = 2; 14 and 17 at q = 4)",
          "EXPECTED", [&] { return spectrum_variety(); });

    const auto t1 = std::chrono::steady_clock::now();
    const long long total =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    entries_.push_back(VerifyEntry{
        "14-runtime", "wall-clock time of the whole pipeline", "INFO", "pass",
        json{{"total_ms", total}}, total});

    return assemble(total);
  }

 private:
  VerifyConfig cfg_;
  std::string command_line_;
  std::vector<VerifyEntry> entries_;
  std::vector<std::string> skipped_;
  // quadric cap reports stashed by 02 for later checks
  std::map<long long, CapReport> quadric_reports_;
  std::map<long long, Spectrum> spectra_;

  bool has(long long q) const {
    for (auto v : cfg_.qs)
      if (v == q) return true;
    return false;
  }
  bool has_any(std::initializer_list<long long> qs) const {
    for (auto q : qs)
      if (has(q)) return true;
    return false;
  }
  std::vector<long long> present(std::initializer_list<long long> qs) const {
    std::vector<long long> out;
    for (auto q : qs)
      if (has(q)) out.push_back(q);
    return out;
  }

  static int h_of(long long q) {
    int h = 0;
    while ((1LL << h) < q) ++h;
    return h;
  }

  // a check whose geometries are excluded by the config is skipped, not
  // failed; the manifest lists what was skipped
  void gated(bool applicable, const std::string& id, const std::string& claim,
             const std::string& severity,
             const std::function<detail::CheckResult()>& body) {
    if (applicable)
      check(id, claim, severity, body);
    else
      skipped_.push_back(id);
  }

  void check(const std::string& id, const std::string& claim,
             const std::string& severity,
             const std::function<detail::CheckResult()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    VerifyEntry e;
    e.id = id;
    e.claim = claim;
    e.severity = severity;
    try {
      auto res = body();
      e.verdict = res.pass ? "pass" : "fail";
      e.witness = std::move(res.witness);
    } catch (const std::exception& ex) {
      e.verdict = "error";
      e.witness = json{{"exception", ex.what()}};
    }
    const auto t1 = std::chrono::steady_clock::now();
    e.runtime_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    entries_.push_back(std::move(e));
  }

  detail::CheckResult field_tables() {
    detail::CheckResult r;
    r.pass = true;
    json moduli = json::object();
    for (auto q : cfg_.qs) {
      FieldTable F(h_of(q));
      moduli[std::to_string(F.h())] = F.modulus();
      int trace_zero = 0;
      for (unsigned a = 0; a < F.q(); ++a) {
        if (F.trace(static_cast<elem>(a)) == 0) ++trace_zero;
        if (a == 0) continue;
        const elem e = static_cast<elem>(a);
        if (F.exp_table()[static_cast<std::size_t>(F.log_table()[e])] != e)
          r.pass = false;
        if (F.mul(e, F.inv(e)) != 1) r.pass = false;
      }
      if (trace_zero * 2 != static_cast<int>(F.q())) r.pass = false;
    }
    r.witness = json{{"moduli", moduli}};
    return r;
  }

  detail::CheckResult geometry_counts() {
    detail::CheckResult r;
    r.pass = true;
    json table = json::array();
    for (auto q : cfg_.qs) {
      FieldTable F(h_of(q));
      Geometry solid(3, F), plane(2, F);
      const long long pts3 = q * q * q + q * q + q + 1;
      const long long lines3 = (q * q + 1) * (q * q + q + 1);
      const long long pts2 = q * q + q + 1;
      if (solid.num_points() != pts3 || solid.num_planes() != pts3 ||
          solid.num_lines() != lines3 || plane.num_points() != pts2 ||
          plane.num_lines() != pts2)
        r.pass = false;
      table.push_back(json{{"q", q},
                           {"points", solid.num_points()},
                           {"planes", solid.num_planes()},
                           {"lines", solid.num_lines()},
                           {"plane_points", plane.num_points()}});
    }
    // literal pins for the small orders
    if (has(4)) {
      FieldTable F(2);
      Geometry G(3, F);
      if (G.num_points() != 85 || G.num_planes() != 85 || G.num_lines() != 357)
        r.pass = false;
    }
    if (has(8)) {
      FieldTable F(3);
      Geometry G(3, F);
      if (G.num_points() != 585) r.pass = false;
    }
    r.witness = json{{"counts", table}};
    return r;
  }

  detail::CheckResult quadric_cap() {
    detail::CheckResult r;
    r.pass = true;
    json table = json::array();
    for (auto q : present({4, 8, 16, 32})) {
      FieldTable F(h_of(q));
      Geometry G(3, F);
      const point_set K = elliptic_quadric(G);
      const bool exhaustive = q <= 16;  // q = 32 samples the tangent scan
      CapReport rep = cap_report(G, K, exhaustive,
                                 derive_seed(cfg_.seed, "quadric-sigma1") ^
                                     static_cast<std::uint64_t>(q));
      const bool ok = std::ssize(K) == q * q + 1 && rep.complete;
      if (!ok) r.pass = false;
      table.push_back(json{{"q", q},
                           {"size", std::ssize(K)},
                           {"complete", rep.complete},
                           {"sigma1_max", rep.sigma1_max},
                           {"sigma1_exhaustive", rep.sigma1_exhaustive}});
      quadric_reports_.emplace(q, std::move(rep));
    }
    r.witness = json{{"caps", table}};
    return r;
  }

  detail::CheckResult section_equality() {
    detail::CheckResult r;
    r.pass = true;
    json table = json::array();
    for (auto& [q, rep] : quadric_reports_) {
      const std::map<int, long long> expected{
          {1, q * q + 1}, {static_cast<int>(q + 1), q * q * q + q}};
      const bool ok = rep.section_bound.applies && rep.section_bound.pass &&
                      rep.section_bound.margin == 0 &&
                      rep.section_profile == expected;
      if (!ok) r.pass = false;
      table.push_back(json{{"q", q},
                           {"margin", rep.section_bound.margin},
                           {"profile", profile_json(rep.section_profile)}});
    }
    if (quadric_reports_.empty()) r.pass = false;
    r.witness = json{{"sections", table}};
    return r;
  }

  detail::CheckResult tangent_ceiling() {
    detail::CheckResult r;
    r.pass = true;
    json table = json::array();
    for (auto q : present({2, 4, 8})) {
      FieldTable F(h_of(q));
      Geometry G(3, F);
      long long worst_gap = -1;  // t - sigma1_max, minimized over caps
      // the constructed complete cap first
      const point_set base =
          q == 2 ? binary_affine_cap(G) : elliptic_quadric(G);
      int checked = 0;
      auto scan = [&](const point_set& K) {
        const BoundCheck b = check_sigma1_bound(G, K);
        if (!b.applies || !b.pass) r.pass = false;
        if (worst_gap < 0 || b.margin < worst_gap) worst_gap = b.margin;
        ++checked;
      };
      scan(base);
      const std::uint64_t s = derive_seed(cfg_.seed, "tangent-ceiling") ^
                              static_cast<std::uint64_t>(q);
      for (int i = 0; i < cfg_.sigma1_restarts; ++i)
        scan(greedy_complete(G, {}, Strategy::uniform_random, run_seed(s, i)));
      table.push_back(
          json{{"q", q}, {"caps_checked", checked}, {"min_margin", worst_gap}});
    }
    r.witness = json{{"scans", table}};
    return r;
  }

  detail::CheckResult binary_census() {
    FieldTable F(1);
    Geometry G(3, F);
    Spectrum s = exhaustive_complete_caps(G);
    detail::CheckResult r;
    r.pass = s.counts.size() == 2 && s.counts.count(5) && s.counts.count(8) &&
             s.counts.at(5) == 168 && s.counts.at(8) == 15;
    r.witness = spectrum_json(G, s);
    return r;
  }

  Spectrum sampled_spectrum(long long q, int restarts, const char* tag) {
    FieldTable F(h_of(q));
    Geometry G(3, F);
    SearchConfig sc;
    sc.seed = derive_seed(cfg_.seed, tag);
    sc.restarts = restarts;
    sc.strategy = Strategy::uniform_random;
    Spectrum s = spectrum_sample(G, sc, cfg_.threads);
    spectra_.emplace(q, s);
    return s;
  }

  detail::CheckResult q4_size_gap() {
    Spectrum s = sampled_spectrum(4, cfg_.restarts_q4, "spectrum-q4");
    detail::CheckResult r;
    r.pass = true;
    for (auto& [k, c] : s.counts)
      if (k == 15 || k == 16 || k > 17) r.pass = false;
    FieldTable F(2);
    Geometry G(3, F);
    r.witness = spectrum_json(G, s);
    return r;
  }

  detail::CheckResult q8_size_gap() {
    Spectrum s = sampled_spectrum(8, cfg_.restarts_q8, "spectrum-q8");
    detail::CheckResult r;
    r.pass = true;
    for (auto& [k, c] : s.counts)
      if (60 <= k && k <= 64) r.pass = false;
    FieldTable F(3);
    Geometry G(3, F);
    r.witness = spectrum_json(G, s);
    return r;
  }

  detail::CheckResult solid_q8_table() {
    BoundTable t = evaluate_bounds(3, 8);
    long long cap_chao = 0, cap_improved = 0, cap_main = 0;
    for (auto& row : t.mp2_rows) {
      if (row.name == "mp-q2-q+5") cap_chao = row.integer_cap;
      if (row.name == "mp-q2-q+3") cap_improved = row.integer_cap;
      if (row.name == "mp-sqrt5") cap_main = row.integer_cap;
    }
    detail::CheckResult r;
    r.pass = cap_chao == 61 && cap_improved == 59 && cap_main == 59 &&
             t.mp2_has_min && t.mp2_min == 59 &&
             t.mp2_min_names ==
                 std::vector<std::string>{"mp-q2-q+3", "mp-sqrt5"};
    r.witness = bound_table_json(t);
    return r;
  }

  detail::CheckResult forbidden_interval() {
    detail::CheckResult r;
    r.pass = true;
    const ForbiddenInterval iv = ss_interval(2048, 3);
    // the interval's lower endpoint is exactly the bound the table derives
    if (iv.lo_base != 2048LL * 2048 - 2 * 2048 + 2 || iv.lo_sqrtq_coeff != 3)
      r.pass = false;
    BoundTable t = evaluate_bounds(3, 2048);
    const BoundValue* interval_row = nullptr;
    const BoundValue* main_row = nullptr;
    for (auto& row : t.mp2_rows) {
      if (row.name == "mp-interval") interval_row = &row;
      if (row.name == "mp-sqrt5") main_row = &row;
    }
    if (!interval_row || !main_row) {
      r.pass = false;
    } else {
      if (static_cast<long long>(std::floor(iv.lo)) !=
          interval_row->integer_cap)
        r.pass = false;
      // strict improvement, 1e-6 relative
      if (!((main_row->value - interval_row->value) / main_row->value >
            1e-6L))
        r.pass = false;
    }
    if (largest_admissible_a(2048) != 6) r.pass = false;
    r.witness = json{{"interval", interval_json(iv)},
                     {"largest_admissible_a", largest_admissible_a(2048)},
                     {"table", bound_table_json(t)}};
    return r;
  }

  detail::CheckResult counting_identities() {
    detail::CheckResult r;
    r.pass = true;
    json table = json::array();
    const auto comb2 = [](long long v) { return v * (v - 1) / 2; };
    for (auto q : present({2, 4, 8})) {
      FieldTable F(h_of(q));
      Geometry G(3, F);
      const std::uint64_t s = derive_seed(cfg_.seed, "counting-caps") ^
                              static_cast<std::uint64_t>(q);
      std::mt19937_64 size_rng(derive_seed(cfg_.seed, "counting-sizes") ^
                               static_cast<std::uint64_t>(q));
      const long long max_size = q == 2 ? 8 : q * q + 1;
      int caps = 0;
      for (int i = 0; i < 100; ++i) {
        const int target =
            1 + static_cast<int>(size_rng() % static_cast<std::uint64_t>(max_size));
        const point_set K = random_cap(G, run_seed(s, i), target);
        const long long k = std::ssize(K);
        const long long t = q * q + q + 2 - k;
        for (auto m : K)
          if (tangent_count_at(G, K, m) != t) r.pass = false;
        const auto prof = section_profile(G, K);
        long long planes = 0, incidences = 0, pairs = 0;
        for (auto& [x, c] : prof) {
          planes += c;
          incidences += x * c;
          pairs += comb2(x) * c;
        }
        if (planes != G.num_planes() || incidences != k * (q * q + q + 1) ||
            pairs != comb2(k) * (q + 1))
          r.pass = false;
        ++caps;
      }
      table.push_back(json{{"q", q}, {"caps", caps}});
    }
    // tangent parity on random plane arcs
    for (auto q : present({4, 8})) {
      FieldTable F(h_of(q));
      Geometry G(2, F);
      const std::uint64_t s = derive_seed(cfg_.seed, "counting-arcs") ^
                              static_cast<std::uint64_t>(q);
      std::mt19937_64 size_rng(derive_seed(cfg_.seed, "counting-arc-sizes") ^
                               static_cast<std::uint64_t>(q));
      int arcs = 0;
      for (int i = 0; i < 100; ++i) {
        const int target =
            1 + static_cast<int>(size_rng() % static_cast<std::uint64_t>(q + 2));
        const point_set A = random_cap(G, run_seed(s, i), target);
        if (!tangent_parity_ok(G, A)) r.pass = false;
        ++arcs;
      }
      table.push_back(json{{"q", q}, {"plane_arcs", arcs}});
    }
    r.witness = json{{"samples", table}};
    return r;
  }

  detail::CheckResult hyperoval_completion() {
    detail::CheckResult r;
    r.pass = true;
    json table = json::array();
    for (auto q : present({4, 8})) {
      FieldTable F(h_of(q));
      Geometry G(2, F);
      const int start_size = q == 4 ? 4 : 7;
      const std::uint64_t s = derive_seed(cfg_.seed, "hyperoval") ^
                              static_cast<std::uint64_t>(q);
      int done = 0;
      for (int i = 0; i < 50; ++i) {
        // grow a start arc of exactly start_size (retry the rare dead end)
        point_set A;
        for (std::uint64_t attempt = 0;; ++attempt) {
          A = random_cap(G, run_seed(s, i * 97 + attempt), start_size);
          if (std::ssize(A) == start_size) break;
        }
        const point_set H = complete_to_hyperoval(G, A);
        if (std::ssize(H) != q + 2) r.pass = false;
        const ArcTangentReport rep = arc_tangent_report(G, H);
        if (rep.per_member != 0) r.pass = false;
        for (auto& [p, cnt] : rep.external)
          if (cnt != 0) r.pass = false;
        if (q == 4) {
          const auto supersets = detail::complete_arc_supersets(G, A);
          point_set sorted = H;
          std::sort(sorted.begin(), sorted.end());
          if (supersets.size() != 1 || supersets[0] != sorted) r.pass = false;
        }
        ++done;
      }
      table.push_back(json{{"q", q}, {"completions", done}});
    }
    r.witness = json{{"runs", table}};
    return r;
  }

  detail::CheckResult consistency_check() {
    const auto rows = consistency_matrix();
    detail::CheckResult r;
    r.pass = consistency_all_pass(rows);
    r.witness = json{{"rows", std::ssize(rows)},
                     {"matrix", consistency_json(rows)}};
    return r;
  }

  detail::CheckResult spectrum_variety() {
    detail::CheckResult r;
    r.pass = true;
    json table = json::array();
    if (has(2)) {
      FieldTable F(1);
      Geometry G(3, F);
      SearchConfig sc;
      sc.seed = derive_seed(cfg_.seed, "variety-q2");
      sc.restarts = cfg_.restarts_q2;
      Spectrum s = spectrum_sample(G, sc, cfg_.threads);
      if (!s.counts.count(5) || !s.counts.count(8)) r.pass = false;
      json counts = json::object();
      for (auto& [k, c] : s.counts) counts[std::to_string(k)] = c;
      table.push_back(json{{"q", 2}, {"counts", counts}});
    }
    if (has(4)) {
      const auto it = spectra_.find(4);
      if (it == spectra_.end()) {
        r.pass = false;
      } else {
        if (!it->second.counts.count(14) || !it->second.counts.count(17))
          r.pass = false;
        json counts = json::object();
        for (auto& [k, c] : it->second.counts)
          counts[std::to_string(k)] = c;
        table.push_back(json{{"q", 4}, {"counts", counts}});
      }
    }
    r.witness = json{{"spectra", table}};
    return r;
  }

  VerifyOutcome assemble(long long total_ms) {
    VerifyOutcome out;
    json manifest;
    manifest["command_line"] = command_line_;
    manifest["version"] = kVersion;
    manifest["seed"] = cfg_.seed;
    json qs = json::array();
    for (auto q : cfg_.qs) qs.push_back(q);
    manifest["qs"] = qs;
    manifest["threads"] = cfg_.threads;
    manifest["sigma1_restarts"] = cfg_.sigma1_restarts;
    manifest["restarts_q2"] = cfg_.restarts_q2;
    manifest["restarts_q4"] = cfg_.restarts_q4;
    manifest["restarts_q8"] = cfg_.restarts_q8;
    json moduli = json::object();
    for (auto q : cfg_.qs) {
      FieldTable F(h_of(q));
      moduli[std::to_string(F.h())] = F.modulus();
    }
    manifest["field_moduli"] = moduli;
    json skipped = json::array();
    for (auto& id : skipped_) skipped.push_back(id);
    manifest["skipped"] = skipped;
    manifest["total_runtime_ms"] = total_ms;
    json summary = json::array();
    for (auto& e : entries_)
      summary.push_back(json{{"id", e.id},
                             {"verdict", e.verdict},
                             {"runtime_ms", e.runtime_ms}});
    manifest["checks"] = summary;

    json entries = json::array();
    for (auto& e : entries_) {
      if (e.severity == "REQUIRED" && e.verdict != "pass")
        out.required_pass = false;
      entries.push_back(json{{"id", e.id},
                             {"claim", e.claim},
                             {"severity", e.severity},
                             {"verdict", e.verdict},
                             {"witness", e.witness},
                             {"runtime_ms", e.runtime_ms}});
    }
    out.report = json{{"manifest", manifest},
                      {"entries", entries},
                      {"required_pass", out.required_pass}};
    return out;
  }
};

inline VerifyOutcome run_verify(const VerifyConfig& cfg,
                                const std::string& command_line) {
  return VerifyPipeline(cfg, command_line).run();
}

}  // namespace capkit
