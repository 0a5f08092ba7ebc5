#pragma once

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "capkit/arcs.hpp"
#include "capkit/bounds.hpp"
#include "capkit/caps.hpp"
#include "capkit/geometry.hpp"
#include "capkit/search.hpp"

// JSON/CSV/markdown views of every report type. Keys are emitted in a fixed
// order so identical runs produce byte-identical files.
namespace capkit {

using json = nlohmann::ordered_json;

inline json coords_json(const Geometry& G, const coords& c) {
  json a = json::array();
  for (int i = 0; i <= G.n(); ++i)
    a.push_back(static_cast<int>(c[static_cast<std::size_t>(i)]));
  return a;
}

inline json indices_json(const point_set& s) {
  json a = json::array();
  for (auto p : s) a.push_back(p);
  return a;
}

inline json points_json(const Geometry& G, const point_set& s) {
  json a = json::array();
  for (auto p : s)
    a.push_back(json{{"index", p}, {"coords", coords_json(G, G.point(p))}});
  return a;
}

// accepts either a list of point indices or a list of coordinate vectors;
// coordinate input is normalized before lookup
inline point_set parse_point_set(const Geometry& G, const json& j) {
  if (!j.is_array()) throw usage_error("points: expected a JSON array");
  point_set s;
  for (const auto& e : j) {
    if (e.is_number_integer()) {
      const long long v = e.get<long long>();
      if (v < 0 || v >= G.num_points())
        throw usage_error("points: index out of range");
      s.push_back(static_cast<std::int32_t>(v));
    } else if (e.is_array()) {
      if (std::ssize(e) != G.n() + 1)
        throw usage_error("points: coordinate vector has the wrong length");
      coords c{};
      for (int i = 0; i <= G.n(); ++i) {
        const long long v = e[static_cast<std::size_t>(i)].get<long long>();
        if (v < 0 || v >= G.q())
          throw usage_error("points: coordinate outside the field");
        c[static_cast<std::size_t>(i)] = static_cast<elem>(v);
      }
      s.push_back(static_cast<std::int32_t>(G.index_of(c)));
    } else {
      throw usage_error("points: entries must be indices or coordinate vectors");
    }
  }
  return s;
}

inline json field_json(const FieldTable& F) {
  json j;
  j["h"] = F.h();
  j["q"] = F.q();
  j["modulus"] = F.modulus();
  j["modulus_poly"] = F.modulus_string();
  json exp = json::array(), log = json::array();
  for (auto e : F.exp_table()) exp.push_back(static_cast<int>(e));
  for (auto l : F.log_table()) log.push_back(l);
  j["exp"] = exp;
  j["log"] = log;
  return j;
}

inline json geometry_json(const Geometry& G) {
  json j;
  j["n"] = G.n();
  j["q"] = G.q();
  j["num_points"] = G.num_points();
  j["num_lines"] = G.num_lines();
  j["num_planes"] = G.num_planes();
  json pts = json::array();
  for (int i = 0; i < G.num_points(); ++i)
    pts.push_back(json{{"index", i}, {"coords", coords_json(G, G.point(i))}});
  j["points"] = pts;
  if (G.n() == 3) {
    json pls = json::array();
    for (int i = 0; i < G.num_planes(); ++i)
      pls.push_back(json{{"index", i}, {"dual", coords_json(G, G.plane_dual(i))}});
    j["planes"] = pls;
  }
  return j;
}

inline json tangent_table_json(
    const std::vector<std::pair<std::int32_t, int>>& t) {
  json a = json::array();
  for (auto& [p, c] : t) a.push_back(json{{"point", p}, {"tangents", c}});
  return a;
}

inline json arc_report_json(const ArcTangentReport& r) {
  json j;
  j["k"] = r.k;
  j["tangents_per_member"] = r.per_member;
  j["member"] = tangent_table_json(r.member);
  j["external"] = tangent_table_json(r.external);
  return j;
}

inline json bound_check_json(const BoundCheck& b) {
  json j;
  j["applies"] = b.applies;
  j["pass"] = b.pass;
  j["margin"] = b.margin;
  j["witness"] = b.witness;
  j["worst_value"] = b.worst_value;
  return j;
}

inline json profile_json(const std::map<int, long long>& profile) {
  json j = json::object();
  for (auto& [x, c] : profile) j[std::to_string(x)] = c;
  return j;
}

inline json cap_report_json(const Geometry& G, const point_set& K,
                            const CapReport& r) {
  json j;
  j["n"] = G.n();
  j["q"] = G.q();
  j["k"] = r.k;
  j["points"] = points_json(G, K);
  j["tangents_per_member"] = r.t;
  j["complete"] = r.complete;
  j["extenders"] = indices_json(r.extenders);
  j["section_profile"] = profile_json(r.section_profile);
  j["sigma1_max"] = r.sigma1_max;
  j["sigma1_witness"] = r.sigma1_witness;
  j["sigma1_exhaustive"] = r.sigma1_exhaustive;
  j["section_bound"] = bound_check_json(r.section_bound);
  j["sigma1_bound"] = bound_check_json(r.sigma1_bound);
  return j;
}

// flattened view: one line per section size, for spreadsheet import
inline std::string cap_report_csv(const CapReport& r) {
  std::ostringstream out;
  out << "k,t,complete,sigma1_max,section_size,plane_count\n";
  for (auto& [x, c] : r.section_profile)
    out << r.k << ',' << r.t << ',' << (r.complete ? 1 : 0) << ','
        << r.sigma1_max << ',' << x << ',' << c << '\n';
  return out.str();
}

inline json search_config_json(const SearchConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["restarts"] = cfg.restarts;
  j["strategy"] = to_string(cfg.strategy);
  j["start"] = indices_json(cfg.start);
  return j;
}

inline json spectrum_json(const Geometry& G, const Spectrum& s) {
  json j;
  j["n"] = G.n();
  j["q"] = G.q();
  j["config"] = search_config_json(s.config);
  j["exhaustive"] = s.exhaustive;
  json counts = json::object(), wits = json::object();
  for (auto& [k, c] : s.counts) counts[std::to_string(k)] = c;
  for (auto& [k, w] : s.witnesses) wits[std::to_string(k)] = indices_json(w);
  j["counts"] = counts;
  j["witnesses"] = wits;
  return j;
}

namespace detail {

inline bool is_minimum_row(const BoundValue& r,
                           const std::vector<std::string>& min_names) {
  for (auto& n : min_names)
    if (n == r.name) return true;
  return false;
}

inline json bound_value_json(const BoundValue& r, bool is_min) {
  json j;
  j["name"] = r.name;
  j["claim"] = r.claim;
  j["applicability"] = r.applicability;
  j["strictness"] = r.strictness;
  j["disputed"] = r.disputed;
  j["value"] = static_cast<double>(r.value);
  j["value_integral"] = r.value_integral;
  j["integer_cap"] = r.integer_cap;
  j["is_minimum"] = is_min;
  return j;
}

}  // namespace detail

inline json bound_table_json(const BoundTable& t) {
  json j;
  j["n"] = t.n;
  j["q"] = t.q;
  json m2 = json::array(), mp2 = json::array();
  for (auto& r : t.m2_rows)
    m2.push_back(detail::bound_value_json(
        r, detail::is_minimum_row(r, t.m2_min_names)));
  for (auto& r : t.mp2_rows)
    mp2.push_back(detail::bound_value_json(
        r, detail::is_minimum_row(r, t.mp2_min_names)));
  j["m2_rows"] = m2;
  j["mp2_rows"] = mp2;
  if (t.m2_has_min) {
    j["m2_min"] = t.m2_min;
    j["m2_min_names"] = t.m2_min_names;
  }
  if (t.mp2_has_min) {
    j["mp2_min"] = t.mp2_min;
    j["mp2_min_names"] = t.mp2_min_names;
  }
  return j;
}

namespace detail {

inline std::string bound_value_display(const BoundValue& r) {
  if (r.value_integral) return std::to_string(static_cast<long long>(r.value));
  std::ostringstream s;
  s.precision(4);
  s << std::fixed << static_cast<double>(r.value);
  return s.str();
}

template <class Emit>
void for_each_bound_row(const BoundTable& t, Emit&& emit) {
  for (auto& r : t.m2_rows)
    emit(r, is_minimum_row(r, t.m2_min_names));
  for (auto& r : t.mp2_rows)
    emit(r, is_minimum_row(r, t.mp2_min_names));
}

}  // namespace detail

inline std::string bound_table_csv(const BoundTable& t) {
  std::ostringstream out;
  out << "name,applicability,strictness,value,integer_cap,is_minimum\n";
  detail::for_each_bound_row(t, [&](const BoundValue& r, bool is_min) {
    out << r.name << ",\"" << r.applicability << "\"," << r.strictness << ','
        << detail::bound_value_display(r) << ',' << r.integer_cap << ','
        << (is_min ? 1 : 0) << '\n';
  });
  return out.str();
}

inline std::string bound_table_markdown(const BoundTable& t) {
  std::ostringstream out;
  out << "## n = " << t.n << ", q = " << t.q << "\n\n"
      << "| name | applicability | strictness | value | integer_cap | "
         "is_minimum |\n"
      << "|---|---|---|---|---|---|\n";
  detail::for_each_bound_row(t, [&](const BoundValue& r, bool is_min) {
    out << "| " << r.name << (r.disputed ? " (disputed)" : "") << " | "
        << r.applicability << " | " << r.strictness << " | "
        << detail::bound_value_display(r) << " | " << r.integer_cap << " | "
        << (is_min ? "yes" : "") << " |\n";
  });
  return out.str();
}

inline json interval_json(const ForbiddenInterval& iv) {
  json j;
  j["q"] = iv.q;
  j["a"] = iv.a;
  j["lo_base"] = iv.lo_base;
  j["lo_sqrtq_coeff"] = iv.lo_sqrtq_coeff;
  j["hi_base"] = iv.hi_base;
  j["hi_sqrtq_coeff"] = iv.hi_sqrtq_coeff;
  j["lo"] = static_cast<double>(iv.lo);
  j["hi"] = static_cast<double>(iv.hi);
  j["admissible"] = iv.admissible;
  j["a_limit"] = static_cast<double>(iv.a_limit);
  return j;
}

inline json consistency_json(const std::vector<ConsistencyRow>& rows) {
  json a = json::array();
  for (auto& r : rows)
    a.push_back(json{
        {"id", r.id}, {"q", r.q}, {"pass", r.pass}, {"detail", r.detail}});
  return a;
}

}  // namespace capkit
