#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "capkit/arcs.hpp"
#include "capkit/bounds.hpp"
#include "capkit/caps.hpp"
#include "capkit/config.hpp"
#include "capkit/constructions.hpp"
#include "capkit/json_io.hpp"
#include "capkit/search.hpp"
#include "capkit/verify.hpp"
#include "capkit/version.hpp"

using capkit::json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string format = "json";
  std::string out;
};

void emit_text(const GlobalOpts& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw capkit::usage_error("cannot write '" + g.out + "'");
  f << text;
}

void emit_json(const GlobalOpts& g, const json& j) {
  emit_text(g, j.dump(2) + "\n");
}

void require_format(const GlobalOpts& g,
                    std::initializer_list<const char*> allowed,
                    const std::string& command) {
  for (auto* a : allowed)
    if (g.format == a) return;
  std::string list;
  for (auto* a : allowed) list += (list.empty() ? "" : "|") + std::string(a);
  throw capkit::usage_error(command + " supports --format " + list +
                            ", got '" + g.format + "'");
}

int h_from_q(long long q) {
  for (int h = 1; h <= 7; ++h)
    if ((1LL << h) == q) return h;
  throw capkit::usage_error("q must be a power of two in [2, 128], got " +
                            std::to_string(q));
}

// inline JSON when the argument starts with '[', otherwise a file path
json load_points_arg(const std::string& arg) {
  std::string text = arg;
  const auto first = arg.find_first_not_of(" \t");
  if (first == std::string::npos || arg[first] != '[') {
    std::ifstream f(arg);
    if (!f)
      throw capkit::usage_error("points: '" + arg +
                                "' is neither inline JSON nor a readable file");
    std::ostringstream buf;
    buf << f.rdbuf();
    text = buf.str();
  }
  try {
    return json::parse(text);
  } catch (const std::exception& e) {
    throw capkit::usage_error(std::string("points: invalid JSON: ") + e.what());
  }
}

json arc_common_json(const capkit::Geometry& G, const capkit::point_set& A) {
  json j;
  j["q"] = G.q();
  j["k"] = std::ssize(A);
  const auto chk = capkit::is_arc(G, A);
  j["is_arc"] = chk.ok;
  if (!chk.ok) {
    json w = json::array();
    for (auto p : chk.witness) w.push_back(p);
    j["collinear_witness"] = w;
  } else {
    j["tangent_table"] = capkit::arc_report_json(capkit::arc_tangent_report(G, A));
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("capkit ") + capkit::kVersion +
               " -- exact computations with arcs and caps in small "
               "even-order projective spaces"};
  app.require_subcommand(1);

  GlobalOpts g;
  auto* seed_opt =
      app.add_option("--seed", g.seed, "seed for every randomized step")
          ->capture_default_str();
  auto* threads_opt =
      app.add_option("--threads", g.threads, "worker threads for search")
          ->check(CLI::Range(1, 64))
          ->capture_default_str();
  app.add_option("--format", g.format, "output format: json|csv|markdown")
      ->check(CLI::IsMember({"json", "csv", "markdown"}))
      ->capture_default_str();
  auto* out_opt = app.add_option(
      "--out", g.out, "write output to this file instead of stdout");

  int rc = 0;

  // describe: field tables
  long long q_desc = 4;
  auto* describe = app.add_subcommand("describe", "field tables as JSON");
  describe->fallthrough();
  describe->add_option("--q", q_desc, "field order")->required();
  describe->callback([&] {
    require_format(g, {"json"}, "describe");
    emit_json(g, capkit::field_json(capkit::FieldTable(h_from_q(q_desc))));
  });

  // geometry dump
  auto* geometry = app.add_subcommand("geometry", "projective space queries");
  geometry->require_subcommand(1);
  geometry->fallthrough();
  long long q_geo = 4;
  int n_geo = 3;
  auto* geo_dump =
      geometry->add_subcommand("dump", "all points and planes with indices");
  geo_dump->fallthrough();
  geo_dump->add_option("--q", q_geo, "field order")->required();
  geo_dump->add_option("--n", n_geo, "dimension, 2 or 3")
      ->capture_default_str();
  geo_dump->callback([&] {
    require_format(g, {"json"}, "geometry dump");
    capkit::FieldTable F(h_from_q(q_geo));
    capkit::Geometry G(n_geo, F);
    emit_json(g, capkit::geometry_json(G));
  });

  // arc verify | nucleus | complete
  auto* arc = app.add_subcommand("arc", "plane arc checks");
  arc->require_subcommand(1);
  arc->fallthrough();
  long long q_arc = 4;
  std::string arc_points;
  const auto add_arc_sub = [&](const char* name, const char* desc) {
    auto* s = arc->add_subcommand(name, desc);
    s->fallthrough();
    s->add_option("--q", q_arc, "field order")->required();
    s->add_option("--points", arc_points,
                  "JSON list of point indices or coordinate vectors, inline "
                  "or a file path")
        ->required();
    return s;
  };
  add_arc_sub("verify", "no-three-collinear check and tangent table")
      ->callback([&] {
        require_format(g, {"json"}, "arc verify");
        capkit::FieldTable F(h_from_q(q_arc));
        capkit::Geometry G(2, F);
        emit_json(g, arc_common_json(
                         G, capkit::parse_point_set(G, load_points_arg(arc_points))));
      });
  add_arc_sub("nucleus", "the unique extension point of a (q+1)-arc")
      ->callback([&] {
        require_format(g, {"json"}, "arc nucleus");
        capkit::FieldTable F(h_from_q(q_arc));
        capkit::Geometry G(2, F);
        const auto A = capkit::parse_point_set(G, load_points_arg(arc_points));
        json j = arc_common_json(G, A);
        const auto n = capkit::nucleus(G, A);
        j["nucleus"] =
            json{{"index", n}, {"coords", capkit::coords_json(G, G.point(n))}};
        emit_json(g, j);
      });
  add_arc_sub("complete", "extend a large arc to its hyperoval")
      ->callback([&] {
        require_format(g, {"json"}, "arc complete");
        capkit::FieldTable F(h_from_q(q_arc));
        capkit::Geometry G(2, F);
        const auto A = capkit::parse_point_set(G, load_points_arg(arc_points));
        json j = arc_common_json(G, A);
        j["completion"] =
            capkit::points_json(G, capkit::complete_to_hyperoval(G, A));
        emit_json(g, j);
      });

  // cap report
  auto* cap = app.add_subcommand("cap", "solid cap reports");
  cap->require_subcommand(1);
  cap->fallthrough();
  long long q_cap = 4;
  std::string cap_points;
  bool cap_sampled = false, cap_csv = false;
  auto* cap_rep = cap->add_subcommand(
      "report", "tangents, sections, completeness, bound checks");
  cap_rep->fallthrough();
  cap_rep->add_option("--q", q_cap, "field order")->required();
  cap_rep->add_option("--points", cap_points,
                      "JSON list of point indices or coordinate vectors, "
                      "inline or a file path")
      ->required();
  cap_rep->add_flag("--sampled", cap_sampled,
                    "sample the tangent scan instead of visiting every "
                    "external point");
  cap_rep->add_flag("--csv", cap_csv, "flatten the section profile to CSV");
  cap_rep->callback([&] {
    require_format(g, {"json", "csv"}, "cap report");
    capkit::FieldTable F(h_from_q(q_cap));
    capkit::Geometry G(3, F);
    const auto K = capkit::parse_point_set(G, load_points_arg(cap_points));
    const auto rep = capkit::cap_report(G, K, !cap_sampled, g.seed);
    if (cap_csv || g.format == "csv")
      emit_text(g, capkit::cap_report_csv(rep));
    else
      emit_json(g, capkit::cap_report_json(G, K, rep));
  });

  // construct ovoid | hyperoval | binary
  auto* construct = app.add_subcommand("construct", "reference objects");
  construct->require_subcommand(1);
  construct->fallthrough();
  long long q_con = 4;
  int n_con = -1;
  const auto add_con_sub = [&](const char* name, const char* desc) {
    auto* s = construct->add_subcommand(name, desc);
    s->fallthrough();
    s->add_option("--q", q_con, "field order")->required();
    s->add_option("--n", n_con, "dimension (fixed per construction)");
    return s;
  };
  add_con_sub("ovoid", "quadric cap of size q^2 + 1 in PG(3,q)")
      ->callback([&] {
        require_format(g, {"json"}, "construct ovoid");
        if (n_con != -1 && n_con != 3)
          throw capkit::usage_error("the quadric cap lives in n = 3");
        capkit::FieldTable F(h_from_q(q_con));
        capkit::Geometry G(3, F);
        const auto K = capkit::elliptic_quadric(G);
        const auto spec = capkit::elliptic_quadric_spec(G);
        const bool exhaustive = q_con <= 16;
        json j;
        j["construction"] = json{
            {"kind", spec.kind},
            {"q", spec.q},
            {"n", spec.n},
            {"irreducible_parameter", static_cast<int>(spec.irreducible_parameter)}};
        j["points"] = capkit::points_json(G, K);
        j["report"] =
            capkit::cap_report_json(G, K, capkit::cap_report(G, K, exhaustive, g.seed));
        emit_json(g, j);
      });
  add_con_sub("hyperoval", "conic plus nucleus, a (q+2)-arc with no tangents")
      ->callback([&] {
        require_format(g, {"json"}, "construct hyperoval");
        if (n_con != -1 && n_con != 2)
          throw capkit::usage_error("hyperovals live in n = 2");
        capkit::FieldTable F(h_from_q(q_con));
        capkit::Geometry G(2, F);
        const auto A = capkit::hyperoval_conic(G);
        json j;
        j["construction"] =
            json{{"kind", "hyperoval-conic"}, {"q", q_con}, {"n", 2}};
        j["points"] = capkit::points_json(G, A);
        j["report"] = capkit::arc_report_json(capkit::arc_tangent_report(G, A));
        emit_json(g, j);
      });
  add_con_sub("binary", "the 8-cap of affine points in PG(3,2)")
      ->callback([&] {
        require_format(g, {"json"}, "construct binary");
        if (n_con != -1 && n_con != 3)
          throw capkit::usage_error(
              "only the n = 3 construction is implemented; sizes for larger "
              "n come from the bounds table");
        if (q_con != 2)
          throw capkit::usage_error("the affine-points cap needs q = 2");
        capkit::FieldTable F(1);
        capkit::Geometry G(3, F);
        const auto K = capkit::binary_affine_cap(G);
        json j;
        j["construction"] = json{{"kind", "binary-affine"}, {"q", 2}, {"n", 3}};
        j["points"] = capkit::points_json(G, K);
        j["report"] = capkit::cap_report_json(G, K, capkit::cap_report(G, K));
        emit_json(g, j);
      });

  // search
  auto* search = app.add_subcommand(
      "search", "randomized completions; size spectrum with witnesses");
  search->fallthrough();
  long long q_search = 4;
  int n_search = 3, restarts = 100;
  std::string strategy = "uniform", start_arg;
  bool exhaustive_census = false;
  search->add_option("--q", q_search, "field order")->required();
  search->add_option("--n", n_search, "dimension, 2 or 3")
      ->capture_default_str();
  search->add_option("--restarts", restarts, "independent completions")
      ->check(CLI::Range(1, 100000000))
      ->capture_default_str();
  search->add_option("--strategy", strategy, "uniform | elim")
      ->capture_default_str();
  search->add_option("--start", start_arg,
                     "JSON point list (inline or file) to complete from");
  search->add_flag("--exhaustive", exhaustive_census,
                   "exact census by backtracking (PG(3,2) only)");
  search->callback([&] {
    require_format(g, {"json"}, "search");
    capkit::FieldTable F(h_from_q(q_search));
    capkit::Geometry G(n_search, F);
    capkit::point_set start;
    if (!start_arg.empty())
      start = capkit::parse_point_set(G, load_points_arg(start_arg));
    capkit::Spectrum spec;
    if (exhaustive_census) {
      spec = capkit::exhaustive_complete_caps(G, start);
    } else {
      capkit::SearchConfig sc;
      sc.seed = g.seed;
      sc.restarts = restarts;
      sc.strategy = capkit::strategy_from_string(strategy);
      sc.start = start;
      spec = capkit::spectrum_sample(G, sc, g.threads);
    }
    emit_json(g, capkit::spectrum_json(G, spec));
  });

  // bounds
  auto* bounds = app.add_subcommand(
      "bounds", "size bounds for caps and second-largest complete caps");
  bounds->fallthrough();
  long long q_bounds = 0, all_q_upto = 0;
  int n_bounds = 3;
  bounds->add_option("--n", n_bounds, "dimension, 2 .. 8")
      ->capture_default_str();
  auto* q_opt = bounds->add_option("--q", q_bounds, "field order, 2 .. 2^16");
  auto* upto_opt = bounds->add_option(
      "--all-q-upto", all_q_upto, "tables for every power of two up to here");
  q_opt->excludes(upto_opt);
  bounds->callback([&] {
    std::vector<long long> qs;
    if (all_q_upto > 0)
      for (long long q = 2; q <= all_q_upto; q *= 2) qs.push_back(q);
    else if (q_bounds > 0)
      qs.push_back(q_bounds);
    else
      throw capkit::usage_error("bounds: pass --q or --all-q-upto");
    std::vector<capkit::BoundTable> tables;
    for (auto q : qs) tables.push_back(capkit::evaluate_bounds(n_bounds, q));
    if (g.format == "json") {
      json arr = json::array();
      for (auto& t : tables) arr.push_back(capkit::bound_table_json(t));
      emit_json(g, tables.size() == 1 ? arr[0] : json{{"tables", arr}});
    } else if (g.format == "csv") {
      std::ostringstream out;
      for (std::size_t i = 0; i < tables.size(); ++i) {
        if (tables.size() > 1)
          out << "# n = " << tables[i].n << ", q = " << tables[i].q << "\n";
        out << capkit::bound_table_csv(tables[i]);
      }
      emit_text(g, out.str());
    } else {
      std::ostringstream out;
      for (auto& t : tables) out << capkit::bound_table_markdown(t) << "\n";
      emit_text(g, out.str());
    }
  });

  // verify-paper
  auto* verify = app.add_subcommand(
      "verify-paper",
      "run every pinned check and write a JSON report; exit 0 iff all "
      "REQUIRED checks pass");
  verify->fallthrough();
  std::string config_path, qs_arg;
  int sigma1_restarts = -1, r_q2 = -1, r_q4 = -1, r_q8 = -1;
  verify->add_option("--config", config_path,
                     "key = value file; flags override it");
  auto* qs_opt = verify->add_option("--qs", qs_arg,
                                    "comma-separated field orders (default "
                                    "2,4,8)");
  auto* s1_opt = verify->add_option("--sigma1-restarts", sigma1_restarts,
                                    "completions per q for the tangent scan");
  auto* r2_opt = verify->add_option("--restarts-q2", r_q2,
                                    "sampling size at q = 2");
  auto* r4_opt = verify->add_option("--restarts-q4", r_q4,
                                    "spectrum size at q = 4");
  auto* r8_opt = verify->add_option("--restarts-q8", r_q8,
                                    "spectrum size at q = 8");
  verify->callback([&] {
    capkit::VerifyConfig cfg;
    if (!config_path.empty())
      cfg = capkit::verify_config_from_kv(capkit::parse_config_file(config_path));
    if (qs_opt->count()) cfg.qs = capkit::config_int_list("qs", qs_arg);
    if (seed_opt->count()) cfg.seed = g.seed;
    if (threads_opt->count()) cfg.threads = g.threads;
    if (s1_opt->count()) cfg.sigma1_restarts = sigma1_restarts;
    if (r2_opt->count()) cfg.restarts_q2 = r_q2;
    if (r4_opt->count()) cfg.restarts_q4 = r_q4;
    if (r8_opt->count()) cfg.restarts_q8 = r_q8;
    if (out_opt->count()) cfg.out = g.out;
    capkit::validate_verify_config(cfg);

    std::ostringstream echo;
    for (int i = 0; i < argc; ++i) echo << (i ? " " : "") << argv[i];
    const capkit::VerifyOutcome outcome = capkit::run_verify(cfg, echo.str());

    std::ofstream f(cfg.out);
    if (!f) throw capkit::usage_error("cannot write '" + cfg.out + "'");
    f << outcome.report.dump(2) << "\n";

    for (const auto& e : outcome.report["entries"])
      std::cout << "[" << e["verdict"].get<std::string>() << "] "
                << e["id"].get<std::string>() << " ("
                << e["severity"].get<std::string>() << ", "
                << e["runtime_ms"].get<long long>() << " ms)\n";
    std::cout << "report: " << cfg.out << "\n"
              << "REQUIRED checks: "
              << (outcome.required_pass ? "PASS" : "FAIL") << "\n";
    if (!outcome.required_pass) rc = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; any flag misuse maps to the usage code
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const capkit::usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const capkit::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return rc;
}
