#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "capkit/errors.hpp"

// Flat key = value configuration. Grammar (also in the README):
//   - one "key = value" pair per line
//   - keys match [a-z0-9_]+; every key mirrors a CLI flag
//   - values are integers, comma-separated integer lists, or strings
//     (optionally double-quoted)
//   - '#' starts a comment; blank lines are ignored
//   - a key may appear at most once
namespace capkit {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline std::map<std::string, std::string> parse_key_values(
    const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto where = [&] { return " (line " + std::to_string(lineno) + ")"; };
    std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw usage_error("config: expected key = value" + where());
    const std::string key = detail::trim(s.substr(0, eq));
    if (key.empty() ||
        key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_") !=
            std::string::npos)
      throw usage_error("config: bad key '" + key + "'" + where());
    std::string value = detail::trim(s.substr(eq + 1));
    if (!value.empty() && value[0] == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string::npos)
        throw usage_error("config: unterminated string" + where());
      const std::string rest = detail::trim(value.substr(close + 1));
      if (!rest.empty() && rest[0] != '#')
        throw usage_error("config: trailing text after string" + where());
      value = value.substr(1, close - 1);
    } else {
      const auto hash = value.find('#');
      if (hash != std::string::npos) value = detail::trim(value.substr(0, hash));
    }
    if (value.empty())
      throw usage_error("config: empty value for '" + key + "'" + where());
    if (!kv.emplace(key, value).second)
      throw usage_error("config: duplicate key '" + key + "'" + where());
  }
  return kv;
}

inline std::map<std::string, std::string> parse_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("config: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

inline long long config_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != value.size())
    throw usage_error("config: '" + key + "' expects an integer, got '" +
                      value + "'");
  return v;
}

inline std::vector<long long> config_int_list(const std::string& key,
                                              const std::string& value) {
  std::vector<long long> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ','))
    out.push_back(config_int(key, detail::trim(item)));
  if (out.empty())
    throw usage_error("config: '" + key + "' expects a list of integers");
  return out;
}

// verify pipeline settings; every field mirrors a verify-paper flag
struct VerifyConfig {
  std::vector<long long> qs = {2, 4, 8};
  std::uint64_t seed = 0;
  int threads = 1;
  int sigma1_restarts = 100;   // completions per q for the tangent-count scan
  int restarts_q4 = 1000;      // spectrum size at q = 4
  int restarts_q8 = 300;       // spectrum size at q = 8
  int restarts_q2 = 200;       // sampling size at q = 2
  std::string out = "verify_report.json";
};

inline void validate_verify_config(const VerifyConfig& cfg) {
  if (cfg.qs.empty()) throw usage_error("qs: at least one field order");
  for (auto q : cfg.qs) {
    if (q < 2 || (q & (q - 1)) != 0 || q > 32)
      throw usage_error("qs: supported orders are 2, 4, 8, 16, 32; got " +
                        std::to_string(q));
  }
  if (cfg.threads < 1) throw usage_error("threads: must be >= 1");
  for (int r : {cfg.sigma1_restarts, cfg.restarts_q2, cfg.restarts_q4,
                cfg.restarts_q8})
    if (r < 1) throw usage_error("restarts: must be >= 1");
}

inline VerifyConfig verify_config_from_kv(
    const std::map<std::string, std::string>& kv) {
  VerifyConfig cfg;
  for (auto& [key, value] : kv) {
    if (key == "qs") {
      cfg.qs = config_int_list(key, value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(config_int(key, value));
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(config_int(key, value));
    } else if (key == "sigma1_restarts") {
      cfg.sigma1_restarts = static_cast<int>(config_int(key, value));
    } else if (key == "restarts_q2") {
      cfg.restarts_q2 = static_cast<int>(config_int(key, value));
    } else if (key == "restarts_q4") {
      cfg.restarts_q4 = static_cast<int>(config_int(key, value));
    } else if (key == "restarts_q8") {
      cfg.restarts_q8 = static_cast<int>(config_int(key, value));
    } else if (key == "out") {
      cfg.out = value;
    } else {
      throw usage_error("config: unknown key '" + key + "'");
    }
  }
  validate_verify_config(cfg);
  return cfg;
}

}  // namespace capkit
