#include "fracp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fracp {

using json = nlohmann::ordered_json;

namespace {

std::string line_of_byte(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

[[noreturn]] void fail(const std::string& path, const std::string& where,
                       const std::string& what) {
  throw ConfigError(path + ": " + where + ": " + what);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& path, const std::string& section) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      fail(path, section, "unknown key '" + item.key() + "'");
  }
}

double need_number(const json& obj, const char* key, const std::string& path,
                   const std::string& section, double fallback,
                   bool required = false) {
  if (!obj.contains(key)) {
    if (required) fail(path, section, std::string("missing key '") + key + "'");
    return fallback;
  }
  if (!obj[key].is_number())
    fail(path, section, std::string("'") + key + "' must be a number");
  return obj[key].get<double>();
}

long long need_integer(const json& obj, const char* key,
                       const std::string& path, const std::string& section,
                       long long fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    fail(path, section, std::string("'") + key + "' must be an integer");
  return obj[key].get<long long>();
}

}  // namespace

Grid RunConfig::make_grid() const {
  // ps >= 1 configurations run in the Hoelder-embedding regime; the strict
  // subcritical check stays off at this level so that any s in (0,1) is usable.
  return build_grid(a, b, n, s, p, /*enforce_subcritical=*/false);
}

ReactionSpec RunConfig::make_reaction() const {
  ReactionSpec spec;
  switch (kind) {
    case ReactionKind::power:
      spec = make_power_reaction(q, p, c0);
      spec.r = r;
      break;
    case ReactionKind::logpower:
      spec = make_logpower_reaction(q, p, r, c0);
      break;
    case ReactionKind::custom_table:
      spec = load_table_reaction(*table_path, p, r, c0);
      break;
  }
  return spec;
}

RunConfig parse_config(const std::string& text, const std::string& path) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ":" + line_of_byte(text, e.byte) + ": " +
                      e.what());
  }
  if (!doc.is_object()) fail(path, "top level", "expected a JSON object");
  reject_unknown(doc, {"domain", "exponents", "reaction", "solver", "outputs"},
                 path, "top level");

  RunConfig cfg;

  if (doc.contains("domain")) {
    const json& d = doc["domain"];
    reject_unknown(d, {"a", "b", "n"}, path, "domain");
    cfg.a = need_number(d, "a", path, "domain", cfg.a);
    cfg.b = need_number(d, "b", path, "domain", cfg.b);
    cfg.n = static_cast<int>(need_integer(d, "n", path, "domain", cfg.n));
  }
  if (doc.contains("exponents")) {
    const json& d = doc["exponents"];
    reject_unknown(d, {"p", "s"}, path, "exponents");
    cfg.p = need_number(d, "p", path, "exponents", cfg.p);
    cfg.s = need_number(d, "s", path, "exponents", cfg.s);
  }
  if (doc.contains("reaction")) {
    const json& d = doc["reaction"];
    reject_unknown(d, {"kind", "q", "r", "c0", "table_path"}, path, "reaction");
    if (d.contains("kind")) {
      const std::string kind = d["kind"].get<std::string>();
      if (kind == "power") {
        cfg.kind = ReactionKind::power;
      } else if (kind == "logpower") {
        cfg.kind = ReactionKind::logpower;
      } else if (kind == "custom-table") {
        cfg.kind = ReactionKind::custom_table;
      } else {
        fail(path, "reaction", "unknown kind '" + kind + "'");
      }
    }
    cfg.q = need_number(d, "q", path, "reaction", cfg.q);
    cfg.r = need_number(d, "r", path, "reaction",
                        cfg.kind == ReactionKind::power ? cfg.q : cfg.r);
    cfg.c0 = need_number(d, "c0", path, "reaction", cfg.c0);
    if (d.contains("table_path")) {
      if (!d["table_path"].is_string())
        fail(path, "reaction", "'table_path' must be a string");
      cfg.table_path = d["table_path"].get<std::string>();
    }
  }
  if (doc.contains("solver")) {
    const json& d = doc["solver"];
    reject_unknown(d,
                   {"tol", "max_iter", "path_nodes", "multistart_count", "seed",
                    "phi_floor", "third_strategy"},
                   path, "solver");
    cfg.tol = need_number(d, "tol", path, "solver", cfg.tol);
    cfg.max_iter =
        static_cast<int>(need_integer(d, "max_iter", path, "solver", cfg.max_iter));
    cfg.path_nodes = static_cast<int>(
        need_integer(d, "path_nodes", path, "solver", cfg.path_nodes));
    cfg.multistart_count = static_cast<int>(need_integer(
        d, "multistart_count", path, "solver", cfg.multistart_count));
    cfg.seed = static_cast<std::uint64_t>(need_integer(
        d, "seed", path, "solver", static_cast<long long>(cfg.seed)));
    cfg.phi_floor = need_number(d, "phi_floor", path, "solver", cfg.phi_floor);
    if (d.contains("third_strategy")) {
      const std::string st = d["third_strategy"].get<std::string>();
      if (st == "both") {
        cfg.third_strategy = ThirdStrategy::both;
      } else if (st == "path") {
        cfg.third_strategy = ThirdStrategy::path;
      } else if (st == "multistart") {
        cfg.third_strategy = ThirdStrategy::multistart;
      } else {
        fail(path, "solver", "unknown third_strategy '" + st + "'");
      }
    }
  }
  if (doc.contains("outputs")) {
    const json& d = doc["outputs"];
    reject_unknown(d, {"dir", "emit_traces"}, path, "outputs");
    if (d.contains("dir")) {
      if (!d["dir"].is_string()) fail(path, "outputs", "'dir' must be a string");
      cfg.out_dir = d["dir"].get<std::string>();
    }
    if (d.contains("emit_traces")) {
      if (!d["emit_traces"].is_boolean())
        fail(path, "outputs", "'emit_traces' must be a boolean");
      cfg.emit_traces = d["emit_traces"].get<bool>();
    }
  }

  // module preconditions, checked up front
  if (!(cfg.b > cfg.a)) fail(path, "domain", "require b > a");
  if (cfg.n < 2) fail(path, "domain", "require n >= 2");
  if (!(cfg.s > 0.0 && cfg.s < 1.0)) fail(path, "exponents", "require s in (0,1)");
  if (!(cfg.p > 1.0)) fail(path, "exponents", "require p > 1");
  if (!(cfg.tol > 0.0)) fail(path, "solver", "require tol > 0");
  if (cfg.max_iter < 1) fail(path, "solver", "require max_iter >= 1");
  if (cfg.path_nodes < 5 || cfg.path_nodes % 2 == 0)
    fail(path, "solver", "require path_nodes odd and >= 5");
  if (cfg.multistart_count < 0)
    fail(path, "solver", "require multistart_count >= 0");
  if (cfg.kind == ReactionKind::custom_table && !cfg.table_path)
    fail(path, "reaction", "custom-table kind requires table_path");

  try {
    const Grid g = cfg.make_grid();
    const ReactionSpec spec = cfg.make_reaction();
    validate_reaction(spec, g);
  } catch (const std::exception& e) {
    fail(path, "validation", e.what());
  }

  cfg.raw_json = doc.dump(2);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace fracp
