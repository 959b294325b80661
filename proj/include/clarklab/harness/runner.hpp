#pragma once

// Scenario files, parallel execution and report assembly.
//
// Scenario:
//   {"name": str, "seed": u64 | "decimal", "tolerances": {metric: tol},
//    "checks": [{"id": str, "type": str, "params": {...}, "tolerance": {metric: tol}}]}
//
// Each check gets its own generator Rng(seed, index), so results do not
// depend on the worker count or on scheduling.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "clarklab/harness/checks.hpp"

namespace clarklab::harness {

/// Unparseable scenario text; line and column are 1-based.
class ParseError : public Error {
public:
  std::size_t line = 0;
  std::size_t column = 0;
  ParseError(std::size_t l, std::size_t c, const std::string& what)
      : Error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + what), line(l), column(c) {}
};

struct PlannedCheck {
  std::string id;
  std::string type;
  Json params;
  std::vector<Metric> metrics;  // observed left at zero
  Runner run;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<PlannedCheck> checks;
};

struct CheckRecord {
  std::string id;
  std::string type;
  Json params;
  std::vector<Metric> metrics;
  std::string error;
  double seconds = 0.0;

  bool pass() const {
    if (!error.empty()) return false;
    return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass(); });
  }
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> records;

  std::size_t passed() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass(); }));
  }
  bool all_pass() const { return passed() == records.size(); }
};

// parsing --------------------------------------------------------------------

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    // drop nlohmann's own "[json.exception.parse_error.101] parse error at ..." prefix
    if (auto p = what.find(": "); p != std::string::npos) what = what.substr(p + 2);
    throw ParseError(line, col, what);
  }
}

inline std::uint64_t parse_seed(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (!s.empty() && s.size() <= 20 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      errno = 0;
      char* end = nullptr;
      unsigned long long v = std::strtoull(s.c_str(), &end, 10);
      if (errno != ERANGE && end == s.c_str() + s.size()) return v;
    }
  }
  throw FormatError(path, "expected an unsigned 64-bit integer or its decimal string");
}

inline std::map<std::string, double> parse_tolerances(const Json& j, const std::string& path) {
  if (!j.is_object()) throw FormatError(path, "expected an object of metric tolerances");
  std::map<std::string, double> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    double t = decode_double(it.value(), path + "." + it.key());
    if (!(t >= 0.0) || !std::isfinite(t)) throw FormatError(path + "." + it.key(), "tolerance must be finite and >= 0");
    out[it.key()] = t;
  }
  return out;
}

inline Scenario scenario_from_json(const Json& j) {
  Params top(j, "$");
  Scenario s;
  const Json& name = top.get("name");
  if (!name.is_string() || name.get<std::string>().empty()) throw FormatError("$.name", "expected a non-empty string");
  s.name = name.get<std::string>();
  s.seed = parse_seed(top.get("seed"), "$.seed");
  std::map<std::string, double> global;
  if (auto* t = top.find("tolerances")) global = parse_tolerances(*t, "$.tolerances");
  const Json& checks = require_array(top.get("checks"), "$.checks");
  top.finish();
  if (checks.empty()) throw FormatError("$.checks", "expected at least one check");

  std::set<std::string> ids, all_metrics;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string path = "$.checks[" + std::to_string(i) + "]";
    Params c(checks[i], path);
    const Json& id = c.get("id");
    if (!id.is_string() || id.get<std::string>().empty()) throw FormatError(path + ".id", "expected a non-empty string");
    if (!ids.insert(id.get<std::string>()).second) throw FormatError(path + ".id", "duplicate check id \"" + id.get<std::string>() + "\"");
    const Json& type = c.get("type");
    const auto& reg = check_registry();
    if (!type.is_string() || !reg.count(type.get<std::string>())) {
      std::string known;
      for (const auto& [k, v] : reg) known += (known.empty() ? "" : ", ") + k;
      throw FormatError(path + ".type", "unknown check type; expected one of " + known);
    }
    Json params = Json::object();
    if (auto* p = c.find("params")) params = *p;
    std::map<std::string, double> local;
    if (auto* t = c.find("tolerance")) local = parse_tolerances(*t, path + ".tolerance");
    c.finish();

    BuiltCheck built = reg.at(type.get<std::string>())(Params(params, path + ".params"));
    PlannedCheck pc{id.get<std::string>(), type.get<std::string>(), params, {}, std::move(built.run)};
    std::set<std::string> names;
    for (const auto& d : built.metrics) {
      Metric m{d.name, 0.0, d.expected, d.tolerance, d.compare};
      if (auto it = global.find(d.name); it != global.end()) m.tolerance = it->second;
      if (auto it = local.find(d.name); it != local.end()) m.tolerance = it->second;
      pc.metrics.push_back(m);
      names.insert(d.name);
      all_metrics.insert(d.name);
    }
    for (const auto& [k, v] : local)
      if (!names.count(k)) throw FormatError(path + ".tolerance." + k, "not a metric of check type \"" + pc.type + "\"");
    s.checks.push_back(std::move(pc));
  }
  for (const auto& [k, v] : global)
    if (!all_metrics.count(k)) throw FormatError("$.tolerances." + k, "no check in this scenario reports this metric");
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(parse_json_text(ss.str()));
}

// execution ------------------------------------------------------------------

inline CheckRecord execute_check(const PlannedCheck& c, std::uint64_t seed, std::size_t index) {
  CheckRecord r{c.id, c.type, c.params, c.metrics, {}, 0.0};
  auto t0 = std::chrono::steady_clock::now();
  try {
    Rng rng(seed, index);
    MetricValues v = c.run(rng);
    for (auto& m : r.metrics) {
      auto it = v.find(m.name);
      if (it == v.end()) throw std::logic_error("check did not report metric " + m.name);
      m.observed = it->second;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline RunReport run_scenario(const Scenario& s, unsigned workers = 1) {
  RunReport rep{s.name, s.seed, std::vector<CheckRecord>(s.checks.size())};
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(s.checks.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < s.checks.size();) rep.records[i] = execute_check(s.checks[i], s.seed, i);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return rep;
}

// reporting ------------------------------------------------------------------

inline Json to_json(const CheckRecord& r, bool timing) {
  Json observed = Json::object(), expected = Json::object(), tolerance = Json::object(), comparison = Json::object();
  for (const auto& m : r.metrics) {
    observed[m.name] = jdouble(m.observed);
    expected[m.name] = jdouble(m.expected);
    tolerance[m.name] = jdouble(m.tolerance);
    comparison[m.name] = m.compare == Compare::at_most ? "observed <= tolerance" : "observed > expected - tolerance";
  }
  Json j{{"check", r.id}, {"type", r.type}, {"parameters", r.params}, {"observed", observed},
         {"expected", expected}, {"tolerance", tolerance}, {"comparison", comparison}, {"pass", r.pass()}};
  if (!r.error.empty()) j["error"] = r.error;
  if (timing) j["wall_time_s"] = jdouble(r.seconds);
  return j;
}

inline Json to_json(const RunReport& rep, bool timing = false) {
  Json records = Json::array();
  for (const auto& r : rep.records) records.push_back(to_json(r, timing));
  std::size_t passed = rep.passed();
  return Json{{"scenario", rep.scenario},
              {"seed", std::to_string(rep.seed)},
              {"records", records},
              {"summary", {{"total", rep.records.size()}, {"passed", passed}, {"failed", rep.records.size() - passed}}}};
}

}  // namespace clarklab::harness
