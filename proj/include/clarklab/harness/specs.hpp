#pragma once

// Scenario-level descriptions of inputs (inner functions, models, model
// vectors, sets, curves) and the code that turns them into values. Every
// reader validates eagerly and reports the JSON path of a bad field.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "clarklab/json_io.hpp"
#include "clarklab/model_space.hpp"
#include "clarklab/random.hpp"
#include "clarklab/rank_n.hpp"

namespace clarklab::harness {

/// Accessor over a params object that records which keys were read, so
/// unknown keys can be rejected.
class Params {
public:
  Params(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw FormatError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& get(const std::string& key) const {
    used_.push_back(key);
    return require_field(j_, key, path_);
  }

  const Json* find(const std::string& key) const {
    used_.push_back(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) const {
    auto* v = find(key);
    return v ? decode_double(*v, at(key)) : fallback;
  }

  double positive(const std::string& key, double fallback) const {
    double x = number(key, fallback);
    if (!(x > 0.0) || !std::isfinite(x)) throw FormatError(at(key), "must be a positive finite number");
    return x;
  }

  int integer(const std::string& key, int fallback, int lo, int hi) const {
    auto* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw FormatError(at(key), "expected an integer");
    long long x = v->get<long long>();
    if (x < lo || x > hi)
      throw FormatError(at(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
  }

  bool boolean(const std::string& key, bool fallback) const {
    auto* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw FormatError(at(key), "expected true or false");
    return v->get<bool>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    auto* v = find(key);
    return v ? decode_doubles(*v, at(key)) : fallback;
  }

  std::vector<int> integers(const std::string& key, std::vector<int> fallback, int lo, int hi) const {
    auto* v = find(key);
    if (!v) return fallback;
    if (!v->is_array() || v->empty()) throw FormatError(at(key), "expected a non-empty array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const Json& x = (*v)[i];
      std::string p = at(key) + "[" + std::to_string(i) + "]";
      if (!x.is_number_integer() || x.get<long long>() < lo || x.get<long long>() > hi)
        throw FormatError(p, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      out.push_back(x.get<int>());
    }
    return out;
  }

  /// Rejects keys that no reader asked for.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (std::find(used_.begin(), used_.end(), it.key()) == used_.end())
        throw FormatError(at(it.key()), "unknown field");
  }

private:
  const Json& j_;
  std::string path_;
  mutable std::vector<std::string> used_;
};

/// Deferred construction of a random or explicit value.
template <class T>
using Maker = std::function<T(Rng&)>;

/// {"power": n} | {"zeros": [...], "c": [re, im]} |
/// {"random_degree": n, "zero_at_origin": bool, "max_radius": r}
inline Maker<BlaschkeProduct> theta_spec(const Json& j, const std::string& path) {
  Params p(j, path);
  if (p.has("power")) {
    int n = p.integer("power", 1, 1, 512);
    p.finish();
    return [n](Rng&) { return BlaschkeProduct::power(n); };
  }
  if (p.has("zeros")) {
    p.find("c");
    p.get("zeros");
    p.finish();
    auto b = blaschke_from_json(j, path);
    if (b.degree() < 1) throw FormatError(path + ".zeros", "inner function must be nonconstant");
    return [b](Rng&) { return b; };
  }
  if (p.has("random_degree")) {
    int n = p.integer("random_degree", 1, 1, 64);
    bool origin = p.boolean("zero_at_origin", true);
    double r = p.number("max_radius", 0.85);
    if (!(r > 0.0 && r < 1.0)) throw FormatError(p.at("max_radius"), "must lie in (0, 1)");
    p.finish();
    return [=](Rng& rng) { return random_blaschke(rng, n, origin, r); };
  }
  throw FormatError(path, "expected one of \"power\", \"zeros\" or \"random_degree\"");
}

/// {"kind", "sites", "weights"} | {"random": {"kind": ..., "size": n}}
inline Maker<CyclicOperatorModel> model_spec(const Json& j, const std::string& path,
                                             std::optional<ModelKind> required = std::nullopt) {
  Params p(j, path);
  auto check_kind = [&](ModelKind k, const std::string& where) {
    if (required && *required != k)
      throw FormatError(where, *required == ModelKind::line ? "this check needs a line model" : "this check needs a circle model");
  };
  if (p.has("random")) {
    Params r(p.get("random"), p.at("random"));
    p.finish();
    const Json& kj = r.get("kind");
    if (!kj.is_string() || (kj != "line" && kj != "circle")) throw FormatError(r.at("kind"), "expected \"line\" or \"circle\"");
    ModelKind kind = kj == "line" ? ModelKind::line : ModelKind::circle;
    check_kind(kind, r.at("kind"));
    int n = r.integer("size", 1, 1, kMaxDenseDimension);
    r.finish();
    return [=](Rng& rng) { return random_model(rng, n, kind); };
  }
  p.get("kind");
  p.get("sites");
  p.get("weights");
  p.finish();
  auto m = model_from_json(j, path);
  check_kind(m.kind(), p.at("kind"));
  return [m](Rng&) { return m; };
}

/// {"coefficients": [...]} | {"random": true} ; with "origin_zero" (default
/// true) the constant term f(0) is removed before normalizing.
inline std::function<ModelVector(const ModelSpace&, Rng&)> vector_spec(const Json& j, const std::string& path) {
  Params p(j, path);
  bool origin_zero = p.boolean("origin_zero", true);
  if (p.has("coefficients")) {
    auto c = decode_complexes(p.get("coefficients"), p.at("coefficients"));
    p.finish();
    return [=](const ModelSpace& ms, Rng&) {
      if (static_cast<int>(c.size()) != ms.dimension())
        throw FormatError(path + ".coefficients", "length differs from the model-space dimension");
      Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(c.data(), c.size());
      return ms.vector(v);
    };
  }
  if (!p.boolean("random", false)) throw FormatError(path, "expected \"coefficients\" or \"random\": true");
  p.finish();
  return [=](const ModelSpace& ms, Rng& rng) {
    Eigen::VectorXcd c(ms.dimension());
    for (auto& x : c) x = rng.complex_normal();
    ModelVector f = ms.vector(c);
    if (origin_zero) {
      if (ms.dimension() < 2) throw InvalidArgument("a vector with f(0) = 0 needs dimension >= 2");
      f = without_constant(ms, f);
    }
    f.coefficients /= f.norm();
    return f;
  };
}

inline std::vector<BorelSet::Piece> pieces_spec(const Json& j, const std::string& path) {
  require_array(j, path);
  if (j.empty()) throw FormatError(path, "expected at least one piece");
  std::vector<BorelSet::Piece> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string p = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) throw FormatError(p, "expected [lo, hi]");
    double lo = decode_double(j[i][0], p + "[0]"), hi = decode_double(j[i][1], p + "[1]");
    if (!(hi > lo)) throw FormatError(p, "needs hi > lo");
    out.push_back({lo, hi});
  }
  return out;
}

inline BorelSet arcs_spec(const Json& j, const std::string& path) {
  try {
    return BorelSet::arcs(pieces_spec(j, path));
  } catch (const InvalidArgument& e) {
    throw FormatError(path, e.what());
  }
}

inline BorelSet intervals_spec(const Json& j, const std::string& path) {
  try {
    return BorelSet::intervals(pieces_spec(j, path));
  } catch (const InvalidArgument& e) {
    throw FormatError(path, e.what());
  }
}

/// Array of theta specs.
inline Maker<AnalyticCurve> curve_spec(const Json& j, const std::string& path, std::size_t n) {
  require_array(j, path);
  if (j.size() != n) throw FormatError(path, "expected " + std::to_string(n) + " components");
  std::vector<Maker<BlaschkeProduct>> parts;
  for (std::size_t i = 0; i < j.size(); ++i) parts.push_back(theta_spec(j[i], path + "[" + std::to_string(i) + "]"));
  return [parts](Rng& rng) {
    std::vector<BlaschkeProduct> c;
    for (const auto& m : parts) c.push_back(m(rng));
    return AnalyticCurve(std::move(c));
  };
}

}  // namespace clarklab::harness
