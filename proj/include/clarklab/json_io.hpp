#pragma once

// JSON forms of measures, Blaschke products, rationals and operator models.
// Doubles are written as "%.17g" decimal strings so a round trip is
// bit-exact; readers accept either strings or plain JSON numbers.

#include <nlohmann/json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "clarklab/errors.hpp"
#include "clarklab/herglotz.hpp"
#include "clarklab/measures.hpp"
#include "clarklab/rank_one.hpp"

namespace clarklab {

using Json = nlohmann::ordered_json;

/// Malformed JSON content; path names the offending field.
class FormatError : public Error {
public:
  std::string path;
  FormatError(const std::string& p, const std::string& what) : Error(p + ": " + what), path(p) {}
};

inline std::string encode_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Json jdouble(double x) { return encode_double(x); }
inline Json jcomplex(Complex z) { return Json::array({jdouble(z.real()), jdouble(z.imag())}); }

inline double decode_double(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) throw FormatError(path, "not a number: \"" + s + "\"");
    return v;
  }
  throw FormatError(path, "expected a number");
}

inline Complex decode_complex(const Json& j, const std::string& path) {
  if (j.is_number() || j.is_string()) return decode_double(j, path);
  if (!j.is_array() || j.size() != 2) throw FormatError(path, "expected [re, im]");
  return {decode_double(j[0], path + "[0]"), decode_double(j[1], path + "[1]")};
}

inline const Json& require_field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw FormatError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(path + "." + key, "missing field");
  return *it;
}

inline const Json& require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path, "expected an array");
  return j;
}

inline std::vector<double> decode_doubles(const Json& j, const std::string& path) {
  std::vector<double> out;
  require_array(j, path);
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(decode_double(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<Complex> decode_complexes(const Json& j, const std::string& path) {
  std::vector<Complex> out;
  require_array(j, path);
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(decode_complex(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Json encode_complexes(const std::vector<Complex>& v) {
  Json a = Json::array();
  for (auto z : v) a.push_back(jcomplex(z));
  return a;
}

// measures ------------------------------------------------------------------

template <class M>
Json atoms_json(const M& m) {
  Json a = Json::array();
  for (const auto& atom : m.atoms()) a.push_back(Json::array({jdouble(atom.position), jdouble(atom.mass)}));
  return a;
}

inline Json to_json(const LineAtomicMeasure& m) { return Json{{"space", "line"}, {"atoms", atoms_json(m)}}; }
inline Json to_json(const CircleAtomicMeasure& m) { return Json{{"space", "circle"}, {"atoms", atoms_json(m)}}; }

inline std::vector<Atom> decode_atoms(const Json& j, const std::string& path) {
  std::vector<Atom> atoms;
  const Json& a = require_array(require_field(j, "atoms", path), path + ".atoms");
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::string p = path + ".atoms[" + std::to_string(i) + "]";
    if (!a[i].is_array() || a[i].size() != 2) throw FormatError(p, "expected [position, mass]");
    atoms.push_back({decode_double(a[i][0], p + "[0]"), decode_double(a[i][1], p + "[1]")});
  }
  return atoms;
}

inline std::string decode_space(const Json& j, const std::string& path) {
  const Json& s = require_field(j, "space", path);
  if (!s.is_string() || (s != "line" && s != "circle")) throw FormatError(path + ".space", "expected \"line\" or \"circle\"");
  return s.get<std::string>();
}

inline LineAtomicMeasure line_measure_from_json(const Json& j, const std::string& path = "$") {
  if (decode_space(j, path) != "line") throw FormatError(path + ".space", "expected \"line\"");
  try {
    return LineAtomicMeasure(decode_atoms(j, path));
  } catch (const InvalidArgument& e) {
    throw FormatError(path + ".atoms", e.what());
  }
}

inline CircleAtomicMeasure circle_measure_from_json(const Json& j, const std::string& path = "$") {
  if (decode_space(j, path) != "circle") throw FormatError(path + ".space", "expected \"circle\"");
  try {
    return CircleAtomicMeasure(decode_atoms(j, path));
  } catch (const InvalidArgument& e) {
    throw FormatError(path + ".atoms", e.what());
  }
}

// Blaschke products and rationals -----------------------------------------

inline Json to_json(const BlaschkeProduct& b) {
  return Json{{"zeros", encode_complexes(b.zeros())}, {"c", jcomplex(b.front_constant())}};
}

inline std::string serialize_blaschke(const BlaschkeProduct& b) { return to_json(b).dump(); }

inline BlaschkeProduct blaschke_from_json(const Json& j, const std::string& path = "$") {
  auto zeros = decode_complexes(require_field(j, "zeros", path), path + ".zeros");
  Complex c = 1.0;
  if (j.contains("c")) c = decode_complex(j["c"], path + ".c");
  try {
    return BlaschkeProduct(std::move(zeros), c);
  } catch (const InvalidArgument& e) {
    throw FormatError(path, e.what());
  }
}

inline Json to_json(const HerglotzRational& r) {
  return Json{{"numerator", encode_complexes(r.numerator().coefficients())},
              {"denominator", encode_complexes(r.denominator().coefficients())}};
}

inline HerglotzRational rational_from_json(const Json& j, const std::string& path = "$") {
  auto num = decode_complexes(require_field(j, "numerator", path), path + ".numerator");
  auto den = decode_complexes(require_field(j, "denominator", path), path + ".denominator");
  try {
    return HerglotzRational(Polynomial(std::move(num)), Polynomial(std::move(den)));
  } catch (const InvalidArgument& e) {
    throw FormatError(path, e.what());
  }
}

// operator models -----------------------------------------------------------

inline Json to_json(const CyclicOperatorModel& m) {
  Json sites = Json::array(), weights = Json::array();
  for (double s : m.sites()) sites.push_back(jdouble(s));
  for (double w : m.weights()) weights.push_back(jdouble(w));
  return Json{{"kind", m.kind() == ModelKind::line ? "line" : "circle"}, {"sites", sites}, {"weights", weights}};
}

inline CyclicOperatorModel model_from_json(const Json& j, const std::string& path = "$") {
  const Json& k = require_field(j, "kind", path);
  if (!k.is_string() || (k != "line" && k != "circle")) throw FormatError(path + ".kind", "expected \"line\" or \"circle\"");
  auto sites = decode_doubles(require_field(j, "sites", path), path + ".sites");
  auto weights = decode_doubles(require_field(j, "weights", path), path + ".weights");
  if (sites.size() != weights.size()) throw FormatError(path + ".weights", "length differs from sites");
  try {
    return CyclicOperatorModel(k == "line" ? ModelKind::line : ModelKind::circle, std::move(sites), std::move(weights));
  } catch (const InvalidArgument& e) {
    throw FormatError(path, e.what());
  }
}

}  // namespace clarklab
