// clark-lab: run verification scenarios and print Clark / perturbed measures.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "clarklab/harness/runner.hpp"

#ifndef CLARK_LAB_SCENARIO_DIR
#define CLARK_LAB_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;
using namespace clarklab;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitInvalid = 2;

unsigned resolve_workers(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("CLARK_LAB_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    std::cerr << "clark-lab: ignoring CLARK_LAB_WORKERS=\"" << env << "\" (expected a positive integer)\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return harness::parse_json_text(ss.str());
}

/// "a", "a+bi", "a-bi", "bi", "i", "a,b" or "(a,b)".
Complex parse_complex(std::string s) {
  const std::string original = s;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  auto bad = [&] { return InvalidArgument("cannot parse complex number \"" + original + "\""); };
  // a number, or a bare sign standing for +-1 when followed by i
  auto read = [&](const char*& p, bool allow_unit) {
    char* end = nullptr;
    double v = std::strtod(p, &end);
    if (end != p) {
      p = end;
      return v;
    }
    if (allow_unit && (*p == '+' || *p == '-') && (p[1] == 'i' || p[1] == 'j')) return *p++ == '-' ? -1.0 : 1.0;
    if (allow_unit && (*p == 'i' || *p == 'j')) return 1.0;
    throw bad();
  };
  auto is_i = [](char c) { return c == 'i' || c == 'j'; };
  if (auto comma = s.find(','); comma != std::string::npos) {
    std::string a = s.substr(0, comma), b = s.substr(comma + 1);
    const char* pa = a.c_str();
    const char* pb = b.c_str();
    double re = read(pa, false), im = read(pb, false);
    if (*pa || *pb) throw bad();
    return {re, im};
  }
  const char* p = s.c_str();
  if (!*p) throw bad();
  double x = read(p, true);
  if (!*p) return x;
  if (is_i(*p) && !p[1]) return {0.0, x};
  if (*p != '+' && *p != '-') throw bad();
  double y = read(p, true);
  if (!is_i(*p) || p[1]) throw bad();
  return {x, y};
}

void print_summary(std::ostream& os, const harness::RunReport& rep) {
  for (const auto& r : rep.records) {
    os << (r.pass() ? "PASS " : "FAIL ") << rep.scenario << "/" << r.id;
    if (!r.error.empty()) {
      os << "  error: " << r.error;
    } else if (!r.pass()) {
      for (const auto& m : r.metrics)
        if (!m.pass()) os << "  " << m.name << "=" << encode_double(m.observed) << " (tolerance " << encode_double(m.tolerance) << ")";
    }
    os << "\n";
  }
  os << rep.scenario << ": " << rep.passed() << "/" << rep.records.size() << " checks passed\n";
}

void write_report(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clark measures, rank-one and rank-n perturbations: verification harness"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, out_dir, scenario_dir = CLARK_LAB_SCENARIO_DIR;
  std::string theta_path, alpha_text, model_path;
  double lambda = 0.0;
  int workers = 0;
  bool timing = false;

  auto* run = app.add_subcommand("run", "Run one scenario file");
  run->add_option("scenario", scenario_path, "Scenario JSON")->required();
  run->add_option("--workers", workers, "Concurrent checks (default: CLARK_LAB_WORKERS, then hardware threads)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_path, "Write the JSON report here instead of stdout");
  run->add_flag("--timing", timing, "Include per-check wall time (reports are then not reproducible)");

  auto* all = app.add_subcommand("verify-all", "Run every bundled scenario");
  all->add_option("--scenario-dir", scenario_dir, "Directory of scenario files")->capture_default_str();
  all->add_option("--workers", workers, "Concurrent checks")->check(CLI::PositiveNumber);
  all->add_option("--out-dir", out_dir, "Write one report per scenario here");
  all->add_flag("--timing", timing, "Include per-check wall time");

  auto* clark = app.add_subcommand("clark", "Print the Clark measure of a finite Blaschke product as CSV angle,mass");
  clark->add_option("--theta", theta_path, "JSON inner function: {\"zeros\": [...], \"c\": [re, im]} or {\"power\": n}")->required();
  clark->add_option("--alpha", alpha_text, "Unimodular alpha, e.g. 1, -1, 0.6+0.8i or 0.6,0.8")->required();

  auto* perturb = app.add_subcommand("perturb", "Print the rank-one perturbed measure of a line model as CSV position,mass");
  perturb->add_option("--model", model_path, "JSON line model {\"kind\": \"line\", \"sites\": [...], \"weights\": [...]}")->required();
  perturb->add_option("--lambda", lambda, "Coupling constant")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      harness::Scenario s;
      try {
        s = harness::load_scenario(scenario_path);
      } catch (const Error& e) {
        std::cerr << "clark-lab: " << scenario_path << ": " << e.what() << "\n";
        return kExitInvalid;
      }
      auto rep = harness::run_scenario(s, resolve_workers(workers));
      Json j = harness::to_json(rep, timing);
      if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        print_summary(std::cerr, rep);
      } else {
        write_report(out_path, j);
        print_summary(std::cout, rep);
      }
      return rep.all_pass() ? 0 : kExitFailed;
    }

    if (*all) {
      std::vector<fs::path> files;
      if (!fs::is_directory(scenario_dir)) {
        std::cerr << "clark-lab: scenario directory not found: " << scenario_dir << "\n";
        return kExitInvalid;
      }
      for (const auto& e : fs::directory_iterator(scenario_dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      if (files.empty()) {
        std::cerr << "clark-lab: no scenarios in " << scenario_dir << "\n";
        return kExitInvalid;
      }
      if (!out_dir.empty()) fs::create_directories(out_dir);
      bool ok = true, invalid = false;
      for (const auto& f : files) {
        harness::Scenario s;
        try {
          s = harness::load_scenario(f.string());
        } catch (const Error& e) {
          std::cerr << "clark-lab: " << f.string() << ": " << e.what() << "\n";
          invalid = true;
          continue;
        }
        auto rep = harness::run_scenario(s, resolve_workers(workers));
        print_summary(std::cout, rep);
        if (!out_dir.empty()) write_report((fs::path(out_dir) / f.filename()).string(), harness::to_json(rep, timing));
        ok = ok && rep.all_pass();
      }
      if (invalid) return kExitInvalid;
      return ok ? 0 : kExitFailed;
    }

    if (*clark) {
      Rng rng(0);
      auto theta = harness::theta_spec(read_json_file(theta_path), "$")(rng);
      auto mu = clark_measure(theta, parse_complex(alpha_text));
      std::printf("angle,mass\n");
      for (const auto& a : mu.atoms()) std::printf("%.17g,%.17g\n", a.position, a.mass);
      return 0;
    }

    if (*perturb) {
      auto model = model_from_json(read_json_file(model_path), "$");
      if (model.kind() != ModelKind::line) throw FormatError("$.kind", "perturb needs a line model");
      auto mu = perturb_selfadjoint(model, lambda);
      std::printf("position,mass\n");
      for (const auto& a : mu.atoms()) std::printf("%.17g,%.17g\n", a.position, a.mass);
      return 0;
    }
  } catch (const FormatError& e) {
    std::cerr << "clark-lab: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const harness::ParseError& e) {
    std::cerr << "clark-lab: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "clark-lab: " << e.what() << "\n";
    return kExitFailed;
  }
  return 0;
}
