// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Each criterion runs bundled scenarios and compares the observed metrics with
// its own bounds, so loosening a scenario tolerance cannot make it pass.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "clarklab/harness/runner.hpp"

#ifndef CLARK_LAB_SCENARIO_DIR
#define CLARK_LAB_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;
using namespace clarklab;
using namespace clarklab::harness;

namespace {

struct Bound {
  std::string scenario;  // file stem
  std::string check;
  std::string metric;
  double limit;
  bool above = false;  // observed > limit instead of observed <= limit
};

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

class Runs {
public:
  explicit Runs(fs::path dir) : dir_(std::move(dir)) {}

  const RunReport& report(const std::string& stem) {
    auto it = cache_.find(stem);
    if (it != cache_.end()) return it->second;
    auto t0 = std::chrono::steady_clock::now();
    auto rep = run_scenario(load_scenario((dir_ / (stem + ".json")).string()), workers());
    seconds_[stem] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cache_.emplace(stem, std::move(rep)).first->second;
  }

  double seconds(const std::string& stem) {
    report(stem);
    return seconds_.at(stem);
  }

  static unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

private:
  fs::path dir_;
  std::map<std::string, RunReport> cache_;
  std::map<std::string, double> seconds_;
};

const CheckRecord* find_record(const RunReport& rep, const std::string& id) {
  for (const auto& r : rep.records)
    if (r.id == id) return &r;
  return nullptr;
}

/// Every named check must exist, run without error, pass its own metrics and
/// meet the criterion's bounds.
Outcome check_bounds(Runs& runs, const std::vector<Bound>& bounds) {
  Outcome out;
  for (const auto& b : bounds) {
    const std::string where = b.scenario + "/" + b.check;
    const CheckRecord* r = nullptr;
    try {
      r = find_record(runs.report(b.scenario), b.check);
    } catch (const std::exception& e) {
      out.fail(b.scenario + ": " + e.what());
      continue;
    }
    if (!r) {
      out.fail(where + " missing");
      continue;
    }
    if (!r->error.empty()) {
      out.fail(where + " error: " + r->error);
      continue;
    }
    if (!r->pass()) out.fail(where + " failed its scenario tolerances");
    const Metric* m = nullptr;
    for (const auto& x : r->metrics)
      if (x.name == b.metric) m = &x;
    if (!m) {
      out.fail(where + " has no metric " + b.metric);
      continue;
    }
    bool ok = b.above ? m->observed > b.limit : m->observed <= b.limit;
    if (!ok)
      out.fail(where + " " + b.metric + "=" + encode_double(m->observed) + (b.above ? " not above " : " exceeds ") +
               encode_double(b.limit));
  }
  return out;
}

std::vector<fs::path> scenario_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

Outcome determinism(const fs::path& dir) {
  Outcome out;
  auto files = scenario_files(dir);
  if (files.empty()) out.fail("no scenarios in " + dir.string());
  for (const auto& f : files) {
    try {
      auto s = load_scenario(f.string());
      std::string a = to_json(run_scenario(s, 1)).dump(2);
      std::string b = to_json(run_scenario(s, std::max(2u, Runs::workers()))).dump(2);
      if (a != b) out.fail(f.filename().string() + " differs between runs");
    } catch (const std::exception& e) {
      out.fail(f.filename().string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path(CLARK_LAB_SCENARIO_DIR);
  Runs runs(dir);

  const std::vector<std::string> arcs{"circle-z", "circle-z2", "circle-degree8"};
  const std::vector<std::string> lines{"line-two-atom", "line-n4", "line-n8"};
  const std::vector<std::string> curves{"curve-phi-one", "curve-generic", "curve-identity-first"};
  std::vector<Bound> disintegration;
  for (const auto& c : arcs) disintegration.push_back({"disintegration", c, "deviation", 1e-6});
  for (const auto& c : lines) {
    disintegration.push_back({"disintegration", c, "deviation", 1e-3});
    disintegration.push_back({"disintegration", c, "error_bound", 1e-3});
  }
  for (const auto& c : curves) disintegration.push_back({"disintegration", c, "deviation", 1e-4});

  std::vector<Bound> lemma;
  for (const auto& c : {"z2-f-z", "z3-f-z-plus-z2", "random-degree6", "random-degree12", "random-nonzero-f0"}) {
    lemma.push_back({"splitting", c, "boundary_residual", 1e-9});
    lemma.push_back({"splitting", c, "weighted_transform", 1e-9});
  }
  lemma.push_back({"splitting", "z2-f-z", "worked_case", 1e-10});
  lemma.push_back({"splitting", "z3-f-z-plus-z2", "worked_case", 1e-10});

  std::vector<Bound> rank_two;
  for (const auto& c : {"family-n4", "family-n8", "family-n12"}) rank_two.push_back({"rank-two", c, "two_parameter_transform", 1e-8});

  struct Criterion {
    int number;
    std::string title;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {1, "Aronszajn-Krein vs dense oracle (50 models per N in {2,8,32,64}, 6 couplings, < 60 s)",
       [&] {
         auto o = check_bounds(runs, {{"aronszajn-krein", "oracle-sweep", "position", 1e-9},
                                      {"aronszajn-krein", "oracle-sweep", "mass", 1e-8},
                                      {"aronszajn-krein", "oracle-sweep", "count_mismatch", 0.0}});
         double t = runs.seconds("aronszajn-krein");
         if (t >= 60.0) o.fail("took " + std::to_string(t) + " s");
         return o;
       }},
      {2, "Clark correspondence (20 circle models, N <= 16, 16 alphas)",
       [&] {
         return check_bounds(runs, {{"clark-correspondence", "random-circle-models", "position", 1e-9},
                                    {"clark-correspondence", "random-circle-models", "mass", 1e-8},
                                    {"clark-correspondence", "random-circle-models", "oracle_position", 1e-9},
                                    {"clark-correspondence", "random-circle-models", "oracle_mass", 1e-8},
                                    {"clark-correspondence", "random-circle-models", "count_mismatch", 0.0}});
       }},
      {3, "Disintegration identities (circle arcs, line intervals, curves)", [&] { return check_bounds(runs, disintegration); }},
      {4, "Model-space suite (degrees 1-16)",
       [&] {
         return check_bounds(runs, {{"model-space", "degrees-1-16", "unitarity", 1e-10},
                                    {"model-space", "degrees-1-16", "intertwine", 1e-9},
                                    {"model-space", "degrees-1-16", "isometry", 1e-9},
                                    {"model-space", "power-5", "unitarity", 1e-10},
                                    {"model-space", "power-5", "intertwine", 1e-9},
                                    {"model-space", "power-5", "isometry", 1e-9}});
       }},
      {5, "Splitting f0 * hat(f0) = g + theta h and the weighted Clark transform", [&] { return check_bounds(runs, lemma); }},
      {6, "Two-parameter transform vs recursive construction (16 x 16 x 8 grid, 3 families)",
       [&] { return check_bounds(runs, rank_two); }},
      {7, "Positivity and the density bound",
       [&] {
         return check_bounds(runs, {{"positivity", "positivity-degree4", "min_real_part", 0.5, true},
                                    {"positivity", "positivity-degree10", "min_real_part", 0.5, true},
                                    {"positivity", "phi-bound", "bound_excess", 1e-9},
                                    {"positivity", "phi-one", "bound_excess", 1e-9}});
       }},
      {8, "Simon-Wolff classification and closed forms",
       [&] {
         return check_bounds(runs, {{"simon-wolff", "classification", "mismatches", 0.0},
                                    {"simon-wolff", "classification", "closed_form", 0.0},
                                    {"simon-wolff", "axis-criterion", "mismatches", 0.0},
                                    {"scalar-smoke", "simon-wolff-scalar", "mismatches", 0.0},
                                    {"scalar-smoke", "simon-wolff-scalar", "closed_form", 0.0}});
       }},
      {9, "Determinism: every bundled scenario byte-identical across runs and worker counts", [&] { return determinism(dir); }},
  };

  bool all = true;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(e.what());
    }
    all = all && o.pass;
    std::printf("%s criterion %d: %s%s%s\n", o.pass ? "PASS" : "FAIL", c.number, c.title.c_str(), o.pass ? "" : " -- ",
                o.detail.c_str());
  }
  return all ? 0 : 1;
}
