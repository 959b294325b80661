#pragma once

// Check implementations. Each check type parses its params eagerly into a
// runner; the runner draws all randomness from the Rng it is handed and
// returns named metrics compared against tolerances.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "clarklab/harness/specs.hpp"

namespace clarklab::harness {

enum class Compare {
  at_most,     // observed <= tolerance (deviations, counts)
  greater_than  // observed > expected - tolerance (lower bounds)
};

struct Metric {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  Compare compare = Compare::at_most;

  bool pass() const {
    if (!std::isfinite(observed)) return false;
    return compare == Compare::at_most ? observed <= tolerance : observed > expected - tolerance;
  }
};

/// Declared metric with its default tolerance.
struct MetricDef {
  std::string name;
  double tolerance;
  Compare compare = Compare::at_most;
  double expected = 0.0;
};

using MetricValues = std::map<std::string, double>;
using Runner = std::function<MetricValues(Rng&)>;

struct BuiltCheck {
  std::vector<MetricDef> metrics;
  Runner run;
};

// ---------------------------------------------------------------------------

namespace detail {

inline void track(double& slot, double v) { slot = std::max(slot, std::isnan(v) ? std::numeric_limits<double>::infinity() : v); }

inline std::vector<Complex> offset_grid(int n, double offset) {
  std::vector<Complex> out;
  for (int k = 0; k < n; ++k) out.push_back(unimodular(kTwoPi * (k + offset) / n));
  return out;
}

inline std::vector<Complex> random_alphas(Rng& rng, int n) {
  std::vector<Complex> out;
  for (int k = 0; k < n; ++k) out.push_back(rng.unimodular_point());
  return out;
}

inline Eigen::VectorXcd random_unit_vector(Rng& rng, Eigen::Index n) {
  Eigen::VectorXcd v(n);
  for (auto& x : v) x = rng.complex_normal();
  return v / v.norm();
}

}  // namespace detail

// measures -------------------------------------------------------------------

inline BuiltCheck build_measure_identities(const Params& p) {
  int count = p.integer("random_measures", 8, 1, 1000);
  int points = p.integer("points", 20, 1, 100000);
  p.finish();
  return {{{"examples", 1e-15}, {"poisson_cauchy", 1e-12}, {"center_normalization", 1e-14},
           {"herglotz_min_imag", 0.0, Compare::greater_than, 0.0}},
          [=](Rng& rng) {
            MetricValues v{{"examples", 0.0}, {"poisson_cauchy", 0.0}, {"center_normalization", 0.0},
                           {"herglotz_min_imag", std::numeric_limits<double>::infinity()}};
            auto d0 = LineAtomicMeasure::dirac(0.0);
            LineAtomicMeasure two({{-1.0, 0.5}, {1.0, 0.5}});
            auto c1 = CircleAtomicMeasure::dirac(0.0);
            CircleAtomicMeasure c2({{0.0, 0.5}, {std::numbers::pi, 0.5}});
            auto iv = [](double a, double b) { return BorelSet::intervals({{a, b}}); };
            double& e = v["examples"];
            detail::track(e, std::abs(total_mass(d0) - 1.0));
            detail::track(e, std::abs(total_mass(two) - 1.0));
            detail::track(e, std::abs(total_mass(LineAtomicMeasure()) - 0.0));
            detail::track(e, std::abs(measure_of(d0, iv(-1, 1)) - 1.0));
            detail::track(e, std::abs(measure_of(d0, iv(1, 2)) - 0.0));
            detail::track(e, std::abs(measure_of(two, iv(0, 2)) - 0.5));
            detail::track(e, std::abs(cauchy_transform_line(d0, kI) - kI));
            detail::track(e, std::abs(cauchy_transform_line(d0, 2.0) + 0.5));
            detail::track(e, std::abs(cauchy_transform_line(two, 0.3) - 0.3 / (1 - 0.09)));
            detail::track(e, std::abs(cauchy_transform_disk(c1, 0.0) - 1.0));
            detail::track(e, std::abs(cauchy_transform_disk(c1, 0.5) - 2.0));
            detail::track(e, std::abs(cauchy_transform_disk(c2, 0.0) - 1.0));
            detail::track(e, std::abs(poisson_integral_disk(c1, 0.0) - 1.0));
            detail::track(e, std::abs(poisson_integral_disk(c1, 0.5) - 3.0));
            detail::track(e, std::abs(simon_wolff_integral(d0, 1.0).value - 1.0));
            detail::track(e, simon_wolff_integral(d0, 0.0).is_finite() ? 1.0 : 0.0);
            detail::track(e, std::abs(simon_wolff_integral(two, 0.0).value - 1.0));
            detail::track(e, std::abs(simon_wolff_integral_circle(c1, -1.0).value - 0.25));
            detail::track(e, simon_wolff_integral_circle(c1, 1.0).is_finite() ? 1.0 : 0.0);
            for (int k = 0; k < count; ++k) {
              auto nu = spectral_measure_circle(random_model(rng, 1 + k % 16, ModelKind::circle));
              auto mu = spectral_measure_line(random_model(rng, 1 + k % 16, ModelKind::line));
              double mass = total_mass(nu);
              detail::track(v["center_normalization"], std::abs(cauchy_transform_disk(nu, 0.0) - mass));
              detail::track(v["center_normalization"], std::abs(poisson_integral_disk(nu, 0.0) - mass));
              for (int j = 0; j < points; ++j) {
                Complex z = rng.disk_point(0.99);
                double diff = poisson_integral_disk(nu, z) - (2.0 * cauchy_transform_disk(nu, z).real() - mass);
                detail::track(v["poisson_cauchy"], std::abs(diff));
                Complex w{rng.uniform(-3.0, 3.0), std::exp(rng.uniform(-6.0, 2.0))};
                v["herglotz_min_imag"] = std::min(v["herglotz_min_imag"], cauchy_transform_line(mu, w).imag());
              }
            }
            return v;
          }};
}

inline BuiltCheck build_simon_wolff(const Params& p) {
  int count = p.integer("random_measures", 8, 1, 1000);
  int size = p.integer("size", 8, 1, kMaxDenseDimension);
  int probes = p.integer("probes", 16, 0, 100000);
  p.finish();
  return {{{"mismatches", 0.0}, {"closed_form", 0.0}}, [=](Rng& rng) {
            MetricValues v{{"mismatches", 0.0}, {"closed_form", 0.0}};
            auto d0 = LineAtomicMeasure::dirac(0.0);
            auto r = simon_wolff_classify(d0, {0.0, 1.0});
            if (r[0].is_finite() || !r[1].is_finite() || r[1].value != 1.0) v["closed_form"] += 1.0;
            LineAtomicMeasure two({{-1.0, 0.5}, {1.0, 0.5}});
            auto r2 = simon_wolff_classify(two, {0.0});
            if (!r2[0].is_finite() || r2[0].value != 1.0) v["closed_form"] += 1.0;
            for (int k = 0; k < count; ++k) {
              auto mu = spectral_measure_line(random_model(rng, size, ModelKind::line));
              std::vector<double> ys = mu.positions();
              for (int j = 0; j < probes; ++j) ys.push_back(rng.uniform(-1.5, 1.5));
              auto cls = simon_wolff_classify(mu, ys);
              for (std::size_t j = 0; j < ys.size(); ++j) {
                bool atom = std::any_of(mu.atoms().begin(), mu.atoms().end(),
                                        [&](const Atom& a) { return positions_coincide(a.position, ys[j]); });
                if (atom == cls[j].is_finite()) v["mismatches"] += 1.0;
              }
            }
            return v;
          }};
}

// rank one -------------------------------------------------------------------

inline BuiltCheck build_selfadjoint_oracle(const Params& p) {
  std::optional<Maker<CyclicOperatorModel>> model;
  if (auto* m = p.find("model")) model = model_spec(*m, p.at("model"), ModelKind::line);
  auto sizes = p.integers("sizes", {2, 8, 32, 64}, 1, kMaxDenseDimension);
  int seeds = p.integer("seeds_per_size", 50, 1, 100000);
  auto lambdas = p.numbers("lambdas", {-10.0, -1.0, -0.1, 0.1, 1.0, 10.0});
  p.finish();
  return {{{"position", 1e-9}, {"mass", 1e-8}, {"total_mass", 1e-10}, {"count_mismatch", 0.0}}, [=](Rng& rng) {
            MetricValues v{{"position", 0.0}, {"mass", 0.0}, {"total_mass", 0.0}, {"count_mismatch", 0.0}};
            auto one = [&](const CyclicOperatorModel& m) {
              for (double lam : lambdas) {
                auto a = perturb_selfadjoint(m, lam);
                auto b = matrix_oracle_selfadjoint(m, lam);
                auto d = compare_measures(a, b);
                if (!d.same_count) {
                  v["count_mismatch"] += 1.0;
                  continue;
                }
                detail::track(v["position"], d.position / (1.0 + std::abs(lam)));
                detail::track(v["mass"], d.mass);
                detail::track(v["total_mass"], std::abs(total_mass(a) - 1.0));
              }
            };
            if (model) {
              for (int s = 0; s < seeds; ++s) one((*model)(rng));
            } else {
              for (int n : sizes)
                for (int s = 0; s < seeds; ++s) one(random_model(rng, n, ModelKind::line));
            }
            return v;
          }};
}

inline BuiltCheck build_clark_correspondence(const Params& p) {
  std::optional<Maker<CyclicOperatorModel>> model;
  if (auto* m = p.find("model")) model = model_spec(*m, p.at("model"), ModelKind::circle);
  int models = p.integer("models", 20, 1, 100000);
  int max_size = p.integer("max_size", 16, 1, 512);
  int alphas = p.integer("alphas", 16, 1, 100000);
  int points = p.integer("points", 8, 0, 100000);
  p.finish();
  return {{{"position", 1e-9},
           {"mass", 1e-8},
           {"oracle_position", 1e-9},
           {"oracle_mass", 1e-8},
           {"total_mass", 1e-10},
           {"count_mismatch", 0.0},
           {"inner_identity", 1e-10}},
          [=](Rng& rng) {
            MetricValues v{{"position", 0.0},     {"mass", 0.0},           {"oracle_position", 0.0}, {"oracle_mass", 0.0},
                           {"total_mass", 0.0},   {"count_mismatch", 0.0}, {"inner_identity", 0.0}};
            for (int k = 0; k < models; ++k) {
              auto m = model ? (*model)(rng) : random_model(rng, 1 + static_cast<int>(rng.uniform() * max_size), ModelKind::circle);
              auto r = verify_clark_correspondence(m, detail::random_alphas(rng, alphas));
              detail::track(v["position"], r.max_position_deviation);
              detail::track(v["mass"], r.max_mass_deviation);
              detail::track(v["oracle_position"], r.max_oracle_position_deviation);
              detail::track(v["oracle_mass"], r.max_oracle_mass_deviation);
              detail::track(v["total_mass"], r.max_total_mass_defect);
              if (!r.counts_match) v["count_mismatch"] += 1.0;
              auto theta = inner_from_unitary(m);
              auto nu = spectral_measure_circle(m);
              detail::track(v["inner_identity"], std::abs(theta(0.0)));
              for (int j = 0; j < points; ++j) {
                Complex z = rng.disk_point(0.9);
                detail::track(v["inner_identity"], std::abs(cauchy_transform_disk(nu, z) * (1.0 - theta(z)) - 1.0));
              }
            }
            return v;
          }};
}

inline BuiltCheck build_clark_measure(const Params& p) {
  auto theta = theta_spec(p.get("theta"), p.at("theta"));
  int alphas = p.integer("alphas", 16, 1, 100000);
  int points = p.integer("points", 20, 1, 100000);
  p.finish();
  return {{{"poisson", 1e-9},
           {"level_residual", 1e-9},
           {"total_mass", 1e-10},
           {"min_support_distance", 0.0, Compare::greater_than, 1e-9}},
          [=](Rng& rng) {
            MetricValues v{{"poisson", 0.0}, {"level_residual", 0.0}, {"total_mass", 0.0},
                           {"min_support_distance", std::numeric_limits<double>::infinity()}};
            ClarkFamily fam(theta(rng));
            const auto& th = fam.generator();
            auto as = detail::random_alphas(rng, alphas);
            std::vector<CircleAtomicMeasure> ms;
            for (auto a : as) {
              auto mu = fam(a);
              for (std::size_t j = 0; j < mu.size(); ++j) detail::track(v["level_residual"], std::abs(th(mu.point(j)) - a));
              detail::track(v["total_mass"], std::abs(total_mass(mu) - fam.expected_total_mass(a)));
              for (int j = 0; j < points; ++j) {
                Complex z = rng.disk_point(0.95);
                Complex t = th(z);
                detail::track(v["poisson"], std::abs(poisson_integral_disk(mu, z) - ((a + t) / (a - t)).real()));
              }
              ms.push_back(std::move(mu));
            }
            for (std::size_t i = 0; i < as.size(); ++i)
              for (std::size_t j = 0; j < i; ++j)
                if (std::abs(as[i] - as[j]) > 1e-3)
                  v["min_support_distance"] = std::min(v["min_support_distance"], min_support_distance(ms[i], ms[j]));
            return v;
          }};
}

inline BuiltCheck build_disintegration_circle(const Params& p) {
  auto theta = theta_spec(p.get("theta"), p.at("theta"));
  const Json& arcs_j = require_array(p.get("arcs"), p.at("arcs"));
  std::vector<BorelSet> sets;
  for (std::size_t i = 0; i < arcs_j.size(); ++i) {
    std::string path = p.at("arcs") + "[" + std::to_string(i) + "]";
    sets.push_back(arcs_spec(Json::array({arcs_j[i]}), path));
  }
  if (sets.empty()) throw FormatError(p.at("arcs"), "expected at least one arc");
  p.finish();
  return {{{"deviation", 1e-6}, {"error_estimate", 1e-6}}, [=](Rng& rng) {
            MetricValues v{{"deviation", 0.0}, {"error_estimate", 0.0}};
            auto th = theta(rng);
            for (const auto& b : sets) {
              auto r = disintegration_check_circle(th, b);
              detail::track(v["deviation"], r.deviation());
              detail::track(v["error_estimate"], r.error_bound());
            }
            return v;
          }};
}

inline BuiltCheck build_disintegration_line(const Params& p) {
  auto model = model_spec(p.get("model"), p.at("model"), ModelKind::line);
  const Json& iv = require_array(p.get("intervals"), p.at("intervals"));
  std::vector<BorelSet> sets;
  for (std::size_t i = 0; i < iv.size(); ++i)
    sets.push_back(intervals_spec(Json::array({iv[i]}), p.at("intervals") + "[" + std::to_string(i) + "]"));
  if (sets.empty()) throw FormatError(p.at("intervals"), "expected at least one interval");
  double window = p.positive("window", 100.0);
  p.finish();
  return {{{"deviation", 1e-3}, {"error_bound", 1e-3}}, [=](Rng& rng) {
            MetricValues v{{"deviation", 0.0}, {"error_bound", 0.0}};
            auto m = model(rng);
            for (const auto& b : sets) {
              auto r = disintegration_check_line(m, b, window);
              detail::track(v["deviation"], r.deviation());
              detail::track(v["error_bound"], r.error_bound());
            }
            return v;
          }};
}

inline BuiltCheck build_cayley(const Params& p) {
  auto model = model_spec(p.get("model"), p.at("model"), ModelKind::line);
  auto lambdas = p.numbers("lambdas", {-10.0, -1.0, -0.1, 0.1, 1.0, 10.0});
  int points = p.integer("points", 20, 1, 100000);
  p.finish();
  return {{{"level_sets", 1e-9}, {"roundtrip", 1e-10}, {"boundary_modulus", 1e-10}, {"interior_modulus_excess", 0.0}},
          [=](Rng& rng) {
            MetricValues v{{"level_sets", 0.0}, {"roundtrip", 0.0}, {"boundary_modulus", 0.0}, {"interior_modulus_excess", 0.0}};
            auto m = model(rng);
            auto theta = inner_from_selfadjoint(m);
            auto k = HerglotzRational::from_line_measure(spectral_measure_line(m));
            auto j = cayley_inverse(theta);
            for (double lam : lambdas) {
              if (lam == 0.0) continue;
              auto xs = theta.level_set(relabel_lambda(lam));
              auto roots = secular_roots_line(k, lam);
              if (xs.size() != roots.size()) {
                v["level_sets"] = std::numeric_limits<double>::infinity();
                continue;
              }
              for (std::size_t i = 0; i < xs.size(); ++i)
                detail::track(v["level_sets"], std::abs(xs[i] - roots[i]) / (1.0 + std::abs(roots[i])));
            }
            for (int i = 0; i < points; ++i) {
              Complex z{rng.uniform(-3.0, 3.0), std::exp(rng.uniform(-3.0, 2.0))};
              detail::track(v["roundtrip"], std::abs(j(z) - k(z)) / (1.0 + std::abs(k(z))));
              detail::track(v["interior_modulus_excess"], std::max(0.0, std::abs(theta(z)) - 1.0));
              double x = rng.uniform(-3.0, 3.0);
              detail::track(v["boundary_modulus"], std::abs(std::abs(theta(x)) - 1.0));
            }
            return v;
          }};
}

// model space ----------------------------------------------------------------

inline BuiltCheck build_model_space(const Params& p) {
  std::optional<Maker<BlaschkeProduct>> theta;
  if (auto* t = p.find("theta")) theta = theta_spec(*t, p.at("theta"));
  auto degrees = p.integers("degrees", {1, 2, 4, 8, 16}, 1, 64);
  int alphas = p.integer("alphas", 4, 1, 10000);
  int vectors = p.integer("vectors", 20, 0, 10000);
  p.finish();
  return {{{"gram", 1e-10},
           {"unitarity", 1e-10},
           {"intertwine", 1e-9},
           {"isometry", 1e-9},
           {"roundtrip", 1e-9},
           {"spectral_atoms", 1e-9},
           {"spectral_masses", 1e-8}},
          [=](Rng& rng) {
            MetricValues v{{"gram", 0.0},      {"unitarity", 0.0},      {"intertwine", 0.0},     {"isometry", 0.0},
                           {"roundtrip", 0.0}, {"spectral_atoms", 0.0}, {"spectral_masses", 0.0}};
            auto one = [&](const BlaschkeProduct& th) {
              ModelSpace ms(th);
              const int n = ms.dimension();
              detail::track(v["gram"], (ms.gram() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff());
              Eigen::VectorXcd unit = ms.one().coefficients;
              for (auto a : detail::random_alphas(rng, alphas)) {
                auto t = t_alpha_matrix(ms, a);
                detail::track(v["unitarity"], spectral_norm(t.adjoint() * t - Eigen::MatrixXcd::Identity(n, n)));
                detail::track(v["intertwine"], intertwine_check(ms, a));
                auto mu = clark_measure(th, a);
                // eigenpairs of T_alpha against the Clark measure; 1 is the cyclic vector
                auto spec = unitary_spectral_measure(t, unit);
                auto d = compare_measures(spec, mu);
                detail::track(v["spectral_atoms"], d.same_count ? d.position : std::numeric_limits<double>::infinity());
                detail::track(v["spectral_masses"], d.same_count ? d.mass : std::numeric_limits<double>::infinity());
                for (int k = 0; k < vectors; ++k) {
                  Eigen::VectorXcd f(mu.size());
                  for (auto& x : f) x = rng.complex_normal();
                  double l2 = 0.0;
                  for (std::size_t j = 0; j < mu.size(); ++j) l2 += std::norm(f(j)) * mu.atoms()[j].mass;
                  auto big = v_alpha(ms, mu, f);
                  detail::track(v["isometry"], std::abs(big.norm() - std::sqrt(l2)));
                  detail::track(v["roundtrip"], (v_alpha_star(ms, mu, big) - f).cwiseAbs().maxCoeff());
                }
              }
            };
            if (theta) {
              one((*theta)(rng));
            } else {
              for (int d : degrees) one(random_blaschke(rng, d));
            }
            return v;
          }};
}

inline BuiltCheck build_splitting(const Params& p) {
  auto theta = theta_spec(p.get("theta"), p.at("theta"));
  auto fspec = vector_spec(p.get("f"), p.at("f"));
  int alphas = p.integer("alphas", 8, 1, 10000);
  int points = p.integer("points", 8, 1, 10000);
  std::optional<std::vector<Complex>> want_g, want_h;
  if (auto* e = p.find("expected")) {
    Params ep(*e, p.at("expected"));
    want_g = decode_complexes(ep.get("g"), ep.at("g"));
    want_h = decode_complexes(ep.get("h"), ep.at("h"));
    ep.finish();
  }
  p.finish();
  std::vector<MetricDef> defs{{"boundary_residual", 1e-9}, {"weighted_transform", 1e-9},  {"atom_conjugation", 1e-9},
                              {"hat_involution", 1e-9},    {"clark_transform_identity", 1e-10}, {"weighted_identity", 1e-9}};
  if (want_g) defs.push_back({"worked_case", 1e-10});
  return {defs, [=](Rng& rng) {
            MetricValues v{{"boundary_residual", 0.0}, {"weighted_transform", 0.0}, {"atom_conjugation", 0.0},
                           {"hat_involution", 0.0},    {"clark_transform_identity", 0.0}, {"weighted_identity", 0.0}};
            ModelSpace ms(theta(rng));
            auto f = fspec(ms, rng);
            auto parts = lemma7_decompose(ms, f);
            const auto& th = ms.theta();
            v["boundary_residual"] = parts.boundary_residual;
            auto back = hat_conjugate(ms, parts.f0_hat);
            v["hat_involution"] = (back.coefficients - parts.f0.coefficients).cwiseAbs().maxCoeff();
            for (auto a : detail::random_alphas(rng, alphas)) {
              auto mu = clark_measure(th, a);
              for (std::size_t j = 0; j < mu.size(); ++j) {
                Complex xi = mu.point(j);
                detail::track(v["atom_conjugation"], std::abs(ms.eval(parts.f0_hat, xi) - a * std::conj(ms.eval(parts.f0, xi))));
              }
              auto nu = weighted_clark_measure(ms, f, a);
              for (int k = 0; k < points; ++k) {
                Complex z = rng.disk_point(0.9);
                detail::track(v["weighted_transform"], std::abs(knu_alpha(ms, parts, a, z) - cauchy_transform_disk(nu, z)));
              }
            }
            auto mu1 = clark_measure(th, 1.0);
            auto nu1 = weighted_clark_measure(ms, f, 1.0);
            bool origin_zero = std::abs(parts.f_at_zero) <= 1e-10;
            for (int k = 0; k < points; ++k) {
              Complex z = rng.disk_point(0.9);
              detail::track(v["clark_transform_identity"], std::abs(cauchy_transform_disk(mu1, z) * (1.0 - th(z)) - 1.0));
              if (origin_zero)
                detail::track(v["weighted_identity"], std::abs(cauchy_transform_disk(nu1, z) * (1.0 - th(z)) - ms.eval(parts.g, z) -
                                                  ms.eval(parts.h, z)));
            }
            if (want_g) {
              if (want_g->size() != static_cast<std::size_t>(ms.dimension()) ||
                  want_h->size() != static_cast<std::size_t>(ms.dimension())) {
                v["worked_case"] = std::numeric_limits<double>::infinity();
              } else {
                double w = 0.0;
                for (int k = 0; k < ms.dimension(); ++k) {
                  w = std::max(w, std::abs(parts.g.coefficients(k) - (*want_g)[k]));
                  w = std::max(w, std::abs(parts.h.coefficients(k) - (*want_h)[k]));
                }
                v["worked_case"] = w;
              }
            }
            return v;
          }};
}

// rank n ---------------------------------------------------------------------

namespace detail {

struct SetupSpec {
  Maker<CyclicOperatorModel> model;
  std::function<ModelVector(const ModelSpace&, Rng&)> f;

  TwoVectorSetup make(Rng& rng) const {
    auto m = model(rng);
    return two_vector_setup(m, [&](const ModelSpace& ms) { return f(ms, rng); });
  }
};

inline SetupSpec setup_spec(const Params& p) {
  auto model = model_spec(p.get("model"), p.at("model"), ModelKind::circle);
  auto f = p.has("f") ? vector_spec(p.get("f"), p.at("f")) : vector_spec(Json{{"random", true}}, p.at("f"));
  return {model, f};
}

}  // namespace detail

inline BuiltCheck build_rank_two_transform(const Params& p) {
  auto setup = detail::setup_spec(p);
  int na = p.integer("alphas", 16, 1, 1000);
  int nb = p.integer("betas", 16, 1, 1000);
  int nz = p.integer("points", 8, 1, 1000);
  double radius = p.number("radius", 0.9);
  if (!(radius > 0.0 && radius < 1.0)) throw FormatError(p.at("radius"), "must lie in (0, 1)");
  p.finish();
  return {{{"two_parameter_transform", 1e-8}, {"beta_one", 1e-9}}, [=](Rng& rng) {
            MetricValues v{{"two_parameter_transform", 0.0}, {"beta_one", 0.0}};
            auto s = setup.make(rng);
            std::vector<Complex> zs;
            for (int k = 0; k < nz; ++k) zs.push_back(rng.disk_point(radius));
            auto as = detail::offset_grid(na, rng.uniform());
            auto bs = detail::offset_grid(nb, rng.uniform());
            for (auto a : as) {
              for (auto b : bs) {
                auto u = recursive_unitary(s.family, {a, b});
                auto nu = spectral_measure_of_vector(u, s.family.vectors()[1]);
                for (auto z : zs) detail::track(v["two_parameter_transform"], std::abs(knu_alpha_beta(s.space, s.parts, a, b, z) - cauchy_transform_disk(nu, z)));
              }
              for (auto z : zs)
                detail::track(v["beta_one"], std::abs(knu_alpha_beta(s.space, s.parts, a, 1.0, z) - knu_alpha(s.space, s.parts, a, z)));
            }
            return v;
          }};
}

inline BuiltCheck build_positivity(const Params& p) {
  auto theta = theta_spec(p.get("theta"), p.at("theta"));
  auto fspec = p.has("f") ? vector_spec(p.get("f"), p.at("f")) : vector_spec(Json{{"random", true}}, p.at("f"));
  int na = p.integer("alphas", 64, 1, 100000);
  int nz = p.integer("points", 64, 1, 100000);
  double radius = p.number("radius", 0.99);
  if (!(radius > 0.0 && radius < 1.0)) throw FormatError(p.at("radius"), "must lie in (0, 1)");
  p.finish();
  return {{{"min_real_part", 0.0, Compare::greater_than, 0.5}}, [=](Rng& rng) {
            ModelSpace ms(theta(rng));
            auto f = fspec(ms, rng);
            auto parts = lemma7_decompose(ms, f);
            std::vector<Complex> zs;
            for (int k = 0; k < nz; ++k) zs.push_back(k == 0 ? Complex(0.0) : rng.disk_point(radius));
            // include the rim of the grid explicitly
            for (int k = 0; k < nz; ++k) zs.push_back(std::polar(radius, kTwoPi * k / nz));
            return MetricValues{{"min_real_part", herglotz_positivity_check(ms, parts, detail::offset_grid(na, 0.5), zs)}};
          }};
}

inline BuiltCheck build_phi_density(const Params& p) {
  auto setup = detail::setup_spec(p);
  auto curve = curve_spec(p.get("curve"), p.at("curve"), 2);
  int points = p.integer("points", 256, 1, 1000000);
  double radius = p.number("radius", 0.999);
  if (!(radius > 0.0 && radius <= 1.0)) throw FormatError(p.at("radius"), "must lie in (0, 1]");
  int mean_points = p.integer("mean_points", 3, 0, 100);
  p.finish();
  return {{{"bound_excess", 1e-9}, {"mean_transform", 1e-6}, {"phi_one_defect", 1e-12}}, [=](Rng& rng) {
            MetricValues v{{"bound_excess", 0.0}, {"mean_transform", 0.0}, {"phi_one_defect", 0.0}};
            auto s = setup.make(rng);
            auto g = curve(rng);
            double bound = 1.0 / (1.0 - std::abs(g[1](0.0)));
            bool trivial = std::abs(g[0](0.0)) == 0.0 && std::abs(g[1](0.0)) == 0.0;
            double excess = -std::numeric_limits<double>::infinity();
            for (int k = 0; k < points; ++k) {
              Complex z = k == 0 ? Complex(0.0) : rng.disk_point(radius);
              Complex phi = phi_density(s.space, s.parts, g, z);
              excess = std::max(excess, std::abs(phi) - bound);
              if (trivial) detail::track(v["phi_one_defect"], std::abs(phi - 1.0));
            }
            v["bound_excess"] = std::max(0.0, excess);
            // phi(z) against the mean over xi of the oracle transforms
            for (int k = 0; k < mean_points; ++k) {
              Complex z = k == 0 ? Complex(0.0) : rng.disk_point(0.7);
              auto re = periodic_mean([&](double t) { return cauchy_transform_disk(curve_fibre(s.family, g, unimodular(t)), z).real(); },
                                      {1e-10, 16, 1 << 16});
              auto im = periodic_mean([&](double t) { return cauchy_transform_disk(curve_fibre(s.family, g, unimodular(t)), z).imag(); },
                                      {1e-10, 16, 1 << 16});
              detail::track(v["mean_transform"], std::abs(Complex(re.value, im.value) - phi_density(s.space, s.parts, g, z)));
            }
            return v;
          }};
}

inline BuiltCheck build_curve_disintegration(const Params& p) {
  auto setup = detail::setup_spec(p);
  auto curve = curve_spec(p.get("curve"), p.at("curve"), 2);
  const Json& arcs_j = require_array(p.get("arcs"), p.at("arcs"));
  std::vector<BorelSet> sets;
  for (std::size_t i = 0; i < arcs_j.size(); ++i)
    sets.push_back(arcs_spec(Json::array({arcs_j[i]}), p.at("arcs") + "[" + std::to_string(i) + "]"));
  if (sets.empty()) throw FormatError(p.at("arcs"), "expected at least one arc");
  p.finish();
  return {{{"deviation", 1e-4}}, [=](Rng& rng) {
            MetricValues v{{"deviation", 0.0}};
            auto s = setup.make(rng);
            auto g = curve(rng);
            for (const auto& b : sets) detail::track(v["deviation"], curve_disintegration_check(s, g, b).deviation());
            return v;
          }};
}

inline BuiltCheck build_recursive_unitary(const Params& p) {
  auto model = model_spec(p.get("model"), p.at("model"), ModelKind::circle);
  int nvec = p.integer("vectors", 2, 1, 64);
  bool orthogonal = p.boolean("orthogonal", true);
  int grid = p.integer("grid", 4, 1, 64);
  p.finish();
  return {{{"unitarity", 1e-10}, {"orthogonal_collapse", 1e-10}, {"base_case", 1e-12}, {"identity", 0.0}}, [=](Rng& rng) {
            MetricValues v{{"unitarity", 0.0}, {"orthogonal_collapse", 0.0}, {"base_case", 0.0}, {"identity", 0.0}};
            auto m = model(rng);
            const auto n = static_cast<Eigen::Index>(m.size());
            if (orthogonal && nvec > n) throw InvalidArgument("more orthogonal vectors than the dimension");
            std::vector<Eigen::VectorXcd> vecs;
            for (int k = 0; k < nvec; ++k) {
              Eigen::VectorXcd x = detail::random_unit_vector(rng, n);
              if (orthogonal) {
                for (int pass = 0; pass < 2; ++pass)
                  for (const auto& q : vecs) x -= q * q.dot(x);
                x /= x.norm();
              }
              vecs.push_back(x);
            }
            RankNPerturbationFamily fam(m, vecs);
            Eigen::MatrixXcd u = m.unitary_matrix();
            std::vector<Complex> ones(nvec, 1.0);
            v["identity"] = (recursive_unitary(fam, ones) - u).cwiseAbs().maxCoeff();
            RankNPerturbationFamily first(m, {vecs[0]});
            long total = 1;
            for (int k = 0; k < nvec; ++k) total *= grid;
            double offset = rng.uniform();
            for (long idx = 0; idx < total; ++idx) {
              std::vector<Complex> as;
              long rest = idx;
              for (int k = 0; k < nvec; ++k) {
                as.push_back(unimodular(kTwoPi * ((rest % grid) + offset) / grid));
                rest /= grid;
              }
              auto r = recursive_unitary(fam, as);
              detail::track(v["unitarity"], unitarity_defect(r));
              if (orthogonal) detail::track(v["orthogonal_collapse"], spectral_norm(r - orthogonal_sum_unitary(fam, as)));
              // one step against U + (alpha - 1)(., U^{-1} phi) phi written out directly
              Eigen::MatrixXcd direct = u + (as[0] - 1.0) * vecs[0] * (u.adjoint() * vecs[0]).adjoint();
              detail::track(v["base_case"], (recursive_unitary(first, {as[0]}) - direct).cwiseAbs().maxCoeff());
            }
            return v;
          }};
}

inline BuiltCheck build_axis_criterion(const Params& p) {
  auto model = model_spec(p.get("model"), p.at("model"), ModelKind::circle);
  int nvec = p.integer("vectors", 2, 1, 64);
  int probes = p.integer("probes", 32, 0, 100000);
  p.finish();
  return {{{"mismatches", 0.0}}, [=](Rng& rng) {
            auto m = model(rng);
            std::vector<Eigen::VectorXcd> vecs;
            for (int k = 0; k < nvec; ++k) vecs.push_back(detail::random_unit_vector(rng, m.size()));
            RankNPerturbationFamily fam(m, vecs);
            std::vector<Complex> ps;
            for (double s : m.sites()) ps.push_back(unimodular(s));
            for (int k = 0; k < probes; ++k) ps.push_back(rng.unimodular_point());
            auto r = theorem4_axis_criterion(fam, ps);
            double bad = 0.0;
            for (std::size_t k = 0; k < r.values.size(); ++k) {
              if (!r.flags_match_atoms[k]) bad += 1.0;
              // at finite rank every probe off the atoms must be finite, every atom infinite
              for (std::size_t j = 0; j < ps.size(); ++j) {
                bool atom = j < m.size();
                if (atom == r.values[k][j].is_finite()) bad += 1.0;
              }
            }
            return MetricValues{{"mismatches", bad}};
          }};
}

inline BuiltCheck build_nullset(const Params& p) {
  auto setup = detail::setup_spec(p);
  auto curve = curve_spec(p.get("curve"), p.at("curve"), 2);
  int samples = p.integer("samples", 64, 1, 100000);
  std::vector<Complex> e;
  if (auto* pts = p.find("points")) e = decode_complexes(*pts, p.at("points"));
  std::optional<double> probe;
  if (auto* c = p.find("counter_probe")) probe = decode_double(*c, p.at("counter_probe"));
  p.finish();
  return {{{"unexpected_violations", 0.0}, {"missed_counter_probe", 0.0}, {"atom_count_deficit", 0.0}}, [=](Rng& rng) {
            auto s = setup.make(rng);
            auto g = curve(rng);
            std::vector<Complex> pts = e;
            std::vector<Complex> xis;
            for (int k = 0; k < samples; ++k) xis.push_back(rng.unimodular_point());
            if (probe) {
              // put E at an atom of nu_{gamma(xi0)} and sample xi0 itself first
              Complex xi0 = unimodular(*probe);
              auto nu = curve_fibre(s.family, g, xi0);
              pts.push_back(nu.point(0));
              xis.insert(xis.begin(), xi0);
            }
            auto r = theorem9_nullset_check(s.family, g, pts, xis);
            double unexpected = 0.0, missed = 0.0;
            for (auto i : r.violations)
              if (!(probe && i == 0)) unexpected += 1.0;
            if (probe && (r.violations.empty() || r.violations.front() != 0)) missed = 1.0;
            double deficit = static_cast<double>(s.model.size()) - static_cast<double>(r.min_atom_count);
            return MetricValues{{"unexpected_violations", unexpected},
                                {"missed_counter_probe", missed},
                                {"atom_count_deficit", std::max(0.0, deficit)}};
          }};
}

// registry -------------------------------------------------------------------

inline const std::map<std::string, std::function<BuiltCheck(const Params&)>>& check_registry() {
  static const std::map<std::string, std::function<BuiltCheck(const Params&)>> r{
      {"axis_criterion", build_axis_criterion},
      {"cayley", build_cayley},
      {"clark_correspondence", build_clark_correspondence},
      {"clark_measure", build_clark_measure},
      {"curve_disintegration", build_curve_disintegration},
      {"disintegration_circle", build_disintegration_circle},
      {"disintegration_line", build_disintegration_line},
      {"splitting", build_splitting},
      {"measure_identities", build_measure_identities},
      {"model_space", build_model_space},
      {"nullset", build_nullset},
      {"phi_density", build_phi_density},
      {"positivity", build_positivity},
      {"rank_two_transform", build_rank_two_transform},
      {"recursive_unitary", build_recursive_unitary},
      {"selfadjoint_oracle", build_selfadjoint_oracle},
      {"simon_wolff", build_simon_wolff},
  };
  return r;
}

}  // namespace clarklab::harness
