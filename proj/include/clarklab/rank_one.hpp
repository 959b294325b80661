#pragma once

// Rank-one perturbations of diagonal cyclic operators on the line and the
// circle, Clark measures of finite Blaschke products, the operator <-> inner
// function dictionary, and the disintegration checks over the parameter.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "clarklab/errors.hpp"
#include "clarklab/herglotz.hpp"
#include "clarklab/measures.hpp"
#include "clarklab/oracle.hpp"
#include "clarklab/quadrature.hpp"

namespace clarklab {

enum class ModelKind { line, circle };

/// Diagonal operator with a cyclic unit vector. Sites are eigenvalues on the
/// line or eigenvalue angles on the circle; weights are |<phi, e_j>|^2.
class CyclicOperatorModel {
public:
  CyclicOperatorModel(ModelKind kind, std::vector<double> sites, std::vector<double> weights) : kind_(kind) {
    if (sites.empty()) throw InvalidArgument("model needs at least one site");
    if (sites.size() != weights.size()) throw InvalidArgument("one weight per site required");
    double total = 0.0;
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be positive");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("weights must sum to 1 (cyclic unit vector)");
    std::vector<std::size_t> order(sites.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (!std::isfinite(sites[i])) throw InvalidArgument("sites must be finite");
      if (kind == ModelKind::circle) sites[i] = normalize_angle(sites[i]);
      order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sites[a] < sites[b]; });
    for (auto i : order) {
      sites_.push_back(sites[i]);
      weights_.push_back(weights[i]);
    }
    for (std::size_t i = 1; i < sites_.size(); ++i)
      if (positions_coincide(sites_[i - 1], sites_[i])) throw InvalidArgument("sites must be distinct");
    if (kind == ModelKind::circle && sites_.size() > 1 && positions_coincide(sites_.back(), sites_.front() + kTwoPi))
      throw InvalidArgument("sites must be distinct");
  }

  ModelKind kind() const { return kind_; }
  std::size_t size() const { return sites_.size(); }
  const std::vector<double>& sites() const { return sites_; }
  const std::vector<double>& weights() const { return weights_; }

  /// sqrt(weights), the cyclic vector in the eigenbasis.
  Eigen::VectorXd cyclic_vector() const {
    Eigen::VectorXd v(size());
    for (std::size_t j = 0; j < size(); ++j) v(j) = std::sqrt(weights_[j]);
    return v;
  }

  Eigen::MatrixXd selfadjoint_matrix() const {
    require(ModelKind::line);
    return Eigen::Map<const Eigen::VectorXd>(sites_.data(), size()).asDiagonal();
  }

  Eigen::MatrixXcd unitary_matrix() const {
    require(ModelKind::circle);
    Eigen::VectorXcd d(size());
    for (std::size_t j = 0; j < size(); ++j) d(j) = unimodular(sites_[j]);
    return d.asDiagonal();
  }

  void require(ModelKind k) const {
    if (kind_ != k) throw InvalidArgument(k == ModelKind::line ? "line model required" : "circle model required");
  }

private:
  ModelKind kind_;
  std::vector<double> sites_;
  std::vector<double> weights_;
};

inline LineAtomicMeasure spectral_measure_line(const CyclicOperatorModel& model) {
  model.require(ModelKind::line);
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < model.size(); ++j) atoms.push_back({model.sites()[j], model.weights()[j]});
  return LineAtomicMeasure(std::move(atoms));
}

inline CircleAtomicMeasure spectral_measure_circle(const CyclicOperatorModel& model) {
  model.require(ModelKind::circle);
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < model.size(); ++j) atoms.push_back({model.sites()[j], model.weights()[j]});
  return CircleAtomicMeasure(std::move(atoms));
}

/// K0(z) / (1 + lambda K0(z)).
inline Complex aronszajn_krein_eval(const HerglotzRational& k0, double lambda, Complex z) {
  Complex k = k0(z);
  Complex d = 1.0 + lambda * k;
  if (std::abs(d) <= 1e-14 * (1.0 + std::abs(lambda * k))) throw PoleError("1 + lambda K0(z) vanishes");
  return k / d;
}

/// Spectral measure of phi for A + lambda (., phi) phi via the secular
/// equation and residue masses.
inline LineAtomicMeasure perturb_selfadjoint(const CyclicOperatorModel& model, double lambda) {
  model.require(ModelKind::line);
  if (lambda == 0.0) return spectral_measure_line(model);
  const auto& t = model.sites();
  const auto& m = model.weights();
  auto roots = detail::secular_solve(t, m, -1.0 / lambda);
  std::vector<Atom> atoms;
  for (const auto& r : roots) {
    double kp = detail::secular_derivative(t, m, r.origin, r.offset);
    if (!(kp >= 1e-14)) throw DerivativeTooSmallError("K'(x) below 1e-14 at a secular root");
    atoms.push_back({r.value(), 1.0 / (lambda * lambda * kp)});
  }
  return LineAtomicMeasure(std::move(atoms));
}

/// Dense reference for perturb_selfadjoint.
inline LineAtomicMeasure matrix_oracle_selfadjoint(const CyclicOperatorModel& model, double lambda) {
  model.require(ModelKind::line);
  Eigen::VectorXd v = model.cyclic_vector();
  Eigen::MatrixXd a = model.selfadjoint_matrix();
  a += lambda * v * v.transpose();
  return hermitian_spectral_measure(a, v);
}

/// U_alpha = U + (alpha - 1)(., U^{-1} v) v = (I + (alpha - 1) v v*) U.
inline Eigen::MatrixXcd perturbed_unitary_matrix(const CyclicOperatorModel& model, Complex alpha) {
  Eigen::MatrixXcd u = model.unitary_matrix();
  Eigen::VectorXcd v = model.cyclic_vector().cast<Complex>();
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(u.rows(), u.cols()) + (alpha - 1.0) * v * v.adjoint();
  return p * u;
}

/// Dense reference for perturb_unitary.
inline CircleAtomicMeasure matrix_oracle_unitary(const CyclicOperatorModel& model, Complex alpha) {
  model.require(ModelKind::circle);
  return unitary_spectral_measure(perturbed_unitary_matrix(model, alpha), model.cyclic_vector().cast<Complex>());
}

namespace detail {

inline Complex circle_k(const CyclicOperatorModel& model, Complex z) {
  Complex s = 0.0;
  for (std::size_t j = 0; j < model.size(); ++j) s += model.weights()[j] / (1.0 - std::conj(unimodular(model.sites()[j])) * z);
  return s;
}

inline Complex circle_k_prime(const CyclicOperatorModel& model, Complex z) {
  Complex s = 0.0;
  for (std::size_t j = 0; j < model.size(); ++j) {
    Complex xb = std::conj(unimodular(model.sites()[j]));
    Complex d = 1.0 - xb * z;
    s += model.weights()[j] * xb / (d * d);
  }
  return s;
}

}  // namespace detail

/// The inner function with K nu_1 = 1 / (1 - theta), nu_1 the spectral
/// measure of the model. Its zeros solve K nu_1 = 1 and are the eigenvalues
/// of U (I - v v^T); one of them is the origin.
inline BlaschkeProduct inner_from_unitary(const CyclicOperatorModel& model) {
  model.require(ModelKind::circle);
  const int n = static_cast<int>(model.size());
  Eigen::VectorXd v = model.cyclic_vector();
  if (std::abs(v.squaredNorm() - 1.0) > 1e-12) throw InvalidArgument("model vector is not normalized");
  Eigen::MatrixXcd u = model.unitary_matrix();
  Eigen::MatrixXcd a = u * (Eigen::MatrixXcd::Identity(n, n) - (v * v.transpose()).cast<Complex>());
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
  if (solver.info() != Eigen::Success) throw EigensolverError("eigensolver failed for inner_from_unitary");
  std::vector<Complex> zeros;
  for (int k = 0; k < n; ++k) {
    Complex z = solver.eigenvalues()(k);
    if (std::abs(z) < 1e-13) {
      zeros.push_back(0.0);
      continue;
    }
    Complex polished = z;
    for (int it = 0; it < 50; ++it) {
      Complex step = (detail::circle_k(model, polished) - 1.0) / detail::circle_k_prime(model, polished);
      polished -= step;
      if (!(std::abs(polished) < 1.0)) break;
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon()) break;
    }
    if (std::abs(polished) < 1.0 && std::abs(polished - z) < 1e-6) z = polished;
    if (!(std::abs(z) < 1.0)) throw RootPolishError("zero of theta left the disk");
    zeros.push_back(z);
  }
  // fix the constant at a boundary point far from every atom
  const auto& s = model.sites();
  double best_gap = -1.0, zeta_angle = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    double lo = s[j];
    double hi = (j + 1 < s.size()) ? s[j + 1] : s.front() + kTwoPi;
    if (hi - lo > best_gap) {
      best_gap = hi - lo;
      zeta_angle = lo + 0.5 * (hi - lo);
    }
  }
  Complex zeta = unimodular(zeta_angle);
  Complex target = 1.0 - 1.0 / detail::circle_k(model, zeta);
  Complex c = target / BlaschkeProduct(zeros, 1.0)(zeta);
  c /= std::abs(c);
  return BlaschkeProduct(std::move(zeros), c);
}

/// theta = (1 + iK)/(1 - iK) for K the Cauchy transform of the model.
inline HalfPlaneInner inner_from_selfadjoint(const CyclicOperatorModel& model) {
  return cayley_transfer(HerglotzRational::from_line_measure(spectral_measure_line(model)));
}

/// Clark measure mu_alpha: atoms on {theta = alpha}, mass 1/|theta'| each.
inline CircleAtomicMeasure clark_measure(const BlaschkeProduct& theta, Complex alpha) {
  auto angles = level_set_angles(theta, alpha);
  if (detail::min_circular_gap(angles) <= 1e-9)
    throw CriticalValueError("level set has colliding points: alpha is numerically a critical value");
  std::vector<Atom> atoms;
  for (double t : angles) {
    double d = theta.boundary_derivative_modulus(t);
    if (!(d > 0.0) || !std::isfinite(d)) throw CriticalValueError("theta' vanishes on the level set");
    atoms.push_back({t, 1.0 / d});
  }
  return CircleAtomicMeasure(std::move(atoms));
}

/// The Clark family {mu_alpha} of a fixed inner function.
class ClarkFamily {
public:
  explicit ClarkFamily(BlaschkeProduct theta) : theta_(std::move(theta)) {}
  const BlaschkeProduct& generator() const { return theta_; }
  CircleAtomicMeasure operator()(Complex alpha) const { return clark_measure(theta_, alpha); }
  /// Re((alpha + theta(0)) / (alpha - theta(0))).
  double expected_total_mass(Complex alpha) const {
    Complex t0 = theta_(0.0);
    return ((alpha + t0) / (alpha - t0)).real();
  }

private:
  BlaschkeProduct theta_;
};

/// Spectral measure of v for U_alpha: atoms on {theta = alpha}, masses from
/// the residues of alpha K / (1 + (alpha - 1) K), K = K nu_1.
inline CircleAtomicMeasure perturb_unitary(const CyclicOperatorModel& model, Complex alpha) {
  model.require(ModelKind::circle);
  if (std::abs(std::abs(alpha) - 1.0) > 1e-10) throw DomainError("alpha must be unimodular");
  if (alpha == Complex(1.0)) return spectral_measure_circle(model);
  auto theta = inner_from_unitary(model);
  std::vector<Atom> atoms;
  Complex am1 = alpha - 1.0;
  for (double t : level_set_angles(theta, alpha)) {
    Complex xi = unimodular(t);
    Complex kp = detail::circle_k_prime(model, xi);
    double m = (alpha / (am1 * am1 * kp * xi)).real();
    if (!(m > 0.0)) throw DerivativeTooSmallError("non-positive residue mass in perturb_unitary");
    atoms.push_back({t, m});
  }
  return CircleAtomicMeasure(std::move(atoms));
}

// ---------------------------------------------------------------------------
// comparisons

struct MeasureDeviation {
  bool same_count = false;
  double position = std::numeric_limits<double>::infinity();
  double mass = std::numeric_limits<double>::infinity();
};

inline MeasureDeviation compare_measures(const LineAtomicMeasure& a, const LineAtomicMeasure& b) {
  MeasureDeviation d;
  if (a.size() != b.size()) return d;
  d.same_count = true;
  d.position = d.mass = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d.position = std::max(d.position, std::abs(a.atoms()[i].position - b.atoms()[i].position));
    d.mass = std::max(d.mass, std::abs(a.atoms()[i].mass - b.atoms()[i].mass));
  }
  return d;
}

/// Atom-by-atom comparison up to the cyclic relabeling that sorting in
/// [0, 2pi) can introduce near angle 0.
inline MeasureDeviation compare_measures(const CircleAtomicMeasure& a, const CircleAtomicMeasure& b) {
  MeasureDeviation best;
  if (a.size() != b.size()) return best;
  const std::size_t n = a.size();
  best.same_count = true;
  for (std::size_t shift = 0; shift < n; ++shift) {
    double pos = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& x = a.atoms()[i];
      const auto& y = b.atoms()[(i + shift) % n];
      pos = std::max(pos, angle_distance(x.position, y.position));
      mass = std::max(mass, std::abs(x.mass - y.mass));
    }
    if (pos < best.position) {
      best.position = pos;
      best.mass = mass;
    }
  }
  return best;
}

/// Smallest distance between an atom of a and an atom of b.
inline double min_support_distance(const CircleAtomicMeasure& a, const CircleAtomicMeasure& b) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& x : a.atoms())
    for (const auto& y : b.atoms()) d = std::min(d, std::abs(unimodular(x.position) - unimodular(y.position)));
  return d;
}

struct ClarkCorrespondenceReport {
  std::size_t samples = 0;
  double max_position_deviation = 0.0;  // Clark vs residue route
  double max_mass_deviation = 0.0;
  double max_oracle_position_deviation = 0.0;  // Clark vs dense matrix
  double max_oracle_mass_deviation = 0.0;
  double max_total_mass_defect = 0.0;
  bool counts_match = true;

  bool pass(double position_tol = 1e-9, double mass_tol = 1e-8) const {
    return counts_match && max_position_deviation <= position_tol && max_mass_deviation <= mass_tol &&
           max_oracle_position_deviation <= position_tol && max_oracle_mass_deviation <= mass_tol &&
           max_total_mass_defect <= 1e-10;
  }
};

inline ClarkCorrespondenceReport verify_clark_correspondence(const CyclicOperatorModel& model,
                                                             const std::vector<Complex>& alphas) {
  ClarkCorrespondenceReport r;
  auto theta = inner_from_unitary(model);
  for (auto alpha : alphas) {
    auto clark = clark_measure(theta, alpha);
    auto residue = perturb_unitary(model, alpha);
    auto dense = matrix_oracle_unitary(model, alpha);
    auto d1 = compare_measures(clark, residue);
    auto d2 = compare_measures(clark, dense);
    r.counts_match = r.counts_match && d1.same_count && d2.same_count;
    r.max_position_deviation = std::max(r.max_position_deviation, d1.position);
    r.max_mass_deviation = std::max(r.max_mass_deviation, d1.mass);
    r.max_oracle_position_deviation = std::max(r.max_oracle_position_deviation, d2.position);
    r.max_oracle_mass_deviation = std::max(r.max_oracle_mass_deviation, d2.mass);
    r.max_total_mass_defect = std::max(r.max_total_mass_defect, std::abs(total_mass(clark) - 1.0));
    ++r.samples;
  }
  return r;
}

// ---------------------------------------------------------------------------
// disintegration over the perturbation parameter

struct DisintegrationResult {
  double estimate = 0.0;        // integral of the fibre masses
  double reference = 0.0;       // |B| or m(B)
  double quadrature_error = 0.0;
  double tail = 0.0;            // line only: contribution of |lambda| > L
  double tail_uncertainty = 0.0;
  long evaluations = 0;

  double error_bound() const { return quadrature_error + tail_uncertainty; }
  double deviation() const { return std::abs(estimate - reference); }
};

/// int_R mu_lambda(B) d lambda, which should equal |B|. The window [-L, L]
/// is integrated adaptively with breaks where an atom of mu_lambda crosses
/// an endpoint of B; beyond the window mu_lambda(B) ~ c / lambda^2 with c
/// the sum of 1/K'(x) over the zeros x of K in B, so the tail is estimated
/// from the values at +-L and its uncertainty from the limiting constant.
inline DisintegrationResult disintegration_check_line(const CyclicOperatorModel& model, const BorelSet& b,
                                                      double window, QuadratureOptions opt = {1e-7, 20000}) {
  model.require(ModelKind::line);
  if (b.space() != BorelSet::Space::line) throw InvalidArgument("line disintegration needs intervals");
  if (!(window > 0.0)) throw InvalidArgument("lambda window must be positive");
  const auto& t = model.sites();
  const auto& m = model.weights();
  auto k_at = [&](double x) {
    double s = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) s += m[j] / (t[j] - x);
    return s;
  };
  std::vector<double> breaks{-window, 0.0, window};
  for (double e : b.endpoints()) {
    bool at_atom = std::any_of(t.begin(), t.end(), [&](double x) { return x == e; });
    if (at_atom) continue;
    double k = k_at(e);
    if (k == 0.0) continue;
    double lam = -1.0 / k;
    if (std::abs(lam) < window) breaks.push_back(lam);
  }
  auto fibre = [&](double lambda) { return measure_of(perturb_selfadjoint(model, lambda), b); };
  auto q = integrate_piecewise(fibre, breaks, opt);

  DisintegrationResult r;
  r.reference = b.length();
  r.quadrature_error = q.error;
  r.evaluations = q.evaluations;
  r.tail = window * (fibre(window) + fibre(-window));
  // zeros of K are the secular roots for target 0
  double c_inf = 0.0;
  for (const auto& root : detail::secular_solve(t, m, 0.0)) {
    if (!b.contains(root.value())) continue;
    c_inf += 1.0 / detail::secular_derivative(t, m, root.origin, root.offset);
  }
  r.tail_uncertainty = std::abs(r.tail - 2.0 * c_inf / window);
  r.estimate = q.value + r.tail;
  return r;
}

/// int_T mu_alpha(B) dm(alpha), which should equal m(B). The integrand jumps
/// where a level-set point crosses an endpoint of B, i.e. at alpha = theta(b),
/// and is smooth in between.
inline DisintegrationResult disintegration_check_circle(const BlaschkeProduct& theta, const BorelSet& b,
                                                        QuadratureOptions opt = {1e-10, 20000}) {
  if (b.space() != BorelSet::Space::circle) throw InvalidArgument("circle disintegration needs arcs");
  std::vector<double> breaks{0.0, kTwoPi};
  for (double e : b.endpoints()) breaks.push_back(angle_of(theta(unimodular(e))));
  auto fibre = [&](double s) { return measure_of(clark_measure(theta, unimodular(s)), b) / kTwoPi; };
  auto q = integrate_piecewise(fibre, breaks, opt);
  DisintegrationResult r;
  r.estimate = q.value;
  r.quadrature_error = q.error;
  r.evaluations = q.evaluations;
  r.reference = b.normalized_length();
  return r;
}

/// Simon-Wolff integral at each probe; infinite exactly at atoms.
inline std::vector<ExtendedReal> simon_wolff_classify(const LineAtomicMeasure& mu, const std::vector<double>& probes) {
  std::vector<ExtendedReal> out;
  out.reserve(probes.size());
  for (double y : probes) out.push_back(simon_wolff_integral(mu, y));
  return out;
}

}  // namespace clarklab
