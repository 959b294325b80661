#pragma once

// Recursive rank-n unitary perturbations, the two-parameter transform for
// n = 2, analytic curves in T^n, the averaged density phi along a curve and
// the verification harnesses built on them.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "clarklab/errors.hpp"
#include "clarklab/herglotz.hpp"
#include "clarklab/measures.hpp"
#include "clarklab/model_space.hpp"
#include "clarklab/oracle.hpp"
#include "clarklab/quadrature.hpp"
#include "clarklab/rank_one.hpp"

namespace clarklab {

/// Tuple of inner functions (I_1, ..., I_n); xi -> (I_k(xi)) traces a curve in T^n.
class AnalyticCurve {
public:
  explicit AnalyticCurve(std::vector<BlaschkeProduct> components) : components_(std::move(components)) {
    if (components_.empty()) throw InvalidArgument("analytic curve needs at least one component");
  }
  const std::vector<BlaschkeProduct>& components() const { return components_; }
  std::size_t dimension() const { return components_.size(); }
  const BlaschkeProduct& operator[](std::size_t k) const { return components_.at(k); }

private:
  std::vector<BlaschkeProduct> components_;
};

inline std::vector<Complex> curve_sample(const AnalyticCurve& gamma, Complex xi) {
  if (std::abs(std::abs(xi) - 1.0) > 1e-10) throw DomainError("curve parameter must be unimodular");
  std::vector<Complex> out;
  for (const auto& c : gamma.components()) out.push_back(c(xi));
  return out;
}

/// Diagonal unitary U with cyclic unit vectors phi_1, ..., phi_n.
class RankNPerturbationFamily {
public:
  RankNPerturbationFamily(CyclicOperatorModel base, std::vector<Eigen::VectorXcd> vectors)
      : base_(std::move(base)), vectors_(std::move(vectors)) {
    base_.require(ModelKind::circle);
    if (vectors_.empty()) throw InvalidArgument("family needs at least one vector");
    Eigen::MatrixXcd u = base_.unitary_matrix();
    for (std::size_t k = 0; k < vectors_.size(); ++k) {
      if (vectors_[k].size() != static_cast<Eigen::Index>(base_.size()))
        throw InvalidArgument("vector " + std::to_string(k) + " has the wrong dimension");
      if (std::abs(vectors_[k].norm() - 1.0) > 1e-12) throw InvalidArgument("vector " + std::to_string(k) + " is not a unit vector");
      if (krylov_rank(u, vectors_[k]) != static_cast<int>(base_.size()))
        throw CyclicityError("vector " + std::to_string(k) + " is not cyclic for the base operator");
    }
  }

  const CyclicOperatorModel& base() const { return base_; }
  const std::vector<Eigen::VectorXcd>& vectors() const { return vectors_; }
  std::size_t rank() const { return vectors_.size(); }

private:
  CyclicOperatorModel base_;
  std::vector<Eigen::VectorXcd> vectors_;
};

/// U_{alpha^k} = U_{alpha^{k-1}} + (alpha_k - 1)(., U_{alpha^{k-1}}^{-1} phi_k) phi_k
///             = (I + (alpha_k - 1) phi_k phi_k^*) U_{alpha^{k-1}}.
inline Eigen::MatrixXcd recursive_unitary(const RankNPerturbationFamily& family, const std::vector<Complex>& alphas) {
  if (alphas.size() != family.rank()) throw InvalidArgument("one alpha per perturbation vector required");
  Eigen::MatrixXcd u = family.base().unitary_matrix();
  const auto n = u.rows();
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (std::abs(std::abs(alphas[k]) - 1.0) > 1e-10) throw DomainError("alpha components must be unimodular");
    const auto& phi = family.vectors()[k];
    if (krylov_rank(u, phi) != n)
      throw CyclicityError("vector " + std::to_string(k) + " is not cyclic at stage " + std::to_string(k));
    u = (Eigen::MatrixXcd::Identity(n, n) + (alphas[k] - 1.0) * phi * phi.adjoint()) * u;
    if (unitarity_defect(u) > 1e-10) throw InvalidArgument("recursion lost unitarity at stage " + std::to_string(k));
  }
  return u;
}

/// U + sum_k (alpha_k - 1)(., U^{-1} phi_k) phi_k, equal to the recursion when
/// the phi_k are pairwise orthogonal.
inline Eigen::MatrixXcd orthogonal_sum_unitary(const RankNPerturbationFamily& family, const std::vector<Complex>& alphas) {
  if (alphas.size() != family.rank()) throw InvalidArgument("one alpha per perturbation vector required");
  Eigen::MatrixXcd u = family.base().unitary_matrix();
  Eigen::MatrixXcd sum = u;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const auto& phi = family.vectors()[k];
    sum += (alphas[k] - 1.0) * phi * phi.adjoint() * u;
  }
  return sum;
}

inline CircleAtomicMeasure spectral_measure_of_vector(const Eigen::MatrixXcd& u, const Eigen::VectorXcd& v) {
  return unitary_spectral_measure(u, v);
}

/// The pair (U, phi_1) of a circle model together with phi_2 obtained from
/// a model-space vector f: with theta = inner_from_unitary(model) the Clark
/// measure mu_1 is the spectral measure of phi_1, V_1 identifies L^2(mu_1)
/// with K_theta, and phi_2 = sqrt(w) * (V_1^* f).
struct TwoVectorSetup {
  CyclicOperatorModel model;
  ModelSpace space;
  ModelVector f;
  Lemma7Parts parts;
  RankNPerturbationFamily family;
};

inline TwoVectorSetup two_vector_setup(const CyclicOperatorModel& model, const std::function<ModelVector(const ModelSpace&)>& make_f) {
  model.require(ModelKind::circle);
  ModelSpace ms(inner_from_unitary(model));
  ModelVector f = make_f(ms);
  ms.require_same(f);
  auto parts = lemma7_decompose(ms, f);
  Eigen::VectorXcd phi1 = model.cyclic_vector().cast<Complex>();
  Eigen::VectorXcd phi2(model.size());
  for (std::size_t j = 0; j < model.size(); ++j) phi2(j) = phi1(j) * ms.eval(f, unimodular(model.sites()[j]));
  phi2 /= phi2.norm();
  RankNPerturbationFamily family(model, {phi1, phi2});
  return {model, std::move(ms), std::move(f), std::move(parts), std::move(family)};
}

/// beta W / (1 + (beta - 1) W), W = (g + alpha h) / (alpha - theta): the
/// Cauchy transform of the spectral measure of phi_2 for U_{(alpha, beta)}.
/// Assumes f(0) = 0.
inline Complex knu_alpha_beta(const ModelSpace& ms, const Lemma7Parts& p, Complex alpha, Complex beta, Complex z) {
  if (std::abs(p.f_at_zero) > 1e-10) throw InvalidArgument("knu_alpha_beta assumes f(0) = 0");
  if (!(std::abs(z) < 1.0)) throw DomainError("knu_alpha_beta needs |z| < 1");
  Complex w = (ms.eval(p.g, z) + alpha * ms.eval(p.h, z)) / (alpha - ms.theta()(z));
  Complex den = 1.0 + (beta - 1.0) * w;
  if (den == Complex(0.0)) throw PoleError("1 + (beta - 1) W vanishes");
  return beta * w / den;
}

/// (conj(a) g + h) / (1 - conj(a) theta), the transform of |f|^2 mu_a.
inline Complex clark_transform_w(const ModelSpace& ms, const Lemma7Parts& p, Complex a_conj, Complex z) {
  return (a_conj * ms.eval(p.g, z) + ms.eval(p.h, z)) / (1.0 - a_conj * ms.theta()(z));
}

/// Average over xi of the transforms of nu_{gamma(xi)}. The transform is
/// anti-analytic in (alpha, beta), so the mean over the curve is its value at
/// conj(I_1(0)), conj(I_2(0)):
/// phi = W0 / (conj(I_2(0)) + (1 - conj(I_2(0))) W0),
/// W0 = (conj(I_1(0)) g + h) / (1 - conj(I_1(0)) theta).
inline Complex phi_density(const ModelSpace& ms, const Lemma7Parts& p, const AnalyticCurve& gamma, Complex z) {
  if (gamma.dimension() != 2) throw InvalidArgument("phi_density is defined for two-component curves");
  if (std::abs(p.f_at_zero) > 1e-10) throw InvalidArgument("phi_density assumes f(0) = 0");
  if (std::abs(z) > 1.0 + 1e-12) throw DomainError("phi_density needs |z| <= 1");
  Complex a1 = std::conj(gamma[0](0.0));
  Complex a2 = std::conj(gamma[1](0.0));
  Complex w0 = clark_transform_w(ms, p, a1, z);
  return w0 / (a2 + (1.0 - a2) * w0);
}

/// nu_{gamma(xi)}: spectral measure of phi_2 for U_{gamma(xi)}.
inline CircleAtomicMeasure curve_fibre(const RankNPerturbationFamily& family, const AnalyticCurve& gamma, Complex xi) {
  auto u = recursive_unitary(family, curve_sample(gamma, xi));
  return spectral_measure_of_vector(u, family.vectors().back());
}

struct CurveDisintegrationResult {
  double estimate = 0.0;   // int nu_{gamma(xi)}(B) dm(xi)
  double reference = 0.0;  // int_B (2 Re phi - phi(0)) dm
  double estimate_error = 0.0;
  double reference_error = 0.0;
  long evaluations = 0;
  double deviation() const { return std::abs(estimate - reference); }
};

namespace detail {

/// Jump locations of a piecewise-constant count c on [lo, hi]: c is sampled
/// on a uniform grid and every change is bisected down to `resolution`.
/// Changes that cancel inside one grid cell are not seen.
template <class Count>
std::vector<double> count_jumps(Count&& c, double lo, double hi, int cells, double resolution) {
  std::vector<double> jumps;
  auto split = [&](auto&& self, double a, double b, long ca, long cb, int depth) -> void {
    if (ca == cb) return;
    if (b - a <= resolution || depth > 80) {
      jumps.push_back(0.5 * (a + b));
      return;
    }
    double m = 0.5 * (a + b);
    long cm = c(m);
    self(self, a, m, ca, cm, depth + 1);
    self(self, m, b, cm, cb, depth + 1);
  };
  double prev_t = lo;
  long prev_c = c(lo);
  for (int k = 1; k <= cells; ++k) {
    double t = lo + (hi - lo) * k / cells;
    long ct = c(t);
    split(split, prev_t, t, prev_c, ct, 0);
    prev_t = t;
    prev_c = ct;
  }
  return jumps;
}

}  // namespace detail

/// The averaged measure int nu_{gamma(xi)} dm(xi) has transform phi, hence
/// boundary density 2 Re phi - phi(0) with respect to m. On the left the
/// fibre mass of B jumps when an atom crosses an endpoint of B; the jumps are
/// located from the oracle (atom count in B on a 1024-cell grid, then
/// bisection) and Gauss-Kronrod runs between them. The right side is smooth.
inline CurveDisintegrationResult curve_disintegration_check(const TwoVectorSetup& s, const AnalyticCurve& gamma,
                                                            const BorelSet& b, QuadratureOptions opt = {1e-6, 200000}) {
  if (b.space() != BorelSet::Space::circle) throw InvalidArgument("curve disintegration needs arcs");
  CurveDisintegrationResult r;
  auto inside = [&](double t) {
    ++r.evaluations;
    long n = 0;
    for (const auto& a : curve_fibre(s.family, gamma, unimodular(t)).atoms()) n += b.contains(a.position) ? 1 : 0;
    return n;
  };
  std::vector<double> breaks = detail::count_jumps(inside, 0.0, kTwoPi, 1024, 1e-13);
  for (int k = 0; k <= 64; ++k) breaks.push_back(kTwoPi * k / 64);
  auto left = integrate_piecewise(
      [&](double t) { return measure_of(curve_fibre(s.family, gamma, unimodular(t)), b) / kTwoPi; }, breaks, opt);
  r.estimate = left.value;
  r.estimate_error = left.error;
  r.evaluations += left.evaluations;
  double phi0 = phi_density(s.space, s.parts, gamma, 0.0).real();
  QuadratureOptions ropt{1e-10, 20000};
  for (const auto& piece : b.pieces()) {
    auto q = integrate_adaptive(
        [&](double t) { return (2.0 * phi_density(s.space, s.parts, gamma, unimodular(t)).real() - phi0) / kTwoPi; },
        piece.lo, piece.hi, ropt);
    r.reference += q.value;
    r.reference_error += q.error;
    r.evaluations += q.evaluations;
  }
  return r;
}

/// min over the grids of Re[(conj(alpha) g + h) / (1 - conj(alpha) theta)].
inline double herglotz_positivity_check(const ModelSpace& ms, const Lemma7Parts& p, const std::vector<Complex>& alphas,
                                        const std::vector<Complex>& zs) {
  if (std::abs(p.f_at_zero) > 1e-10) throw InvalidArgument("positivity check assumes f(0) = 0");
  double lo = std::numeric_limits<double>::infinity();
  for (auto z : zs) {
    if (!(std::abs(z) < 1.0)) throw DomainError("positivity grid must lie in the open disk");
    Complex g = ms.eval(p.g, z), h = ms.eval(p.h, z), th = ms.theta()(z);
    for (auto a : alphas) lo = std::min(lo, ((std::conj(a) * g + h) / (1.0 - std::conj(a) * th)).real());
  }
  return lo;
}

struct AxisCriterionReport {
  // per coordinate k, the Simon-Wolff integral of mu_k at every probe
  std::vector<std::vector<ExtendedReal>> values;
  // true when the infinite flags sit exactly at the atoms of mu_k
  std::vector<bool> flags_match_atoms;
};

/// For each k the spectral measure mu_k of phi_k for the base operator and
/// its Simon-Wolff integral on the probes.
inline AxisCriterionReport theorem4_axis_criterion(const RankNPerturbationFamily& family, const std::vector<Complex>& probes) {
  AxisCriterionReport r;
  Eigen::MatrixXcd u = family.base().unitary_matrix();
  for (const auto& phi : family.vectors()) {
    auto mu = spectral_measure_of_vector(u, phi);
    std::vector<ExtendedReal> vals;
    bool match = true;
    for (auto xi : probes) {
      auto v = simon_wolff_integral_circle(mu, xi);
      bool at_atom = false;
      for (const auto& a : mu.atoms()) at_atom = at_atom || angle_distance(a.position, angle_of(xi)) <= kAtomMergeTolerance;
      match = match && (at_atom == !v.is_finite());
      vals.push_back(v);
    }
    r.values.push_back(std::move(vals));
    r.flags_match_atoms.push_back(match);
  }
  return r;
}

struct NullsetReport {
  std::size_t samples = 0;
  std::vector<std::size_t> violations;  // indices of xi with an atom within tol of E
  double min_distance = std::numeric_limits<double>::infinity();
  std::size_t min_atom_count = std::numeric_limits<std::size_t>::max();
};

/// For each sampled xi, whether nu_{gamma(xi)} charges a point of E.
inline NullsetReport theorem9_nullset_check(const RankNPerturbationFamily& family, const AnalyticCurve& gamma,
                                            const std::vector<Complex>& e, const std::vector<Complex>& xis,
                                            double tol = 1e-9) {
  NullsetReport r;
  for (std::size_t i = 0; i < xis.size(); ++i) {
    auto nu = curve_fibre(family, gamma, xis[i]);
    std::size_t count = 0;
    for (const auto& a : nu.atoms()) count += a.mass > 1e-12 ? 1 : 0;
    r.min_atom_count = std::min(r.min_atom_count, count);
    bool hit = false;
    for (const auto& a : nu.atoms())
      for (auto p : e) {
        double d = std::abs(unimodular(a.position) - p);
        r.min_distance = std::min(r.min_distance, d);
        hit = hit || d <= tol;
      }
    if (hit) r.violations.push_back(i);
    ++r.samples;
  }
  return r;
}

}  // namespace clarklab
