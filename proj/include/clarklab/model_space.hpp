#pragma once

// The model space K_theta = H^2 (-) theta H^2 of a finite Blaschke product in
// its Takenaka-Malmquist basis, the rank-one unitary perturbations T_alpha of
// the compressed shift, the Clark unitary V_alpha, the conjugation
// f -> theta conj(f), and the splitting f0 * conj-hat(f0) = g + theta h.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "clarklab/errors.hpp"
#include "clarklab/herglotz.hpp"
#include "clarklab/json_io.hpp"
#include "clarklab/measures.hpp"
#include "clarklab/quadrature.hpp"
#include "clarklab/rank_one.hpp"

namespace clarklab {

/// Options of the boundary trapezoid used for inner products.
struct BoundaryQuadrature {
  int initial_points = 512;
  int max_points = 1 << 22;
  double tol = 1e-11;
};

/// Coefficients of an element of K_theta in the basis of a ModelSpace.
struct ModelVector {
  Eigen::VectorXcd coefficients;
  std::uint64_t fingerprint = 0;

  double norm() const { return coefficients.norm(); }
};

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class ModelSpace {
public:
  /// e_k = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z) * prod_{j<k} b_{a_j}(z).
  /// Repeated zeros give the confluent system automatically.
  explicit ModelSpace(BlaschkeProduct theta, BoundaryQuadrature quad = {})
      : theta_(std::move(theta)), quad_(quad) {
    if (theta_.degree() < 1) throw InvalidArgument("model space needs degree >= 1");
    fingerprint_ = fnv1a64(serialize_blaschke(theta_));
  }

  const BlaschkeProduct& theta() const { return theta_; }
  int dimension() const { return theta_.degree(); }
  std::uint64_t fingerprint() const { return fingerprint_; }
  const BoundaryQuadrature& quadrature() const { return quad_; }

  /// Values of all basis functions at z (|z| <= 1).
  Eigen::VectorXcd basis_at(Complex z) const {
    const auto& a = theta_.zeros();
    Eigen::VectorXcd e(dimension());
    Complex prefix = 1.0;
    for (int k = 0; k < dimension(); ++k) {
      Complex d = 1.0 - std::conj(a[k]) * z;
      e(k) = std::sqrt(1.0 - std::norm(a[k])) / d * prefix;
      prefix *= (z - a[k]) / d;
    }
    return e;
  }

  ModelVector vector(Eigen::VectorXcd coefficients) const {
    if (coefficients.size() != dimension()) throw InvalidArgument("coefficient count differs from dimension");
    return {std::move(coefficients), fingerprint_};
  }

  void require_same(const ModelVector& f) const {
    if (f.fingerprint != fingerprint_) throw InvalidArgument("model vector belongs to a different model space");
    if (f.coefficients.size() != dimension()) throw InvalidArgument("model vector has the wrong dimension");
  }

  Complex eval(const ModelVector& f, Complex z) const {
    require_same(f);
    return (basis_at(z).array() * f.coefficients.array()).sum();
  }

  /// Coefficients of the constant 1, which lies in K_theta iff theta(0) = 0.
  ModelVector one() const {
    require_origin_zero();
    return vector(basis_at(0.0).conjugate());
  }

  void require_origin_zero() const {
    if (std::abs(theta_(0.0)) > 1e-12) throw InvalidArgument("operation requires theta(0) = 0");
  }

  /// Mean over the circle of the matrix-valued map f, by the trapezoid rule
  /// doubled from quad.initial_points until entries move less than quad.tol.
  Eigen::MatrixXcd boundary_mean(const std::function<Eigen::MatrixXcd(Complex)>& f) const {
    int n = quad_.initial_points;
    Eigen::MatrixXcd sum = f(1.0);
    for (int k = 1; k < n; ++k) sum += f(unimodular(kTwoPi * k / n));
    Eigen::MatrixXcd mean = sum / static_cast<double>(n);
    while (true) {
      if (2 * n > quad_.max_points) throw QuadratureError("boundary trapezoid did not stabilize");
      for (int k = 0; k < n; ++k) sum += f(unimodular(kTwoPi * (2 * k + 1) / (2.0 * n)));
      n *= 2;
      Eigen::MatrixXcd next = sum / static_cast<double>(n);
      double diff = (next - mean).cwiseAbs().maxCoeff();
      mean = std::move(next);
      if (diff <= quad_.tol) return mean;
    }
  }

  /// Gram matrix <e_k, e_j> by quadrature; the identity up to rounding.
  Eigen::MatrixXcd gram() const {
    return boundary_mean([&](Complex xi) {
      Eigen::VectorXcd e = basis_at(xi);
      return Eigen::MatrixXcd(e.conjugate() * e.transpose());
    });
  }

  /// Coefficients <F, e_k> of the projection of a boundary function.
  ModelVector project(const std::function<Complex(Complex)>& boundary_values) const {
    Eigen::MatrixXcd c = boundary_mean([&](Complex xi) {
      return Eigen::MatrixXcd(boundary_values(xi) * basis_at(xi).conjugate());
    });
    return vector(c.col(0));
  }

private:
  BlaschkeProduct theta_;
  BoundaryQuadrature quad_;
  std::uint64_t fingerprint_ = 0;
};

inline ModelSpace build_model_space(const BlaschkeProduct& theta) { return ModelSpace(theta); }

/// Matrix of T_alpha f = z (f - (f, theta/z) theta/z) + (f, theta/z) alpha,
/// entries <T_alpha e_k, e_j>. Needs theta(0) = 0.
inline Eigen::MatrixXcd t_alpha_matrix(const ModelSpace& ms, Complex alpha) {
  ms.require_origin_zero();
  if (std::abs(std::abs(alpha) - 1.0) > 1e-10) throw DomainError("alpha must be unimodular");
  const int n = ms.dimension();
  const auto& theta = ms.theta();
  // columns 0..n-1: <z e_k, e_j> at (j, k); column n: <e_k, theta/z> at row k
  Eigen::MatrixXcd q = ms.boundary_mean([&](Complex xi) {
    Eigen::VectorXcd e = ms.basis_at(xi);
    Eigen::MatrixXcd m(n, n + 1);
    m.leftCols(n) = e.conjugate() * (xi * e).transpose();
    m.col(n) = e * std::conj(theta(xi) / xi);
    return m;
  });
  Eigen::MatrixXcd t = q.leftCols(n);
  Eigen::VectorXcd e0 = ms.basis_at(0.0);
  // <theta, e_j> = 0 and <1, e_j> = conj(e_j(0))
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) t(j, k) += q(k, n) * alpha * std::conj(e0(j));
  return t;
}

/// V_alpha f = K(f mu_alpha) / K(mu_alpha): f given by its values at the
/// atoms of mu_alpha; the image of the atom at xi is m(xi) k_xi, with
/// reproducing kernel k_xi = sum_k conj(e_k(xi)) e_k.
inline ModelVector v_alpha(const ModelSpace& ms, const CircleAtomicMeasure& mu_alpha, const Eigen::VectorXcd& values) {
  if (values.size() != static_cast<Eigen::Index>(mu_alpha.size())) throw InvalidArgument("one value per atom required");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(ms.dimension());
  for (std::size_t j = 0; j < mu_alpha.size(); ++j)
    c += values(j) * mu_alpha.atoms()[j].mass * ms.basis_at(mu_alpha.point(j)).conjugate();
  return ms.vector(std::move(c));
}

inline ModelVector v_alpha(const ModelSpace& ms, Complex alpha, const Eigen::VectorXcd& values) {
  return v_alpha(ms, clark_measure(ms.theta(), alpha), values);
}

/// V_alpha^* F: boundary values of F at the atoms of mu_alpha.
inline Eigen::VectorXcd v_alpha_star(const ModelSpace& ms, const CircleAtomicMeasure& mu_alpha, const ModelVector& f) {
  ms.require_same(f);
  Eigen::VectorXcd out(mu_alpha.size());
  for (std::size_t j = 0; j < mu_alpha.size(); ++j) out(j) = ms.eval(f, mu_alpha.point(j));
  return out;
}

inline Eigen::VectorXcd v_alpha_star(const ModelSpace& ms, Complex alpha, const ModelVector& f) {
  return v_alpha_star(ms, clark_measure(ms.theta(), alpha), f);
}

/// Matrix of V_alpha from the orthonormal basis 1_xi / sqrt(m(xi)) of
/// L^2(mu_alpha) to the basis of the model space.
inline Eigen::MatrixXcd v_alpha_matrix(const ModelSpace& ms, const CircleAtomicMeasure& mu_alpha) {
  Eigen::MatrixXcd w(ms.dimension(), mu_alpha.size());
  for (std::size_t j = 0; j < mu_alpha.size(); ++j)
    w.col(j) = std::sqrt(mu_alpha.atoms()[j].mass) * ms.basis_at(mu_alpha.point(j)).conjugate();
  return w;
}

inline double spectral_norm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

/// ||T_alpha - V_alpha Y_alpha V_alpha^*||_2 with Y_alpha multiplication by
/// the independent variable on L^2(mu_alpha).
inline double intertwine_check(const ModelSpace& ms, Complex alpha) {
  auto mu = clark_measure(ms.theta(), alpha);
  Eigen::MatrixXcd w = v_alpha_matrix(ms, mu);
  Eigen::VectorXcd y(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) y(j) = mu.point(j);
  return spectral_norm(t_alpha_matrix(ms, alpha) - w * y.asDiagonal() * w.adjoint());
}

/// The element of K_theta with boundary values theta * conj(f); needs f(0) = 0.
inline ModelVector hat_conjugate(const ModelSpace& ms, const ModelVector& f) {
  ms.require_same(f);
  if (std::abs(ms.eval(f, 0.0)) > 1e-10) throw InvalidArgument("hat_conjugate requires f(0) = 0");
  const auto& theta = ms.theta();
  return ms.project([&](Complex xi) { return theta(xi) * std::conj(ms.eval(f, xi)); });
}

/// f - f(0), as an element of K_theta (needs theta(0) = 0).
inline ModelVector without_constant(const ModelSpace& ms, const ModelVector& f) {
  ms.require_same(f);
  Complex f0 = ms.eval(f, 0.0);
  return ms.vector(f.coefficients - f0 * ms.one().coefficients);
}

struct Lemma7Parts {
  Complex f_at_zero = 0.0;
  ModelVector f0;      // f - f(0)
  ModelVector f0_hat;  // theta conj(f0)
  ModelVector g;
  ModelVector h;
  double condition_number = 1.0;
  double boundary_residual = 0.0;  // max |f0 f0_hat - g - theta h| on the samples
};

/// Splits F = f0 * f0_hat in K_{theta^2} = K_theta (+) theta K_theta. The
/// columns [e_k, theta e_k] are orthonormal on the circle, so the normal
/// equations of the boundary least-squares problem have Gram matrix near the
/// identity; its condition number is reported and checked.
inline Lemma7Parts lemma7_decompose(const ModelSpace& ms, const ModelVector& f, int residual_samples = 64) {
  ms.require_same(f);
  ms.require_origin_zero();
  if (std::abs(f.norm() - 1.0) > 1e-9) throw InvalidArgument("lemma7_decompose expects ||f|| = 1");
  const int n = ms.dimension();
  const auto& theta = ms.theta();
  Lemma7Parts p;
  p.f_at_zero = ms.eval(f, 0.0);
  p.f0 = without_constant(ms, f);
  p.f0_hat = hat_conjugate(ms, p.f0);
  auto big_f = [&](Complex xi) { return ms.eval(p.f0, xi) * ms.eval(p.f0_hat, xi); };
  // columns 0..2n-1: Gram of [e, theta e]; column 2n: right-hand side
  Eigen::MatrixXcd q = ms.boundary_mean([&](Complex xi) {
    Eigen::VectorXcd e = ms.basis_at(xi);
    Eigen::VectorXcd row(2 * n);
    row << e, theta(xi) * e;
    Eigen::MatrixXcd m(2 * n, 2 * n + 1);
    m.leftCols(2 * n) = row.conjugate() * row.transpose();
    m.col(2 * n) = big_f(xi) * row.conjugate();
    return m;
  });
  Eigen::MatrixXcd gram = q.leftCols(2 * n);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  p.condition_number = s(0) / s(s.size() - 1);
  if (!(p.condition_number < 1e8)) throw ConditioningError("splitting system is ill-conditioned", p.condition_number);
  Eigen::VectorXcd x = svd.solve(q.col(2 * n));
  p.g = ms.vector(x.head(n));
  p.h = ms.vector(x.tail(n));
  for (int k = 0; k < residual_samples; ++k) {
    Complex xi = unimodular(kTwoPi * k / residual_samples);
    double r = std::abs(big_f(xi) - ms.eval(p.g, xi) - theta(xi) * ms.eval(p.h, xi));
    p.boundary_residual = std::max(p.boundary_residual, r);
  }
  return p;
}

/// (g + alpha h + f(0) f0_hat + alpha conj(f(0)) f0 + alpha |f(0)|^2) / (alpha - theta):
/// the Cauchy transform of |f|^2 mu_alpha.
inline Complex knu_alpha(const ModelSpace& ms, const Lemma7Parts& p, Complex alpha, Complex z) {
  if (!(std::abs(z) < 1.0)) throw DomainError("knu_alpha needs |z| < 1");
  Complex c = p.f_at_zero;
  Complex num = ms.eval(p.g, z) + alpha * ms.eval(p.h, z) + c * ms.eval(p.f0_hat, z) +
                alpha * std::conj(c) * ms.eval(p.f0, z) + alpha * std::norm(c);
  Complex den = alpha - ms.theta()(z);
  if (den == Complex(0.0)) throw PoleError("theta(z) = alpha");
  return num / den;
}

inline Complex knu_alpha(const ModelSpace& ms, const ModelVector& f, Complex alpha, Complex z) {
  return knu_alpha(ms, lemma7_decompose(ms, f), alpha, z);
}

/// |f|^2 mu_alpha, the spectral measure whose transform knu_alpha gives.
inline CircleAtomicMeasure weighted_clark_measure(const ModelSpace& ms, const ModelVector& f, Complex alpha) {
  auto mu = clark_measure(ms.theta(), alpha);
  Eigen::VectorXcd vals = v_alpha_star(ms, mu, f);
  std::vector<double> w(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) w[j] = std::norm(vals(j));
  return reweighted(mu, w);
}

inline std::string fingerprint_hex(std::uint64_t f) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f));
  return buf;
}

inline Json to_json(const ModelVector& f) {
  Json c = Json::array();
  for (Eigen::Index k = 0; k < f.coefficients.size(); ++k) c.push_back(jcomplex(f.coefficients(k)));
  return Json{{"fingerprint", fingerprint_hex(f.fingerprint)}, {"coefficients", c}};
}

/// Reads coefficients and rejects a fingerprint that does not match ms.
inline ModelVector model_vector_from_json(const ModelSpace& ms, const Json& j, const std::string& path = "$") {
  const Json& fp = require_field(j, "fingerprint", path);
  if (!fp.is_string() || fp.get<std::string>() != fingerprint_hex(ms.fingerprint()))
    throw FormatError(path + ".fingerprint", "does not match the model space of theta");
  auto c = decode_complexes(require_field(j, "coefficients", path), path + ".coefficients");
  if (static_cast<int>(c.size()) != ms.dimension()) throw FormatError(path + ".coefficients", "wrong dimension");
  return ms.vector(Eigen::Map<Eigen::VectorXcd>(c.data(), c.size()));
}

}  // namespace clarklab
