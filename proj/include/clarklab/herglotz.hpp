#pragma once

// Rational Cauchy transforms, finite Blaschke products and their level sets,
// the secular equation on the line, and the half-plane <-> disk transfer.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "clarklab/errors.hpp"
#include "clarklab/measures.hpp"
#include "clarklab/polynomial.hpp"

namespace clarklab {

inline constexpr Complex kI{0.0, 1.0};

/// One term residue / (pole - z) of a partial-fraction expansion.
struct PoleTerm {
  Complex pole;
  Complex residue;
};

/// Rational function numerator / denominator in reduced form.
///
/// Cauchy transforms of atomic measures also keep their partial-fraction
/// expansion constant + sum residue_j / (pole_j - z); evaluation goes
/// through it when present since the monomial coefficients of a high-degree
/// denominator are badly conditioned near the real axis.
class HerglotzRational {
public:
  /// Coefficient form. Rejects a vanishing denominator and any numerator /
  /// denominator pair sharing a root (relative residual below 1e-10).
  HerglotzRational(Polynomial numerator, Polynomial denominator)
      : num_(std::move(numerator)), den_(std::move(denominator)) {
    if (den_.is_zero()) throw InvalidArgument("denominator must be nonzero");
    for (auto r : den_.roots()) {
      double scale = num_.magnitude_at(r);
      if (scale == 0.0 || std::abs(num_(r)) <= 1e-10 * scale)
        throw InvalidArgument("numerator and denominator share a root: not in reduced form");
    }
  }

  /// constant + sum residue_j / (pole_j - z) with distinct poles.
  static HerglotzRational from_poles(std::vector<PoleTerm> terms, Complex constant = 0.0) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].residue == Complex(0.0)) throw InvalidArgument("pole term with zero residue");
      for (std::size_t j = 0; j < i; ++j)
        if (terms[i].pole == terms[j].pole) throw InvalidArgument("poles must be distinct");
    }
    Polynomial den({1.0});
    for (const auto& t : terms) den = den * Polynomial({t.pole, -1.0});
    Polynomial num = den * constant;
    for (std::size_t j = 0; j < terms.size(); ++j) {
      Polynomial p({terms[j].residue});
      for (std::size_t k = 0; k < terms.size(); ++k)
        if (k != j) p = p * Polynomial({terms[k].pole, -1.0});
      num = num + p;
    }
    HerglotzRational r(Unchecked{}, std::move(num), std::move(den));
    r.poles_ = std::move(terms);
    r.constant_ = constant;
    return r;
  }

  /// K mu(z) = sum m_j / (t_j - z).
  static HerglotzRational from_line_measure(const LineAtomicMeasure& mu) {
    std::vector<PoleTerm> terms;
    for (const auto& a : mu.atoms()) terms.push_back({a.position, a.mass});
    return from_poles(std::move(terms));
  }

  /// K nu(z) = sum m_j / (1 - conj(xi_j) z) = sum m_j xi_j / (xi_j - z).
  static HerglotzRational from_circle_measure(const CircleAtomicMeasure& nu) {
    std::vector<PoleTerm> terms;
    for (std::size_t j = 0; j < nu.size(); ++j) terms.push_back({nu.point(j), nu.atoms()[j].mass * nu.point(j)});
    return from_poles(std::move(terms));
  }

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  bool has_pole_form() const { return poles_.has_value(); }
  const std::vector<PoleTerm>& poles() const {
    if (!poles_) throw InvalidArgument("rational has no stored partial-fraction form");
    return *poles_;
  }
  Complex constant_term() const { return constant_; }
  bool is_proper() const { return num_.degree() <= den_.degree(); }

  /// Value at infinity of a proper rational.
  Complex value_at_infinity() const {
    if (poles_) return constant_;
    if (num_.degree() < den_.degree()) return 0.0;
    if (num_.degree() == den_.degree()) return num_.leading() / den_.leading();
    throw PoleError("improper rational has a pole at infinity");
  }

  Complex operator()(Complex z) const {
    if (poles_) {
      Complex s = constant_;
      for (const auto& t : *poles_) {
        Complex d = t.pole - z;
        if (d == Complex(0.0)) throw PoleError("rational evaluated at a pole");
        s += t.residue / d;
      }
      return s;
    }
    Complex d = den_(z);
    if (std::abs(d) <= 1e-14 * den_.magnitude_at(z)) throw PoleError("rational evaluated at a denominator root");
    return num_(z) / d;
  }

  /// f'(z); uses the partial fractions when available.
  Complex derivative_at(Complex z) const {
    if (poles_) {
      Complex s = 0.0;
      for (const auto& t : *poles_) {
        Complex d = t.pole - z;
        if (d == Complex(0.0)) throw PoleError("derivative evaluated at a pole");
        s += t.residue / (d * d);
      }
      return s;
    }
    Complex d = den_(z);
    if (std::abs(d) <= 1e-14 * den_.magnitude_at(z)) throw PoleError("derivative evaluated at a denominator root");
    return (num_.derivative()(z) * d - num_(z) * den_.derivative()(z)) / (d * d);
  }

  /// Real poles with positive real residues and no constant: the Cauchy
  /// transform of a line measure.
  LineAtomicMeasure line_measure() const {
    if (!poles_ || constant_ != Complex(0.0))
      throw InvalidArgument("rational is not the Cauchy transform of a line measure");
    std::vector<Atom> atoms;
    for (const auto& t : *poles_) {
      if (t.pole.imag() != 0.0 || t.residue.imag() != 0.0 || !(t.residue.real() > 0.0))
        throw InvalidArgument("rational is not the Cauchy transform of a line measure");
      atoms.push_back({t.pole.real(), t.residue.real()});
    }
    return LineAtomicMeasure(std::move(atoms));
  }

private:
  struct Unchecked {};
  HerglotzRational(Unchecked, Polynomial n, Polynomial d) : num_(std::move(n)), den_(std::move(d)) {}

  friend HerglotzRational rational_derivative(const HerglotzRational& f);

  Polynomial num_;
  Polynomial den_;
  std::optional<std::vector<PoleTerm>> poles_;
  Complex constant_ = 0.0;
};

inline Complex rational_eval(const HerglotzRational& f, Complex z) { return f(z); }

/// Quotient-rule derivative (N'D - ND') / D^2, with the factor
/// (z - r)^(k-1) removed for every denominator root r of multiplicity k.
inline HerglotzRational rational_derivative(const HerglotzRational& f) {
  const Polynomial& n = f.numerator();
  const Polynomial& d = f.denominator();
  Polynomial num = n.derivative() * d - n * d.derivative();
  Polynomial den = d * d;
  if (!f.has_pole_form() && d.degree() > 1) {
    // cluster the roots of D; a k-fold cluster shares k-1 factors with num
    auto roots = d.roots();
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (used[i]) continue;
      std::vector<Complex> cluster{roots[i]};
      used[i] = true;
      for (std::size_t j = i + 1; j < roots.size(); ++j) {
        if (!used[j] && std::abs(roots[j] - roots[i]) <= 1e-6 * std::max(1.0, std::abs(roots[i]))) {
          cluster.push_back(roots[j]);
          used[j] = true;
        }
      }
      Complex mean = 0.0;
      for (auto c : cluster) mean += c;
      mean /= static_cast<double>(cluster.size());
      for (std::size_t k = 1; k < cluster.size(); ++k) {
        num = num.deflate(mean);
        den = den.deflate(mean);
      }
    }
  }
  return HerglotzRational(HerglotzRational::Unchecked{}, std::move(num), std::move(den));
}

// ---------------------------------------------------------------------------
// Blaschke products

/// theta(z) = c * prod_j (z - a_j) / (1 - conj(a_j) z), |a_j| < 1, |c| = 1.
class BlaschkeProduct {
public:
  explicit BlaschkeProduct(std::vector<Complex> zeros, Complex front_constant = 1.0)
      : zeros_(std::move(zeros)), c_(front_constant) {
    for (auto a : zeros_)
      if (!(std::abs(a) < 1.0)) throw InvalidArgument("Blaschke zeros must lie strictly inside the unit disk");
    if (std::abs(std::abs(c_) - 1.0) > 1e-12) throw InvalidArgument("front constant must be unimodular");
    for (int k = 0; k < 64; ++k) {
      Complex xi = unimodular(kTwoPi * k / 64.0);
      if (std::abs(std::abs((*this)(xi)) - 1.0) > 1e-10)
        throw InvalidArgument("Blaschke product is not unimodular on the circle");
    }
  }

  /// theta(z) = z^n
  static BlaschkeProduct power(int n) { return BlaschkeProduct(std::vector<Complex>(n, 0.0)); }

  const std::vector<Complex>& zeros() const { return zeros_; }
  Complex front_constant() const { return c_; }
  int degree() const { return static_cast<int>(zeros_.size()); }

  Complex operator()(Complex z) const {
    Complex v = c_;
    for (auto a : zeros_) {
      Complex d = 1.0 - std::conj(a) * z;
      if (d == Complex(0.0)) throw PoleError("Blaschke product evaluated at a reflected zero");
      v *= (z - a) / d;
    }
    return v;
  }

  /// theta'(z) by the product rule over the factors.
  Complex derivative(Complex z) const {
    const std::size_t n = zeros_.size();
    if (n == 0) return 0.0;
    std::vector<Complex> f(n), df(n);
    for (std::size_t j = 0; j < n; ++j) {
      Complex a = zeros_[j];
      Complex d = 1.0 - std::conj(a) * z;
      if (d == Complex(0.0)) throw PoleError("Blaschke derivative evaluated at a reflected zero");
      f[j] = (z - a) / d;
      df[j] = (1.0 - std::norm(a)) / (d * d);
    }
    std::vector<Complex> prefix(n + 1, 1.0), suffix(n + 1, 1.0);
    for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * f[j];
    for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] * f[j];
    Complex s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += df[j] * prefix[j] * suffix[j + 1];
    return c_ * s;
  }

  /// |theta'(xi)| at xi = e^{it}: sum (1 - |a|^2) / |xi - a|^2.
  double boundary_derivative_modulus(double t) const {
    Complex xi = unimodular(t);
    double s = 0.0;
    for (auto a : zeros_) s += (1.0 - std::norm(a)) / std::norm(xi - a);
    return s;
  }

  /// Continuous, strictly increasing branch of arg theta(e^{it}) on [0, 2pi]:
  /// arg c + N t - 2 sum arg(1 - conj(a) e^{it}).
  double unwrapped_phase(double t) const {
    double s = std::arg(c_) + degree() * t;
    Complex xi = unimodular(t);
    for (auto a : zeros_) s -= 2.0 * std::arg(1.0 - std::conj(a) * xi);
    return s;
  }

  /// c * prod (z - a_j)
  Polynomial numerator() const { return Polynomial::from_roots(zeros_) * c_; }

  /// prod (1 - conj(a_j) z)
  Polynomial denominator() const {
    Polynomial p({1.0});
    for (auto a : zeros_) p = p * Polynomial({1.0, -std::conj(a)});
    return p;
  }

private:
  std::vector<Complex> zeros_;
  Complex c_;
};

namespace detail {

inline double wrap_to_pi(double x) {
  double r = std::remainder(x, kTwoPi);
  return r;
}

// Newton in the angle variable on arg(theta(e^{it}) / alpha) = 0.
inline std::optional<double> polish_on_circle(const BlaschkeProduct& theta, Complex alpha, double t,
                                              int max_iter = 50) {
  for (int it = 0; it < max_iter; ++it) {
    Complex v = theta(unimodular(t));
    double r = std::arg(v * std::conj(alpha));
    double dpsi = theta.boundary_derivative_modulus(t);
    double step = r / dpsi;
    t -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) break;
  }
  t = normalize_angle(t);
  if (std::abs(theta(unimodular(t)) - alpha) > 1e-9) return std::nullopt;
  return t;
}

// Brackets every solution with the monotone unwrapped phase and solves by
// safeguarded Newton; always yields exactly degree() distinct angles.
inline std::vector<double> level_set_by_phase(const BlaschkeProduct& theta, Complex alpha) {
  const int n = theta.degree();
  const double psi0 = theta.unwrapped_phase(0.0);
  const double target0 = std::arg(alpha);
  double k0 = std::ceil((psi0 - target0) / kTwoPi);
  std::vector<double> out;
  for (int k = 0; k < n; ++k) {
    double target = target0 + kTwoPi * (k0 + k);
    double lo = 0.0, hi = kTwoPi;
    double t = 0.5 * (lo + hi);
    bool ok = false;
    for (int it = 0; it < 200; ++it) {
      double f = theta.unwrapped_phase(t) - target;
      if (f < 0.0) lo = t; else hi = t;
      if (f == 0.0) { ok = true; break; }
      double next = t - f / theta.boundary_derivative_modulus(t);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, t)) {
        t = next;
        ok = true;
        break;
      }
      t = next;
    }
    if (!ok && hi - lo > 1e-12) throw RootPolishError("phase bracketing did not converge on the level set");
    t = normalize_angle(t);
    if (std::abs(theta(unimodular(t)) - alpha) > 1e-9)
      throw RootPolishError("level-set point fails |theta - alpha| <= 1e-9");
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline double min_circular_gap(const std::vector<double>& sorted_angles) {
  if (sorted_angles.size() < 2) return kTwoPi;
  double g = sorted_angles.front() + kTwoPi - sorted_angles.back();
  for (std::size_t i = 1; i < sorted_angles.size(); ++i) g = std::min(g, sorted_angles[i] - sorted_angles[i - 1]);
  return g;
}

}  // namespace detail

/// Angles of the N boundary solutions of theta(xi) = alpha, sorted in [0, 2pi).
///
/// Companion-matrix roots of P - alpha Q seed a Newton polish on the circle;
/// if the polished set is not N distinct points the monotone-phase bracket
/// solver takes over.
inline std::vector<double> level_set_angles(const BlaschkeProduct& theta, Complex alpha) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-10) throw DomainError("level-set value must be unimodular");
  if (theta.degree() == 0) throw InvalidArgument("level set of a constant inner function");
  const int n = theta.degree();
  std::vector<double> angles;
  try {
    Polynomial p = theta.numerator() - theta.denominator() * alpha;
    for (auto r : p.roots()) {
      auto t = detail::polish_on_circle(theta, alpha, std::arg(r));
      if (!t) {
        angles.clear();
        break;
      }
      angles.push_back(*t);
    }
  } catch (const EigensolverError&) {
    angles.clear();
  }
  std::sort(angles.begin(), angles.end());
  if (static_cast<int>(angles.size()) != n || detail::min_circular_gap(angles) <= 1e-10)
    angles = detail::level_set_by_phase(theta, alpha);
  return angles;
}

inline std::vector<Complex> level_set(const BlaschkeProduct& theta, Complex alpha) {
  std::vector<Complex> pts;
  for (double t : level_set_angles(theta, alpha)) pts.push_back(unimodular(t));
  return pts;
}

// ---------------------------------------------------------------------------
// Secular equation on the line

namespace detail {

struct SecularRoot {
  double origin;  // nearest atom used as the local origin
  double offset;  // root = origin + offset
  double value() const { return origin + offset; }
};

// Solves sum m_k / ((t_k - origin) - d) = target for d in (lo, hi), where the
// left side is increasing in d. Endpoints may be poles.
inline double solve_shifted(const std::vector<double>& shifted, const std::vector<double>& m, double target,
                            double lo, double hi) {
  auto eval = [&](double d, double& f, double& fp, double& scale) {
    f = -target;
    fp = 0.0;
    scale = std::abs(target);
    for (std::size_t k = 0; k < shifted.size(); ++k) {
      double q = shifted[k] - d;
      double term = m[k] / q;
      f += term;
      fp += term / q;
      scale += std::abs(term);
    }
  };
  double d = 0.5 * (lo + hi);
  double f = 0.0, fp = 0.0, scale = 0.0;
  double last_width = hi - lo;
  int stagnant = 0;
  for (int it = 0; it < 400; ++it) {
    eval(d, f, fp, scale);
    if (f < 0.0) lo = d; else hi = d;
    if (f == 0.0) return d;
    double next = d - f / fp;
    double width = hi - lo;
    if (width > 0.5 * last_width) ++stagnant; else stagnant = 0;
    last_width = width;
    if (!(next > lo && next < hi) || !std::isfinite(next) || stagnant >= 3) {
      next = 0.5 * (lo + hi);
      stagnant = 0;
    }
    double tiny = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
    if (std::abs(next - d) <= tiny || width <= tiny) {
      d = next;
      eval(d, f, fp, scale);
      break;
    }
    d = next;
  }
  if (std::abs(f) > 1e-12 * std::abs(target) + 64.0 * std::numeric_limits<double>::epsilon() * scale)
    throw BracketingError("secular root did not converge", lo, hi);
  return d;
}

// Roots of K(x) = target with K the Cauchy transform of (t, m), t sorted.
// target < 0 adds the root above the top atom, target > 0 the root below
// the bottom atom; target == 0 gives only the N-1 interior roots.
inline std::vector<SecularRoot> secular_solve(const std::vector<double>& t, const std::vector<double>& m,
                                              double target) {
  const std::size_t n = t.size();
  std::vector<SecularRoot> roots;
  std::vector<double> shifted(n);
  auto shift_to = [&](double origin) {
    for (std::size_t k = 0; k < n; ++k) shifted[k] = t[k] - origin;
  };
  auto value_at = [&](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += m[k] / (t[k] - x);
    return s;
  };
  double total = 0.0;
  for (double mk : m) total += mk;

  if (target > 0.0) {
    shift_to(t.front());
    double lo = -total / target;
    double d = solve_shifted(shifted, m, target, lo, 0.0);
    roots.push_back({t.front(), d});
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    double a = t[j], b = t[j + 1];
    double mid = a + 0.5 * (b - a);
    double fmid = value_at(mid) - target;
    if (!(b > a)) throw BracketingError("atoms not strictly increasing", a, b);
    if (fmid >= 0.0) {
      shift_to(a);
      double d = solve_shifted(shifted, m, target, 0.0, mid - a);
      roots.push_back({a, d});
    } else {
      shift_to(b);
      double d = solve_shifted(shifted, m, target, mid - b, 0.0);
      roots.push_back({b, d});
    }
  }
  if (target < 0.0) {
    shift_to(t.back());
    double hi = -total / target;
    double d = solve_shifted(shifted, m, target, 0.0, hi);
    roots.push_back({t.back(), d});
  }
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (!(roots[i].value() > roots[i - 1].value()))
      throw BracketingError("secular roots lost strict interlacing", roots[i - 1].value(), roots[i].value());
  return roots;
}

// K'(x) for x = origin + offset, evaluated in shifted coordinates.
inline double secular_derivative(const std::vector<double>& t, const std::vector<double>& m, double origin,
                                 double offset) {
  double s = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    double q = (t[k] - origin) - offset;
    s += m[k] / (q * q);
  }
  return s;
}

inline double nearest_atom(const std::vector<double>& t, double x) {
  auto it = std::lower_bound(t.begin(), t.end(), x);
  if (it == t.end()) return t.back();
  if (it == t.begin()) return t.front();
  double hi = *it, lo = *(it - 1);
  return (x - lo <= hi - x) ? lo : hi;
}

}  // namespace detail

/// All real solutions of K(x) = -1/lambda, K the Cauchy transform of a line
/// measure with N atoms; N roots sorted ascending.
inline std::vector<double> secular_roots_line(const HerglotzRational& k, double lambda) {
  if (lambda == 0.0) throw InvalidArgument("secular equation needs lambda != 0");
  auto mu = k.line_measure();
  auto roots = detail::secular_solve(mu.positions(), mu.masses(), -1.0 / lambda);
  std::vector<double> out;
  for (const auto& r : roots) out.push_back(r.value());
  return out;
}

/// Masses 1 / (lambda^2 K'(x)) of the perturbed measure at the secular roots.
inline std::vector<double> residue_masses_line(const HerglotzRational& k, double lambda,
                                               const std::vector<double>& roots) {
  if (lambda == 0.0) throw InvalidArgument("residue masses need lambda != 0");
  auto mu = k.line_measure();
  auto t = mu.positions();
  auto m = mu.masses();
  std::vector<double> masses;
  for (double x : roots) {
    double origin = detail::nearest_atom(t, x);
    double kp = detail::secular_derivative(t, m, origin, x - origin);
    if (!(kp >= 1e-14)) throw DerivativeTooSmallError("K'(x) below 1e-14 at a secular root");
    masses.push_back(1.0 / (lambda * lambda * kp));
  }
  return masses;
}

// ---------------------------------------------------------------------------
// Half-plane <-> disk

/// omega(z) = (z - i)/(z + i), upper half-plane onto the disk.
inline Complex to_disk(Complex z) { return (z - kI) / (z + kI); }

/// omega^{-1}(w) = i (1 + w)/(1 - w).
inline Complex to_half_plane(Complex w) {
  if (w == Complex(1.0)) throw PoleError("w = 1 maps to infinity");
  return kI * (1.0 + w) / (1.0 - w);
}

/// Level value alpha(lambda) = (lambda - i)/(lambda + i) at which
/// {theta = alpha} equals {K = -1/lambda} for theta = (1 + iK)/(1 - iK).
inline Complex relabel_lambda(double lambda) { return (lambda - kI) / (lambda + kI); }

/// Inner function on the upper half-plane, stored as a disk Blaschke product
/// composed with the Cayley map.
class HalfPlaneInner {
public:
  explicit HalfPlaneInner(BlaschkeProduct disk) : disk_(std::move(disk)) {
    for (double x : {-10.0, -1.0, -0.1, 0.0, 0.3, 2.0, 25.0})
      for (double y : {1e-3, 0.1, 1.0, 10.0})
        if (std::abs(disk_(to_disk({x, y}))) > 1.0 + 1e-12)
          throw InvalidArgument("half-plane inner function exceeds modulus 1");
  }

  const BlaschkeProduct& disk() const { return disk_; }
  int degree() const { return disk_.degree(); }

  Complex operator()(Complex z) const { return disk_(to_disk(z)); }

  /// Real solutions of theta(x) = alpha; the point at infinity is dropped.
  std::vector<double> level_set(Complex alpha) const {
    std::vector<double> xs;
    for (auto w : clarklab::level_set(disk_, alpha)) {
      if (std::abs(1.0 - w) < 1e-12) continue;
      xs.push_back(to_half_plane(w).real());
    }
    std::sort(xs.begin(), xs.end());
    return xs;
  }

private:
  BlaschkeProduct disk_;
};

namespace detail {

inline std::vector<Complex> solve_for_value(const HerglotzRational& j, Complex value) {
  std::vector<Complex> roots;
  if (j.has_pole_form()) {
    // eigenvalues of diag(poles) + s w w^T solve sum r/(p - z) = -1/s
    const auto& terms = j.poles();
    const int n = static_cast<int>(terms.size());
    Complex target = value - j.constant_term();
    if (target == Complex(0.0)) throw InvalidArgument("cannot solve for the asymptotic value");
    Complex s = -1.0 / target;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd w(n);
    for (int k = 0; k < n; ++k) {
      a(k, k) = terms[k].pole;
      w(k) = std::sqrt(terms[k].residue);
    }
    a += s * w * w.transpose();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
    if (solver.info() != Eigen::Success) throw EigensolverError("eigensolver failed in Cayley transfer");
    for (int k = 0; k < n; ++k) roots.push_back(solver.eigenvalues()(k));
  } else {
    roots = (j.numerator() - j.denominator() * value).roots();
  }
  for (auto& z : roots) {
    for (int it = 0; it < 50; ++it) {
      Complex f = j(z) - value;
      Complex step = f / j.derivative_at(z);
      z -= step;
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(z))) break;
    }
  }
  return roots;
}

}  // namespace detail

/// theta = (1 + iJ)/(1 - iJ) transported to the disk, for J the Cauchy
/// transform of a positive line measure.
inline HalfPlaneInner cayley_transfer(const HerglotzRational& j) {
  if (!j.is_proper()) throw InvalidArgument("Cayley transfer needs a proper rational");
  if (!(j(kI).imag() > 0.0)) throw InvalidArgument("input is not Herglotz: Im J(i) <= 0");
  std::vector<Complex> zeros;
  for (auto z : detail::solve_for_value(j, kI)) {
    if (!(z.imag() > 0.0)) throw InvalidArgument("input is not Herglotz: J = i has a root off the upper half-plane");
    zeros.push_back(to_disk(z));
  }
  Complex kappa = j.value_at_infinity();
  Complex theta_inf = (1.0 + kI * kappa) / (1.0 - kI * kappa);
  Complex b1 = 1.0;
  for (auto a : zeros) b1 *= (1.0 - a) / (1.0 - std::conj(a));
  Complex c = theta_inf / b1;
  c /= std::abs(c);
  return HalfPlaneInner(BlaschkeProduct(std::move(zeros), c));
}

/// J = i (1 - theta)/(1 + theta) as a coefficient pair, scaled so the
/// denominator has leading coefficient (-1)^N like prod (t_j - z).
inline HerglotzRational cayley_inverse(const HalfPlaneInner& theta) {
  const auto& b = theta.disk();
  const int n = b.degree();
  Polynomial q({1.0}), p({b.front_constant()});
  for (auto a : b.zeros()) {
    // (z + i) - conj(a)(z - i) and (z - i) - a (z + i)
    q = q * Polynomial({kI + std::conj(a) * kI, 1.0 - std::conj(a)});
    p = p * Polynomial({-kI - a * kI, 1.0 - a});
  }
  Polynomial den = q + p;
  Polynomial num = (q - p) * kI;
  Complex scale = ((n % 2 == 0) ? 1.0 : -1.0) / den.leading();
  den = den * scale;
  num = num * scale;
  // the z^N term of the numerator cancels analytically
  auto coeffs = num.coefficients();
  if (static_cast<int>(coeffs.size()) == n + 1) {
    double mag = 0.0;
    for (auto c : coeffs) mag = std::max(mag, std::abs(c));
    if (std::abs(coeffs.back()) <= 1e-12 * mag) coeffs.pop_back();
  }
  return HerglotzRational(Polynomial(std::move(coeffs)), std::move(den));
}

}  // namespace clarklab
