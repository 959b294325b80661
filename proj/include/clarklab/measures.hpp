#pragma once

// Finite positive atomic measures on the real line and the unit circle,
// their Cauchy/Poisson transforms and the Simon-Wolff integral.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "clarklab/errors.hpp"

namespace clarklab {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Positions closer than this (relative to max(1, |x|)) are the same atom.
inline constexpr double kAtomMergeTolerance = 1e-12;

/// Maps an angle into [0, 2pi).
inline double normalize_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Distance between two angles measured along the circle, in [0, pi].
inline double angle_distance(double a, double b) {
  double d = normalize_angle(a - b);
  return std::min(d, kTwoPi - d);
}

inline Complex unimodular(double angle) { return std::polar(1.0, angle); }

inline double angle_of(Complex z) { return normalize_angle(std::arg(z)); }

inline bool positions_coincide(double a, double b) {
  return std::abs(a - b) <= kAtomMergeTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Nonnegative real that may be +infinity, kept as an explicit tag.
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal infinity() { return {std::numeric_limits<double>::infinity(), true}; }
  static ExtendedReal finite(double v) { return {v, false}; }

  bool is_finite() const { return !infinite; }
  friend bool operator==(const ExtendedReal&, const ExtendedReal&) = default;
};

struct Atom {
  double position;  // real point, or angle in [0, 2pi) on the circle
  double mass;
};

namespace detail {

inline void validate_masses(const std::vector<Atom>& atoms) {
  for (const auto& a : atoms) {
    if (!std::isfinite(a.position)) throw InvalidArgument("atom position must be finite");
    if (!(a.mass > 0.0) || !std::isfinite(a.mass))
      throw InvalidArgument("atom masses must be finite and strictly positive");
  }
}

// Sorts and merges atoms whose positions coincide; masses are summed and the
// merged position is the mass-weighted mean.
inline std::vector<Atom> merge_sorted(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.position < b.position; });
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (!out.empty() && positions_coincide(out.back().position, a.position)) {
      auto& b = out.back();
      double m = b.mass + a.mass;
      b.position = (b.position * b.mass + a.position * a.mass) / m;
      b.mass = m;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace detail

/// Finite positive atomic measure on R, atoms sorted by position.
class LineAtomicMeasure {
public:
  LineAtomicMeasure() = default;

  explicit LineAtomicMeasure(std::vector<Atom> atoms) {
    detail::validate_masses(atoms);
    atoms_ = detail::merge_sorted(std::move(atoms));
  }

  static LineAtomicMeasure dirac(double x, double mass = 1.0) { return LineAtomicMeasure({{x, mass}}); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  std::vector<double> positions() const {
    std::vector<double> p;
    p.reserve(atoms_.size());
    for (const auto& a : atoms_) p.push_back(a.position);
    return p;
  }
  std::vector<double> masses() const {
    std::vector<double> m;
    m.reserve(atoms_.size());
    for (const auto& a : atoms_) m.push_back(a.mass);
    return m;
  }

private:
  std::vector<Atom> atoms_;
};

/// Finite positive atomic measure on T; atom positions are angles in [0, 2pi).
class CircleAtomicMeasure {
public:
  CircleAtomicMeasure() = default;

  explicit CircleAtomicMeasure(std::vector<Atom> atoms) {
    detail::validate_masses(atoms);
    for (auto& a : atoms) a.position = normalize_angle(a.position);
    atoms = detail::merge_sorted(std::move(atoms));
    // an atom just below 2pi and one at 0 are the same point
    if (atoms.size() > 1 && positions_coincide(atoms.back().position, kTwoPi + atoms.front().position)) {
      atoms.front().mass += atoms.back().mass;
      atoms.pop_back();
    }
    atoms_ = std::move(atoms);
  }

  static CircleAtomicMeasure dirac(double angle, double mass = 1.0) {
    return CircleAtomicMeasure({{angle, mass}});
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  Complex point(std::size_t i) const { return unimodular(atoms_[i].position); }

  std::vector<double> angles() const {
    std::vector<double> p;
    p.reserve(atoms_.size());
    for (const auto& a : atoms_) p.push_back(a.position);
    return p;
  }
  std::vector<double> masses() const {
    std::vector<double> m;
    m.reserve(atoms_.size());
    for (const auto& a : atoms_) m.push_back(a.mass);
    return m;
  }

private:
  std::vector<Atom> atoms_;
};

/// Finite union of disjoint closed intervals (line) or closed arcs (circle).
///
/// An arc is stored as [start, end] with start in [0, 2pi) and
/// 0 < end - start <= 2pi. Endpoints belong to the set.
class BorelSet {
public:
  enum class Space { line, circle };

  struct Piece {
    double lo;
    double hi;
  };

  static BorelSet intervals(std::vector<Piece> pieces) {
    for (const auto& p : pieces)
      if (!(p.lo <= p.hi) || !std::isfinite(p.lo) || !std::isfinite(p.hi))
        throw InvalidArgument("interval must satisfy lo <= hi with finite endpoints");
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < pieces.size(); ++i)
      if (!(pieces[i - 1].hi < pieces[i].lo)) throw InvalidArgument("intervals must be pairwise disjoint");
    return BorelSet(Space::line, std::move(pieces));
  }

  /// Arcs given as (start angle, end angle) traversed counterclockwise.
  static BorelSet arcs(std::vector<Piece> pieces) {
    for (auto& p : pieces) {
      if (!std::isfinite(p.lo) || !std::isfinite(p.hi)) throw InvalidArgument("arc endpoints must be finite");
      double len = p.hi - p.lo;
      if (!(len >= 0.0) || len > kTwoPi + 1e-15) throw InvalidArgument("arc length must lie in [0, 2pi]");
      p.lo = normalize_angle(p.lo);
      p.hi = p.lo + std::min(len, kTwoPi);
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < pieces.size(); ++i)
      if (!(pieces[i - 1].hi < pieces[i].lo)) throw InvalidArgument("arcs must be pairwise disjoint");
    if (pieces.size() > 1 && !(pieces.back().hi < pieces.front().lo + kTwoPi))
      throw InvalidArgument("arcs must be pairwise disjoint");
    return BorelSet(Space::circle, std::move(pieces));
  }

  static BorelSet full_circle() { return arcs({{0.0, kTwoPi}}); }

  Space space() const { return space_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  bool contains(double x) const {
    for (const auto& p : pieces_) {
      if (space_ == Space::line) {
        if (x >= p.lo && x <= p.hi) return true;
      } else {
        double len = p.hi - p.lo;
        if (len >= kTwoPi) return true;
        double d = normalize_angle(x - p.lo);
        if (d <= len + 1e-13 || d >= kTwoPi - 1e-13) return true;
      }
    }
    return false;
  }

  /// Lebesgue length |B| (line) or arc length in radians (circle).
  double length() const {
    double s = 0.0;
    for (const auto& p : pieces_) s += p.hi - p.lo;
    return s;
  }

  /// Normalized arc length m(B) = length / 2pi; only meaningful on the circle.
  double normalized_length() const { return length() / kTwoPi; }

  /// All piece endpoints (angles normalized on the circle).
  std::vector<double> endpoints() const {
    std::vector<double> e;
    for (const auto& p : pieces_) {
      if (space_ == Space::circle) {
        if (p.hi - p.lo >= kTwoPi) continue;
        e.push_back(normalize_angle(p.lo));
        e.push_back(normalize_angle(p.hi));
      } else {
        e.push_back(p.lo);
        e.push_back(p.hi);
      }
    }
    return e;
  }

private:
  BorelSet(Space s, std::vector<Piece> p) : space_(s), pieces_(std::move(p)) {}

  Space space_;
  std::vector<Piece> pieces_;
};

inline double total_mass(std::span<const Atom> atoms) {
  double s = 0.0;
  for (const auto& a : atoms) s += a.mass;
  return s;
}
inline double total_mass(const LineAtomicMeasure& mu) { return total_mass(mu.atoms()); }
inline double total_mass(const CircleAtomicMeasure& nu) { return total_mass(nu.atoms()); }

inline double measure_of(const LineAtomicMeasure& mu, const BorelSet& b) {
  if (b.space() != BorelSet::Space::line) throw InvalidArgument("line measure needs a set of intervals");
  double s = 0.0;
  for (const auto& a : mu.atoms())
    if (b.contains(a.position)) s += a.mass;
  return s;
}

inline double measure_of(const CircleAtomicMeasure& nu, const BorelSet& b) {
  if (b.space() != BorelSet::Space::circle) throw InvalidArgument("circle measure needs a set of arcs");
  double s = 0.0;
  for (const auto& a : nu.atoms())
    if (b.contains(a.position)) s += a.mass;
  return s;
}

/// K mu(z) = sum m_j / (t_j - z).
inline Complex cauchy_transform_line(const LineAtomicMeasure& mu, Complex z) {
  Complex s = 0.0;
  for (const auto& a : mu.atoms()) {
    Complex d = a.position - z;
    if (d == 0.0) throw PoleError("Cauchy transform evaluated at an atom");
    s += a.mass / d;
  }
  return s;
}

/// K nu(z) = sum m_j / (1 - conj(xi_j) z), |z| < 1.
inline Complex cauchy_transform_disk(const CircleAtomicMeasure& nu, Complex z) {
  if (!(std::abs(z) < 1.0)) throw DomainError("disk Cauchy transform needs |z| < 1");
  Complex s = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) s += nu.atoms()[j].mass / (1.0 - std::conj(nu.point(j)) * z);
  return s;
}

/// P nu(z) = sum m_j (1 - |z|^2) / |xi_j - z|^2, |z| < 1.
inline double poisson_integral_disk(const CircleAtomicMeasure& nu, Complex z) {
  if (!(std::abs(z) < 1.0)) throw DomainError("Poisson integral needs |z| < 1");
  double r = 1.0 - std::norm(z);
  double s = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) s += nu.atoms()[j].mass * r / std::norm(nu.point(j) - z);
  return s;
}

/// sum m_j / (t_j - y)^2, or the infinite tag when y is an atom.
inline ExtendedReal simon_wolff_integral(const LineAtomicMeasure& mu, double y) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) {
    if (positions_coincide(a.position, y)) return ExtendedReal::infinity();
    double d = a.position - y;
    s += a.mass / (d * d);
  }
  return ExtendedReal::finite(s);
}

/// sum m_j / |xi - xi_j|^2 for unimodular xi, or the infinite tag at an atom.
inline ExtendedReal simon_wolff_integral_circle(const CircleAtomicMeasure& nu, Complex xi) {
  if (std::abs(std::abs(xi) - 1.0) > 1e-10) throw DomainError("Simon-Wolff probe must be unimodular");
  double t = angle_of(xi);
  double s = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (angle_distance(nu.atoms()[j].position, t) <= kAtomMergeTolerance) return ExtendedReal::infinity();
    s += nu.atoms()[j].mass / std::norm(xi - nu.point(j));
  }
  return ExtendedReal::finite(s);
}

/// The measure w * nu, atoms with zero weight dropped; used for |f|^2 mu.
inline CircleAtomicMeasure reweighted(const CircleAtomicMeasure& nu, std::span<const double> weights) {
  if (weights.size() != nu.size()) throw InvalidArgument("one weight per atom required");
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    double m = nu.atoms()[j].mass * weights[j];
    if (m > 0.0) atoms.push_back({nu.atoms()[j].position, m});
  }
  return CircleAtomicMeasure(std::move(atoms));
}

}  // namespace clarklab
