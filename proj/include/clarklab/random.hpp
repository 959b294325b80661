#pragma once

// Seeded generators. Every stream is derived from one 64-bit seed plus a
// stream index, so results do not depend on scheduling order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "clarklab/herglotz.hpp"
#include "clarklab/rank_one.hpp"

namespace clarklab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  /// Independent generator for a sub-task.
  Rng split(std::uint64_t stream) { return Rng(engine_() ^ seed_, stream); }

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>()(engine_); }
  double exponential() { return std::exponential_distribution<double>(1.0)(engine_); }
  Complex unimodular_point() { return unimodular(uniform(0.0, kTwoPi)); }
  Complex complex_normal() { return {normal(), normal()}; }

  /// Uniform point of the disk of the given radius.
  Complex disk_point(double radius) { return std::polar(radius * std::sqrt(uniform()), uniform(0.0, kTwoPi)); }

  std::mt19937_64& engine() { return engine_; }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// n sorted points in [lo, lo + span] with consecutive gaps >= gap (and, if
/// wrap, the gap across lo + span back to lo as well).
inline std::vector<double> separated_points(Rng& rng, int n, double lo, double span, double gap, bool wrap) {
  double free = span - (wrap ? n : n - 1) * gap;
  std::vector<double> u(n);
  for (auto& x : u) x = rng.uniform(0.0, free);
  std::sort(u.begin(), u.end());
  for (int i = 0; i < n; ++i) u[i] += lo + i * gap;
  return u;
}

/// Symmetric Dirichlet(1) draw.
inline std::vector<double> dirichlet_weights(Rng& rng, int n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    do x = rng.exponential(); while (!(x > 0.0));
    total += x;
  }
  for (auto& x : w) x /= total;
  // absorb the rounding in the sum into the largest weight
  double s = 0.0;
  for (double x : w) s += x;
  *std::max_element(w.begin(), w.end()) += 1.0 - s;
  return w;
}

/// Random cyclic model: line sites in [-1, 1] or circle angles, consecutive
/// separation at least 1/(4N), Dirichlet weights.
inline CyclicOperatorModel random_model(Rng& rng, int n, ModelKind kind) {
  if (n < 1) throw InvalidArgument("random_model needs N >= 1");
  double gap = 1.0 / (4.0 * n);
  std::vector<double> sites = kind == ModelKind::line ? separated_points(rng, n, -1.0, 2.0, gap, false)
                                                      : separated_points(rng, n, 0.0, kTwoPi, gap, true);
  return CyclicOperatorModel(kind, std::move(sites), dirichlet_weights(rng, n));
}

inline CyclicOperatorModel random_model(std::uint64_t seed, int n, ModelKind kind) {
  Rng rng(seed);
  return random_model(rng, n, kind);
}

/// Random Blaschke product of degree n with zeros of modulus <= max_radius;
/// with zero_at_origin the first zero is 0 so theta(0) = 0.
inline BlaschkeProduct random_blaschke(Rng& rng, int n, bool zero_at_origin = true, double max_radius = 0.85) {
  if (n < 1) throw InvalidArgument("random_blaschke needs degree >= 1");
  std::vector<Complex> zeros;
  for (int k = 0; k < n; ++k) zeros.push_back((k == 0 && zero_at_origin) ? Complex(0.0) : rng.disk_point(max_radius));
  return BlaschkeProduct(std::move(zeros), rng.unimodular_point());
}

}  // namespace clarklab
