#pragma once

// Adaptive Gauss-Kronrod on intervals and the doubling trapezoid rule on the
// circle. Both return a value together with an a posteriori error estimate.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "clarklab/errors.hpp"
#include "clarklab/measures.hpp"

namespace clarklab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_intervals = 4000;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive G7-K15 on [a, b]; the error estimate is |K15 - G7|
/// summed over the final partition.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, QuadratureOptions opt = {}) {
  if (!(opt.abs_tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
  QuadratureResult res;
  if (a == b) return res;
  std::priority_queue<detail::Segment> heap;
  auto first = detail::kronrod15(f, a, b);
  res.evaluations = 15;
  double total = first.value;
  double error = first.error;
  heap.push(first);
  std::vector<detail::Segment> frozen;  // too narrow to split further
  int intervals = 1;
  while (error > opt.abs_tol && !heap.empty()) {
    if (intervals >= opt.max_intervals) {
      std::ostringstream os;
      os << "adaptive quadrature did not converge on [" << a << ", " << b << "]: estimate " << total
         << ", error " << error << " > " << opt.abs_tol;
      throw QuadratureError(os.str());
    }
    auto s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b) ||
        (s.b - s.a) < 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(s.a), std::abs(s.b))) {
      frozen.push_back(s);
      continue;
    }
    auto l = detail::kronrod15(f, s.a, mid);
    auto r = detail::kronrod15(f, mid, s.b);
    res.evaluations += 30;
    total += l.value + r.value - s.value;
    error += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
    ++intervals;
  }
  // re-sum to shed the drift of the running updates
  total = 0.0;
  error = 0.0;
  for (; !heap.empty(); heap.pop()) {
    total += heap.top().value;
    error += heap.top().error;
  }
  for (const auto& s : frozen) {
    total += s.value;
    error += s.error;
  }
  if (error > opt.abs_tol) {
    std::ostringstream os;
    os << "adaptive quadrature stalled on [" << a << ", " << b << "]: error " << error << " > " << opt.abs_tol;
    throw QuadratureError(os.str());
  }
  res.value = total;
  res.error = error;
  return res;
}

/// Integrates over [breaks.front(), breaks.back()] splitting at every break;
/// the tolerance is shared evenly between the pieces.
template <class F>
QuadratureResult integrate_piecewise(F&& f, std::vector<double> breaks, QuadratureOptions opt = {}) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  QuadratureResult res;
  if (breaks.size() < 2) return res;
  QuadratureOptions piece = opt;
  piece.abs_tol = opt.abs_tol / static_cast<double>(breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    auto r = integrate_adaptive(f, breaks[i], breaks[i + 1], piece);
    res.value += r.value;
    res.error += r.error;
    res.evaluations += r.evaluations;
  }
  return res;
}

struct PeriodicOptions {
  double abs_tol = 1e-10;
  int initial_points = 16;
  int max_points = 1 << 20;
};

/// Mean value (1/2pi) int_0^{2pi} f(t) dt of a smooth periodic f by the
/// trapezoid rule, doubling until two successive sums agree to abs_tol.
template <class F>
QuadratureResult periodic_mean(F&& f, PeriodicOptions opt = {}) {
  if (!(opt.abs_tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
  QuadratureResult res;
  int n = std::max(1, opt.initial_points);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += f(kTwoPi * k / n);
  res.evaluations = n;
  double mean = sum / n;
  while (true) {
    if (2 * n > opt.max_points) {
      std::ostringstream os;
      os << "periodic trapezoid did not stabilize within " << opt.max_points << " points";
      throw QuadratureError(os.str());
    }
    double odd = 0.0;
    for (int k = 0; k < n; ++k) odd += f(kTwoPi * (2 * k + 1) / (2.0 * n));
    res.evaluations += n;
    sum += odd;
    n *= 2;
    double next = sum / n;
    double diff = std::abs(next - mean);
    mean = next;
    if (diff <= opt.abs_tol) {
      res.value = mean;
      res.error = diff;
      return res;
    }
  }
}

}  // namespace clarklab
