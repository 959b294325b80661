#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <initializer_list>
#include <vector>

#include "clarklab/errors.hpp"
#include "clarklab/measures.hpp"

namespace clarklab {

/// Dense complex polynomial, coefficients in ascending degree.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<Complex> coeffs) : c_(coeffs) { trim(); }

  static Polynomial constant(Complex a) { return Polynomial({a}); }

  /// prod_j (z - r_j)
  static Polynomial from_roots(const std::vector<Complex>& roots) {
    Polynomial p({1.0});
    for (auto r : roots) p = p * Polynomial({-r, 1.0});
    return p;
  }

  const std::vector<Complex>& coefficients() const { return c_; }

  /// Degree of the zero polynomial is reported as -1.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  Complex leading() const { return c_.empty() ? Complex(0.0) : c_.back(); }
  Complex coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : Complex(0.0); }

  Complex operator()(Complex z) const {
    Complex s = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * z + *it;
    return s;
  }

  /// sum |c_k| |z|^k, the natural scale for a relative residual at z.
  double magnitude_at(Complex z) const {
    double s = 0.0;
    double az = std::abs(z);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * az + std::abs(*it);
    return s;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Complex> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Complex> r(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a.coefficient(k) + b.coefficient(k);
    return Polynomial(std::move(r));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + b * Complex(-1.0); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Complex> r(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(const Polynomial& a, Complex s) {
    std::vector<Complex> r(a.c_);
    for (auto& x : r) x *= s;
    return Polynomial(std::move(r));
  }

  /// Synthetic division by (z - r); the remainder is dropped.
  Polynomial deflate(Complex r) const {
    if (c_.size() <= 1) return {};
    std::vector<Complex> q(c_.size() - 1);
    Complex carry = 0.0;
    for (std::size_t k = c_.size(); k-- > 1;) {
      carry = c_[k] + carry * r;
      q[k - 1] = carry;
    }
    return Polynomial(std::move(q));
  }

  /// Roots as eigenvalues of the companion matrix.
  std::vector<Complex> roots() const {
    const int n = degree();
    if (n <= 0) return {};
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c_[i] / c_[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw EigensolverError("companion eigensolver failed");
    std::vector<Complex> r(n);
    for (int i = 0; i < n; ++i) r[i] = solver.eigenvalues()(i);
    return r;
  }

private:
  void trim() {
    while (!c_.empty() && c_.back() == Complex(0.0)) c_.pop_back();
  }

  std::vector<Complex> c_;
};

}  // namespace clarklab
