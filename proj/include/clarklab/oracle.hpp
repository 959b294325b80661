#pragma once

// Dense-matrix reference computations: spectral measures of a vector for a
// Hermitian or unitary matrix, unitarity defects and Krylov cyclicity.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "clarklab/errors.hpp"
#include "clarklab/measures.hpp"

namespace clarklab {

inline constexpr int kMaxDenseDimension = 4096;

/// Spectral measure of v for the real symmetric matrix a.
inline LineAtomicMeasure hermitian_spectral_measure(const Eigen::MatrixXd& a, const Eigen::VectorXd& v) {
  if (a.rows() != a.cols() || a.rows() != v.size()) throw InvalidArgument("dimension mismatch");
  if (a.rows() > kMaxDenseDimension) throw InvalidArgument("dense oracle limited to N <= 4096");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw EigensolverError("symmetric eigensolver did not converge");
  Eigen::VectorXd proj = solver.eigenvectors().transpose() * v;
  std::vector<Atom> atoms;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    double m = proj(k) * proj(k);
    if (m > 0.0) atoms.push_back({solver.eigenvalues()(k), m});
  }
  return LineAtomicMeasure(std::move(atoms));
}

/// ||u* u - I||_2.
inline double unitarity_defect(const Eigen::MatrixXcd& u) {
  Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(d, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Spectral measure of v for the unitary matrix u, from a complex Schur
/// decomposition (diagonal for normal matrices).
inline CircleAtomicMeasure unitary_spectral_measure(const Eigen::MatrixXcd& u, const Eigen::VectorXcd& v) {
  if (u.rows() != u.cols() || u.rows() != v.size()) throw InvalidArgument("dimension mismatch");
  if (u.rows() > kMaxDenseDimension) throw InvalidArgument("dense oracle limited to N <= 4096");
  if (unitarity_defect(u) > 1e-9) throw InvalidArgument("matrix is not unitary to 1e-9");
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  if (schur.info() != Eigen::Success) throw EigensolverError("complex Schur decomposition did not converge");
  Eigen::VectorXcd proj = schur.matrixU().adjoint() * v;
  std::vector<Atom> atoms;
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    double m = std::norm(proj(k));
    if (m > 0.0) atoms.push_back({angle_of(schur.matrixT()(k, k)), m});
  }
  return CircleAtomicMeasure(std::move(atoms));
}

/// Dimension of the Krylov space span{v, Mv, M^2 v, ...} by Arnoldi with
/// two passes of Gram-Schmidt; a new direction counts when its norm exceeds
/// rel_tol times the norm of the vector it came from.
inline int krylov_rank(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v, double rel_tol = 1e-10) {
  const Eigen::Index n = m.rows();
  double nv = v.norm();
  if (nv == 0.0) return 0;
  std::vector<Eigen::VectorXcd> basis{v / nv};
  while (static_cast<Eigen::Index>(basis.size()) < n) {
    Eigen::VectorXcd w = m * basis.back();
    double scale = w.norm();
    if (scale == 0.0) break;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) w -= q * q.dot(w);
    double r = w.norm();
    if (r <= rel_tol * scale) break;
    basis.push_back(w / r);
  }
  return static_cast<int>(basis.size());
}

}  // namespace clarklab
