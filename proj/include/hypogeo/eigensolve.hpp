#pragma once

#include "hypogeo/symcalc.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <stdexcept>

namespace hypogeo {

struct EigenResult {
  double lambda = 0;
  Eigen::VectorXd vector;
  int iterations = 0;
  int factorizations = 0;
  bool converged = false;
  double residual = 0;  // ||M v - lambda v||, a posteriori bound on |error|
};

/// Smallest eigenvalue of a symmetric sparse matrix by shifted inverse
/// iteration.  The shift starts at the Gershgorin lower bound (safely below
/// the spectrum, so the factorization is positive definite) and is pulled up
/// toward the Rayleigh quotient as the iterate settles; a factorization whose
/// LDL^T diagonal goes negative means the shift crossed the spectrum and is
/// backed off.  For symmetric M the returned residual bounds |lambda - exact|.
inline EigenResult smallest_eigenvalue_sym(const Eigen::SparseMatrix<double>& M,
                                           double rel_tol = 1e-8, int max_iter = 600) {
  if (M.rows() != M.cols()) throw std::invalid_argument("smallest_eigenvalue_sym: square matrix required");
  const Eigen::Index n = M.rows();

  // Gershgorin bounds
  Eigen::VectorXd diag = M.diagonal();
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(n);
  for (int col = 0; col < M.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M, col); it; ++it)
      if (it.row() != it.col()) radius(it.row()) += std::abs(it.value());
  const double lo = (diag - radius).minCoeff();
  const double hi = (diag + radius).maxCoeff();
  const double span = std::max(hi - lo, 1.0);

  EigenResult res;
  double sigma = lo - 1e-6 * span;
  Eigen::SparseMatrix<double> shifted(n, n);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact;
  Eigen::SparseMatrix<double> ident(n, n);
  ident.setIdentity();

  auto factorize = [&](double s) {
    shifted = M - s * ident;
    fact.compute(shifted);
    ++res.factorizations;
    return fact.info() == Eigen::Success && fact.vectorD().minCoeff() > 0;
  };
  if (!factorize(sigma)) throw std::runtime_error("smallest_eigenvalue_sym: initial factorization failed");

  // deterministic start vector
  SampleStream stream(0x5eed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = stream.next_unit() - 0.5;
  v.normalize();

  double rho = v.dot(M * v);
  const double tol = rel_tol * std::max(1.0, std::abs(rho));
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = fact.solve(v);
    const double wn = w.norm();
    if (!(wn > 0) || !std::isfinite(wn))
      throw std::runtime_error("smallest_eigenvalue_sym: inverse iteration breakdown");
    v = w / wn;
    rho = v.dot(M * v);
    res.residual = (M * v - rho * v).norm();
    ++res.iterations;
    if (res.residual <= rel_tol * std::max(1.0, std::abs(rho))) {
      res.converged = true;
      break;
    }
    // pull the shift toward the Rayleigh quotient once per block of iterations
    if (it % 8 == 7 && res.factorizations < 12) {
      double target = rho - std::max(4 * res.residual, 1e-3 * rel_tol * span);
      if (target > sigma + tol) {
        double trial = target;
        bool ok = factorize(trial);
        int backoff = 0;
        while (!ok && backoff++ < 6) {
          trial = 0.5 * (trial + sigma);
          ok = factorize(trial);
        }
        if (ok)
          sigma = trial;
        else
          factorize(sigma);  // restore a valid factorization
      }
    }
  }
  res.lambda = rho;
  res.vector = std::move(v);
  return res;
}

}  // namespace hypogeo
