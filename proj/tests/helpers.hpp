#pragma once

// Shared fixtures for the unit and acceptance suites: a one-dimensional
// reference solver for u'' = f(u) used as an independent oracle for the
// grid solver, plus small grid builders.

#include "hypogeo/solver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

namespace hypogeo::testing {

struct Profile1D {
  std::vector<double> x;
  std::vector<double> u;
  double h = 0;

  double at_node(std::size_t i) const { return u[i]; }
  /// piecewise-linear evaluation (nodes are exact, used for boundary traces)
  double operator()(double xq) const {
    if (xq <= x.front()) return u.front();
    if (xq >= x.back()) return u.back();
    const auto s = (xq - x.front()) / h;
    const auto i = static_cast<std::size_t>(s);
    const double t = s - static_cast<double>(i);
    return (1 - t) * u[i] + t * u[i + 1];
  }
};

/// Newton solve of the three-point scheme for u'' = f(u) on [a, b] with
/// Dirichlet ends; init is sampled from `guess`.
inline Profile1D solve_profile_1d(double a, double b, int cells,
                                  const std::function<double(double)>& f,
                                  const std::function<double(double)>& fprime,
                                  const std::function<double(double)>& guess, double ua, double ub,
                                  double tol = 1e-12, int max_iter = 60) {
  Profile1D prof;
  prof.h = (b - a) / cells;
  prof.x.resize(static_cast<size_t>(cells) + 1);
  prof.u.resize(static_cast<size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) {
    prof.x[static_cast<size_t>(i)] = a + i * prof.h;
    prof.u[static_cast<size_t>(i)] = guess(prof.x[static_cast<size_t>(i)]);
  }
  prof.u.front() = ua;
  prof.u.back() = ub;

  const int n = cells - 1;
  const double ih2 = 1.0 / (prof.h * prof.h);
  Eigen::VectorXd F(n);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int it = 0; it < max_iter; ++it) {
    for (int i = 0; i < n; ++i) {
      const double um = prof.u[static_cast<size_t>(i)];
      const double uc = prof.u[static_cast<size_t>(i) + 1];
      const double up = prof.u[static_cast<size_t>(i) + 2];
      F(i) = (um - 2 * uc + up) * ih2 - f(uc);
    }
    if (F.lpNorm<Eigen::Infinity>() < tol) break;
    J.setZero();
    for (int i = 0; i < n; ++i) {
      J(i, i) = -2 * ih2 - fprime(prof.u[static_cast<size_t>(i) + 1]);
      if (i > 0) J(i, i - 1) = ih2;
      if (i + 1 < n) J(i, i + 1) = ih2;
    }
    Eigen::VectorXd d = J.partialPivLu().solve(-F);
    for (int i = 0; i < n; ++i) prof.u[static_cast<size_t>(i) + 1] += d(i);
  }
  return prof;
}

/// The discrete Allen-Cahn transition profile on [-L, L].
inline Profile1D allen_cahn_profile(double L, int cells) {
  auto f = [](double u) { return u * u * u - u; };
  auto fp = [](double u) { return 3 * u * u - 1; };
  auto guess = [](double x) { return std::tanh(x / std::sqrt(2.0)); };
  return solve_profile_1d(-L, L, cells, f, fp, guess, guess(-L), guess(L));
}

inline Grid make_grid2(double xlo, double xhi, double ylo, double yhi, int nx_cells, int ny_cells,
                       bool centered = false) {
  const double lo[2] = {xlo, ylo}, hi[2] = {xhi, yhi};
  const int n[2] = {nx_cells, ny_cells};
  return Grid(2, lo, hi, n, centered);
}

}  // namespace hypogeo::testing
