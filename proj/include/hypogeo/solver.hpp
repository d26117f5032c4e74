#pragma once

#include "hypogeo/assemble.hpp"
#include "hypogeo/system.hpp"

#include <Eigen/SparseLU>

#include <functional>
#include <vector>

namespace hypogeo {

/// Per-component Dirichlet data evaluated on boundary nodes.
using BoundaryData = std::function<double(std::span<const double> point, int component)>;

struct SolveOptions {
  double tol = 1e-8;        // max-node residual
  int max_iter = 50;        // Newton iterations
  int flow_budget = 400;    // semi-implicit flow steps when Newton stagnates
  double flow_tau = 0.5;
  double armijo_min_step = 1.0 / 1024.0;
};

struct SolveResult {
  std::vector<GridFunction> u;
  double residual_norm = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
  std::string failure;
};

namespace detail {

/// Newton matrix blockdiag(L) - diag blocks of the Jacobian, on interior
/// unknowns of all components.
inline Eigen::SparseMatrix<double> newton_matrix(const SparseOperator& op,
                                                 const NonlinearSystem& sys,
                                                 const std::vector<GridFunction>& u) {
  const auto Nin = static_cast<Eigen::Index>(op.interior_ids.size());
  const int m = sys.m;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(op.interior.nonZeros()) * static_cast<size_t>(m) +
                static_cast<size_t>(Nin) * static_cast<size_t>(m * m));
  for (int c = 0; c < m; ++c)
    for (int col = 0; col < op.interior.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(op.interior, col); it; ++it)
        trips.emplace_back(static_cast<int>(it.row() + c * Nin), static_cast<int>(it.col() + c * Nin),
                           it.value());

  std::vector<double> uval(static_cast<size_t>(m));
  Eigen::MatrixXd jm(m, m);
  for (Eigen::Index n = 0; n < Nin; ++n) {
    const auto id = op.interior_ids[static_cast<size_t>(n)];
    for (int c = 0; c < m; ++c) uval[static_cast<size_t>(c)] = u[static_cast<size_t>(c)][id];
    sys.jacobian(uval, jm);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (jm(i, j) != 0.0)
          trips.emplace_back(static_cast<int>(n + i * Nin), static_cast<int>(n + j * Nin), -jm(i, j));
  }
  Eigen::SparseMatrix<double> J(Nin * m, Nin * m);
  J.setFromTriplets(trips.begin(), trips.end());
  J.makeCompressed();
  return J;
}

/// Residual F(u) = L u - H(u) stacked over components, interior nodes only.
inline Eigen::VectorXd semilinear_residual(const SparseOperator& op, const NonlinearSystem& sys,
                                           const std::vector<GridFunction>& u) {
  const auto Nin = static_cast<Eigen::Index>(op.interior_ids.size());
  const int m = sys.m;
  Eigen::VectorXd F(Nin * m);
  for (int c = 0; c < m; ++c) F.segment(c * Nin, Nin) = op.apply(u[static_cast<size_t>(c)]);
  std::vector<double> uval(static_cast<size_t>(m)), hval(static_cast<size_t>(m));
  for (Eigen::Index n = 0; n < Nin; ++n) {
    const auto id = op.interior_ids[static_cast<size_t>(n)];
    for (int c = 0; c < m; ++c) uval[static_cast<size_t>(c)] = u[static_cast<size_t>(c)][id];
    sys.H(uval, hval);
    for (int c = 0; c < m; ++c) F(n + c * Nin) -= hval[static_cast<size_t>(c)];
  }
  return F;
}

inline void add_to_interior(std::vector<GridFunction>& u, const SparseOperator& op,
                            const Eigen::VectorXd& delta, double step) {
  const auto Nin = static_cast<Eigen::Index>(op.interior_ids.size());
  for (std::size_t c = 0; c < u.size(); ++c)
    for (Eigen::Index n = 0; n < Nin; ++n)
      u[c][op.interior_ids[static_cast<size_t>(n)]] +=
          step * delta(n + static_cast<Eigen::Index>(c) * Nin);
}

}  // namespace detail

/// Per-axis blend of the boundary trace; linear interpolation in each axis.
inline std::vector<GridFunction> boundary_blend_init(const Grid& grid, const BoundaryData& bc, int m) {
  std::vector<GridFunction> u(static_cast<size_t>(m), GridFunction(grid));
  for (int c = 0; c < m; ++c) {
    for (std::int64_t p = 0; p < grid.node_count(); ++p) {
      auto pt = grid.point(p);
      double acc = 0;
      for (int a = 0; a < grid.dim(); ++a) {
        auto plo = pt, phi = pt;
        plo[static_cast<size_t>(a)] = grid.lo(a);
        phi[static_cast<size_t>(a)] = grid.hi(a);
        const double s = (pt[static_cast<size_t>(a)] - grid.lo(a)) / (grid.hi(a) - grid.lo(a));
        acc += (1 - s) * bc(plo, c) + s * bc(phi, c);
      }
      u[static_cast<size_t>(c)][p] = acc / grid.dim();
    }
    // boundary nodes carry the data exactly
    for (std::int64_t p = 0; p < grid.node_count(); ++p)
      if (grid.is_boundary(p)) u[static_cast<size_t>(c)][p] = bc(grid.point(p), c);
  }
  return u;
}

/// Damped Newton on F(u) = L u - H(u) with Armijo backtracking on the
/// residual norm and a semi-implicit gradient-flow fallback
/// u <- (I - tau L)^{-1} (u - tau H(u)) when Newton stagnates.
inline SolveResult solve_semilinear(const Grid& grid, const Frame& frame, const NonlinearSystem& sys,
                                    const BoundaryData& bc,
                                    std::vector<GridFunction> init = {},
                                    const SolveOptions& opts = {}) {
  if (!(opts.tol > 0)) throw std::invalid_argument("solve_semilinear: tol must be positive");
  const auto op = assemble_sublaplacian(grid, frame);
  const auto Nin = static_cast<Eigen::Index>(op.interior_ids.size());
  const int m = sys.m;

  std::vector<GridFunction> u = init.empty() ? boundary_blend_init(grid, bc, m) : std::move(init);
  if (static_cast<int>(u.size()) != m) throw std::invalid_argument("solve_semilinear: init arity");
  for (int c = 0; c < m; ++c)
    for (std::int64_t p = 0; p < grid.node_count(); ++p)
      if (grid.is_boundary(p)) u[static_cast<size_t>(c)][p] = bc(grid.point(p), c);

  SolveResult res;
  Eigen::VectorXd F = detail::semilinear_residual(op, sys, u);
  double fnorm = F.lpNorm<Eigen::Infinity>();
  double best = fnorm;
  res.history.push_back(fnorm);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  std::optional<Eigen::SparseLU<Eigen::SparseMatrix<double>>> flow_lu;

  int stagnant = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    if (fnorm <= opts.tol) break;

    lu.compute(detail::newton_matrix(op, sys, u));
    if (lu.info() != Eigen::Success) {
      res.failure = "linear solve breakdown in Newton matrix factorization";
      res.u = std::move(u);
      res.residual_norm = fnorm;
      res.iterations = it;
      return res;
    }
    Eigen::VectorXd delta = lu.solve(-F);

    // Armijo backtracking on ||F||
    double step = 1.0;
    std::vector<GridFunction> trial = u;
    detail::add_to_interior(trial, op, delta, step);
    Eigen::VectorXd Ft = detail::semilinear_residual(op, sys, trial);
    double ft = Ft.lpNorm<Eigen::Infinity>();
    while (ft > (1 - 0.25 * step) * fnorm && step > opts.armijo_min_step) {
      step *= 0.5;
      trial = u;
      detail::add_to_interior(trial, op, delta, step);
      Ft = detail::semilinear_residual(op, sys, trial);
      ft = Ft.lpNorm<Eigen::Infinity>();
    }
    u = std::move(trial);
    F = std::move(Ft);
    fnorm = ft;
    res.history.push_back(fnorm);
    ++res.iterations;

    if (fnorm > 10 * best) {
      res.failure = "divergence: residual grew 10x over the best iterate";
      res.u = std::move(u);
      res.residual_norm = fnorm;
      return res;
    }
    best = std::min(best, fnorm);

    // stagnation: reduction < 1e-3 over the last 5 iterations
    const std::size_t k = res.history.size();
    if (k >= 6 && res.history[k - 1] > 1e-3 * res.history[k - 6])
      ++stagnant;
    else
      stagnant = 0;

    if (stagnant > 0 && fnorm > opts.tol) {
      // semi-implicit gradient flow until the Newton basin is re-entered
      if (!flow_lu) {
        Eigen::SparseMatrix<double> A(Nin, Nin);
        A.setIdentity();
        A -= opts.flow_tau * op.interior;
        flow_lu.emplace();
        flow_lu->compute(A);
        if (flow_lu->info() != Eigen::Success) {
          res.failure = "linear solve breakdown in flow matrix factorization";
          res.u = std::move(u);
          res.residual_norm = fnorm;
          return res;
        }
      }
      const double entry = fnorm;
      std::vector<double> uval(static_cast<size_t>(m)), hval(static_cast<size_t>(m));
      for (int fs = 0; fs < opts.flow_budget && fnorm > std::min(0.1 * entry, opts.tol * 100);
           ++fs) {
        for (int c = 0; c < m; ++c) {
          Eigen::VectorXd rhs(Nin);
          for (Eigen::Index n = 0; n < Nin; ++n) {
            const auto id = op.interior_ids[static_cast<size_t>(n)];
            for (int cc = 0; cc < m; ++cc) uval[static_cast<size_t>(cc)] = u[static_cast<size_t>(cc)][id];
            sys.H(uval, hval);
            rhs(n) = u[static_cast<size_t>(c)][id] - opts.flow_tau * hval[static_cast<size_t>(c)];
          }
          rhs += opts.flow_tau * (op.boundary * op.restrict_boundary(u[static_cast<size_t>(c)]));
          Eigen::VectorXd unew = flow_lu->solve(rhs);
          for (Eigen::Index n = 0; n < Nin; ++n)
            u[static_cast<size_t>(c)][op.interior_ids[static_cast<size_t>(n)]] = unew(n);
        }
        F = detail::semilinear_residual(op, sys, u);
        fnorm = F.lpNorm<Eigen::Infinity>();
      }
      res.history.push_back(fnorm);
      best = std::min(best, fnorm);
      stagnant = 0;
    }
  }

  res.residual_norm = fnorm;
  res.converged = fnorm <= opts.tol;
  if (!res.converged && res.failure.empty()) res.failure = "iteration budget exhausted";
  res.u = std::move(u);
  return res;
}

}  // namespace hypogeo
