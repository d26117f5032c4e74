#pragma once

#include "hypogeo/eigensolve.hpp"
#include "hypogeo/solver.hpp"

#include <numeric>

namespace hypogeo {

/// Linearization of the semilinear system at a state u: the block operator
/// phi -> Delta phi_i - sum_j dH_i/du_j (u) phi_j on interior unknowns, with
/// Dirichlet-zero rows eliminated.
struct LinearizedOperator {
  SparseOperator base;                 // scalar sub-Laplacian with index maps
  Eigen::SparseMatrix<double> block;   // m N_int x m N_int
  int m = 1;
  std::string frame_name;
};

inline LinearizedOperator assemble_linearized(const Grid& grid, const Frame& frame,
                                              const NonlinearSystem& sys,
                                              const std::vector<GridFunction>& u) {
  if (static_cast<int>(u.size()) != sys.m)
    throw std::invalid_argument("assemble_linearized: component count mismatch");
  for (const auto& ui : u)
    if (!(ui.grid == grid)) throw std::invalid_argument("assemble_linearized: grid mismatch");
  LinearizedOperator lin;
  lin.base = assemble_sublaplacian(grid, frame);
  lin.block = detail::newton_matrix(lin.base, sys, u);
  lin.m = sys.m;
  lin.frame_name = frame.name;
  return lin;
}

struct StabilityCertificate {
  double lambda_min = 0;        // smallest eigenvalue of minus the linearization
  double residual = 0;          // eigen-residual, bounds |lambda error|
  bool stable = false;          // lambda_min >= -margin
  double margin = 1e-6;
  std::vector<GridFunction> phi;
  int iterations = 0;
};

struct EigenOptions {
  double rel_tol = 1e-8;
  int max_iter = 600;
  double margin = 1e-6;
};

/// Smallest eigenvalue of -(linearized operator) by shifted inverse
/// iteration; the state is declared numerically stable iff it is >= -margin.
inline StabilityCertificate smallest_eigenvalue(const LinearizedOperator& lin,
                                                const EigenOptions& opts = {}) {
  Eigen::SparseMatrix<double> M = -lin.block;
  auto er = smallest_eigenvalue_sym(M, opts.rel_tol, opts.max_iter);
  if (!er.converged) throw std::runtime_error("smallest_eigenvalue: iteration did not converge");
  StabilityCertificate cert;
  cert.lambda_min = er.lambda;
  cert.residual = er.residual;
  cert.margin = opts.margin;
  cert.stable = er.lambda >= -opts.margin;
  cert.iterations = er.iterations;

  const auto Nin = static_cast<Eigen::Index>(lin.base.interior_ids.size());
  cert.phi.assign(static_cast<size_t>(lin.m), GridFunction(lin.base.grid));
  for (int c = 0; c < lin.m; ++c)
    for (Eigen::Index n = 0; n < Nin; ++n)
      cert.phi[static_cast<size_t>(c)][lin.base.interior_ids[static_cast<size_t>(n)]] =
          er.vector(n + static_cast<Eigen::Index>(c) * Nin);
  return cert;
}

namespace detail {

inline void require_compact_support(const std::vector<GridFunction>& zeta) {
  for (const auto& z : zeta)
    for (std::int64_t p = 0; p < z.grid.node_count(); ++p)
      if (z.grid.boundary_distance(p) < 2 && z[p] != 0.0)
        throw std::invalid_argument("test function is not compactly supported (nonzero near boundary)");
}

inline double field_grad_sq(const GridFunction& f, const Frame& frame, std::int64_t p,
                            std::span<const std::int64_t> stride) {
  const double fx = field_derivative(f, frame.X, p, stride);
  const double fy = field_derivative(f, frame.Y, p, stride);
  return fx * fx + fy * fy;
}

}  // namespace detail

/// Quadrature of the stability inequality: returns
///   sum_i int |grad zeta_i|^2 + sum_ij int dH_i/du_j (u) zeta_i zeta_j,
/// which is nonnegative (up to quadrature error) at any stable state.
inline double stability_inequality_gap(const std::vector<GridFunction>& u,
                                       const NonlinearSystem& sys, const Frame& frame,
                                       const std::vector<GridFunction>& zeta) {
  if (static_cast<int>(u.size()) != sys.m || static_cast<int>(zeta.size()) != sys.m)
    throw std::invalid_argument("stability_inequality_gap: component count mismatch");
  detail::require_compact_support(zeta);
  const Grid& g = u[0].grid;
  const auto stride = detail::strides(g);
  const double vol = g.cell_volume();
  const int m = sys.m;

  double rhs = 0, lhs = 0;
  std::vector<double> uval(static_cast<size_t>(m));
  Eigen::MatrixXd jm(m, m);
  for (std::int64_t p = 0; p < g.node_count(); ++p) {
    if (g.boundary_distance(p) < 1) continue;
    for (int c = 0; c < m; ++c)
      rhs += detail::field_grad_sq(zeta[static_cast<size_t>(c)], frame, p, stride) * vol;
    for (int c = 0; c < m; ++c) uval[static_cast<size_t>(c)] = u[static_cast<size_t>(c)][p];
    sys.jacobian(uval, jm);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        lhs -= jm(i, j) * zeta[static_cast<size_t>(i)][p] * zeta[static_cast<size_t>(j)][p] * vol;
  }
  return rhs - lhs;
}

/// Named pieces of the geometric Poincare inequality.
struct InequalityReport {
  double curvature_term = 0;  // sum_i int |grad u_i|^2 (A_i^2 + B_i^2) zeta_i^2, unmasked set
  double bracket_term = 0;    // minus sum_i int 2 (ZYu_i Xu_i - ZXu_i Yu_i) zeta_i^2
  double coupling_term = 0;   // cross-component Jacobian term, zero for m = 1
  double rhs = 0;             // sum_i int |grad u_i|^2 |grad zeta_i|^2
  double gap = 0;             // rhs - (curvature + bracket + coupling)
  double masked_fraction = 0;
  double lhs_total() const { return curvature_term + bracket_term + coupling_term; }
};

struct PoincareOptions {
  double grad_floor = 1e-8;
  double residual_threshold = 1e-6;  // refuse states that do not solve the system
};

/// Evaluates the geometric Poincare inequality at a solved state.  All terms
/// are integrated over nodes carrying a full jet stencil; nodes below the
/// gradient floor contribute zero to both sides.
inline InequalityReport poincare_gap(const std::vector<GridFunction>& u, const NonlinearSystem& sys,
                                     const Frame& frame, const std::vector<GridFunction>& zeta,
                                     const PoincareOptions& opts = {}) {
  if (static_cast<int>(u.size()) != sys.m || static_cast<int>(zeta.size()) != sys.m)
    throw std::invalid_argument("poincare_gap: component count mismatch");
  detail::require_compact_support(zeta);
  const Grid& g = u[0].grid;

  {
    const auto op = assemble_sublaplacian(g, frame);
    const double resid = detail::semilinear_residual(op, sys, u).lpNorm<Eigen::Infinity>();
    if (resid > opts.residual_threshold)
      throw std::runtime_error("poincare_gap: state residual " + std::to_string(resid) +
                               " exceeds threshold; the inequality is only asserted for solutions");
  }

  const auto stride = detail::strides(g);
  const double vol = g.cell_volume();
  const int m = sys.m;

  InequalityReport rep;
  std::int64_t total = 0, masked = 0;
  std::vector<double> uval(static_cast<size_t>(m));
  std::vector<JetSample> jets(static_cast<size_t>(m));
  std::vector<GeometricReport> reports(static_cast<size_t>(m));
  Eigen::MatrixXd jm(m, m);

  for (std::int64_t p = 0; p < g.node_count(); ++p) {
    if (g.boundary_distance(p) < 2) continue;
    ++total;
    for (int c = 0; c < m; ++c) {
      jets[static_cast<size_t>(c)] = jet_from_grid(u[static_cast<size_t>(c)], p, frame);
      reports[static_cast<size_t>(c)] = geometric_report(jets[static_cast<size_t>(c)], opts.grad_floor);
    }
    bool any_masked = false;
    for (int c = 0; c < m; ++c) any_masked |= reports[static_cast<size_t>(c)].degenerate;
    if (any_masked) {
      ++masked;
      continue;  // masked nodes contribute zero to both sides
    }

    for (int c = 0; c < m; ++c) {
      const auto& rp = reports[static_cast<size_t>(c)];
      const double z = zeta[static_cast<size_t>(c)][p];
      const double g2 = rp.grad_norm * rp.grad_norm;
      rep.curvature_term +=
          g2 * (rp.curvature * rp.curvature + rp.tangent_coupling * rp.tangent_coupling) * z * z * vol;
      rep.bracket_term -= 2 * rp.bracket_quantity * z * z * vol;
      rep.rhs += g2 * detail::field_grad_sq(zeta[static_cast<size_t>(c)], frame, p, stride) * vol;
    }

    if (m > 1) {
      for (int c = 0; c < m; ++c) uval[static_cast<size_t>(c)] = u[static_cast<size_t>(c)][p];
      sys.jacobian(uval, jm);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (i == j) continue;
          const auto& ji = jets[static_cast<size_t>(i)];
          const auto& jj = jets[static_cast<size_t>(j)];
          const double dot = ji.xu * jj.xu + ji.yu * jj.yu;
          const double ni = reports[static_cast<size_t>(i)].grad_norm;
          const double nj = reports[static_cast<size_t>(j)].grad_norm;
          const double zi = zeta[static_cast<size_t>(i)][p];
          const double zj = zeta[static_cast<size_t>(j)][p];
          rep.coupling_term += jm(i, j) * (dot * zi * zi - ni * nj * zi * zj) * vol;
        }
    }
  }
  rep.gap = rep.rhs - rep.lhs_total();
  rep.masked_fraction = total ? static_cast<double>(masked) / static_cast<double>(total) : 0.0;
  return rep;
}

struct PointwiseCertificate {
  double linearized_residual = 0;                 // max-node defect of the linearized system
  std::vector<double> sign_constancy;             // per component, fraction agreeing with majority
  double cross_sign_fraction = 1.0;               // m >= 2: nodes with dH_i/du_j phi_i phi_j < 0
};

/// Checks a candidate sign-definite solution of the linearized system (the
/// literal pointwise-stability witness, e.g. phi = d/dx of an x-monotone
/// state).
inline PointwiseCertificate pointwise_certificate(const std::vector<GridFunction>& u,
                                                  const NonlinearSystem& sys, const Frame& frame,
                                                  const std::vector<GridFunction>& phi) {
  if (static_cast<int>(u.size()) != sys.m || static_cast<int>(phi.size()) != sys.m)
    throw std::invalid_argument("pointwise_certificate: component count mismatch");
  bool any = false;
  for (const auto& p : phi)
    for (double v : p.values) any |= (v != 0.0);
  if (!any) throw std::invalid_argument("pointwise_certificate: phi vanishes identically");

  const Grid& g = u[0].grid;
  const int m = sys.m;
  const auto op = assemble_sublaplacian(g, frame);

  PointwiseCertificate cert;
  // residual of Delta phi_i = sum_j dH_i/du_j (u) phi_j on interior nodes
  const auto Nin = static_cast<Eigen::Index>(op.interior_ids.size());
  std::vector<double> uval(static_cast<size_t>(m));
  Eigen::MatrixXd jm(m, m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd r = op.apply(phi[static_cast<size_t>(i)]);
    for (Eigen::Index n = 0; n < Nin; ++n) {
      const auto id = op.interior_ids[static_cast<size_t>(n)];
      for (int c = 0; c < m; ++c) uval[static_cast<size_t>(c)] = u[static_cast<size_t>(c)][id];
      sys.jacobian(uval, jm);
      double coupling = 0;
      for (int j = 0; j < m; ++j) coupling += jm(i, j) * phi[static_cast<size_t>(j)][id];
      cert.linearized_residual = std::max(cert.linearized_residual, std::abs(r(n) - coupling));
    }
  }

  // per-component sign constancy against the majority sign
  for (int c = 0; c < m; ++c) {
    std::int64_t pos = 0, neg = 0;
    for (double v : phi[static_cast<size_t>(c)].values) {
      if (v > 0) ++pos;
      if (v < 0) ++neg;
    }
    const std::int64_t majority = std::max(pos, neg);
    const std::int64_t minority = std::min(pos, neg);
    const auto nonzero = pos + neg;
    cert.sign_constancy.push_back(nonzero ? 1.0 - static_cast<double>(minority) /
                                                      static_cast<double>(nonzero)
                                          : 1.0);
  }

  if (m >= 2) {
    std::int64_t ok = 0, total = 0;
    for (std::int64_t p = 0; p < g.node_count(); ++p) {
      for (int c = 0; c < m; ++c) uval[static_cast<size_t>(c)] = u[static_cast<size_t>(c)][p];
      sys.jacobian(uval, jm);
      bool all = true;
      for (int i = 0; i < m && all; ++i)
        for (int j = 0; j < m && all; ++j) {
          if (i == j) continue;
          all = jm(i, j) * phi[static_cast<size_t>(i)][p] * phi[static_cast<size_t>(j)][p] < 0;
        }
      ++total;
      if (all) ++ok;
    }
    cert.cross_sign_fraction = total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
  }
  return cert;
}

}  // namespace hypogeo
