#pragma once

#include "hypogeo/calculus.hpp"
#include "hypogeo/grid.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace hypogeo {

/// Discrete sub-Laplacian split into the action on interior unknowns and the
/// coupling to Dirichlet boundary nodes:  (L u)_interior = interior * u_I +
/// boundary * u_B.  The interior block is symmetric negative semidefinite by
/// construction (it is minus a sum of squared face differences).
struct SparseOperator {
  Grid grid;
  Eigen::SparseMatrix<double> interior;
  Eigen::SparseMatrix<double> boundary;
  std::vector<std::int64_t> interior_ids;        // interior index -> node id
  std::vector<std::int64_t> boundary_ids;        // boundary index -> node id
  std::vector<std::int64_t> node_to_interior;    // node id -> interior index or -1
  std::vector<std::int64_t> node_to_boundary;    // node id -> boundary index or -1

  Eigen::VectorXd restrict_interior(const GridFunction& u) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(interior_ids.size()));
    for (std::size_t i = 0; i < interior_ids.size(); ++i)
      v(static_cast<Eigen::Index>(i)) = u[interior_ids[i]];
    return v;
  }

  Eigen::VectorXd restrict_boundary(const GridFunction& u) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(boundary_ids.size()));
    for (std::size_t i = 0; i < boundary_ids.size(); ++i)
      v(static_cast<Eigen::Index>(i)) = u[boundary_ids[i]];
    return v;
  }

  /// Residual of the operator applied to a full grid function, on interior nodes.
  Eigen::VectorXd apply(const GridFunction& u) const {
    return interior * restrict_interior(u) + boundary * restrict_boundary(u);
  }
};

/// Flux-form assembly of X(X.) + Y(Y.) with homogeneous Dirichlet elimination.
///
/// The operator is expanded as sum_ab A_ab d_a d_b + sum_b c_b d_b with
/// A = X X^T + Y Y^T and c_b = X(X_b) + Y(Y_b).  Diagonal terms are
/// discretized in flux form with the coefficient sampled at cell faces (the
/// classical face-sampled x^2 flux on the Grushin plane), mixed terms by the
/// centered four-point cross stencil, first-order terms by centered
/// differences.  For every built-in frame c vanishes and each A_ab is
/// constant along the axes it differentiates, which makes the interior matrix
/// symmetric and negative semidefinite and the stencil second-order
/// consistent at every interior node (exact on quadratics when A is
/// axis-diagonal).
inline SparseOperator assemble_sublaplacian(const Grid& grid, const Frame& frame) {
  if (grid.cell_centered()) throw std::invalid_argument("assemble: vertex grid required");
  if (grid.dim() != frame.dim()) throw std::invalid_argument("assemble: frame/grid dimension mismatch");
  for (int a = 0; a < grid.dim(); ++a)
    if (grid.nodes(a) < 3) throw std::invalid_argument("assemble: need at least 3 nodes per axis");

  const int dim = grid.dim();
  const std::int64_t N = grid.node_count();

  SparseOperator op;
  op.grid = grid;
  op.node_to_interior.assign(static_cast<size_t>(N), -1);
  op.node_to_boundary.assign(static_cast<size_t>(N), -1);
  for (std::int64_t p = 0; p < N; ++p) {
    if (grid.is_boundary(p)) {
      op.node_to_boundary[static_cast<size_t>(p)] = static_cast<std::int64_t>(op.boundary_ids.size());
      op.boundary_ids.push_back(p);
    } else {
      op.node_to_interior[static_cast<size_t>(p)] = static_cast<std::int64_t>(op.interior_ids.size());
      op.interior_ids.push_back(p);
    }
  }

  // symbol data: A_ab (upper triangle) and the first-order part c_b
  std::vector<Polynomial> A(static_cast<size_t>(dim * dim), Polynomial(dim));
  std::vector<Polynomial> c(static_cast<size_t>(dim), Polynomial(dim));
  for (const VectorField* f : {&frame.X, &frame.Y}) {
    for (int a = 0; a < dim; ++a) {
      for (int b = a; b < dim; ++b)
        A[static_cast<size_t>(a * dim + b)] +=
            f->coeffs[static_cast<size_t>(a)] * f->coeffs[static_cast<size_t>(b)];
      c[static_cast<size_t>(a)] += apply_field(*f, f->coeffs[static_cast<size_t>(a)]);
    }
  }

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> tin, tbd;
  const std::array<std::int64_t, 3> stride{1, grid.nodes(0),
                                           static_cast<std::int64_t>(grid.nodes(0)) * grid.nodes(1)};

  auto add = [&](std::int64_t row_id, std::int64_t col_id, double v) {
    if (v == 0.0) return;
    const std::int64_t ri = op.node_to_interior[static_cast<size_t>(row_id)];
    if (ri < 0) return;  // Dirichlet rows eliminated
    const std::int64_t ci = op.node_to_interior[static_cast<size_t>(col_id)];
    if (ci >= 0)
      tin.emplace_back(static_cast<int>(ri), static_cast<int>(ci), v);
    else
      tbd.emplace_back(static_cast<int>(ri),
                       static_cast<int>(op.node_to_boundary[static_cast<size_t>(col_id)]), v);
  };

  std::vector<double> pt(static_cast<size_t>(dim));
  const std::array<int, 3> nn{grid.nodes(0), grid.nodes(1), dim == 3 ? grid.nodes(2) : 1};
  for (int k = 0; k < nn[2]; ++k)
    for (int j = 0; j < nn[1]; ++j)
      for (int i = 0; i < nn[0]; ++i) {
        const std::array<int, 3> ijk{i, j, k};
        const std::int64_t p = grid.id(i, j, k);
        if (grid.is_boundary(p)) continue;
        pt[0] = grid.coord(0, i);
        pt[1] = grid.coord(1, j);
        if (dim == 3) pt[2] = grid.coord(2, k);

        for (int a = 0; a < dim; ++a) {
          // d_a(A_aa d_a u), coefficient at the two a-faces of the node
          const auto& Aaa = A[static_cast<size_t>(a * dim + a)];
          if (!Aaa.is_zero()) {
            const double save = pt[static_cast<size_t>(a)];
            pt[static_cast<size_t>(a)] = save + 0.5 * grid.h(a);
            const double wp = Aaa.evaluate_at(pt) / (grid.h(a) * grid.h(a));
            pt[static_cast<size_t>(a)] = save - 0.5 * grid.h(a);
            const double wm = Aaa.evaluate_at(pt) / (grid.h(a) * grid.h(a));
            pt[static_cast<size_t>(a)] = save;
            const std::int64_t sa = stride[static_cast<size_t>(a)];
            add(p, p + sa, wp);
            add(p, p - sa, wm);
            add(p, p, -(wp + wm));
          }

          // first-order remainder c_a d_a u (zero for all built-in frames)
          const auto& ca = c[static_cast<size_t>(a)];
          if (!ca.is_zero()) {
            const double cv = ca.evaluate_at(pt) / (2 * grid.h(a));
            const std::int64_t sa = stride[static_cast<size_t>(a)];
            add(p, p + sa, cv);
            add(p, p - sa, -cv);
          }

          // mixed terms 2 A_ab d_a d_b u by the centered cross stencil
          for (int b = a + 1; b < dim; ++b) {
            const auto& Aab = A[static_cast<size_t>(a * dim + b)];
            if (Aab.is_zero()) continue;
            const double m = 2 * Aab.evaluate_at(pt) / (4 * grid.h(a) * grid.h(b));
            if (m == 0.0) continue;
            const std::int64_t sa = stride[static_cast<size_t>(a)];
            const std::int64_t sb = stride[static_cast<size_t>(b)];
            add(p, p + sa + sb, m);
            add(p, p - sa - sb, m);
            add(p, p + sa - sb, -m);
            add(p, p - sa + sb, -m);
          }
        }
        (void)ijk;
      }

  op.interior.resize(static_cast<Eigen::Index>(op.interior_ids.size()),
                     static_cast<Eigen::Index>(op.interior_ids.size()));
  op.boundary.resize(static_cast<Eigen::Index>(op.interior_ids.size()),
                     static_cast<Eigen::Index>(op.boundary_ids.size()));
  op.interior.setFromTriplets(tin.begin(), tin.end());
  op.boundary.setFromTriplets(tbd.begin(), tbd.end());
  op.interior.makeCompressed();
  op.boundary.makeCompressed();
  return op;
}

// --------------------------------------------------------------- grid jets

namespace detail {

inline double centered_diff(const GridFunction& u, std::int64_t p, int axis, std::int64_t stride) {
  return (u[p + stride] - u[p - stride]) / (2 * u.grid.h(axis));
}

/// (F u)(p) with centered differences and node-sampled coefficients.
inline double field_derivative(const GridFunction& u, const VectorField& f, std::int64_t p,
                               std::span<const std::int64_t> stride) {
  const auto pt = u.grid.point(p);
  double s = 0;
  for (int a = 0; a < u.grid.dim(); ++a) {
    const auto& c = f.coeffs[static_cast<size_t>(a)];
    if (c.is_zero()) continue;
    const double cv = c.evaluate_at(pt);
    if (cv != 0.0) s += cv * centered_diff(u, p, a, stride[static_cast<size_t>(a)]);
  }
  return s;
}

/// (F (G u))(p) by nested application of the first-order stencils.
inline double nested_derivative(const GridFunction& u, const VectorField& outer,
                                const VectorField& inner, std::int64_t p,
                                std::span<const std::int64_t> stride) {
  const auto pt = u.grid.point(p);
  double s = 0;
  for (int a = 0; a < u.grid.dim(); ++a) {
    const auto& c = outer.coeffs[static_cast<size_t>(a)];
    if (c.is_zero()) continue;
    const double cv = c.evaluate_at(pt);
    if (cv == 0.0) continue;
    const std::int64_t st = stride[static_cast<size_t>(a)];
    const double gp = field_derivative(u, inner, p + st, stride);
    const double gm = field_derivative(u, inner, p - st, stride);
    s += cv * (gp - gm) / (2 * u.grid.h(a));
  }
  return s;
}

inline std::array<std::int64_t, 3> strides(const Grid& g) {
  return {1, g.nodes(0), static_cast<std::int64_t>(g.nodes(0)) * g.nodes(1)};
}

}  // namespace detail

/// Full second-order jet (plus the Z(Xu), Z(Yu) extension) from centered
/// differences.  The node must be at least 2 nodes away from the boundary.
inline JetSample jet_from_grid(const GridFunction& u, std::int64_t node, const Frame& frame) {
  if (u.grid.dim() != frame.dim()) throw std::invalid_argument("jet_from_grid: dimension mismatch");
  if (u.grid.boundary_distance(node) < 2)
    throw std::invalid_argument("jet_from_grid: node too close to the boundary");
  const auto stride = detail::strides(u.grid);

  JetSample j;
  j.point = u.grid.point(node);
  j.u = u[node];
  j.xu = detail::field_derivative(u, frame.X, node, stride);
  j.yu = detail::field_derivative(u, frame.Y, node, stride);
  j.zu = detail::field_derivative(u, frame.Z, node, stride);
  j.xxu = detail::nested_derivative(u, frame.X, frame.X, node, stride);
  j.xyu = detail::nested_derivative(u, frame.X, frame.Y, node, stride);
  j.yxu = detail::nested_derivative(u, frame.Y, frame.X, node, stride);
  j.yyu = detail::nested_derivative(u, frame.Y, frame.Y, node, stride);
  j.zxu = detail::nested_derivative(u, frame.Z, frame.X, node, stride);
  j.zyu = detail::nested_derivative(u, frame.Z, frame.Y, node, stride);
  return j;
}

}  // namespace hypogeo
