#pragma once

#include "hypogeo/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hypogeo {

/// A coordinate vector field with polynomial coefficients:
///   F = sum_k coeffs[k] * d/dx_k.
template <class Coeff>
struct VectorFieldT {
  std::string name;
  int dim = 0;
  std::vector<PolynomialT<Coeff>> coeffs;

  bool is_zero() const {
    for (const auto& c : coeffs)
      if (!c.is_zero()) return false;
    return true;
  }
};

using VectorField = VectorFieldT<Rational>;
using ZVectorField = VectorFieldT<BigInt>;

/// F(p) = sum_k coeffs[k] * dp/dx_k, exact.
template <class Coeff>
PolynomialT<Coeff> apply_field(const VectorFieldT<Coeff>& f, const PolynomialT<Coeff>& p) {
  if (f.dim != p.dim()) throw std::invalid_argument("apply_field: dimension mismatch");
  PolynomialT<Coeff> r(p.dim());
  for (int k = 0; k < f.dim; ++k) {
    if (f.coeffs[static_cast<size_t>(k)].is_zero()) continue;
    r += f.coeffs[static_cast<size_t>(k)] * p.derivative(k);
  }
  return r;
}

/// Lie bracket [a,b], coefficient k is a(b_k) - b(a_k).
template <class Coeff>
VectorFieldT<Coeff> lie_bracket(const VectorFieldT<Coeff>& a, const VectorFieldT<Coeff>& b) {
  if (a.dim != b.dim) throw std::invalid_argument("lie_bracket: dimension mismatch");
  VectorFieldT<Coeff> r;
  r.name = "[" + a.name + "," + b.name + "]";
  r.dim = a.dim;
  r.coeffs.reserve(static_cast<size_t>(a.dim));
  for (int k = 0; k < a.dim; ++k)
    r.coeffs.push_back(apply_field(a, b.coeffs[static_cast<size_t>(k)]) -
                       apply_field(b, a.coeffs[static_cast<size_t>(k)]));
  return r;
}

inline std::vector<double> evaluate_field(const VectorField& f, std::span<const double> point) {
  if (static_cast<int>(point.size()) != f.dim)
    throw std::invalid_argument("evaluate_field: point dimension mismatch");
  std::vector<double> v(static_cast<size_t>(f.dim));
  for (int k = 0; k < f.dim; ++k) v[static_cast<size_t>(k)] = f.coeffs[static_cast<size_t>(k)].evaluate_at(point);
  return v;
}

enum class FrameKind { Euclidean2D, Grushin2D, Heisenberg3D, Martinet3D, Custom };

/// A pair of generating fields together with their bracket Z = [X,Y].
struct Frame {
  VectorField X, Y, Z;
  FrameKind kind = FrameKind::Custom;
  std::string name;

  int dim() const { return X.dim; }
};

namespace detail {

inline VectorField constant_axis_field(std::string name, int dim, int axis) {
  VectorField f{std::move(name), dim, {}};
  for (int k = 0; k < dim; ++k)
    f.coeffs.push_back(k == axis ? Polynomial::constant(dim, Rational(1)) : Polynomial::zero(dim));
  return f;
}

}  // namespace detail

inline Frame make_frame(std::string_view name) {
  using detail::constant_axis_field;
  Frame fr;
  if (name == "euclidean2d") {
    fr.kind = FrameKind::Euclidean2D;
    fr.X = constant_axis_field("X", 2, 0);
    fr.Y = constant_axis_field("Y", 2, 1);
  } else if (name == "grushin2d") {
    // X = d/dx, Y = x d/dy
    fr.kind = FrameKind::Grushin2D;
    fr.X = constant_axis_field("X", 2, 0);
    fr.Y = VectorField{"Y", 2, {Polynomial::zero(2), Polynomial::variable(2, 0)}};
  } else if (name == "heisenberg3d") {
    // X = d/dx - (y/2) d/dz, Y = d/dy + (x/2) d/dz
    fr.kind = FrameKind::Heisenberg3D;
    fr.X = VectorField{"X", 3,
                       {Polynomial::constant(3, Rational(1)), Polynomial::zero(3),
                        Polynomial::variable(3, 1) * Rational(-1, 2)}};
    fr.Y = VectorField{"Y", 3,
                       {Polynomial::zero(3), Polynomial::constant(3, Rational(1)),
                        Polynomial::variable(3, 0) * Rational(1, 2)}};
  } else if (name == "martinet3d") {
    // X = d/dx, Y = d/dy + (x^2/2) d/dz
    fr.kind = FrameKind::Martinet3D;
    fr.X = constant_axis_field("X", 3, 0);
    fr.Y = VectorField{
        "Y", 3,
        {Polynomial::zero(3), Polynomial::constant(3, Rational(1)),
         Polynomial::variable(3, 0) * Polynomial::variable(3, 0) * Rational(1, 2)}};
  } else {
    throw std::invalid_argument("unknown frame: " + std::string(name));
  }
  fr.name = std::string(name);
  fr.Z = lie_bracket(fr.X, fr.Y);
  fr.Z.name = "Z";
  return fr;
}

inline std::vector<std::string> builtin_frame_names() {
  return {"euclidean2d", "grushin2d", "heisenberg3d", "martinet3d"};
}

enum class RankMethod { Auto, Exact, Svd };

struct RankResult {
  int rank = 0;
  int depth = 0;
};

namespace detail {

inline int exact_rank(std::vector<std::vector<Rational>> rows, int ncols) {
  int rank = 0;
  for (int col = 0; col < ncols && rank < static_cast<int>(rows.size()); ++col) {
    int pivot = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (rows[static_cast<size_t>(r)][static_cast<size_t>(col)] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[static_cast<size_t>(rank)], rows[static_cast<size_t>(pivot)]);
    const auto& prow = rows[static_cast<size_t>(rank)];
    for (int r = rank + 1; r < static_cast<int>(rows.size()); ++r) {
      auto& row = rows[static_cast<size_t>(r)];
      if (row[static_cast<size_t>(col)] == 0) continue;
      Rational factor = row[static_cast<size_t>(col)] / prow[static_cast<size_t>(col)];
      for (int c = col; c < ncols; ++c) row[static_cast<size_t>(c)] -= factor * prow[static_cast<size_t>(c)];
    }
    ++rank;
  }
  return rank;
}

inline int svd_rank(const std::vector<std::vector<double>>& rows, int ncols, double tol) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), ncols);
  for (size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < ncols; ++c) m(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<size_t>(c)];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++rank;
  return rank;
}

}  // namespace detail

/// Dimension of span{X, Y, iterated brackets up to max_depth} at `point`,
/// together with the smallest bracket depth achieving that rank.
inline RankResult hormander_rank(const Frame& frame, std::span<const double> point, int max_depth,
                                 RankMethod method = RankMethod::Auto, double svd_tol = 1e-10) {
  if (max_depth < 1) throw std::invalid_argument("hormander_rank: max_depth must be >= 1");
  const int n = frame.dim();
  if (static_cast<int>(point.size()) != n) throw std::invalid_argument("hormander_rank: point dimension");

  std::vector<std::vector<VectorField>> layers;
  layers.push_back({frame.X, frame.Y});
  for (int d = 2; d <= max_depth; ++d) {
    std::vector<VectorField> next;
    for (const auto& f : layers.back())
      for (const VectorField* g : {&frame.X, &frame.Y}) {
        VectorField b = lie_bracket(f, *g);
        if (!b.is_zero()) next.push_back(std::move(b));
      }
    layers.push_back(std::move(next));
  }

  const bool exact = (method != RankMethod::Svd);
  std::vector<std::vector<Rational>> qrows;
  std::vector<std::vector<double>> drows;
  std::vector<Rational> qpoint;
  if (exact) {
    qpoint.reserve(static_cast<size_t>(n));
    for (double x : point) qpoint.push_back(rational_from_double(x));
  }

  RankResult result;
  int prev_rank = 0;
  for (int d = 1; d <= max_depth; ++d) {
    for (const auto& f : layers[static_cast<size_t>(d - 1)]) {
      if (exact) {
        std::vector<Rational> row(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k)
          row[static_cast<size_t>(k)] = f.coeffs[static_cast<size_t>(k)].evaluate<Rational>(qpoint);
        qrows.push_back(std::move(row));
      } else {
        std::vector<double> row(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) row[static_cast<size_t>(k)] = f.coeffs[static_cast<size_t>(k)].evaluate_at(point);
        drows.push_back(std::move(row));
      }
    }
    const int rank = exact ? detail::exact_rank(qrows, n) : detail::svd_rank(drows, n, svd_tol);
    if (rank > prev_rank) {
      result.rank = rank;
      result.depth = d;
      prev_rank = rank;
    }
    if (rank == n) break;
  }
  return result;
}

}  // namespace hypogeo
