#pragma once

#include "hypogeo/symcalc.hpp"

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace hypogeo {

/// First and second horizontal derivatives of a scalar function at one point.
/// The optional third-order entries zxu = Z(Xu) and zyu = Z(Yu) feed the
/// bracket quantity; analytic jets carry them exactly, grid jets by one extra
/// directional difference.
struct JetSample {
  std::vector<double> point;
  double u = 0;
  double xu = 0, yu = 0, zu = 0;
  double xxu = 0, xyu = 0, yxu = 0, yyu = 0;
  std::optional<double> zxu, zyu;

  /// Defect of XYu - YXu = Zu; zero for exact jets, O(h^2) for grid jets.
  double compatibility_defect() const { return (xyu - yxu) - zu; }
};

/// Exact jet of a polynomial at a point, third-order entries included.
inline JetSample jet_of_polynomial(const Polynomial& w, const Frame& frame,
                                   std::span<const double> point) {
  if (w.dim() != frame.dim()) throw std::invalid_argument("jet_of_polynomial: dimension mismatch");
  const auto j = exact_second_jet(w, frame);
  JetSample out;
  out.point.assign(point.begin(), point.end());
  out.u = w.evaluate_at(point);
  out.xu = j.xw.evaluate_at(point);
  out.yu = j.yw.evaluate_at(point);
  out.zu = apply_field(frame.Z, w).evaluate_at(point);
  out.xxu = j.xxw.evaluate_at(point);
  out.xyu = j.xyw.evaluate_at(point);
  out.yxu = j.yxw.evaluate_at(point);
  out.yyu = j.yyw.evaluate_at(point);
  out.zxu = apply_field(frame.Z, j.xw).evaluate_at(point);
  out.zyu = apply_field(frame.Z, j.yw).evaluate_at(point);
  return out;
}

}  // namespace hypogeo
