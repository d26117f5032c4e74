#pragma once

#include "hypogeo/jet.hpp"

#include <array>
#include <cmath>

namespace hypogeo {

/// Pointwise geometric quantities of a level set read off a second-order jet.
///
/// curvature   A = div(eta), the intrinsic mean curvature,
/// tangent_coupling B = (-Zu + <Hess u . tau, eta>) / |grad u|,
/// identity_gap     C - |grad u|^2 (A^2 + B^2), the pointwise defect of the
///                  curvature identity (zero in exact arithmetic).
/// Nodes with |grad u| at or below the floor are degenerate: A, B are NaN and
/// the gap is reported as zero, matching the a.e. branch of the identity.
struct GeometricReport {
  double grad_norm = 0;
  std::array<double, 2> eta{0, 0};
  std::array<double, 2> tau{0, 0};
  double curvature = 0;         // A
  double tangent_coupling = 0;  // B
  double identity_gap = 0;
  double det_hess = 0;
  double ma_residual = 0;
  double bracket_quantity = 0;  // ZYu Xu - ZXu Yu
  bool degenerate = false;
};

inline GeometricReport geometric_report(const JetSample& j, double grad_floor) {
  if (!(grad_floor > 0)) throw std::invalid_argument("geometric_report: grad_floor must be positive");
  GeometricReport r;
  const double g = j.xu * j.xu + j.yu * j.yu;
  r.grad_norm = std::sqrt(g);
  r.det_hess = j.xxu * j.yyu - j.xyu * j.yxu;
  r.ma_residual = std::abs(j.xu) * std::hypot(j.xyu, j.yyu) - std::abs(j.yu) * std::hypot(j.xxu, j.yxu);
  r.bracket_quantity = (j.zyu && j.zxu) ? (*j.zyu * j.xu - *j.zxu * j.yu)
                                        : std::numeric_limits<double>::quiet_NaN();

  if (r.grad_norm <= grad_floor) {
    r.degenerate = true;
    r.curvature = std::numeric_limits<double>::quiet_NaN();
    r.tangent_coupling = std::numeric_limits<double>::quiet_NaN();
    r.eta = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    r.tau = r.eta;
    r.identity_gap = 0.0;  // a.e. zero branch of the identity
    return r;
  }

  r.eta = {j.xu / r.grad_norm, j.yu / r.grad_norm};
  r.tau = {j.yu / r.grad_norm, -j.xu / r.grad_norm};

  const double gn3 = g * r.grad_norm;
  const double a_num = j.xxu * j.yu * j.yu - (j.xyu + j.yxu) * j.xu * j.yu + j.yyu * j.xu * j.xu;
  const double b_num = j.xxu * j.xu * j.yu - j.xyu * j.xu * j.xu + j.yxu * j.yu * j.yu - j.yyu * j.xu * j.yu;
  r.curvature = a_num / gn3;
  r.tangent_coupling = b_num / gn3;

  const double sumsq = j.xxu * j.xxu + j.xyu * j.xyu + j.yxu * j.yxu + j.yyu * j.yyu;
  const double qx = j.xu * j.xxu + j.yu * j.xyu;
  const double qy = j.xu * j.yxu + j.yu * j.yyu;
  const double c = sumsq - (qx * qx + qy * qy) / g;
  r.identity_gap = c - g * (r.curvature * r.curvature + r.tangent_coupling * r.tangent_coupling);
  return r;
}

/// The two residuals that vanish when A = B = 0 on a neighbourhood:
/// det(Hess u) and |Xu| |grad Yu| - |Yu| |grad Xu|.
inline std::pair<double, double> monge_ampere_check(const JetSample& j) {
  const double det = j.xxu * j.yyu - j.xyu * j.yxu;
  const double bal = std::abs(j.xu) * std::hypot(j.xyu, j.yyu) - std::abs(j.yu) * std::hypot(j.xxu, j.yxu);
  return {det, bal};
}

}  // namespace hypogeo
