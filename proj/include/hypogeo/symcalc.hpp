#pragma once

#include "hypogeo/fields.hpp"

#include <utility>

namespace hypogeo {

namespace detail {

/// A frame rescaled by the least common multiple of its coefficient
/// denominators, so all downstream arithmetic runs over plain integers.
/// The paper identities are homogeneous in (X, Y), so a residual vanishes
/// for the scaled fields iff it vanishes for the originals; the public
/// wrappers divide the scale factor back out.
struct ZFrame {
  ZVectorField X, Y, Z;
  BigInt scale = 1;
};

inline ZFrame to_integer_frame(const Frame& frame) {
  BigInt s(1);
  for (const VectorField* f : {&frame.X, &frame.Y})
    for (const auto& c : f->coeffs) s = boost::multiprecision::lcm(s, denominator_lcm(c));
  ZFrame zf;
  zf.scale = s;
  auto conv = [&](const VectorField& f) {
    ZVectorField z{f.name, f.dim, {}};
    for (const auto& c : f.coeffs) z.coeffs.push_back(to_integer(c, s));
    return z;
  };
  zf.X = conv(frame.X);
  zf.Y = conv(frame.Y);
  zf.Z = lie_bracket(zf.X, zf.Y);  // equals scale^2 * Z
  return zf;
}

template <class C>
struct SecondJet {
  PolynomialT<C> xw, yw, xxw, xyw, yxw, yyw;
};

template <class C>
SecondJet<C> second_jet(const PolynomialT<C>& w, const VectorFieldT<C>& X, const VectorFieldT<C>& Y) {
  SecondJet<C> j;
  j.xw = apply_field(X, w);
  j.yw = apply_field(Y, w);
  j.xxw = apply_field(X, j.xw);
  j.xyw = apply_field(X, j.yw);
  j.yxw = apply_field(Y, j.xw);
  j.yyw = apply_field(Y, j.yw);
  return j;
}

/// Cleared form of the level-set curvature identity.  With
///   G = (Xw)^2 + (Yw)^2,
///   P = G * (|grad Xw|^2 + |grad Yw|^2) - (Xw XXw + Yw XYw)^2 - (Xw YXw + Yw YYw)^2,
/// the identity reads G * P = A_num^2 + B_num^2, so the returned polynomial is
/// identically zero exactly when the identity holds.
template <class C>
PolynomialT<C> cleared_identity_kernel(const PolynomialT<C>& w, const VectorFieldT<C>& X,
                                       const VectorFieldT<C>& Y) {
  const auto j = second_jet(w, X, Y);
  const auto xw2 = j.xw * j.xw;
  const auto yw2 = j.yw * j.yw;
  const auto xwyw = j.xw * j.yw;
  const auto G = xw2 + yw2;
  const auto S = j.xxw * j.xxw + j.xyw * j.xyw + j.yxw * j.yxw + j.yyw * j.yyw;
  const auto qx = j.xw * j.xxw + j.yw * j.xyw;
  const auto qy = j.xw * j.yxw + j.yw * j.yyw;
  const auto P = G * S - qx * qx - qy * qy;
  const auto a_num = j.xxw * yw2 - j.xyw * xwyw - j.yxw * xwyw + j.yyw * xw2;
  const auto b_num = j.xxw * xwyw - j.xyw * xw2 + j.yxw * yw2 - j.yyw * xwyw;
  return G * P - a_num * a_num - b_num * b_num;
}

template <class C>
PolynomialT<C> sublaplacian(const PolynomialT<C>& u, const VectorFieldT<C>& X, const VectorFieldT<C>& Y) {
  return apply_field(X, apply_field(X, u)) + apply_field(Y, apply_field(Y, u));
}

inline BigInt pow_int(const BigInt& b, unsigned e) {
  BigInt r(1);
  for (unsigned i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace detail

using ExactSecondJet = detail::SecondJet<Rational>;

/// All horizontal derivatives of w up to second order, exact.
inline ExactSecondJet exact_second_jet(const Polynomial& w, const Frame& frame) {
  return detail::second_jet(w, frame.X, frame.Y);
}

/// A-number of a jet: XXw (Yw)^2 - XYw Xw Yw - YXw Xw Yw + YYw (Xw)^2.
/// Equals |grad w|^3 times the intrinsic level-set curvature.
template <class C>
PolynomialT<C> curvature_numerator(const detail::SecondJet<C>& j) {
  return j.xxw * (j.yw * j.yw) - (j.xyw + j.yxw) * (j.xw * j.yw) + j.yyw * (j.xw * j.xw);
}

/// B-number of a jet: XXw Xw Yw - XYw (Xw)^2 + YXw (Yw)^2 - YYw Xw Yw.
template <class C>
PolynomialT<C> tangent_coupling_numerator(const detail::SecondJet<C>& j) {
  return j.xxw * (j.xw * j.yw) - j.xyw * (j.xw * j.xw) + j.yxw * (j.yw * j.yw) - j.yyw * (j.xw * j.yw);
}

/// Exact residual of the cleared curvature identity; zero iff the identity holds.
inline Polynomial cleared_identity_residual(const Polynomial& w, const Frame& frame) {
  if (w.dim() != frame.dim()) throw std::invalid_argument("cleared_identity_residual: dimension mismatch");
  const auto zf = detail::to_integer_frame(frame);
  const BigInt t = denominator_lcm(w);
  const ZPolynomial zw = to_integer(w, t);
  ZPolynomial res = detail::cleared_identity_kernel(zw, zf.X, zf.Y);
  Polynomial out = to_rational(res);
  // the kernel is homogeneous of degree 8 in the fields and 6 in w
  Rational unscale = Rational(detail::pow_int(zf.scale, 8) * detail::pow_int(t, 6));
  out.divide_coefficients(unscale);
  return out;
}

/// Residual pair of the commutation identities
///   X Delta u = Delta Xu + 2 Z Yu   and   Y Delta u = Delta Yu - 2 Z Xu,
/// returned as (Delta Xu + 2 Z Yu - X Delta u, Delta Yu - 2 Z Xu - Y Delta u).
/// Both vanish identically whenever Z = [X,Y] commutes with X and Y.
inline std::pair<Polynomial, Polynomial> commutation_residual(const Polynomial& u, const Frame& frame) {
  if (u.dim() != frame.dim()) throw std::invalid_argument("commutation_residual: dimension mismatch");
  const auto zf = detail::to_integer_frame(frame);
  const BigInt t = denominator_lcm(u);
  const ZPolynomial zu = to_integer(u, t);

  const ZPolynomial xu = apply_field(zf.X, zu);
  const ZPolynomial yu = apply_field(zf.Y, zu);
  const ZPolynomial del = detail::sublaplacian(zu, zf.X, zf.Y);
  // zf.Z carries a scale^2 factor, so Z(Yu) terms pick up scale^3 like the rest
  ZPolynomial r1 = detail::sublaplacian(xu, zf.X, zf.Y) + BigInt(2) * apply_field(zf.Z, yu) -
                   apply_field(zf.X, del);
  ZPolynomial r2 = detail::sublaplacian(yu, zf.X, zf.Y) - BigInt(2) * apply_field(zf.Z, xu) -
                   apply_field(zf.Y, del);

  Rational unscale = Rational(detail::pow_int(zf.scale, 3) * t);
  Polynomial q1 = to_rational(r1);
  Polynomial q2 = to_rational(r2);
  q1.divide_coefficients(unscale);
  q2.divide_coefficients(unscale);
  return {std::move(q1), std::move(q2)};
}

/// Six-variable polynomial identity behind the curvature decomposition:
///   (a e - b d)^2 (e^2 + d^2) + (c e - d' d)^2 (e^2 + d^2)
///     = (a e^2 - (b+c) e d + d' d^2)^2 + (c e^2 + (a - d') e d - b d^2)^2,
/// with variables ordered (a, b, c, d, eps, delta).  Returns the difference,
/// which must be the zero polynomial.
inline Polynomial algebraic_lemma_residual() {
  using Z = ZPolynomial;
  const int n = 6;
  const Z a = Z::variable(n, 0);
  const Z b = Z::variable(n, 1);
  const Z c = Z::variable(n, 2);
  const Z d = Z::variable(n, 3);
  const Z eps = Z::variable(n, 4);
  const Z del = Z::variable(n, 5);

  const Z s = eps * eps + del * del;
  const Z lhs = (a * eps - b * del) * (a * eps - b * del) * s +
                (c * eps - d * del) * (c * eps - d * del) * s;
  const Z r1 = a * (eps * eps) - (b + c) * (eps * del) + d * (del * del);
  const Z r2 = c * (eps * eps) + (a - d) * (eps * del) - b * (del * del);
  const Z rhs = r1 * r1 + r2 * r2;
  return to_rational(lhs - rhs);
}

/// Deterministic random polynomial with integer coefficients in
/// [-max_abs_coeff, max_abs_coeff], covering all monomials of total degree
/// <= degree.  Guaranteed nonzero.  The generator is a SplitMix64 stream so
/// samples are reproducible across platforms.
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// uniform integer in [lo, hi]
  long long next_int(long long lo, long long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long long>(next_u64() % span);
  }

  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  Polynomial random_polynomial(int dim, int degree, int max_abs_coeff = 3) {
    Polynomial p(dim);
    std::vector<unsigned> e(static_cast<size_t>(dim), 0);
    bool nonzero = false;
    auto total = [&] {
      unsigned t = 0;
      for (unsigned v : e) t += v;
      return static_cast<int>(t);
    };
    // odometer over all exponent tuples with total degree <= degree
    while (true) {
      const long long c = next_int(-max_abs_coeff, max_abs_coeff);
      if (c != 0) {
        p += Polynomial::monomial(dim, e, Rational(c));
        nonzero = true;
      }
      int k = dim - 1;
      while (k >= 0) {
        ++e[static_cast<size_t>(k)];
        if (total() <= degree) break;
        e[static_cast<size_t>(k)] = 0;
        --k;
      }
      if (k < 0) break;
    }
    if (!nonzero) p += Polynomial::monomial(dim, std::vector<unsigned>(static_cast<size_t>(dim), 0), Rational(1));
    return p;
  }

 private:
  std::uint64_t state_;
};

}  // namespace hypogeo
