#pragma once

#include "hypogeo/rational.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <sstream>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hypogeo {

/// Sparse multivariate polynomial with exact coefficients.
///
/// Monomials are packed into a 64-bit key: the total degree occupies the top
/// byte and each exponent one byte below it, first variable highest.  Plain
/// integer comparison of keys is then exactly graded-lexicographic order, and
/// monomial multiplication is key addition.  Terms are kept sorted by key with
/// no stored zero coefficients, so equality is memberwise.
template <class Coeff>
class PolynomialT {
 public:
  static constexpr int kMaxDim = 7;
  static constexpr unsigned kMaxExp = 200;  // per-variable cap, keeps bytes from carrying

  using Key = std::uint64_t;
  using Term = std::pair<Key, Coeff>;

  PolynomialT() = default;
  explicit PolynomialT(int dim) : dim_(check_dim(dim)) {}

  static PolynomialT zero(int dim) { return PolynomialT(dim); }

  static PolynomialT constant(int dim, Coeff c) {
    PolynomialT p(dim);
    if (!(c == Coeff(0))) p.terms_.emplace_back(0, std::move(c));
    return p;
  }

  /// The coordinate monomial x_var.
  static PolynomialT variable(int dim, int var) {
    PolynomialT p(dim);
    std::vector<unsigned> e(dim, 0);
    e[static_cast<size_t>(var)] = 1;
    p.terms_.emplace_back(pack(e), Coeff(1));
    return p;
  }

  static PolynomialT monomial(int dim, std::span<const unsigned> exps, Coeff c) {
    PolynomialT p(dim);
    if (static_cast<int>(exps.size()) != dim) throw std::invalid_argument("monomial: exponent count");
    if (!(c == Coeff(0))) p.terms_.emplace_back(pack(exps), std::move(c));
    return p;
  }

  int dim() const { return dim_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }

  int degree() const {
    if (terms_.empty()) return -1;
    return static_cast<int>(terms_.back().first >> 56);
  }

  bool operator==(const PolynomialT& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }
  bool operator!=(const PolynomialT& o) const { return !(*this == o); }

  PolynomialT operator-() const {
    PolynomialT r(*this);
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }

  PolynomialT& operator+=(const PolynomialT& o) { return *this = merged(*this, o, false); }
  PolynomialT& operator-=(const PolynomialT& o) { return *this = merged(*this, o, true); }
  friend PolynomialT operator+(const PolynomialT& a, const PolynomialT& b) { return merged(a, b, false); }
  friend PolynomialT operator-(const PolynomialT& a, const PolynomialT& b) { return merged(a, b, true); }

  friend PolynomialT operator*(const PolynomialT& a, const PolynomialT& b) {
    check_same_dim(a, b);
    PolynomialT r(a.dim_);
    if (a.terms_.empty() || b.terms_.empty()) return r;
    std::unordered_map<Key, Coeff> acc;
    acc.reserve(a.terms_.size() * 2 + b.terms_.size() * 2);
    const auto& outer = (a.terms_.size() <= b.terms_.size()) ? a.terms_ : b.terms_;
    const auto& inner = (a.terms_.size() <= b.terms_.size()) ? b.terms_ : a.terms_;
    for (const auto& [ka, ca] : outer)
      for (const auto& [kb, cb] : inner) acc[ka + kb] += ca * cb;
    r.terms_.reserve(acc.size());
    for (auto& [k, c] : acc)
      if (!(c == Coeff(0))) r.terms_.emplace_back(k, std::move(c));
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    return r;
  }

  PolynomialT& operator*=(const PolynomialT& o) { return *this = *this * o; }

  PolynomialT& operator*=(const Coeff& s) {
    if (s == Coeff(0)) {
      terms_.clear();
    } else {
      for (auto& t : terms_) t.second *= s;
    }
    return *this;
  }
  friend PolynomialT operator*(PolynomialT a, const Coeff& s) { return a *= s; }
  friend PolynomialT operator*(const Coeff& s, PolynomialT a) { return a *= s; }

  /// Exact division of every coefficient (Coeff must support it exactly).
  PolynomialT& divide_coefficients(const Coeff& s) {
    for (auto& t : terms_) t.second /= s;
    return *this;
  }

  /// Partial derivative with respect to variable `var`.
  PolynomialT derivative(int var) const {
    if (var < 0 || var >= dim_) throw std::invalid_argument("derivative: variable index");
    PolynomialT r(dim_);
    r.terms_.reserve(terms_.size());
    const int shift = 48 - 8 * var;
    for (const auto& [k, c] : terms_) {
      const unsigned e = static_cast<unsigned>((k >> shift) & 0xffu);
      if (e == 0) continue;
      // drop one from the variable byte and from the degree byte
      Key nk = k - (Key(1) << shift) - (Key(1) << 56);
      r.terms_.emplace_back(nk, c * Coeff(e));
    }
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    return r;
  }

  template <class T>
  T evaluate(std::span<const T> point) const {
    if (static_cast<int>(point.size()) != dim_) throw std::invalid_argument("evaluate: point size");
    // per-variable power tables
    std::array<std::vector<T>, kMaxDim> pows;
    for (int v = 0; v < dim_; ++v) pows[static_cast<size_t>(v)] = {T(1)};
    T total = T(0);
    for (const auto& [k, c] : terms_) {
      T m = coeff_as<T>(c);
      for (int v = 0; v < dim_; ++v) {
        const unsigned e = static_cast<unsigned>((k >> (48 - 8 * v)) & 0xffu);
        auto& tab = pows[static_cast<size_t>(v)];
        while (tab.size() <= e) tab.push_back(tab.back() * point[static_cast<size_t>(v)]);
        if (e) m *= tab[e];
      }
      total += m;
    }
    return total;
  }

  double evaluate_at(std::span<const double> point) const { return evaluate<double>(point); }

  std::vector<unsigned> exponents(const Term& t) const {
    std::vector<unsigned> e(static_cast<size_t>(dim_));
    for (int v = 0; v < dim_; ++v) e[static_cast<size_t>(v)] = static_cast<unsigned>((t.first >> (48 - 8 * v)) & 0xffu);
    return e;
  }

  std::string str(std::span<const std::string> vars = {}) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // print highest degree first
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!first) os << " + ";
      first = false;
      os << coeff_str(it->second);
      for (int v = 0; v < dim_; ++v) {
        const unsigned e = static_cast<unsigned>((it->first >> (48 - 8 * v)) & 0xffu);
        if (!e) continue;
        if (v < static_cast<int>(vars.size()))
          os << "*" << vars[static_cast<size_t>(v)];
        else
          os << "*x" << v;
        if (e > 1) os << "^" << e;
      }
    }
    return os.str();
  }

  static Key pack(std::span<const unsigned> exps) {
    Key k = 0;
    unsigned total = 0;
    for (std::size_t v = 0; v < exps.size(); ++v) {
      if (exps[v] > kMaxExp) throw std::overflow_error("polynomial exponent too large");
      total += exps[v];
      k |= Key(exps[v]) << (48 - 8 * static_cast<int>(v));
    }
    if (total > kMaxExp) throw std::overflow_error("polynomial degree too large");
    return k | (Key(total) << 56);
  }

 private:
  template <class T>
  static T coeff_as(const Coeff& c) {
    if constexpr (std::is_same_v<T, Coeff>)
      return c;
    else if constexpr (std::is_same_v<T, double>)
      return to_double(c);
    else
      return T(c);
  }

  static std::string coeff_str(const Coeff& c) {
    if constexpr (std::is_same_v<Coeff, Rational>)
      return to_string(c);
    else {
      std::ostringstream os;
      os << c;
      return os.str();
    }
  }

  static int check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("polynomial dimension out of range");
    return dim;
  }

  static void check_same_dim(const PolynomialT& a, const PolynomialT& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("polynomial dimension mismatch");
  }

  static PolynomialT merged(const PolynomialT& a, const PolynomialT& b, bool subtract) {
    check_same_dim(a, b);
    PolynomialT r(a.dim_);
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].first < b.terms_[j].first)) {
        r.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || b.terms_[j].first < a.terms_[i].first) {
        Coeff c = subtract ? Coeff(-b.terms_[j].second) : b.terms_[j].second;
        if (!(c == Coeff(0))) r.terms_.emplace_back(b.terms_[j].first, std::move(c));
        ++j;
      } else {
        Coeff c = subtract ? Coeff(a.terms_[i].second - b.terms_[j].second)
                           : Coeff(a.terms_[i].second + b.terms_[j].second);
        if (!(c == Coeff(0))) r.terms_.emplace_back(a.terms_[i].first, std::move(c));
        ++i;
        ++j;
      }
    }
    return r;
  }

  int dim_ = 0;
  std::vector<Term> terms_;
};

using Polynomial = PolynomialT<Rational>;
using ZPolynomial = PolynomialT<BigInt>;

/// Exact coefficient-wise conversions between the rational and integer kernels.
inline ZPolynomial to_integer(const Polynomial& p, const BigInt& scale = BigInt(1)) {
  ZPolynomial r(p.dim());
  for (const auto& [k, c] : p.terms()) {
    Rational sc = Rational(scale) * c;
    if (boost::multiprecision::denominator(sc) != 1)
      throw std::invalid_argument("to_integer: scaled coefficient is not an integer");
    std::vector<unsigned> e(static_cast<size_t>(p.dim()));
    for (int v = 0; v < p.dim(); ++v) e[static_cast<size_t>(v)] = static_cast<unsigned>((k >> (48 - 8 * v)) & 0xffu);
    r += ZPolynomial::monomial(p.dim(), e, BigInt(boost::multiprecision::numerator(sc)));
  }
  return r;
}

inline Polynomial to_rational(const ZPolynomial& p) {
  Polynomial r(p.dim());
  for (const auto& [k, c] : p.terms()) {
    std::vector<unsigned> e(static_cast<size_t>(p.dim()));
    for (int v = 0; v < p.dim(); ++v) e[static_cast<size_t>(v)] = static_cast<unsigned>((k >> (48 - 8 * v)) & 0xffu);
    r += Polynomial::monomial(p.dim(), e, Rational(c));
  }
  return r;
}

/// Least common multiple of all coefficient denominators.
inline BigInt denominator_lcm(const Polynomial& p) {
  BigInt l(1);
  for (const auto& [k, c] : p.terms()) {
    (void)k;
    const BigInt& d = boost::multiprecision::denominator(c);
    l = boost::multiprecision::lcm(l, d);
  }
  return l;
}

}  // namespace hypogeo
