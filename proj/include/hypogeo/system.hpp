#pragma once

#include "hypogeo/polynomial.hpp"

#include <Eigen/Dense>

#include <functional>
#include <json.hpp>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hypogeo {

/// m-component nonlinearity H with its Jacobian and optional potential
/// (H = grad of the potential for gradient systems).
struct NonlinearSystem {
  int m = 1;
  std::string name;
  std::vector<std::string> component_names;
  std::function<void(std::span<const double>, std::span<double>)> H;
  std::function<void(std::span<const double>, Eigen::MatrixXd&)> jacobian;
  std::optional<std::function<double(std::span<const double>)>> potential;
  bool declared_symmetric = false;

  std::vector<double> eval(std::span<const double> u) const {
    std::vector<double> out(static_cast<size_t>(m));
    H(u, out);
    return out;
  }

  Eigen::MatrixXd jac(std::span<const double> u) const {
    Eigen::MatrixXd j(m, m);
    jacobian(u, j);
    return j;
  }
};

/// Builds a system from polynomial components; the Jacobian is the exact
/// symbolic derivative and a polynomial potential is validated against H.
inline NonlinearSystem system_from_polynomials(std::string name, std::vector<Polynomial> comps,
                                               std::optional<Polynomial> potential = std::nullopt,
                                               std::vector<std::string> labels = {}) {
  const int m = static_cast<int>(comps.size());
  if (m < 1) throw std::invalid_argument("system_from_polynomials: empty system");
  for (const auto& p : comps)
    if (p.dim() != m) throw std::invalid_argument("system_from_polynomials: component arity mismatch");

  auto jac_polys = std::make_shared<std::vector<Polynomial>>();
  jac_polys->reserve(static_cast<size_t>(m * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) jac_polys->push_back(comps[static_cast<size_t>(i)].derivative(j));

  bool symmetric = true;
  for (int i = 0; i < m && symmetric; ++i)
    for (int j = i + 1; j < m && symmetric; ++j)
      symmetric = (*jac_polys)[static_cast<size_t>(i * m + j)] == (*jac_polys)[static_cast<size_t>(j * m + i)];

  if (potential) {
    if (potential->dim() != m) throw std::invalid_argument("system_from_polynomials: potential arity");
    for (int i = 0; i < m; ++i)
      if (potential->derivative(i) != comps[static_cast<size_t>(i)])
        throw std::invalid_argument("system_from_polynomials: potential gradient != H");
  }

  auto comps_ptr = std::make_shared<std::vector<Polynomial>>(std::move(comps));
  auto pot_ptr = potential ? std::make_shared<Polynomial>(std::move(*potential)) : nullptr;

  NonlinearSystem sys;
  sys.m = m;
  sys.name = std::move(name);
  sys.component_names = std::move(labels);
  while (static_cast<int>(sys.component_names.size()) < m)
    sys.component_names.push_back("u" + std::to_string(sys.component_names.size() + 1));
  sys.declared_symmetric = symmetric;
  sys.H = [comps_ptr, m](std::span<const double> u, std::span<double> out) {
    for (int i = 0; i < m; ++i) out[static_cast<size_t>(i)] = (*comps_ptr)[static_cast<size_t>(i)].evaluate_at(u);
  };
  sys.jacobian = [jac_polys, m](std::span<const double> u, Eigen::MatrixXd& out) {
    out.resize(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) out(i, j) = (*jac_polys)[static_cast<size_t>(i * m + j)].evaluate_at(u);
  };
  if (pot_ptr)
    sys.potential = [pot_ptr](std::span<const double> u) { return pot_ptr->evaluate_at(u); };
  return sys;
}

/// f(u) = u^3 - u with the double-well potential (u^2 - 1)^2 / 4.
inline NonlinearSystem allen_cahn_system() {
  const auto u = Polynomial::variable(1, 0);
  Polynomial f = u * u * u - u;
  Polynomial well = (u * u - Polynomial::constant(1, Rational(1)));
  Polynomial pot = well * well * Rational(1, 4);
  return system_from_polynomials("allen-cahn", {f}, pot, {"u"});
}

/// Two coupled double wells: potential (u^2-1)^2/4 + (v^2-1)^2/4 + (beta/2) u^2 v^2.
inline NonlinearSystem gradient_coupled_system(const Rational& beta = Rational(1)) {
  const auto u = Polynomial::variable(2, 0);
  const auto v = Polynomial::variable(2, 1);
  const auto one = Polynomial::constant(2, Rational(1));
  Polynomial pot = (u * u - one) * (u * u - one) * Rational(1, 4) +
                   (v * v - one) * (v * v - one) * Rational(1, 4) +
                   u * u * v * v * (beta / 2);
  Polynomial h1 = pot.derivative(0);
  Polynomial h2 = pot.derivative(1);
  return system_from_polynomials("gradient-coupled", {h1, h2}, pot, {"u", "v"});
}

namespace detail {

inline Polynomial polynomial_from_json(const nlohmann::json& j, int dim) {
  Polynomial p(dim);
  for (const auto& term : j) {
    auto exps = term.at("e").get<std::vector<unsigned>>();
    if (static_cast<int>(exps.size()) != dim)
      throw std::invalid_argument("polynomial term arity mismatch");
    Rational c = term.at("c").is_string() ? rational_from_string(term.at("c").get<std::string>())
                                          : rational_from_double(term.at("c").get<double>());
    p += Polynomial::monomial(dim, exps, c);
  }
  return p;
}

}  // namespace detail

/// Loads a polynomial system description:
///   { "name": ..., "m": 2, "components": [ [ {"e":[3,0],"c":1}, ... ], ... ],
///     "potential": [ ... ] }
inline NonlinearSystem system_from_json(const nlohmann::json& j) {
  const int m = j.at("m").get<int>();
  std::vector<Polynomial> comps;
  for (const auto& cj : j.at("components")) comps.push_back(detail::polynomial_from_json(cj, m));
  if (static_cast<int>(comps.size()) != m) throw std::invalid_argument("system_from_json: m mismatch");
  std::optional<Polynomial> pot;
  if (j.contains("potential")) pot = detail::polynomial_from_json(j.at("potential"), m);
  std::vector<std::string> labels;
  if (j.contains("names")) labels = j.at("names").get<std::vector<std::string>>();
  return system_from_polynomials(j.value("name", "custom"), std::move(comps), std::move(pot),
                                 std::move(labels));
}

/// Preset lookup used by the CLI; `beta` only affects "gradient-coupled".
inline NonlinearSystem make_system(const std::string& name, double beta = 1.0) {
  if (name == "allen-cahn") return allen_cahn_system();
  if (name == "gradient-coupled") return gradient_coupled_system(rational_from_double(beta));
  throw std::invalid_argument("unknown system preset: " + name);
}

struct SymmetryReport {
  double max_discrepancy = 0;
  bool pass = false;
};

/// Definition check for symmetric systems: max over samples of the largest
/// off-diagonal Jacobian mismatch.
inline SymmetryReport check_symmetry(const NonlinearSystem& sys,
                                     std::span<const std::vector<double>> samples,
                                     double tol = 1e-10) {
  if (samples.empty()) throw std::invalid_argument("check_symmetry: no samples");
  SymmetryReport rep;
  for (const auto& s : samples) {
    const auto jm = sys.jac(s);
    for (int i = 0; i < sys.m; ++i)
      for (int j = i + 1; j < sys.m; ++j)
        rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(jm(i, j) - jm(j, i)));
  }
  rep.pass = rep.max_discrepancy <= tol;
  return rep;
}

/// Central-difference validation of the declared potential.
inline double potential_gradient_defect(const NonlinearSystem& sys, std::span<const double> at,
                                        double eps = 1e-5) {
  if (!sys.potential) throw std::invalid_argument("potential_gradient_defect: no potential");
  std::vector<double> up(at.begin(), at.end()), um(at.begin(), at.end());
  const auto h = sys.eval(at);
  double worst = 0;
  for (int i = 0; i < sys.m; ++i) {
    up[static_cast<size_t>(i)] = at[static_cast<size_t>(i)] + eps;
    um[static_cast<size_t>(i)] = at[static_cast<size_t>(i)] - eps;
    const double fd = ((*sys.potential)(up) - (*sys.potential)(um)) / (2 * eps);
    worst = std::max(worst, std::abs(fd - h[static_cast<size_t>(i)]));
    up[static_cast<size_t>(i)] = at[static_cast<size_t>(i)];
    um[static_cast<size_t>(i)] = at[static_cast<size_t>(i)];
  }
  return worst;
}

}  // namespace hypogeo
