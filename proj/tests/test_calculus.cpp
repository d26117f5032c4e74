#include "hypogeo/calculus.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace hypogeo;

namespace {

// Euclidean level-curve oracle for radial w: the curvature of the level circle
// through (x, y) is 1/r and the tangential gradient component vanishes.
double euclidean_circle_curvature(double x, double y) { return 1.0 / std::hypot(x, y); }

}  // namespace

TEST_CASE("geometric report on the Grushin hand jet") {
  // w = y at (1, 0): <Hess tau, eta> = 1 cancels Zu = 1
  const auto grushin = make_frame("grushin2d");
  const auto y = Polynomial::variable(2, 1);
  auto jet = jet_of_polynomial(y, grushin, std::vector<double>{1.0, 0.0});
  CHECK(jet.xu == 0.0);
  CHECK(jet.yu == 1.0);
  CHECK(jet.xyu == 1.0);
  CHECK(jet.zu == 1.0);
  CHECK(jet.compatibility_defect() == 0.0);

  auto rep = geometric_report(jet, 1e-8);
  CHECK(!rep.degenerate);
  CHECK(rep.curvature == Catch::Approx(0.0).margin(1e-14));
  CHECK(rep.tangent_coupling == Catch::Approx(0.0).margin(1e-14));
  CHECK(rep.identity_gap == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("geometric report matches the Euclidean curvature oracle") {
  const auto eucl = make_frame("euclidean2d");
  const auto x = Polynomial::variable(2, 0);
  const auto y = Polynomial::variable(2, 1);
  auto w = x * x + y * y;

  auto jet = jet_of_polynomial(w, eucl, std::vector<double>{1.0, 0.0});
  auto rep = geometric_report(jet, 1e-8);
  CHECK(rep.curvature == Catch::Approx(1.0));
  CHECK(rep.tangent_coupling == Catch::Approx(0.0).margin(1e-14));
  CHECK(rep.identity_gap == Catch::Approx(0.0).margin(1e-12));

  for (auto [px, py] : {std::pair{0.5, 0.25}, std::pair{-1.5, 2.0}, std::pair{3.0, -0.125}}) {
    auto jp = jet_of_polynomial(w, eucl, std::vector<double>{px, py});
    auto rp = geometric_report(jp, 1e-8);
    REQUIRE(rp.curvature == Catch::Approx(euclidean_circle_curvature(px, py)));
    REQUIRE(std::abs(rp.tangent_coupling) < 1e-13);
    REQUIRE(std::abs(rp.identity_gap) < 1e-12);
  }
}

TEST_CASE("degenerate gradient is masked, gap uses the a.e. branch") {
  JetSample j;
  j.point = {0.0, 0.0};
  j.xu = j.yu = 0.0;
  j.xxu = 3.0;
  j.yyu = -1.0;
  auto rep = geometric_report(j, 1e-8);
  CHECK(rep.degenerate);
  CHECK(std::isnan(rep.curvature));
  CHECK(std::isnan(rep.tangent_coupling));
  CHECK(rep.identity_gap == 0.0);
  CHECK(rep.det_hess == -3.0);

  CHECK_THROWS_AS(geometric_report(j, 0.0), std::invalid_argument);
}

TEST_CASE("eta and tau are unit and orthogonal whenever unmasked") {
  SampleStream s(31);
  for (const auto& name : builtin_frame_names()) {
    const auto fr = make_frame(name);
    auto w = s.random_polynomial(fr.dim(), 3);
    for (int i = 0; i < 25; ++i) {
      std::vector<double> pt;
      for (int k = 0; k < fr.dim(); ++k) pt.push_back(s.next_unit() * 4 - 2);
      auto rep = geometric_report(jet_of_polynomial(w, fr, pt), 1e-6);
      if (rep.degenerate) continue;
      const double ee = rep.eta[0] * rep.eta[0] + rep.eta[1] * rep.eta[1];
      const double tt = rep.tau[0] * rep.tau[0] + rep.tau[1] * rep.tau[1];
      const double et = rep.eta[0] * rep.tau[0] + rep.eta[1] * rep.tau[1];
      REQUIRE(std::abs(ee - 1.0) < 1e-12);
      REQUIRE(std::abs(tt - 1.0) < 1e-12);
      REQUIRE(std::abs(et) < 1e-12);
    }
  }
}

TEST_CASE("identity gap vanishes on exact polynomial jets") {
  SampleStream s(61);
  for (const auto& name : builtin_frame_names()) {
    const auto fr = make_frame(name);
    for (int rep_i = 0; rep_i < 4; ++rep_i) {
      auto w = s.random_polynomial(fr.dim(), 4, 2);
      int checked = 0;
      int guard = 0;
      while (checked < 10 && guard++ < 400) {
        std::vector<double> pt;
        for (int k = 0; k < fr.dim(); ++k) pt.push_back(s.next_unit() * 2 - 1);
        auto jet = jet_of_polynomial(w, fr, pt);
        auto rp = geometric_report(jet, 0.1);
        if (rp.degenerate) continue;
        ++checked;
        const double scale = std::max(1.0, rp.grad_norm * rp.grad_norm);
        REQUIRE(std::abs(rp.identity_gap) / scale < 1e-9);
      }
    }
  }
}

TEST_CASE("monge-ampere residuals") {
  // x-only profile on Grushin: second column of the Hessian vanishes
  JetSample j;
  j.point = {1.0, 2.0};
  j.xu = 0.7;       // u'
  j.xxu = -0.3;     // u''
  auto [det, bal] = monge_ampere_check(j);
  CHECK(det == 0.0);
  CHECK(bal == 0.0);

  const auto eucl = make_frame("euclidean2d");
  const auto x = Polynomial::variable(2, 0);
  const auto y = Polynomial::variable(2, 1);
  auto jet = jet_of_polynomial(x * x + y * y, eucl, std::vector<double>{1.0, 1.0});
  auto [det2, bal2] = monge_ampere_check(jet);
  CHECK(det2 == Catch::Approx(4.0));
  CHECK(bal2 == Catch::Approx(0.0).margin(1e-14));

  JetSample zero;
  zero.point = {0.0, 0.0};
  auto [det3, bal3] = monge_ampere_check(zero);
  CHECK(det3 == 0.0);
  CHECK(bal3 == 0.0);
}

TEST_CASE("bracket quantity needs the extended jet") {
  JetSample j;
  j.point = {0.0, 0.0};
  j.xu = 1.0;
  auto rep = geometric_report(j, 1e-8);
  CHECK(std::isnan(rep.bracket_quantity));

  // u = y - x^2 on Grushin: ZXu = ZYu = 0 exactly
  const auto grushin = make_frame("grushin2d");
  const auto x = Polynomial::variable(2, 0);
  const auto y = Polynomial::variable(2, 1);
  auto jet = jet_of_polynomial(y - x * x, grushin, std::vector<double>{0.5, 0.3});
  auto rep2 = geometric_report(jet, 1e-8);
  CHECK(rep2.bracket_quantity == 0.0);
}
