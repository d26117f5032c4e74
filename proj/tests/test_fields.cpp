#include "hypogeo/fields.hpp"
#include "hypogeo/symcalc.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace hypogeo;

TEST_CASE("builtin frames evaluate to the defining coefficients") {
  const auto grushin = make_frame("grushin2d");
  auto y_at = evaluate_field(grushin.Y, std::vector<double>{2.0, 5.0});
  CHECK(y_at == std::vector<double>{0.0, 2.0});

  const auto heis = make_frame("heisenberg3d");
  auto x_at = evaluate_field(heis.X, std::vector<double>{1.0, 4.0, 0.0});
  CHECK(x_at == std::vector<double>{1.0, 0.0, -2.0});

  const auto eucl = make_frame("euclidean2d");
  auto ex = evaluate_field(eucl.X, std::vector<double>{17.0, -3.0});
  CHECK(ex == std::vector<double>{1.0, 0.0});

  CHECK_THROWS_AS(evaluate_field(eucl.X, std::vector<double>{1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("lie brackets of the builtin frames") {
  const auto grushin = make_frame("grushin2d");
  // [X, Y] = d/dy on the Grushin plane
  CHECK(grushin.Z.coeffs[0].is_zero());
  CHECK(grushin.Z.coeffs[1] == Polynomial::constant(2, Rational(1)));

  const auto heis = make_frame("heisenberg3d");
  CHECK(heis.Z.coeffs[0].is_zero());
  CHECK(heis.Z.coeffs[1].is_zero());
  CHECK(heis.Z.coeffs[2] == Polynomial::constant(3, Rational(1)));

  // [F, F] = 0
  auto self = lie_bracket(grushin.Y, grushin.Y);
  CHECK(self.is_zero());

  // Martinet bracket is x d/dz
  const auto mart = make_frame("martinet3d");
  CHECK(mart.Z.coeffs[2] == Polynomial::variable(3, 0));
}

TEST_CASE("bracket antisymmetry and Jacobi identity, exactly") {
  for (const auto& name : builtin_frame_names()) {
    const auto fr = make_frame(name);
    auto ab = lie_bracket(fr.X, fr.Y);
    auto ba = lie_bracket(fr.Y, fr.X);
    for (int k = 0; k < fr.dim(); ++k)
      REQUIRE(ab.coeffs[static_cast<size_t>(k)] == -ba.coeffs[static_cast<size_t>(k)]);

    // Jacobi: [X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]] = 0
    auto j1 = lie_bracket(fr.X, lie_bracket(fr.Y, fr.Z));
    auto j2 = lie_bracket(fr.Y, lie_bracket(fr.Z, fr.X));
    auto j3 = lie_bracket(fr.Z, lie_bracket(fr.X, fr.Y));
    for (int k = 0; k < fr.dim(); ++k) {
      auto sum = j1.coeffs[static_cast<size_t>(k)] + j2.coeffs[static_cast<size_t>(k)] +
                 j3.coeffs[static_cast<size_t>(k)];
      REQUIRE(sum.is_zero());
    }
  }
}

TEST_CASE("Z is central for Grushin and Heisenberg but not Martinet") {
  for (const auto& name : {"grushin2d", "heisenberg3d"}) {
    const auto fr = make_frame(name);
    CHECK(lie_bracket(fr.X, fr.Z).is_zero());
    CHECK(lie_bracket(fr.Y, fr.Z).is_zero());
  }
  const auto mart = make_frame("martinet3d");
  CHECK(!lie_bracket(mart.X, mart.Z).is_zero());
  CHECK(lie_bracket(mart.Y, mart.Z).is_zero());
}

TEST_CASE("hormander rank on the builtin frames") {
  const auto grushin = make_frame("grushin2d");
  auto r1 = hormander_rank(grushin, std::vector<double>{1.0, 0.0}, 1);
  CHECK(r1.rank == 2);
  CHECK(r1.depth == 1);

  // on the degenerate line x = 0 the bracket is needed
  auto r2 = hormander_rank(grushin, std::vector<double>{0.0, 3.0}, 2);
  CHECK(r2.rank == 2);
  CHECK(r2.depth == 2);

  auto r2a = hormander_rank(grushin, std::vector<double>{0.0, 3.0}, 1);
  CHECK(r2a.rank == 1);
  CHECK(r2a.depth == 1);

  const auto heis = make_frame("heisenberg3d");
  auto r3 = hormander_rank(heis, std::vector<double>{0.0, 0.0, 0.0}, 2);
  CHECK(r3.rank == 3);
  CHECK(r3.depth == 2);

  // SVD path agrees on the same points
  auto r3s = hormander_rank(heis, std::vector<double>{0.0, 0.0, 0.0}, 2, RankMethod::Svd);
  CHECK(r3s.rank == 3);
  CHECK(r3s.depth == 2);

  // Martinet needs depth 3 on the plane x = 0: [[X,Y],X] = d/dz
  const auto mart = make_frame("martinet3d");
  auto r4 = hormander_rank(mart, std::vector<double>{0.0, 0.0, 0.0}, 3);
  CHECK(r4.rank == 3);
  CHECK(r4.depth == 3);
}
