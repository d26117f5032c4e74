#include "hypogeo/assemble.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace hypogeo;

namespace {

Grid box2(double l, double r, int cells, bool centered = false) {
  const double lo[2] = {l, l}, hi[2] = {r, r};
  const int n[2] = {cells, cells};
  return Grid(2, lo, hi, n, centered);
}

double max_interior_error(const Grid& g, const Frame& fr,
                          const std::function<double(double, double)>& u,
                          const std::function<double(double, double)>& lap) {
  auto uf = GridFunction::sample(g, [&](std::span<const double> p) { return u(p[0], p[1]); });
  auto op = assemble_sublaplacian(g, fr);
  Eigen::VectorXd r = op.apply(uf);
  double err = 0;
  for (std::size_t i = 0; i < op.interior_ids.size(); ++i) {
    const auto pt = g.point(op.interior_ids[i]);
    err = std::max(err, std::abs(r(static_cast<Eigen::Index>(i)) - lap(pt[0], pt[1])));
  }
  return err;
}

}  // namespace

TEST_CASE("grid geometry and layouts") {
  auto g = box2(0.0, 1.0, 4);
  CHECK(g.nodes(0) == 5);
  CHECK(g.h(0) == Catch::Approx(0.25));
  CHECK(g.node_count() == 25);
  CHECK(g.is_boundary(g.id(0, 2)));
  CHECK(!g.is_boundary(g.id(2, 2)));
  CHECK(g.boundary_distance(g.id(2, 2)) == 2);

  auto c = box2(0.0, 1.0, 4, true);
  CHECK(c.nodes(0) == 4);
  CHECK(c.coord(0, 0) == Catch::Approx(0.125));

  CHECK_THROWS_AS(Grid(2, std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 1.0},
                       std::vector<int>{4, 4}),
                  std::invalid_argument);
}

TEST_CASE("midpoint quadrature on cell-centered nodes") {
  auto g = box2(0.0, 1.0, 64, true);
  auto one = GridFunction::sample(g, [](std::span<const double>) { return 1.0; });
  CHECK(integrate(one) == Catch::Approx(1.0).epsilon(1e-14));

  auto fx = GridFunction::sample(g, [](std::span<const double> p) { return p[0]; });
  CHECK(integrate(fx) == Catch::Approx(0.5).epsilon(1e-14));

  NodeMask empty(static_cast<size_t>(g.node_count()), 0);
  CHECK(integrate(fx, &empty) == 0.0);
}

TEST_CASE("anisotropic norms and ball masks") {
  CHECK(anisotropic_norm(std::vector<double>{0.0, 1.0}, NormKind::GrushinNorm) == Catch::Approx(1.0));
  CHECK(anisotropic_norm(std::vector<double>{1.0, 0.0}, NormKind::GrushinNorm) == Catch::Approx(1.0));
  CHECK(anisotropic_norm(std::vector<double>{1.0, 1.0, 0.0}, NormKind::HeisenbergNorm) ==
        Catch::Approx(std::sqrt(2.0)));

  auto g = box2(-2.0, 2.0, 256, true);
  auto m = anisotropic_ball_mask(g, 1.0, NormKind::GrushinNorm);
  // area of {x^4 + y^2 < 1} is 2 * integral_{-1}^{1} sqrt(1 - x^4) dx = 3.49608..
  double area = 0;
  for (auto b : m) area += b ? g.cell_volume() : 0.0;
  CHECK(area == Catch::Approx(3.49608).epsilon(0.01));

  CHECK_THROWS_AS(anisotropic_ball_mask(g, -1.0, NormKind::GrushinNorm), std::invalid_argument);
}

TEST_CASE("logarithmic cutoff hits the breakpoint values") {
  const double R = 16.0;
  CHECK(cutoff_chi_value(std::sqrt(R), R) == 0.5);
  CHECK(cutoff_chi_value(R, R) == 0.0);
  CHECK(cutoff_chi_value(std::pow(R, 0.75), R) == Catch::Approx(0.25).margin(1e-12));
  CHECK(cutoff_chi_value(0.0, R) == 0.5);
  CHECK_THROWS_AS(cutoff_chi_value(1.0, 0.5), std::invalid_argument);

  // continuity across both breakpoints: node-to-node jump shrinks with h
  double prev_jump = 0;
  for (int cells : {64, 128}) {
    auto g = box2(-20.0, 20.0, cells);
    auto chi = cutoff_chi(g, R, NormKind::GrushinNorm);
    double jump = 0;
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i + 1 < g.nodes(0); ++i)
        jump = std::max(jump, std::abs(chi[g.id(i + 1, j)] - chi[g.id(i, j)]));
    if (prev_jump > 0) CHECK(jump < prev_jump);
    prev_jump = jump;
  }
}

TEST_CASE("sublaplacian is exact on quadratics for Grushin") {
  auto g = box2(-1.0, 1.0, 16);
  const auto grushin = make_frame("grushin2d");

  // u = x^2 -> 2 exactly
  CHECK(max_interior_error(
            g, grushin, [](double x, double) { return x * x; },
            [](double, double) { return 2.0; }) < 1e-12);
  // u = y^2 -> 2 x^2 exactly (face-sampled coefficient)
  CHECK(max_interior_error(
            g, grushin, [](double, double y) { return y * y; },
            [](double x, double) { return 2.0 * x * x; }) < 1e-12);
  // constants are annihilated
  CHECK(max_interior_error(
            g, grushin, [](double, double) { return 3.5; },
            [](double, double) { return 0.0; }) < 1e-13);

  const double lo[2] = {0, 0}, hi[2] = {1, 1};
  const int n[2] = {1, 1};
  CHECK_THROWS_AS(assemble_sublaplacian(Grid(2, lo, hi, n), grushin), std::invalid_argument);
}

TEST_CASE("sublaplacian converges at second order on Grushin") {
  const auto grushin = make_frame("grushin2d");
  auto exact = [](double x, double y) { return -(1.0 + x * x) * std::sin(x) * std::cos(y); };
  auto u = [](double x, double y) { return std::sin(x) * std::cos(y); };
  const double e1 = max_interior_error(box2(-1.0, 1.0, 32), grushin, u, exact);
  const double e2 = max_interior_error(box2(-1.0, 1.0, 64), grushin, u, exact);
  CHECK(std::log2(e1 / e2) >= 1.9);
}

TEST_CASE("sublaplacian converges on Heisenberg, cross terms included") {
  const auto heis = make_frame("heisenberg3d");
  auto u = [](double x, double y, double z) { return std::sin(x) * std::cos(y) + x * std::sin(y + z); };
  auto lap = [](double x, double y, double z) {
    const double u_xx = -std::sin(x) * std::cos(y);
    const double u_yy = -std::sin(x) * std::cos(y) - x * std::sin(y + z);
    const double u_zz = -x * std::sin(y + z);
    const double u_xz = std::cos(y + z);
    const double u_yz = -x * std::sin(y + z);
    return u_xx + u_yy + 0.25 * (x * x + y * y) * u_zz - y * u_xz + x * u_yz;
  };

  auto err_at = [&](int cells) {
    const double lo[3] = {-1, -1, -1}, hi[3] = {1, 1, 1};
    const int n[3] = {cells, cells, cells};
    Grid g(3, lo, hi, n);
    auto uf = GridFunction::sample(g, [&](std::span<const double> p) { return u(p[0], p[1], p[2]); });
    auto op = assemble_sublaplacian(g, heis);
    Eigen::VectorXd r = op.apply(uf);
    double err = 0;
    for (std::size_t i = 0; i < op.interior_ids.size(); ++i) {
      const auto pt = g.point(op.interior_ids[i]);
      err = std::max(err, std::abs(r(static_cast<Eigen::Index>(i)) - lap(pt[0], pt[1], pt[2])));
    }
    return err;
  };
  const double e1 = err_at(16), e2 = err_at(32);
  CHECK(std::log2(e1 / e2) >= 1.7);
}

TEST_CASE("sublaplacian matrices are symmetric negative semidefinite") {
  for (const auto& name : builtin_frame_names()) {
    const auto fr = make_frame(name);
    Grid g = [&] {
      if (fr.dim() == 2) {
        const double lo[2] = {-1.4, -1.3}, hi[2] = {1.2, 0.9};
        const int n[2] = {7, 6};
        return Grid(2, lo, hi, n);
      }
      const double lo[3] = {-1.1, -0.9, -1.0}, hi[3] = {0.8, 1.0, 1.2};
      const int n[3] = {5, 6, 5};
      return Grid(3, lo, hi, n);
    }();
    auto op = assemble_sublaplacian(g, fr);
    Eigen::MatrixXd dense = Eigen::MatrixXd(op.interior);
    REQUIRE((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    REQUIRE(es.eigenvalues().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("grid jets are exact on the quadratic examples") {
  auto g = box2(-1.0, 1.0, 16);
  const auto grushin = make_frame("grushin2d");

  auto ux2 = GridFunction::sample(g, [](std::span<const double> p) { return p[0] * p[0]; });
  auto j = jet_from_grid(ux2, g.id(5, 7), grushin);
  CHECK(j.xu == Catch::Approx(2 * g.coord(0, 5)).margin(1e-13));
  CHECK(j.xxu == Catch::Approx(2.0).margin(1e-12));
  CHECK(j.yu == 0.0);

  auto uy = GridFunction::sample(g, [](std::span<const double> p) { return p[1]; });
  auto j2 = jet_from_grid(uy, g.id(5, 7), grushin);
  CHECK(j2.xyu == Catch::Approx(1.0).margin(1e-12));
  CHECK(j2.zu == Catch::Approx(1.0).margin(1e-13));
  CHECK(j2.compatibility_defect() == Catch::Approx(0.0).margin(1e-12));

  auto uc = GridFunction::sample(g, [](std::span<const double>) { return 4.25; });
  auto j3 = jet_from_grid(uc, g.id(4, 4), grushin);
  CHECK(j3.xu == 0.0);
  CHECK(j3.xxu == 0.0);
  CHECK(j3.yyu == 0.0);

  CHECK_THROWS_AS(jet_from_grid(ux2, g.id(1, 7), grushin), std::invalid_argument);
}

TEST_CASE("grid jet compatibility defect shrinks at second order") {
  const auto heis = make_frame("heisenberg3d");
  auto f = [](std::span<const double> p) {
    return std::sin(p[0] + 0.3 * p[2]) * std::cos(p[1]) + p[2] * p[0];
  };
  auto defect_at = [&](int cells) {
    const double lo[3] = {-1, -1, -1}, hi[3] = {1, 1, 1};
    const int n[3] = {cells, cells, cells};
    Grid g(3, lo, hi, n);
    auto u = GridFunction::sample(g, f);
    double worst = 0;
    for (std::int64_t p = 0; p < g.node_count(); ++p) {
      if (g.boundary_distance(p) < 2) continue;
      worst = std::max(worst, std::abs(jet_from_grid(u, p, heis).compatibility_defect()));
    }
    return worst;
  };
  const double d1 = defect_at(8), d2 = defect_at(16);
  CHECK(std::log2(d1 / d2) >= 1.7);
}

TEST_CASE("grid function round-trips through csv and raw dumps") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "hypogeo_grid_io";
  fs::create_directories(dir);

  auto g = box2(-1.0, 2.0, 8);
  auto u = GridFunction::sample(g, [](std::span<const double> p) { return std::sin(p[0]) + p[1] / 7; });

  write_raw(u, (dir / "field").string());
  auto back = read_raw((dir / "field").string());
  REQUIRE(back.grid == u.grid);
  REQUIRE(back.values == u.values);

  write_csv(u, (dir / "field.csv").string());
  std::ifstream is(dir / "field.csv");
  std::string header;
  std::getline(is, header);
  CHECK(header == "x,y,value");
  std::size_t rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == static_cast<std::size_t>(g.node_count()));
  fs::remove_all(dir);
}
