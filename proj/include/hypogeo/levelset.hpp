#pragma once

#include "hypogeo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

namespace hypogeo {

/// One connected piece of an extracted level curve with its two competing
/// models: the parabola y = a x^2 + b and the vertical line x = const.
struct ComponentFit {
  std::size_t points = 0;
  double a = 0, b = 0;
  double rms = 0;          // parabola misfit
  double x_const = 0;
  double verticality = 0;  // rms x-spread of the vertical-line fit
  bool vertical_wins = false;
  bool straddles_x0 = false;
};

struct LevelSetFit {
  double level = 0;
  std::vector<ComponentFit> components;
};

namespace detail {

struct Crossing {
  double x, y;
  int cell_i, cell_j;
};

// Edge-crossing extraction (the line part of marching squares): one crossing
// per sign-changing cell edge, located by linear interpolation.  Exact zeros
// count as the positive side so plateaus produce no curve.
inline std::vector<Crossing> extract_crossings(const GridFunction& u, double level) {
  const Grid& g = u.grid;
  std::vector<Crossing> out;
  auto side = [&](std::int64_t id) { return u[id] - level >= 0; };
  auto frac = [&](std::int64_t a, std::int64_t b) {
    const double va = u[a] - level, vb = u[b] - level;
    return va / (va - vb);
  };
  for (int j = 0; j < g.nodes(1); ++j)
    for (int i = 0; i < g.nodes(0); ++i) {
      const auto p = g.id(i, j);
      if (i + 1 < g.nodes(0)) {
        const auto q = g.id(i + 1, j);
        if (side(p) != side(q)) {
          const double t = frac(p, q);
          // anchor to one of the two bordering cells; 8-adjacency joins the rest
          out.push_back({g.coord(0, i) + t * g.h(0), g.coord(1, j), i, std::min(j, g.nodes(1) - 2)});
        }
      }
      if (j + 1 < g.nodes(1)) {
        const auto q = g.id(i, j + 1);
        if (side(p) != side(q)) {
          const double t = frac(p, q);
          out.push_back({g.coord(0, i), g.coord(1, j) + t * g.h(1), std::min(i, g.nodes(0) - 2), j});
        }
      }
    }
  return out;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace detail

/// Extracts each level curve, splits it into connected components (crossings
/// in the same or 8-adjacent cells connect), and fits both level-set models
/// per component.  The vertical model wins ties with 10% hysteresis.
inline std::vector<LevelSetFit> level_set_flatness(const GridFunction& u,
                                                   std::span<const double> levels,
                                                   std::size_t min_points = 5) {
  if (u.grid.dim() != 2) throw std::invalid_argument("level_set_flatness: 2d grids only");
  std::vector<LevelSetFit> out;
  for (double level : levels) {
    LevelSetFit fit;
    fit.level = level;
    auto pts = detail::extract_crossings(u, level);
    if (!pts.empty()) {
      detail::UnionFind uf(pts.size());
      std::map<std::pair<int, int>, std::vector<std::size_t>> by_cell;
      for (std::size_t k = 0; k < pts.size(); ++k) by_cell[{pts[k].cell_i, pts[k].cell_j}].push_back(k);
      for (const auto& [cell, ids] : by_cell) {
        for (std::size_t k = 1; k < ids.size(); ++k) uf.unite(ids[0], ids[k]);
        for (int di = 0; di <= 1; ++di)
          for (int dj = (di == 0 ? 1 : -1); dj <= 1; ++dj) {
            auto it = by_cell.find({cell.first + di, cell.second + dj});
            if (it != by_cell.end()) uf.unite(ids[0], it->second[0]);
          }
      }
      std::map<std::size_t, std::vector<std::size_t>> comps;
      for (std::size_t k = 0; k < pts.size(); ++k) comps[uf.find(k)].push_back(k);

      for (const auto& [root, ids] : comps) {
        if (ids.size() < min_points) continue;
        ComponentFit c;
        c.points = ids.size();
        double sx = 0, sx2 = 0, sx4 = 0, sy = 0, sx2y = 0;
        double xmin = pts[ids[0]].x, xmax = xmin;
        for (auto k : ids) {
          const double x = pts[k].x, y = pts[k].y;
          sx += x;
          sx2 += x * x;
          sx4 += x * x * x * x;
          sy += y;
          sx2y += x * x * y;
          xmin = std::min(xmin, x);
          xmax = std::max(xmax, x);
        }
        const double n = static_cast<double>(ids.size());
        // least squares for y = a x^2 + b
        const double det = sx4 * n - sx2 * sx2;
        if (std::abs(det) > 1e-14 * std::max(1.0, sx4 * n)) {
          c.a = (sx2y * n - sx2 * sy) / det;
          c.b = (sx4 * sy - sx2 * sx2y) / det;
        } else {
          c.a = 0;
          c.b = sy / n;
        }
        c.x_const = sx / n;
        double ss_par = 0, ss_ver = 0;
        for (auto k : ids) {
          const double dp = pts[k].y - (c.a * pts[k].x * pts[k].x + c.b);
          const double dv = pts[k].x - c.x_const;
          ss_par += dp * dp;
          ss_ver += dv * dv;
        }
        c.rms = std::sqrt(ss_par / n);
        c.verticality = std::sqrt(ss_ver / n);
        c.vertical_wins = c.verticality <= 1.1 * c.rms;
        c.straddles_x0 = xmin < 0.0 && xmax > 0.0;
        fit.components.push_back(c);
      }
      std::sort(fit.components.begin(), fit.components.end(),
                [](const ComponentFit& a, const ComponentFit& b) { return a.points > b.points; });
    }
    out.push_back(std::move(fit));
  }
  return out;
}

}  // namespace hypogeo
