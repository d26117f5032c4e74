#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace hypogeo {

/// Rectangular tensor grid.  `n` counts cells per axis; nodes sit either at
/// cell vertices (boundary nodes included, used by the PDE stencils) or at
/// cell centers (used by the quadrature-heavy diagnostics).
class Grid {
 public:
  Grid() = default;

  Grid(int dim, std::span<const double> lo, std::span<const double> hi, std::span<const int> cells,
       bool cell_centered = false)
      : dim_(dim), centered_(cell_centered) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("Grid: dim must be 2 or 3");
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim ||
        static_cast<int>(cells.size()) != dim)
      throw std::invalid_argument("Grid: bounds/cell count size mismatch");
    for (int a = 0; a < dim; ++a) {
      if (!(hi[static_cast<size_t>(a)] > lo[static_cast<size_t>(a)]) || cells[static_cast<size_t>(a)] < 1)
        throw std::invalid_argument("Grid: empty axis");
      lo_[static_cast<size_t>(a)] = lo[static_cast<size_t>(a)];
      hi_[static_cast<size_t>(a)] = hi[static_cast<size_t>(a)];
      n_[static_cast<size_t>(a)] = cells[static_cast<size_t>(a)];
      h_[static_cast<size_t>(a)] = (hi[static_cast<size_t>(a)] - lo[static_cast<size_t>(a)]) /
                                   cells[static_cast<size_t>(a)];
      nodes_[static_cast<size_t>(a)] = cell_centered ? cells[static_cast<size_t>(a)]
                                                     : cells[static_cast<size_t>(a)] + 1;
    }
  }

  /// Vertex grid specified by node counts per axis (the CLI convention).
  static Grid from_nodes(int dim, std::span<const double> lo, std::span<const double> hi,
                         std::span<const int> nodes) {
    std::vector<int> cells;
    for (int a = 0; a < dim; ++a) {
      if (nodes[static_cast<size_t>(a)] < 2) throw std::invalid_argument("Grid: need at least 2 nodes per axis");
      cells.push_back(nodes[static_cast<size_t>(a)] - 1);
    }
    return Grid(dim, lo, hi, cells, false);
  }

  int dim() const { return dim_; }
  bool cell_centered() const { return centered_; }
  double lo(int a) const { return lo_[static_cast<size_t>(a)]; }
  double hi(int a) const { return hi_[static_cast<size_t>(a)]; }
  int cells(int a) const { return n_[static_cast<size_t>(a)]; }
  double h(int a) const { return h_[static_cast<size_t>(a)]; }
  int nodes(int a) const { return nodes_[static_cast<size_t>(a)]; }

  std::int64_t node_count() const {
    std::int64_t c = 1;
    for (int a = 0; a < dim_; ++a) c *= nodes(a);
    return c;
  }

  double cell_volume() const {
    double v = 1;
    for (int a = 0; a < dim_; ++a) v *= h(a);
    return v;
  }

  double coord(int a, int i) const {
    return lo(a) + (centered_ ? (i + 0.5) * h(a) : i * h(a));
  }

  std::int64_t id(int i, int j, int k = 0) const {
    return (static_cast<std::int64_t>(k) * nodes(1) + j) * nodes(0) + i;
  }

  std::array<int, 3> decode(std::int64_t id) const {
    std::array<int, 3> ijk{0, 0, 0};
    ijk[0] = static_cast<int>(id % nodes(0));
    id /= nodes(0);
    ijk[1] = static_cast<int>(id % nodes(1));
    if (dim_ == 3) ijk[2] = static_cast<int>(id / nodes(1));
    return ijk;
  }

  std::vector<double> point(std::int64_t id) const {
    const auto ijk = decode(id);
    std::vector<double> p(static_cast<size_t>(dim_));
    for (int a = 0; a < dim_; ++a) p[static_cast<size_t>(a)] = coord(a, ijk[static_cast<size_t>(a)]);
    return p;
  }

  /// Node distance to the nearest grid face, in node counts (0 on the boundary
  /// of a vertex grid).
  int boundary_distance(std::int64_t id) const {
    const auto ijk = decode(id);
    int d = std::numeric_limits<int>::max();
    for (int a = 0; a < dim_; ++a) {
      d = std::min(d, ijk[static_cast<size_t>(a)]);
      d = std::min(d, nodes(a) - 1 - ijk[static_cast<size_t>(a)]);
    }
    return d;
  }

  bool is_boundary(std::int64_t id) const { return boundary_distance(id) == 0; }

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && centered_ == o.centered_ && lo_ == o.lo_ && hi_ == o.hi_ && n_ == o.n_;
  }

 private:
  int dim_ = 0;
  bool centered_ = false;
  std::array<double, 3> lo_{0, 0, 0}, hi_{0, 0, 0}, h_{0, 0, 0};
  std::array<int, 3> n_{0, 0, 0}, nodes_{0, 0, 0};
};

struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const Grid& g, double fill = 0.0)
      : grid(g), values(static_cast<size_t>(g.node_count()), fill) {}

  double& operator[](std::int64_t id) { return values[static_cast<size_t>(id)]; }
  double operator[](std::int64_t id) const { return values[static_cast<size_t>(id)]; }

  static GridFunction sample(const Grid& g, const std::function<double(std::span<const double>)>& f) {
    GridFunction u(g);
    for (std::int64_t p = 0; p < g.node_count(); ++p) u[p] = f(g.point(p));
    return u;
  }
};

using NodeMask = std::vector<std::uint8_t>;

enum class NormKind { GrushinNorm, HeisenbergNorm, EuclideanNorm };

/// Homogeneous norm: (x^4 + y^2)^(1/4) on the Grushin plane,
/// ((x^2 + y^2)^2 + z^2)^(1/4) on the Heisenberg group.
inline double anisotropic_norm(std::span<const double> p, NormKind kind) {
  switch (kind) {
    case NormKind::GrushinNorm: {
      if (p.size() != 2) throw std::invalid_argument("Grushin norm needs a 2d point");
      const double x = p[0], y = p[1];
      return std::pow(x * x * x * x + y * y, 0.25);
    }
    case NormKind::HeisenbergNorm: {
      if (p.size() != 3) throw std::invalid_argument("Heisenberg norm needs a 3d point");
      const double r2 = p[0] * p[0] + p[1] * p[1];
      return std::pow(r2 * r2 + p[2] * p[2], 0.25);
    }
    case NormKind::EuclideanNorm: {
      double s = 0;
      for (double v : p) s += v * v;
      return std::sqrt(s);
    }
  }
  throw std::logic_error("anisotropic_norm: bad kind");
}

inline NodeMask anisotropic_ball_mask(const Grid& g, double R, NormKind kind) {
  if (!(R > 0)) throw std::invalid_argument("anisotropic_ball_mask: R must be positive");
  NodeMask m(static_cast<size_t>(g.node_count()), 0);
  for (std::int64_t p = 0; p < g.node_count(); ++p)
    m[static_cast<size_t>(p)] = anisotropic_norm(g.point(p), kind) < R ? 1 : 0;
  return m;
}

/// Logarithmic plateau cutoff profile: 1/2 up to sqrt(R), (ln R - ln rho)/ln R
/// between sqrt(R) and R, 0 beyond.
inline double cutoff_chi_value(double rho, double R) {
  if (!(R > 1)) throw std::invalid_argument("cutoff_chi: R must exceed 1");
  if (rho <= std::sqrt(R)) return 0.5;
  if (rho >= R) return 0.0;
  return (std::log(R) - std::log(rho)) / std::log(R);
}

inline GridFunction cutoff_chi(const Grid& g, double R, NormKind kind) {
  if (!(R > 1)) throw std::invalid_argument("cutoff_chi: R must exceed 1");
  GridFunction chi(g);
  for (std::int64_t p = 0; p < g.node_count(); ++p)
    chi[p] = cutoff_chi_value(anisotropic_norm(g.point(p), kind), R);
  return chi;
}

/// Midpoint quadrature: sum of f times the cell volume over unmasked nodes.
inline double integrate(const GridFunction& f, const NodeMask* mask = nullptr) {
  if (mask && mask->size() != f.values.size())
    throw std::invalid_argument("integrate: mask size mismatch");
  const double vol = f.grid.cell_volume();
  double s = 0;
  for (std::size_t p = 0; p < f.values.size(); ++p)
    if (!mask || (*mask)[p]) s += f.values[p];
  return s * vol;
}

// ------------------------------------------------------------------ file I/O

inline void write_csv(const GridFunction& u, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  os.precision(17);
  os << (u.grid.dim() == 2 ? "x,y,value\n" : "x,y,z,value\n");
  for (std::int64_t p = 0; p < u.grid.node_count(); ++p) {
    const auto pt = u.grid.point(p);
    for (double c : pt) os << c << ',';
    os << u[p] << '\n';
  }
}

namespace detail {

inline bool little_endian() {
  const std::uint16_t probe = 1;
  return *reinterpret_cast<const std::uint8_t*>(&probe) == 1;
}

inline nlohmann::json grid_meta(const Grid& g) {
  nlohmann::json meta;
  meta["dim"] = g.dim();
  meta["cells"] = nlohmann::json::array();
  meta["lo"] = nlohmann::json::array();
  meta["hi"] = nlohmann::json::array();
  for (int a = 0; a < g.dim(); ++a) {
    meta["cells"].push_back(g.cells(a));
    meta["lo"].push_back(g.lo(a));
    meta["hi"].push_back(g.hi(a));
  }
  meta["cell_centered"] = g.cell_centered();
  meta["count"] = g.node_count();
  meta["layout"] = "x-fastest";
  meta["scalar"] = "float64-le";
  return meta;
}

inline Grid grid_from_meta(const nlohmann::json& meta) {
  const int dim = meta.at("dim").get<int>();
  std::vector<double> lo = meta.at("lo").get<std::vector<double>>();
  std::vector<double> hi = meta.at("hi").get<std::vector<double>>();
  std::vector<int> cells = meta.at("cells").get<std::vector<int>>();
  return Grid(dim, lo, hi, cells, meta.at("cell_centered").get<bool>());
}

}  // namespace detail

/// Raw dump: `base`.f64 holds little-endian float64 node values, `base`.json
/// the grid metadata.
inline void write_raw(const GridFunction& u, const std::string& base) {
  std::ofstream os(base + ".f64", std::ios::binary);
  if (!os) throw std::runtime_error("write_raw: cannot open " + base + ".f64");
  if (detail::little_endian()) {
    os.write(reinterpret_cast<const char*>(u.values.data()),
             static_cast<std::streamsize>(u.values.size() * sizeof(double)));
  } else {
    for (double v : u.values) {
      auto bytes = reinterpret_cast<const char*>(&v);
      for (int b = 7; b >= 0; --b) os.put(bytes[b]);
    }
  }
  std::ofstream meta(base + ".json");
  meta << detail::grid_meta(u.grid).dump(2) << '\n';
}

inline GridFunction read_raw(const std::string& base) {
  std::ifstream meta(base + ".json");
  if (!meta) throw std::runtime_error("read_raw: cannot open " + base + ".json");
  nlohmann::json j;
  meta >> j;
  GridFunction u(detail::grid_from_meta(j));
  std::ifstream is(base + ".f64", std::ios::binary);
  if (!is) throw std::runtime_error("read_raw: cannot open " + base + ".f64");
  if (detail::little_endian()) {
    is.read(reinterpret_cast<char*>(u.values.data()),
            static_cast<std::streamsize>(u.values.size() * sizeof(double)));
  } else {
    for (double& v : u.values) {
      char bytes[8];
      for (int b = 7; b >= 0; --b) is.get(bytes[b]);
      v = *reinterpret_cast<double*>(bytes);
    }
  }
  if (!is) throw std::runtime_error("read_raw: truncated " + base + ".f64");
  return u;
}

}  // namespace hypogeo
