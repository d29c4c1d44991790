#include "critpatch/geometry.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "critpatch/errors.hpp"

namespace critpatch {

namespace {

constexpr int kMinInteriorPerAxis = 8;

void validate(const shape::HyperRect& r) {
  if (r.lengths.empty() || r.lengths.size() > 3) {
    throw ParameterError("hyperrectangle needs 1 to 3 side lengths");
  }
  for (double L : r.lengths) {
    if (!(L > 0.0) || !std::isfinite(L)) throw ParameterError("side lengths must be positive");
  }
}

void validate(const shape::Ball& b) {
  if (!(b.radius > 0.0) || !std::isfinite(b.radius)) {
    throw ParameterError("ball radius must be positive");
  }
  if (b.dim < 1) throw ParameterError("ball dimension must be at least 1");
}

void validate(const shape::Masked& m) {
  if (m.dim != 2 && m.dim != 3) throw ParameterError("masks must be 2-D or 3-D");
  if (!(m.spacing > 0.0)) throw ParameterError("mask spacing must be positive");
  std::size_t cells = 1;
  for (int a = 0; a < 3; ++a) {
    if (m.extent[a] < 1) throw ParameterError("mask extent must be positive");
    if (a >= m.dim && m.extent[a] != 1) {
      throw ParameterError("unused mask axes must have extent 1");
    }
    cells *= static_cast<std::size_t>(m.extent[a]);
  }
  if (m.inside.size() != cells) throw ParameterError("mask size does not match its extent");
  bool any = false;
  for (auto c : m.inside) any = any || (c != 0);
  if (!any) throw ParameterError("mask has no habitat cells");
}

std::size_t inside_count(const shape::Masked& m) {
  std::size_t n = 0;
  for (auto c : m.inside) n += (c != 0);
  return n;
}

}  // namespace

Domain::Domain(Shape s) : shape_(std::move(s)) {
  std::visit([](const auto& v) { validate(v); }, shape_);
}

Domain Domain::masked(int dim, double spacing, std::array<int, 3> extent,
                      std::vector<std::uint8_t> inside) {
  return Domain(shape::Masked{dim, spacing, extent, std::move(inside)});
}

Domain Domain::mask_from(int dim, double h, std::array<double, 3> box,
                         const std::function<bool(std::span<const double>)>& contains) {
  if (dim != 2 && dim != 3) throw ParameterError("masks must be 2-D or 3-D");
  if (!(h > 0.0)) throw ParameterError("mask spacing must be positive");
  std::array<int, 3> extent{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    extent[a] = static_cast<int>(std::lround(box[a] / h)) + 1;
  }
  std::vector<std::uint8_t> inside(
      static_cast<std::size_t>(extent[0]) * extent[1] * extent[2], 0);
  std::array<double, 3> x{};
  for (int k = 0; k < extent[2]; ++k) {
    for (int j = 0; j < extent[1]; ++j) {
      for (int i = 0; i < extent[0]; ++i) {
        x = {i * h, j * h, k * h};
        inside[i + static_cast<std::size_t>(extent[0]) * (j + static_cast<std::size_t>(extent[1]) * k)] =
            contains(std::span<const double>(x.data(), static_cast<std::size_t>(dim))) ? 1 : 0;
      }
    }
  }
  return masked(dim, h, extent, std::move(inside));
}

int Domain::dimension() const {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::HyperRect>) {
          return static_cast<int>(s.lengths.size());
        } else {
          return s.dim;
        }
      },
      shape_);
}

double unit_ball_volume(int n) {
  if (n < 1) throw ParameterError("dimension must be at least 1");
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(1.0 + n / 2.0);
}

double volume(const Domain& domain) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::HyperRect>) {
          double v = 1.0;
          for (double L : s.lengths) v *= L;
          return v;
        } else if constexpr (std::is_same_v<T, shape::Ball>) {
          return unit_ball_volume(s.dim) * std::pow(s.radius, s.dim);
        } else {
          return std::pow(s.spacing, s.dim) * static_cast<double>(inside_count(s));
        }
      },
      domain.shape());
}

Domain symmetrize(const Domain& domain) {
  if (const auto* b = std::get_if<shape::Ball>(&domain.shape())) return Domain(*b);
  const int n = domain.dimension();
  const double radius = std::pow(volume(domain) / unit_ball_volume(n), 1.0 / n);
  return Domain::ball(radius, n);
}

Grid::Grid(int dim, std::array<int, 3> nodes, std::array<double, 3> spacing,
           std::array<double, 3> origin, std::vector<std::uint8_t> interior)
    : dim_(dim), nodes_(nodes), spacing_(spacing), origin_(origin) {
  const std::size_t total = static_cast<std::size_t>(nodes[0]) * nodes[1] * nodes[2];
  if (interior.size() != total) throw ParameterError("grid classification size mismatch");
  unknown_of_node_.assign(total, -1);
  for (std::size_t i = 0; i < total; ++i) {
    if (interior[i] != 0) {
      unknown_of_node_[i] = static_cast<std::ptrdiff_t>(node_of_unknown_.size());
      node_of_unknown_.push_back(i);
    }
  }
  if (node_of_unknown_.empty()) throw ResolutionError("grid has no interior nodes");
}

std::array<int, 3> Grid::lattice_index(std::size_t node) const {
  const auto n0 = static_cast<std::size_t>(nodes_[0]);
  const auto n1 = static_cast<std::size_t>(nodes_[1]);
  return {static_cast<int>(node % n0), static_cast<int>((node / n0) % n1),
          static_cast<int>(node / (n0 * n1))};
}

std::size_t Grid::linear_index(const std::array<int, 3>& idx) const {
  return static_cast<std::size_t>(idx[0]) +
         static_cast<std::size_t>(nodes_[0]) *
             (static_cast<std::size_t>(idx[1]) +
              static_cast<std::size_t>(nodes_[1]) * static_cast<std::size_t>(idx[2]));
}

std::ptrdiff_t Grid::neighbour(std::size_t node, int axis, int dir) const {
  auto idx = lattice_index(node);
  idx[axis] += dir;
  if (idx[axis] < 0 || idx[axis] >= nodes_[axis]) return -1;
  return static_cast<std::ptrdiff_t>(linear_index(idx));
}

std::array<double, 3> Grid::coordinates(std::size_t node) const {
  const auto idx = lattice_index(node);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = origin_[a] + idx[a] * spacing_[a];
  return x;
}

double Grid::cell_measure() const {
  double m = 1.0;
  for (int a = 0; a < dim_; ++a) m *= spacing_[a];
  return m;
}

Grid rasterize(const Domain& domain, double h) {
  const int n = domain.dimension();
  if (const auto* m = std::get_if<shape::Masked>(&domain.shape())) {
    // Pad by one Dirichlet layer on every used axis.
    std::array<int, 3> nodes{1, 1, 1};
    std::array<double, 3> spacing{m->spacing, m->spacing, m->spacing};
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    for (int a = 0; a < n; ++a) {
      nodes[a] = m->extent[a] + 2;
      origin[a] = -m->spacing;
    }
    std::vector<std::uint8_t> interior(
        static_cast<std::size_t>(nodes[0]) * nodes[1] * nodes[2], 0);
    const int pad2 = (n == 3) ? 1 : 0;
    for (int k = 0; k < m->extent[2]; ++k) {
      for (int j = 0; j < m->extent[1]; ++j) {
        for (int i = 0; i < m->extent[0]; ++i) {
          const std::size_t src =
              i + static_cast<std::size_t>(m->extent[0]) *
                      (j + static_cast<std::size_t>(m->extent[1]) * k);
          const std::size_t dst =
              (i + 1) + static_cast<std::size_t>(nodes[0]) *
                            ((j + 1) + static_cast<std::size_t>(nodes[1]) * (k + pad2));
          interior[dst] = m->inside[src];
        }
      }
    }
    return Grid(n, nodes, spacing, origin, std::move(interior));
  }

  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("grid spacing must be positive");
  if (n > 3) throw UnsupportedError("numerical grids support dimensions 1 to 3");

  std::array<int, 3> nodes{1, 1, 1};
  std::array<double, 3> spacing{h, h, h};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  if (const auto* r = std::get_if<shape::HyperRect>(&domain.shape())) {
    for (int a = 0; a < n; ++a) {
      const long intervals = std::lround(r->lengths[a] / h);
      if (intervals - 1 < kMinInteriorPerAxis) {
        throw ResolutionError("grid spacing too coarse: fewer than 8 interior nodes per axis");
      }
      nodes[a] = static_cast<int>(intervals) + 1;
      spacing[a] = r->lengths[a] / static_cast<double>(intervals);
    }
    std::vector<std::uint8_t> interior(
        static_cast<std::size_t>(nodes[0]) * nodes[1] * nodes[2], 0);
    for (int k = 0; k < nodes[2]; ++k) {
      for (int j = 0; j < nodes[1]; ++j) {
        for (int i = 0; i < nodes[0]; ++i) {
          const std::array<int, 3> idx{i, j, k};
          bool in = true;
          for (int a = 0; a < n; ++a) in = in && idx[a] > 0 && idx[a] < nodes[a] - 1;
          interior[i + static_cast<std::size_t>(nodes[0]) *
                           (j + static_cast<std::size_t>(nodes[1]) * k)] = in ? 1 : 0;
        }
      }
    }
    return Grid(n, nodes, spacing, origin, std::move(interior));
  }

  const auto& b = std::get<shape::Ball>(domain.shape());
  const long intervals = std::lround(2.0 * b.radius / h);
  if (intervals - 1 < kMinInteriorPerAxis) {
    throw ResolutionError("grid spacing too coarse: fewer than 8 interior nodes per axis");
  }
  const double hb = 2.0 * b.radius / static_cast<double>(intervals);
  for (int a = 0; a < n; ++a) {
    nodes[a] = static_cast<int>(intervals) + 1;
    spacing[a] = hb;
    origin[a] = -b.radius;
  }
  const double r2 = b.radius * b.radius * (1.0 - 1e-12);
  std::vector<std::uint8_t> interior(
      static_cast<std::size_t>(nodes[0]) * nodes[1] * nodes[2], 0);
  for (int k = 0; k < nodes[2]; ++k) {
    for (int j = 0; j < nodes[1]; ++j) {
      for (int i = 0; i < nodes[0]; ++i) {
        const std::array<int, 3> idx{i, j, k};
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
          const double x = origin[a] + idx[a] * hb;
          s += x * x;
        }
        interior[i + static_cast<std::size_t>(nodes[0]) *
                         (j + static_cast<std::size_t>(nodes[1]) * k)] = (s < r2) ? 1 : 0;
      }
    }
  }
  return Grid(n, nodes, spacing, origin, std::move(interior));
}

Domain read_mask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mask file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("mask file is empty: " + path);
  std::istringstream header(line);
  int rows = 0;
  int cols = 0;
  double spacing = 0.0;
  if (!(header >> rows >> cols >> spacing) || rows < 1 || cols < 1 || !(spacing > 0.0)) {
    throw ParameterError("mask header must be `rows cols spacing` with positive values");
  }
  std::vector<std::uint8_t> inside(static_cast<std::size_t>(rows) * cols, 0);
  for (int r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw ParameterError("mask file has too few rows");
    std::istringstream row(line);
    for (int c = 0; c < cols; ++c) {
      int v = -1;
      if (!(row >> v) || (v != 0 && v != 1)) {
        throw ParameterError("mask row " + std::to_string(r + 1) + " must hold " +
                             std::to_string(cols) + " values of 0 or 1");
      }
      inside[static_cast<std::size_t>(c) + static_cast<std::size_t>(cols) * r] =
          static_cast<std::uint8_t>(v);
    }
  }
  return Domain::masked(2, spacing, {cols, rows, 1}, std::move(inside));
}

}  // namespace critpatch
