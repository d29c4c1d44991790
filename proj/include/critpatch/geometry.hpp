#pragma once

// Habitat shapes, their measures, Schwarz symmetrization, and the
// vertex-centred lattices used by the numerical solvers.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace critpatch {

namespace shape {
/// [0, L_1] x ... x [0, L_n]
struct HyperRect {
  std::vector<double> lengths;
};
/// Ball of the given radius centred at the origin.
struct Ball {
  double radius;
  int dim;
};
/// Boolean lattice: cell (i0, i1[, i2]) sits at (i0 h, i1 h[, i2 h]) and is
/// habitat when inside[i0 + extent[0] * (i1 + extent[1] * i2)] != 0.
/// Axis 0 is the fastest-varying index.
struct Masked {
  int dim;
  double spacing;
  std::array<int, 3> extent;
  std::vector<std::uint8_t> inside;
};
}  // namespace shape

class Domain {
 public:
  using Shape = std::variant<shape::HyperRect, shape::Ball, shape::Masked>;

  explicit Domain(Shape s);

  static Domain rect(std::vector<double> lengths) {
    return Domain(shape::HyperRect{std::move(lengths)});
  }
  static Domain ball(double radius, int dim) { return Domain(shape::Ball{radius, dim}); }
  static Domain masked(int dim, double spacing, std::array<int, 3> extent,
                       std::vector<std::uint8_t> inside);

  /// Mask of the lattice points strictly inside `contains`, sampled at
  /// spacing h over the box [0, box_0] x [0, box_1] (x [0, box_2]).
  static Domain mask_from(int dim, double h, std::array<double, 3> box,
                          const std::function<bool(std::span<const double>)>& contains);

  int dimension() const;
  const Shape& shape() const { return shape_; }
  bool is_rect() const { return std::holds_alternative<shape::HyperRect>(shape_); }
  bool is_ball() const { return std::holds_alternative<shape::Ball>(shape_); }
  bool is_masked() const { return std::holds_alternative<shape::Masked>(shape_); }

 private:
  Shape shape_;
};

/// |B_1| = pi^{n/2} / Gamma(1 + n/2).
double unit_ball_volume(int n);

double volume(const Domain& domain);

/// The ball of equal volume and dimension.
Domain symmetrize(const Domain& domain);

/// Vertex-centred lattice. Nodes flagged interior carry unknowns; every
/// other node is a Dirichlet node with value 0.
class Grid {
 public:
  Grid(int dim, std::array<int, 3> nodes, std::array<double, 3> spacing,
       std::array<double, 3> origin, std::vector<std::uint8_t> interior);

  int dimension() const { return dim_; }
  const std::array<int, 3>& nodes() const { return nodes_; }
  const std::array<double, 3>& spacing() const { return spacing_; }
  std::size_t lattice_size() const { return unknown_of_node_.size(); }
  std::size_t interior_count() const { return node_of_unknown_.size(); }

  /// Unknown index of a lattice node, or -1 for Dirichlet nodes.
  std::ptrdiff_t unknown(std::size_t node) const { return unknown_of_node_[node]; }
  std::size_t node(std::size_t unknown) const { return node_of_unknown_[unknown]; }

  std::array<int, 3> lattice_index(std::size_t node) const;
  std::size_t linear_index(const std::array<int, 3>& idx) const;
  /// Neighbour of `node` one step along `axis` in direction `dir` (+1/-1),
  /// or -1 if it falls off the lattice.
  std::ptrdiff_t neighbour(std::size_t node, int axis, int dir) const;

  std::array<double, 3> coordinates(std::size_t node) const;

  /// Product of the spacings.
  double cell_measure() const;

 private:
  int dim_;
  std::array<int, 3> nodes_;
  std::array<double, 3> spacing_;
  std::array<double, 3> origin_;
  std::vector<std::ptrdiff_t> unknown_of_node_;
  std::vector<std::size_t> node_of_unknown_;
};

/// Lattice for `domain` at nominal spacing h. Rectangles use per-axis
/// spacing L_i / round(L_i / h); balls use a symmetric lattice over
/// [-R, R]^n; masks are taken as-is (h is ignored). Throws ResolutionError
/// when an analytic shape would get fewer than 8 interior nodes per axis.
Grid rasterize(const Domain& domain, double h);

/// Read a 2-D mask: first line `rows cols spacing`, then `rows` lines of
/// `cols` space-separated 0/1 values. Row r maps to axis 1, column c to
/// axis 0.
Domain read_mask(const std::string& path);

}  // namespace critpatch
