#include "transport.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "critpatch/errors.hpp"

namespace critpatch::detail {

TransportOperator assemble_transport(const Grid& grid, double d, std::span<const double> drift,
                                     bool with_symmetric) {
  const int n = grid.dimension();
  if (!(d > 0.0) || !std::isfinite(d)) throw ParameterError("diffusivity must be positive");
  if (!drift.empty() && static_cast<int>(drift.size()) != n) {
    throw ParameterError("drift has " + std::to_string(drift.size()) +
                         " components but the domain is " + std::to_string(n) + "-D");
  }
  auto a = [&](int axis) { return drift.empty() ? 0.0 : drift[axis]; };

  TransportOperator op;
  for (int ax = 0; ax < n; ++ax) {
    op.peclet = std::max(op.peclet, std::abs(a(ax)) * grid.spacing()[ax] / (2.0 * d));
  }
  op.upwind = op.peclet >= 1.0;

  // Per-axis stencil: diag, coefficient of the +1 neighbour, of the -1 one.
  struct Stencil {
    double diag, plus, minus;
  };
  std::vector<Stencil> stencil(static_cast<std::size_t>(n));
  double floor = 0.0;
  for (int ax = 0; ax < n; ++ax) {
    const double h = grid.spacing()[ax];
    const double diff = d / (h * h);
    Stencil s{2.0 * diff, -diff, -diff};
    const double v = a(ax);
    if (!op.upwind) {
      s.plus += v / (2.0 * h);
      s.minus -= v / (2.0 * h);
    } else if (v > 0.0) {
      s.diag += v / h;
      s.minus -= v / h;
    } else if (v < 0.0) {
      s.diag -= v / h;
      s.plus += v / h;
    }
    stencil[ax] = s;
    // The operator is diagonally similar to a symmetric one with
    // off-diagonals -sqrt(plus*minus); Gershgorin on that gives the floor.
    floor += s.diag - 2.0 * std::sqrt(s.plus * s.minus);
    op.log_similarity[ax] = 0.5 * std::log(s.minus / s.plus);
  }
  op.spectral_floor = floor;

  const auto unknowns = static_cast<Eigen::Index>(grid.interior_count());
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<Eigen::Triplet<double>> sym;
  triplets.reserve(static_cast<std::size_t>(unknowns) * (2 * n + 1));
  if (with_symmetric) sym.reserve(triplets.capacity());
  for (Eigen::Index row = 0; row < unknowns; ++row) {
    const std::size_t node = grid.node(static_cast<std::size_t>(row));
    double diag = 0.0;
    for (int ax = 0; ax < n; ++ax) {
      const Stencil& s = stencil[ax];
      diag += s.diag;
      for (int dir : {-1, 1}) {
        const std::ptrdiff_t nb = grid.neighbour(node, ax, dir);
        if (nb < 0) continue;
        const std::ptrdiff_t col = grid.unknown(static_cast<std::size_t>(nb));
        if (col < 0) continue;
        const double coeff = dir > 0 ? s.plus : s.minus;
        if (coeff != 0.0) triplets.emplace_back(row, col, coeff);
        if (with_symmetric) sym.emplace_back(row, col, -std::sqrt(s.plus * s.minus));
      }
    }
    triplets.emplace_back(row, row, diag);
    if (with_symmetric) sym.emplace_back(row, row, diag);
  }
  op.matrix.resize(unknowns, unknowns);
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  if (with_symmetric) {
    op.symmetric.resize(unknowns, unknowns);
    op.symmetric.setFromTriplets(sym.begin(), sym.end());
    op.symmetric.makeCompressed();
  }
  return op;
}

}  // namespace critpatch::detail
