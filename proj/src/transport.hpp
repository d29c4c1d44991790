#pragma once

// Discrete transport operator K ~ -d Lap + a . grad on the interior unknowns
// of a grid, Dirichlet rows eliminated. Shared by the eigen solver and the
// season propagator so both see the same discretisation.

#include <Eigen/SparseCore>

#include <array>
#include <span>

#include "critpatch/geometry.hpp"

namespace critpatch::detail {

struct TransportOperator {
  Eigen::SparseMatrix<double> matrix;
  bool upwind = false;
  /// max_i |a_i| h_i / (2d)
  double peclet = 0.0;
  /// Strict lower bound on the smallest real eigenvalue of `matrix`.
  double spectral_floor = 0.0;
  /// S = T^{-1} K T with T = diag(prod_i t_i^{k_i}) (k_i the lattice index
  /// along axis i) is symmetric. Holds ln t_i; S is only filled on request.
  std::array<double, 3> log_similarity{};
  Eigen::SparseMatrix<double> symmetric;
};

TransportOperator assemble_transport(const Grid& grid, double d, std::span<const double> drift,
                                     bool with_symmetric = false);

}  // namespace critpatch::detail
