#pragma once

// Principal Dirichlet eigenvalue of  -d Lap(phi) + a . grad(phi) = lambda phi.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critpatch/geometry.hpp"

namespace critpatch {

enum class SpectralMethod { ClosedFormRect, ClosedFormBall, NumericGrid, BoundRFK, BoundLiYau };

std::string to_string(SpectralMethod m);

struct SpectralResult {
  double lambda1 = 0.0;
  /// Values on the grid's interior unknowns, max-normalised to 1.
  /// Empty for closed forms and bounds.
  std::vector<double> eigenfunction;
  /// max |K phi - lambda1 phi| with max(phi) = 1; 0 for closed forms.
  double residual = 0.0;
  SpectralMethod method = SpectralMethod::ClosedFormRect;
  std::optional<double> spacing;
  /// First-order upwind advection was used because the mesh Peclet number
  /// reached 1.
  bool upwind = false;
  int iterations = 0;
};

/// Bessel function of the first kind, ascending series. Valid for
/// -1/2 <= order and 0 < x <= 12.
double bessel_j(double order, double x);

/// First positive zero j_{m,1} of J_m for -1/2 <= m <= 5, to absolute
/// error below 1e-12. Throws NumericError if no sign change is found in
/// (m, m + pi + 2].
double bessel_first_zero(double order);

/// j_{n/2-1,1}, the zero that sets the ball eigenvalue in dimension n.
double ball_bessel_zero(int n);

/// |a|^2/(4d) + d pi^2 sum 1/L_i^2 for rectangles; d j^2_{n/2-1,1} / R^2
/// for balls with a = 0. Throws UnsupportedError for balls with drift and
/// for masks.
SpectralResult lambda1_closed(double d, std::span<const double> drift, const Domain& domain);

struct EigenOptions {
  double tolerance = 1e-6;  // residual, max norm
  int max_iterations = 2000;
};

/// Shifted inverse power iteration on the discrete transport operator
/// (central differences, or upwind when any mesh Peclet number
/// |a_i| h_i / (2d) reaches 1). Inner solves: BiCGSTAB with an ILUT
/// preconditioner to relative residual 1e-10.
SpectralResult lambda1_numeric(const Grid& grid, double d, std::span<const double> drift,
                               const EigenOptions& options = {});

/// Rayleigh-Faber-Krahn: d (|B_1|/|Omega|)^{2/n} j^2_{n/2-1,1}. A lower
/// bound on lambda1 for any divergence-free drift when d is the ellipticity
/// constant of the diffusion matrix.
double rfk_bound(double d, const Domain& domain);

/// Li-Yau: d n/(n+2) (2 pi)^2 |B_1|^{-2/n} (k/|Omega|)^{2/n}.
double liyau_bound(int k, double d, const Domain& domain);

}  // namespace critpatch
