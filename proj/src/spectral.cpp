#include "critpatch/spectral.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "critpatch/errors.hpp"
#include "transport.hpp"

namespace critpatch {

std::string to_string(SpectralMethod m) {
  switch (m) {
    case SpectralMethod::ClosedFormRect: return "closed_form_rect";
    case SpectralMethod::ClosedFormBall: return "closed_form_ball";
    case SpectralMethod::NumericGrid: return "numeric_grid";
    case SpectralMethod::BoundRFK: return "bound_rfk";
    case SpectralMethod::BoundLiYau: return "bound_liyau";
  }
  return "unknown";
}

namespace {

void require_diffusivity(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ParameterError("diffusivity must be positive");
}

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

}  // namespace

SpectralResult lambda1_closed(double d, std::span<const double> drift, const Domain& domain) {
  require_diffusivity(d);
  if (!drift.empty() && static_cast<int>(drift.size()) != domain.dimension()) {
    throw ParameterError("drift dimension does not match the domain");
  }
  SpectralResult out;
  if (const auto* r = std::get_if<shape::HyperRect>(&domain.shape())) {
    double inv = 0.0;
    for (double L : r->lengths) inv += 1.0 / (L * L);
    out.lambda1 = norm2(drift) / (4.0 * d) + d * std::numbers::pi * std::numbers::pi * inv;
    out.method = SpectralMethod::ClosedFormRect;
    return out;
  }
  if (const auto* b = std::get_if<shape::Ball>(&domain.shape())) {
    if (norm2(drift) != 0.0) {
      throw UnsupportedError(
          "closed-form ball eigenvalue needs zero drift; use rfk_bound for a lower bound");
    }
    const double j = ball_bessel_zero(b->dim);
    out.lambda1 = d * j * j / (b->radius * b->radius);
    out.method = SpectralMethod::ClosedFormBall;
    return out;
  }
  throw UnsupportedError("no closed-form eigenvalue for masked domains");
}

SpectralResult lambda1_numeric(const Grid& grid, double d, std::span<const double> drift,
                               const EigenOptions& options) {
  require_diffusivity(d);
  const auto op = detail::assemble_transport(grid, d, drift, true);
  const Eigen::Index size = op.matrix.rows();
  const int dim = grid.dimension();

  // Iterate on the symmetric similar operator S = T^{-1} K T. With strong
  // drift the eigenfunction of K spans many orders of magnitude, which a
  // Krylov solve on K itself cannot resolve; psi = T^{-1} phi stays O(1).
  // Shifting by the spectral floor keeps S - sigma I positive definite and
  // separates lambda1 from lambda2 when drift crowds the spectrum.
  const double sigma = op.spectral_floor;
  Eigen::SparseMatrix<double> shifted = op.symmetric;
  for (Eigen::Index i = 0; i < size; ++i) shifted.coeffRef(i, i) -= sigma;

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      solver;
  solver.setTolerance(1e-10);
  solver.setMaxIterations(std::max<Eigen::Index>(2000, 4 * size));
  solver.compute(shifted);
  if (solver.info() != Eigen::Success) {
    throw NumericError("failed to factor the eigen-solve preconditioner");
  }

  // log T per unknown
  Eigen::VectorXd log_t(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const auto k = grid.lattice_index(grid.node(static_cast<std::size_t>(i)));
    double v = 0.0;
    for (int ax = 0; ax < dim; ++ax) v += k[ax] * op.log_similarity[ax];
    log_t[i] = v;
  }
  auto to_phi = [&](const Eigen::VectorXd& psi, Eigen::VectorXd& phi) {
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < size; ++i) {
      if (psi[i] > 0.0) top = std::max(top, std::log(psi[i]) + log_t[i]);
    }
    for (Eigen::Index i = 0; i < size; ++i) {
      phi[i] = psi[i] > 0.0 ? std::exp(std::log(psi[i]) + log_t[i] - top) : 0.0;
    }
  };

  Eigen::VectorXd psi = Eigen::VectorXd::Ones(size);
  Eigen::VectorXd next(size);
  Eigen::VectorXd phi(size);
  Eigen::VectorXd k_phi(size);
  double lambda = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= options.max_iterations; ++it) {
    const double scale = std::isfinite(previous) ? 1.0 / std::max(previous - sigma, 1e-300) : 1.0;
    next = solver.solveWithGuess(psi, psi * scale);
    if (solver.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "inner solve failed at iteration " << it << " (estimated error "
          << solver.error() << ")";
      throw NumericError(msg.str());
    }
    const double peak = next.cwiseAbs().maxCoeff();
    if (!(peak > 0.0) || !std::isfinite(peak)) throw NumericError("inverse iteration collapsed");
    psi = next / peak;

    to_phi(psi, phi);
    k_phi = op.matrix * phi;
    lambda = k_phi.dot(phi) / phi.dot(phi);
    residual = (k_phi - lambda * phi).cwiseAbs().maxCoeff();

    if (std::abs(lambda - previous) < 1e-8 * std::max(1.0, std::abs(lambda)) &&
        residual <= options.tolerance) {
      SpectralResult out;
      out.lambda1 = lambda;
      out.residual = residual;
      out.method = SpectralMethod::NumericGrid;
      out.spacing = grid.spacing()[0];
      out.upwind = op.upwind;
      out.iterations = it;
      out.eigenfunction.assign(phi.data(), phi.data() + size);
      return out;
    }
    previous = lambda;
  }
  std::ostringstream msg;
  msg << "inverse iteration did not converge in " << options.max_iterations
      << " iterations (lambda " << lambda << ", residual " << residual << ", tolerance "
      << options.tolerance << ")";
  throw NumericError(msg.str());
}

double rfk_bound(double d, const Domain& domain) {
  require_diffusivity(d);
  const int n = domain.dimension();
  const double j = ball_bessel_zero(n);
  return d * std::pow(unit_ball_volume(n) / volume(domain), 2.0 / n) * j * j;
}

double liyau_bound(int k, double d, const Domain& domain) {
  require_diffusivity(d);
  if (k < 1) throw ParameterError("eigenvalue index must be at least 1");
  const int n = domain.dimension();
  const double two_pi = 2.0 * std::numbers::pi;
  return d * (static_cast<double>(n) / (n + 2.0)) * two_pi * two_pi *
         std::pow(unit_ball_volume(n), -2.0 / n) * std::pow(k / volume(domain), 2.0 / n);
}

}  // namespace critpatch
