#pragma once

#include <vector>

namespace robin {

/// Principal mode of the radial reduction on the annulus r_inner < r < r_outer
/// with constant Robin coefficient on the inner circle and Dirichlet data on
/// the outer one:
///
///   -(1/r)(r u')' = lambda u,   h u(r_inner) - u'(r_inner) = 0,   u(r_outer) = 0.
///
/// Independent of the 2D finite-element code; used to validate it.
struct RadialSolution {
  double lambda = 0.0;         // Richardson-extrapolated
  double lambda_coarse = 0.0;  // n_grid intervals
  double lambda_fine = 0.0;    // 2 n_grid intervals
  std::vector<double> r_samples;
  std::vector<double> u_samples;  // 2*pi \int r u^2 dr = 1, positive
  double du_at_outer = 0.0;       // u'(r_outer), extrapolated
};

/// Second-order finite differences with a ghost-point Robin row, inverse
/// iteration, and Richardson extrapolation over n_grid and 2 n_grid.
RadialSolution radial_principal(double h_const, double r_inner, double r_outer, int n_grid);

/// Finite-difference eigenvalue on a single grid (no extrapolation).
double radial_eigenvalue_fd(double h_const, double r_inner, double r_outer, int n_grid);

/// Bessel functions J0 and Y0 by their power series (adequate for |x| <~ 20).
double bessel_j0_series(double x);
double bessel_y0_series(double x);

/// Principal Dirichlet-Dirichlet eigenvalue of the annulus: k^2 with k the
/// first root of J0(k a) Y0(k b) - J0(k b) Y0(k a), found by bisection.
double dirichlet_annulus_eigenvalue(double r_inner, double r_outer);

}  // namespace robin
