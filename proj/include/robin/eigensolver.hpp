#pragma once

#include <optional>
#include <vector>

#include "robin/fem.hpp"

namespace robin {

/// Principal eigenpair of (K + B(h)) u = lambda M u on the GAMMA_D-constrained space.
struct EigenPair {
  double lambda = 0.0;
  Vector u;  // full nodal vector, zero on GAMMA_D, u^T M u = 1, positive
  double residual_norm = 0.0;  // ||(K+B)u - lambda M u|| / ||lambda M u|| on free nodes
  int iterations = 0;
};

struct EigenOptions {
  double tol = 1e-10;
  int max_iter = 2000;
  /// Spectral shift sigma, iterating with (A - sigma M)^{-1} M. Only used if
  /// A - sigma M factorizes as positive definite (sigma below lambda_1);
  /// otherwise the solver falls back to shift 0.
  double shift = 0.0;
  /// Starting vector (full nodal). Defaults to the constant 1.
  std::optional<Vector> initial;
};

/// Inverse iteration, by default with shift 0 from the constant vector. Converged when
/// the relative Rayleigh-quotient change and the relative residual are both
/// at most `tol`. The returned eigenfunction has a positive M-weighted mean.
EigenPair principal_eigenpair(const Discretization& disc, const RobinField& h, EigenOptions options = {});

struct Spectrum {
  std::vector<double> values;   // ascending
  std::vector<Vector> vectors;  // full nodal, M-orthonormal
};

/// The k smallest eigenpairs by inverse iteration with M-orthogonal deflation.
Spectrum lowest_eigenvalues(const Discretization& disc, const RobinField& h, int k, EigenOptions options = {});

}  // namespace robin
