#pragma once

#include <Eigen/SparseLU>

#include "robin/eigensolver.hpp"

namespace robin {

/// u'(h)[xi] and lambda'(h)[xi].
struct SensitivityResult {
  double lambda_prime = 0.0;
  Vector u_prime;  // full nodal, zero on GAMMA_D, M-orthogonal to u(h)
};

/// Adjoint state phi: Dirichlet data equal to the Neumann misfit on GAMMA_D,
/// Robin condition on GAMMA, M-orthogonal to u(h). The multiplier is the
/// coefficient c in (-Delta - lambda) phi = c u, which the orthogonality
/// constraint requires whenever the misfit is not L2(GAMMA_D)-orthogonal to
/// the Neumann trace of u.
struct AdjointState {
  Vector phi;
  double multiplier = 0.0;
};

/// The singular operator A - lambda M (A = K + B(h)) bordered by the column
/// M u, restricted to free nodes:
///
///     [ A - lambda M   M u ] [ x  ]   [ f ]
///     [ (M u)^T         0  ] [ mu ] = [ c ]
///
/// Nonsingular when lambda is a simple eigenvalue. Factorized once in the
/// constructor and read-only afterwards, so one instance serves every
/// sensitivity and adjoint solve at a given h. Holds references to `disc`,
/// `h` and `eig`, which must outlive it.
class BorderedSystem {
 public:
  BorderedSystem(const Discretization& disc, const RobinField& h, const EigenPair& eig);

  struct Solution {
    Vector x;  // free-node values
    double multiplier = 0.0;
  };

  /// Throws SolverError if the residual exceeds 1e-8 relative.
  Solution solve(const Vector& rhs_free, double constraint) const;

  const Discretization& disc() const { return disc_; }
  const RobinField& h() const { return h_; }
  const EigenPair& eig() const { return eig_; }
  /// Full-size K + B(h) - lambda M.
  const SparseSymMatrix& shifted() const { return shifted_; }
  /// The assembled (scaled) bordered matrix.
  const SparseSymMatrix& matrix() const { return bordered_; }
  /// Full-size M u.
  const Vector& mass_u() const { return mass_u_; }

 private:
  const Discretization& disc_;
  const RobinField& h_;
  const EigenPair& eig_;
  SparseSymMatrix shifted_;
  SparseSymMatrix bordered_;
  Vector mass_u_;
  double border_scale_ = 1.0;
  Eigen::SparseLU<SparseSymMatrix> lu_;
};

/// lambda' = \int_gamma xi u^2 ds.
double eigenvalue_derivative(const Discretization& disc, const EigenPair& eig, const RobinField& xi);

/// Sensitivity problem: (A - lambda M) u' = lambda' M u - B(xi) u with
/// u' = 0 on GAMMA_D and (M u)^T u' = 0.
SensitivityResult solve_sensitivity(const BorderedSystem& system, const RobinField& xi);

/// Variational Neumann trace of u' on GAMMA_D, consistent with its own
/// equation (source lambda' u, Robin data -xi u).
BoundaryField sensitivity_neumann_trace(const BorderedSystem& system, const SensitivityResult& sens,
                                        const RobinField& xi);

/// Adjoint state for measured Neumann data g on GAMMA_D: the Dirichlet data is
/// neumann_trace(u) - g.
AdjointState solve_adjoint(const BorderedSystem& system, const BoundaryField& g_data);

/// Adjoint state for given Dirichlet data on GAMMA_D.
AdjointState solve_adjoint_dirichlet(const BorderedSystem& system, const BoundaryField& dirichlet_data);

/// Throws DegeneracyError unless (lambda_2 - lambda_1) / lambda_1 > gap_tol.
/// Returns the relative gap.
double check_spectral_gap(const Discretization& disc, const RobinField& h, double gap_tol = 1e-8);

}  // namespace robin
