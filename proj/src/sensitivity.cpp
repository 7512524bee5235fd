#include "robin/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robin/errors.hpp"

namespace robin {

namespace {

constexpr double kSolveTol = 1e-8;

}  // namespace

BorderedSystem::BorderedSystem(const Discretization& disc, const RobinField& h, const EigenPair& eig)
    : disc_(disc), h_(h), eig_(eig) {
  h.check_on(disc.mesh());
  if (eig.u.size() != disc.mesh().num_vertices()) throw InputError("eigenpair does not match the mesh");
  const auto& red = disc.reduction();

  shifted_ = disc.stiffness() + disc.robin_mass(h) - eig.lambda * disc.mass();
  mass_u_ = disc.mass() * eig.u;
  const SparseSymMatrix block = red.reduce(shifted_);
  const Vector border = red.restrict_free(mass_u_);

  // scale the border to the magnitude of the operator diagonal
  const double diag_max = block.diagonal().cwiseAbs().maxCoeff();
  const double border_max = border.cwiseAbs().maxCoeff();
  if (!(border_max > 0.0)) throw InputError("eigenfunction vanishes on the free nodes");
  border_scale_ = diag_max / border_max;

  const Index n = red.free_size();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(block.nonZeros() + 2 * n));
  for (Index col = 0; col < block.outerSize(); ++col) {
    for (SparseSymMatrix::InnerIterator it(block, col); it; ++it) triplets.emplace_back(it.row(), it.col(), it.value());
  }
  for (Index i = 0; i < n; ++i) {
    const double b = border_scale_ * border[i];
    triplets.emplace_back(i, n, b);
    triplets.emplace_back(n, i, b);
  }
  bordered_.resize(n + 1, n + 1);
  bordered_.setFromTriplets(triplets.begin(), triplets.end());
  bordered_.makeCompressed();

  lu_.analyzePattern(bordered_);
  lu_.factorize(bordered_);
  if (lu_.info() != Eigen::Success) {
    throw DegeneracyError("bordered system is singular; the principal eigenvalue is not simple");
  }
}

BorderedSystem::Solution BorderedSystem::solve(const Vector& rhs_free, double constraint) const {
  const Index n = disc_.reduction().free_size();
  if (rhs_free.size() != n) throw InputError("bordered right-hand side has the wrong size");
  Vector rhs(n + 1);
  rhs.head(n) = rhs_free;
  rhs[n] = border_scale_ * constraint;
  const Vector sol = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success || !sol.allFinite()) throw DegeneracyError("bordered solve failed");

  const double rhs_norm = rhs.norm();
  const double res = (bordered_ * sol - rhs).norm();
  if (rhs_norm > 0.0 && res > kSolveTol * rhs_norm) {
    throw SolverError("bordered solve residual " + std::to_string(res / rhs_norm) + " above tolerance");
  }
  return {sol.head(n), border_scale_ * sol[n]};
}

double eigenvalue_derivative(const Discretization& disc, const EigenPair& eig, const RobinField& xi) {
  if (xi.tag != BoundaryTag::Gamma) throw InputError("perturbation must live on GAMMA");
  xi.check_on(disc.mesh());
  const Vector w = xi.scatter(disc.mesh().num_vertices());
  return boundary_inner(disc.mesh(), BoundaryTag::Gamma, eig.u, eig.u, &w);
}

SensitivityResult solve_sensitivity(const BorderedSystem& system, const RobinField& xi) {
  const auto& disc = system.disc();
  const auto& red = disc.reduction();
  const auto& u = system.eig().u;

  SensitivityResult out;
  out.lambda_prime = eigenvalue_derivative(disc, system.eig(), xi);
  const Vector source = out.lambda_prime * system.mass_u() - disc.robin_mass(xi) * u;
  const Vector rhs = red.restrict_free(source);
  const auto sol = system.solve(rhs, 0.0);

  // the source is M-orthogonal to u, so the multiplier vanishes up to solver error
  const Vector mu_free = red.restrict_free(system.mass_u());
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff() / mu_free.cwiseAbs().maxCoeff());
  if (std::abs(sol.multiplier) > 1e-8 * scale) {
    throw SolverError("sensitivity multiplier " + std::to_string(sol.multiplier) + " does not vanish");
  }
  out.u_prime = red.expand(sol.x);
  return out;
}

BoundaryField sensitivity_neumann_trace(const BorderedSystem& system, const SensitivityResult& sens,
                                        const RobinField& xi) {
  const auto& disc = system.disc();
  const Vector residual =
      system.shifted() * sens.u_prime + disc.robin_mass(xi) * system.eig().u - sens.lambda_prime * system.mass_u();
  return disc.flux_from_residual(residual);
}

AdjointState solve_adjoint_dirichlet(const BorderedSystem& system, const BoundaryField& dirichlet_data) {
  const auto& disc = system.disc();
  const auto& red = disc.reduction();
  if (dirichlet_data.tag != BoundaryTag::GammaD) throw InputError("adjoint Dirichlet data must live on GAMMA_D");
  dirichlet_data.check_on(disc.mesh());

  // lifting: the data on GAMMA_D nodes, zero elsewhere
  const Vector& d = dirichlet_data.values;
  const Vector rhs = -(red.coupling(system.shifted()) * d);
  const double constraint = -red.restrict_constrained(system.mass_u()).dot(d);
  const auto sol = system.solve(rhs, constraint);
  return {red.expand(sol.x, &d), sol.multiplier};
}

AdjointState solve_adjoint(const BorderedSystem& system, const BoundaryField& g_data) {
  const auto& disc = system.disc();
  if (g_data.tag != BoundaryTag::GammaD) throw InputError("Neumann data must live on GAMMA_D");
  g_data.check_on(disc.mesh());
  BoundaryField misfit = neumann_trace(disc, system.eig().u, system.eig().lambda, system.h());
  misfit.values -= g_data.values;
  return solve_adjoint_dirichlet(system, misfit);
}

double check_spectral_gap(const Discretization& disc, const RobinField& h, double gap_tol) {
  const auto spectrum = lowest_eigenvalues(disc, h, 2);
  const double gap = (spectrum.values[1] - spectrum.values[0]) / spectrum.values[0];
  if (!(gap > gap_tol)) {
    throw DegeneracyError("principal eigenvalue is not simple (relative gap " + std::to_string(gap) + ")");
  }
  return gap;
}

}  // namespace robin
