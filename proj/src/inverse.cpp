#include "robin/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace robin {

namespace {

constexpr double kWarmShiftFactor = 0.9;

}  // namespace

void ReconstructionConfig::validate() const {
  if (!(tau > 0.0)) throw ParameterError("step size tau must be positive");
  if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
  if (!(eta >= 0.0)) throw ParameterError("regularization eta must be nonnegative");
  if (max_iter < 1) throw ParameterError("max_iter must be at least 1");
  if (!(h_min > 0.0)) throw ParameterError("h_min must be positive");
}

BoundaryData prepare_data(const SpectralData& data, const TriMesh& mesh) {
  data.validate();
  return {data.lambda, transfer_to_mesh(data, mesh)};
}

FunctionalTerms evaluate_functional_terms(const Discretization& disc, const RobinField& h, const BoundaryData& data,
                                          double eta, EigenOptions options) {
  data.g.check_on(disc.mesh());
  FunctionalTerms out;
  out.eig = principal_eigenpair(disc, h, options);
  out.trace = neumann_trace(disc, out.eig.u, out.eig.lambda, h);
  BoundaryField misfit = out.trace;
  misfit.values -= data.g.values;
  out.neumann_misfit = 0.5 * disc.gamma_d_inner(misfit, misfit);
  const double dl = out.eig.lambda - data.lambda;
  out.eigenvalue_misfit = 0.5 * dl * dl;
  out.penalty = 0.5 * eta * disc.gamma_inner(h, h);
  out.value = out.neumann_misfit + out.eigenvalue_misfit + out.penalty;
  return out;
}

double evaluate_functional(const Discretization& disc, const RobinField& h, const BoundaryData& data, double eta,
                           EigenOptions options) {
  return evaluate_functional_terms(disc, h, data, eta, options).value;
}

double evaluate_functional(const Discretization& disc, const RobinField& h, const SpectralData& data, double eta,
                           EigenOptions options) {
  return evaluate_functional(disc, h, prepare_data(data, disc.mesh()), eta, options);
}

GradientResult functional_gradient_terms(const Discretization& disc, const RobinField& h, const BoundaryData& data,
                                         double eta, EigenOptions options) {
  GradientResult out;
  out.terms = evaluate_functional_terms(disc, h, data, eta, options);
  const EigenPair& eig = out.terms.eig;

  BoundaryField misfit = out.terms.trace;
  misfit.values -= data.g.values;
  const BorderedSystem system(disc, h, eig);
  out.adjoint = solve_adjoint_dirichlet(system, misfit);

  // load_i = \int_gamma psi_i u (phi + (lambda(h) - lambda) u) ds
  const double dl = eig.lambda - data.lambda;
  const Vector load_full =
      assemble_boundary_mass(disc.mesh(), BoundaryTag::Gamma, eig.u) * (out.adjoint.phi + dl * eig.u);
  const auto& gamma_nodes = disc.mesh().boundary_nodes(BoundaryTag::Gamma);
  Vector load(static_cast<Index>(gamma_nodes.size()));
  for (std::size_t k = 0; k < gamma_nodes.size(); ++k) load[static_cast<Index>(k)] = load_full[gamma_nodes[k]];

  out.gradient = disc.gamma_riesz(load);
  if (eta != 0.0) out.gradient.values += eta * h.values;
  return out;
}

RobinField functional_gradient(const Discretization& disc, const RobinField& h, const BoundaryData& data, double eta,
                               EigenOptions options) {
  return functional_gradient_terms(disc, h, data, eta, options).gradient;
}

RobinField pointwise_gradient(const Discretization& disc, const RobinField& h, const BoundaryData& data, double eta,
                              EigenOptions options) {
  const GradientResult full = functional_gradient_terms(disc, h, data, eta, options);
  const Vector& u = full.terms.eig.u;
  const Vector& phi = full.adjoint.phi;
  const double dl = full.terms.eig.lambda - data.lambda;
  RobinField out = h;
  for (Index k = 0; k < out.size(); ++k) {
    const Index node = out.nodes[static_cast<std::size_t>(k)];
    out.values[k] = u[node] * phi[node] + dl * u[node] * u[node] + eta * h.values[k];
  }
  return out;
}

double direction_norm(const Discretization& disc, const RobinField& direction, GradientNorm norm) {
  direction.check_on(disc.mesh());
  if (norm == GradientNorm::BoundaryL2) return std::sqrt(std::max(0.0, disc.gamma_inner(direction, direction)));

  double result = direction.values.cwiseAbs().maxCoeff();
  const Vector full = direction.scatter(disc.mesh().num_vertices());
  for (const auto& e : disc.mesh().boundary_edges()) {
    if (e.tag != direction.tag) continue;
    result = std::max(result, std::abs(full[e.nodes[1]] - full[e.nodes[0]]) / e.length);
  }
  return result;
}

void ReconstructionTrace::write_csv(std::ostream& out) const {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << std::setprecision(17);
  ss << "iter,F,grad_norm,lambda,rel_err\n";
  for (const auto& row : rows) {
    ss << row.iter << ',' << row.functional << ',' << row.grad_norm << ',' << row.lambda << ',';
    if (row.rel_err) ss << *row.rel_err;
    ss << '\n';
  }
  out << ss.str();
}

ReconstructionResult reconstruct(const Discretization& disc, const BoundaryData& data, const RobinField& h0,
                                 const ReconstructionConfig& config, const ClosedForm* truth) {
  config.validate();
  h0.check_on(disc.mesh());
  if (!h0.admissible()) throw DomainError("initial guess must be strictly positive");

  ReconstructionResult out;
  RobinField h = h0;
  EigenOptions eigen = config.eigen;
  for (int k = 0; k < config.max_iter; ++k) {
    GradientResult grad;
    try {
      grad = functional_gradient_terms(disc, h, data, config.eta, eigen);
    } catch (const Error& err) {
      throw ReconstructionError("iteration " + std::to_string(k) + ": " + err.what(), out.trace);
    }
    // warm start the next eigensolve: previous eigenvector, shift safely
    // below the previous eigenvalue
    eigen.initial = grad.terms.eig.u;
    eigen.shift = kWarmShiftFactor * grad.terms.eig.lambda;

    TraceRow row;
    row.iter = k;
    row.functional = grad.terms.value;
    row.grad_norm = direction_norm(disc, grad.gradient, config.gradient_norm);
    row.lambda = grad.terms.eig.lambda;
    if (truth != nullptr) row.rel_err = relative_l2_error(disc.mesh(), h, *truth);
    row.h = h;

    if (row.grad_norm <= config.tol) {
      out.trace.rows.push_back(std::move(row));
      out.converged = true;
      break;
    }
    for (Index i = 0; i < h.size(); ++i) {
      double next = h.values[i] - config.tau * grad.gradient.values[i];
      if (next < config.h_min) {
        next = config.h_min;
        ++row.clamped;
      }
      h.values[i] = next;
    }
    out.trace.rows.push_back(std::move(row));
  }
  out.h = std::move(h);
  return out;
}

double relative_l2_error(const TriMesh& mesh, const RobinField& h_rec, const ClosedForm& h_true) {
  h_rec.check_on(mesh);
  const Vector truth = RobinField::from_function(mesh, BoundaryTag::Gamma, h_true).scatter(mesh.num_vertices());
  const Vector diff = h_rec.scatter(mesh.num_vertices()) - truth;
  const double num = boundary_inner(mesh, BoundaryTag::Gamma, diff, diff);
  const double den = boundary_inner(mesh, BoundaryTag::Gamma, truth, truth);
  return std::sqrt(num / den);
}

}  // namespace robin
