#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "robin/data.hpp"
#include "robin/errors.hpp"
#include "robin/sensitivity.hpp"

namespace robin {

/// Norm used for the stopping test on the descent direction.
enum class GradientNorm {
  BoundaryL2,  // ||delta||_{L2(gamma)}
  DiscreteC1,  // max(nodal sup, sup of edgewise tangential difference quotients)
};

struct ReconstructionConfig {
  double tau = 0.1;   // fixed step size
  double tol = 1e-5;  // stop when ||delta_k|| <= tol
  double eta = 0.0;   // Tikhonov weight
  int max_iter = 1000;
  GradientNorm gradient_norm = GradientNorm::DiscreteC1;
  double h_min = 1e-6;  // admissibility clamp
  EigenOptions eigen;

  void validate() const;
};

/// Spectral data carried onto the GAMMA_D nodes of the reconstruction mesh.
struct BoundaryData {
  double lambda = 0.0;
  BoundaryField g;
};

BoundaryData prepare_data(const SpectralData& data, const TriMesh& mesh);

struct FunctionalTerms {
  double value = 0.0;
  double neumann_misfit = 0.0;     // 1/2 ||du/dnu - g||^2_{L2(Gamma_D)}
  double eigenvalue_misfit = 0.0;  // 1/2 |lambda(h) - lambda|^2
  double penalty = 0.0;            // eta/2 ||h||^2_{L2(gamma)}
  EigenPair eig;
  BoundaryField trace;  // du/dnu on Gamma_D
};

/// F(h) = 1/2 ||du/dnu(h) - g||^2 + 1/2 |lambda(h) - lambda|^2 + eta/2 ||h||^2.
FunctionalTerms evaluate_functional_terms(const Discretization& disc, const RobinField& h, const BoundaryData& data,
                                          double eta, EigenOptions options = {});
double evaluate_functional(const Discretization& disc, const RobinField& h, const BoundaryData& data, double eta,
                           EigenOptions options = {});
double evaluate_functional(const Discretization& disc, const RobinField& h, const SpectralData& data, double eta,
                           EigenOptions options = {});

struct GradientResult {
  RobinField gradient;  // G; the descent direction is -G
  FunctionalTerms terms;
  AdjointState adjoint;
};

/// L2(gamma) gradient of the discrete functional: boundary_inner(G, xi) is
/// the exact directional derivative of F for every nodal direction xi. The
/// misfit part is the Riesz representer of
///   xi -> \int_gamma (u phi + (lambda(h) - lambda) u^2) xi ds
/// and the penalty part is eta h, added nodally.
GradientResult functional_gradient_terms(const Discretization& disc, const RobinField& h, const BoundaryData& data,
                                         double eta, EigenOptions options = {});
RobinField functional_gradient(const Discretization& disc, const RobinField& h, const BoundaryData& data, double eta,
                               EigenOptions options = {});

/// The nodal product u phi + (lambda(h) - lambda) u^2 + eta h at GAMMA nodes.
/// Agrees with functional_gradient up to O(mesh^2); kept for comparison.
RobinField pointwise_gradient(const Discretization& disc, const RobinField& h, const BoundaryData& data, double eta,
                              EigenOptions options = {});

double direction_norm(const Discretization& disc, const RobinField& direction, GradientNorm norm);

struct TraceRow {
  int iter = 0;
  double functional = 0.0;
  double grad_norm = 0.0;
  double lambda = 0.0;
  std::optional<double> rel_err;
  int clamped = 0;  // nodes clamped to h_min by the update that followed
  RobinField h;
};

struct ReconstructionTrace {
  std::vector<TraceRow> rows;

  /// `iter,F,grad_norm,lambda,rel_err`.
  void write_csv(std::ostream& out) const;
};

struct ReconstructionResult {
  RobinField h;
  ReconstructionTrace trace;
  bool converged = false;
};

/// Failure inside the descent loop; carries the iterations completed so far.
class ReconstructionError : public Error {
 public:
  ReconstructionError(const std::string& what, ReconstructionTrace partial)
      : Error(what), partial_(std::move(partial)) {}
  const ReconstructionTrace& partial_trace() const { return partial_; }

 private:
  ReconstructionTrace partial_;
};

using ClosedForm = std::function<double(const Point&)>;

/// Gradient descent with fixed step: h_{k+1} = max(h_k - tau G(h_k), h_min).
/// Stops once ||G(h_k)|| <= tol or after max_iter evaluations.
ReconstructionResult reconstruct(const Discretization& disc, const BoundaryData& data, const RobinField& h0,
                                 const ReconstructionConfig& config, const ClosedForm* truth = nullptr);

/// ||h_rec - I h_true||_{L2(gamma)} / ||I h_true||_{L2(gamma)}, I the nodal interpolant.
double relative_l2_error(const TriMesh& mesh, const RobinField& h_rec, const ClosedForm& h_true);

}  // namespace robin
