#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "robin/inverse.hpp"

namespace robin {

/// Built-in target 1 + xy/2 - x^2 y/5.
double paper4_target(const Point& p);

/// Uniform on (lo, hi) from the raw 64-bit stream, independent of the
/// standard library's distribution code.
double uniform(std::mt19937_64& rng, double lo, double hi);

/// offset + amplitude * sum_{k=1..3} (a_k cos k theta + b_k sin k theta) / 3 on
/// the tagged nodes, coefficients uniform on (-1, 1). Strictly positive when
/// offset > amplitude * 2.
BoundaryField random_smooth_field(const TriMesh& mesh, BoundaryTag tag, std::mt19937_64& rng, double offset,
                                  double amplitude);

/// One line of a verification report.
struct CheckRow {
  std::string suite;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<CheckRow> rows;

  void add(std::string suite, std::string name, double value, double threshold, bool pass);
  /// value <= threshold.
  void add_below(std::string suite, std::string name, double value, double threshold);
  bool all_passed() const;
  void append(const VerificationReport& other);
  void write_text(std::ostream& out) const;
  /// `suite,check,value,threshold,pass`.
  void write_csv(std::ostream& out) const;
};

// --- forward solver against the radial oracle -------------------------------

struct OracleRow {
  int n_circum = 0;
  int n_radial = 0;
  double lambda_fem = 0.0;
  double lambda_oracle = 0.0;
  double rel_err = 0.0;
  double trace_fem = 0.0;      // mean of the recovered Neumann trace
  double trace_spread = 0.0;   // (max - min) / |mean|
  double trace_oracle = 0.0;
};

/// h = h_const on the (1, 2) annulus for each (n_circum, n_radial) pair.
std::vector<OracleRow> oracle_comparison(const std::vector<std::pair<int, int>>& meshes, double h_const = 1.0);

/// Least-squares slope of log(rel_err) against log(1 / n_circum).
double observed_order(const std::vector<OracleRow>& rows);

// --- derivative checks ------------------------------------------------------

/// A small problem shared by the derivative suites: a (48,12) annulus, a
/// random admissible h, and data transferred from the built-in target on a
/// different mesh.
struct ProbeProblem {
  Discretization disc;
  RobinField h;
  BoundaryData data;
};
ProbeProblem make_probe_problem(std::uint64_t seed, int n_circum = 48, int n_radial = 12);

/// Eigensolver settings for finite-difference probes.
EigenOptions probe_eigen_options();

struct EigenFdPoint {
  double eps = 0.0;
  double fd = 0.0;       // (lambda(h + eps xi) - lambda(h)) / eps
  double rel_err = 0.0;  // |fd - lambda'| / |lambda'|
};
struct EigenFdCheck {
  double lambda_prime = 0.0;
  std::vector<EigenFdPoint> points;
};
EigenFdCheck eigenvalue_fd_check(const Discretization& disc, const RobinField& h, const RobinField& xi,
                                 const std::vector<double>& eps);

struct TaylorPoint {
  double eps = 0.0;
  double u_ratio = 0.0;       // ||u(h+eps xi) - u(h) - eps u'||_V / eps
  double lambda_ratio = 0.0;  // |lambda(h+eps xi) - lambda(h) - eps lambda'| / eps
};
/// The perturbed eigenfunction is sign-aligned with u(h) before differencing.
std::vector<TaylorPoint> taylor_remainders(const Discretization& disc, const RobinField& h, const RobinField& xi,
                                           const std::vector<double>& eps);

struct DualityCheck {
  double boundary_misfit_pairing = 0.0;  // \int_{Gamma_D} d du'/dnu ds
  double gamma_pairing = 0.0;            // \int_gamma xi u phi ds
  double rel_err = 0.0;
  double phi_orthogonality = 0.0;        // |(M u)^T phi|
  double u_prime_orthogonality = 0.0;    // |(M u)^T u'|
};
DualityCheck duality_check(const Discretization& disc, const RobinField& h, const RobinField& xi,
                           const BoundaryField& misfit);

struct GradientCheck {
  double adjoint = 0.0;  // \int_gamma G xi ds
  double fd = 0.0;       // (F(h + eps xi) - F(h - eps xi)) / (2 eps)
  double rel_err = 0.0;
};
GradientCheck gradient_fd_check(const Discretization& disc, const RobinField& h, const BoundaryData& data,
                                double eta, const RobinField& xi, double eps = 1e-4);

// --- suites used by `verify` -------------------------------------------------

/// (64,16), (128,32), (256,64).
std::vector<std::pair<int, int>> oracle_suite_meshes();

VerificationReport run_oracle_suite();
VerificationReport run_gradient_suite(std::uint64_t seed);
VerificationReport run_taylor_suite(std::uint64_t seed);
VerificationReport run_adjoint_suite(std::uint64_t seed);

}  // namespace robin
