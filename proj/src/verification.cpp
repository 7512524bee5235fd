#include "robin/verification.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "robin/radial_oracle.hpp"

namespace robin {

namespace {

constexpr double kRadiusInner = 1.0;
constexpr double kRadiusOuter = 2.0;
constexpr int kOracleGrid = 2000;

RobinField perturbed(const RobinField& h, const RobinField& xi, double eps) {
  RobinField out = h;
  out.values += eps * xi.values;
  return out;
}

std::string mesh_label(int nc, int nr) { return std::to_string(nc) + "x" + std::to_string(nr); }

std::string sci(double v) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << std::setprecision(3) << std::scientific << v;
  return ss.str();
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

}  // namespace

double paper4_target(const Point& p) { return 1.0 + 0.5 * p.x * p.y - 0.2 * p.x * p.x * p.y; }

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

BoundaryField random_smooth_field(const TriMesh& mesh, BoundaryTag tag, std::mt19937_64& rng, double offset,
                                  double amplitude) {
  double a[3];
  double b[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = uniform(rng, -1.0, 1.0);
    b[k] = uniform(rng, -1.0, 1.0);
  }
  return BoundaryField::from_function(mesh, tag, [&](const Point& p) {
    const double t = polar_angle(p);
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += a[k] * std::cos((k + 1) * t) + b[k] * std::sin((k + 1) * t);
    return offset + amplitude * s / 3.0;
  });
}

void VerificationReport::add(std::string suite, std::string name, double value, double threshold, bool pass) {
  rows.push_back({std::move(suite), std::move(name), value, threshold, pass});
}

void VerificationReport::add_below(std::string suite, std::string name, double value, double threshold) {
  add(std::move(suite), std::move(name), value, threshold, std::isfinite(value) && value <= threshold);
}

bool VerificationReport::all_passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

void VerificationReport::append(const VerificationReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

void VerificationReport::write_text(std::ostream& out) const {
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.suite.size() + r.name.size() + 1);
  for (const auto& r : rows) {
    const std::string label = r.suite + "/" + r.name;
    out << (r.pass ? "ok   " : "FAIL ") << label << std::string(width + 2 - label.size(), ' ') << sci(r.value)
        << "  (limit " << sci(r.threshold) << ")\n";
  }
}

void VerificationReport::write_csv(std::ostream& out) const {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << std::setprecision(17);
  ss << "suite,check,value,threshold,pass\n";
  for (const auto& r : rows) {
    ss << r.suite << ',' << r.name << ',' << r.value << ',' << r.threshold << ',' << (r.pass ? 1 : 0) << '\n';
  }
  out << ss.str();
}

std::vector<OracleRow> oracle_comparison(const std::vector<std::pair<int, int>>& meshes, double h_const) {
  const RadialSolution oracle = radial_principal(h_const, kRadiusInner, kRadiusOuter, kOracleGrid);
  std::vector<OracleRow> rows;
  for (const auto& [nc, nr] : meshes) {
    const Discretization disc(build_annulus_mesh(kRadiusInner, kRadiusOuter, nc, nr));
    const RobinField h = RobinField::constant(disc.mesh(), BoundaryTag::Gamma, h_const);
    const EigenPair eig = principal_eigenpair(disc, h);
    const BoundaryField g = neumann_trace(disc, eig.u, eig.lambda, h);

    OracleRow row;
    row.n_circum = nc;
    row.n_radial = nr;
    row.lambda_fem = eig.lambda;
    row.lambda_oracle = oracle.lambda;
    row.rel_err = std::abs(eig.lambda - oracle.lambda) / oracle.lambda;
    row.trace_fem = g.values.mean();
    row.trace_spread = (g.values.maxCoeff() - g.values.minCoeff()) / std::abs(row.trace_fem);
    row.trace_oracle = oracle.du_at_outer;
    rows.push_back(row);
  }
  return rows;
}

double observed_order(const std::vector<OracleRow>& rows) {
  if (rows.size() < 2) throw ParameterError("convergence order needs at least two meshes");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& r : rows) {
    const double x = std::log(1.0 / r.n_circum);
    const double y = std::log(r.rel_err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

EigenOptions probe_eigen_options() {
  EigenOptions opt;
  opt.tol = 1e-13;
  opt.max_iter = 5000;
  return opt;
}

ProbeProblem make_probe_problem(std::uint64_t seed, int n_circum, int n_radial) {
  std::mt19937_64 rng(seed);
  Discretization disc(build_annulus_mesh(kRadiusInner, kRadiusOuter, n_circum, n_radial));
  RobinField h = random_smooth_field(disc.mesh(), BoundaryTag::Gamma, rng, 1.0, 0.3);

  const Discretization gen(build_annulus_mesh(kRadiusInner, kRadiusOuter, n_circum + 16, n_radial + 4));
  const RobinField target = RobinField::from_function(gen.mesh(), BoundaryTag::Gamma, paper4_target);
  const SpectralData spectral = synthesize_data(gen, target, probe_eigen_options());
  BoundaryData data = prepare_data(spectral, disc.mesh());
  return {std::move(disc), std::move(h), std::move(data)};
}

EigenFdCheck eigenvalue_fd_check(const Discretization& disc, const RobinField& h, const RobinField& xi,
                                 const std::vector<double>& eps) {
  const EigenOptions opt = probe_eigen_options();
  const EigenPair eig = principal_eigenpair(disc, h, opt);
  EigenFdCheck out;
  out.lambda_prime = eigenvalue_derivative(disc, eig, xi);
  for (double e : eps) {
    const double lambda_e = principal_eigenpair(disc, perturbed(h, xi, e), opt).lambda;
    const double fd = (lambda_e - eig.lambda) / e;
    out.points.push_back({e, fd, std::abs(fd - out.lambda_prime) / std::abs(out.lambda_prime)});
  }
  return out;
}

std::vector<TaylorPoint> taylor_remainders(const Discretization& disc, const RobinField& h, const RobinField& xi,
                                           const std::vector<double>& eps) {
  const EigenOptions opt = probe_eigen_options();
  const EigenPair eig = principal_eigenpair(disc, h, opt);
  const BorderedSystem system(disc, h, eig);
  const SensitivityResult sens = solve_sensitivity(system, xi);

  std::vector<TaylorPoint> out;
  for (double e : eps) {
    const EigenPair pe = principal_eigenpair(disc, perturbed(h, xi, e), opt);
    Vector u_e = pe.u;
    if (domain_inner(disc.mass(), u_e, eig.u) < 0.0) u_e = -u_e;
    const Vector rem = u_e - eig.u - e * sens.u_prime;
    TaylorPoint p;
    p.eps = e;
    p.u_ratio = v_norm(disc, h, rem) / e;
    p.lambda_ratio = std::abs(pe.lambda - eig.lambda - e * sens.lambda_prime) / e;
    out.push_back(p);
  }
  return out;
}

DualityCheck duality_check(const Discretization& disc, const RobinField& h, const RobinField& xi,
                           const BoundaryField& misfit) {
  const EigenPair eig = principal_eigenpair(disc, h, probe_eigen_options());
  const BorderedSystem system(disc, h, eig);
  const SensitivityResult sens = solve_sensitivity(system, xi);
  const BoundaryField trace_prime = sensitivity_neumann_trace(system, sens, xi);
  const AdjointState adj = solve_adjoint_dirichlet(system, misfit);

  DualityCheck out;
  out.boundary_misfit_pairing = disc.gamma_d_inner(misfit, trace_prime);
  const Vector xi_full = xi.scatter(disc.mesh().num_vertices());
  out.gamma_pairing = boundary_inner(disc.mesh(), BoundaryTag::Gamma, eig.u, adj.phi, &xi_full);
  out.rel_err = std::abs(out.boundary_misfit_pairing - out.gamma_pairing) /
                std::max(std::abs(out.boundary_misfit_pairing), std::abs(out.gamma_pairing));
  out.phi_orthogonality = std::abs(system.mass_u().dot(adj.phi));
  out.u_prime_orthogonality = std::abs(system.mass_u().dot(sens.u_prime));
  return out;
}

GradientCheck gradient_fd_check(const Discretization& disc, const RobinField& h, const BoundaryData& data,
                                double eta, const RobinField& xi, double eps) {
  const EigenOptions opt = probe_eigen_options();
  const RobinField grad = functional_gradient(disc, h, data, eta, opt);
  GradientCheck out;
  out.adjoint = disc.gamma_inner(grad, xi);
  const double f_plus = evaluate_functional(disc, perturbed(h, xi, eps), data, eta, opt);
  const double f_minus = evaluate_functional(disc, perturbed(h, xi, -eps), data, eta, opt);
  out.fd = (f_plus - f_minus) / (2.0 * eps);
  out.rel_err = std::abs(out.adjoint - out.fd) / std::abs(out.fd);
  return out;
}

std::vector<std::pair<int, int>> oracle_suite_meshes() { return {{64, 16}, {128, 32}, {256, 64}}; }

VerificationReport run_oracle_suite() {
  VerificationReport report;
  const auto rows = oracle_comparison(oracle_suite_meshes());
  for (const auto& r : rows) {
    report.add_below("oracle", "lambda_rel_err_" + mesh_label(r.n_circum, r.n_radial), r.rel_err, 5e-3);
  }
  report.add("oracle", "observed_order", observed_order(rows), 1.8, observed_order(rows) >= 1.8);
  const OracleRow& mid = rows[0];
  report.add_below("oracle", "trace_spread_64x16", mid.trace_spread, 1e-2);
  report.add_below("oracle", "trace_vs_oracle_64x16", std::abs(mid.trace_fem - mid.trace_oracle) / std::abs(mid.trace_oracle),
                   2e-2);

  const double dirichlet = dirichlet_annulus_eigenvalue(kRadiusInner, kRadiusOuter);
  const double stiff = radial_principal(1e8, kRadiusInner, kRadiusOuter, kOracleGrid).lambda;
  report.add_below("oracle", "dirichlet_limit_vs_bessel", std::abs(stiff - dirichlet) / dirichlet, 1e-6);
  return report;
}

VerificationReport run_gradient_suite(std::uint64_t seed) {
  VerificationReport report;
  const ProbeProblem p = make_probe_problem(seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int k = 0; k < 5; ++k) {
    const RobinField xi = random_smooth_field(p.disc.mesh(), BoundaryTag::Gamma, rng, 0.0, 1.0);
    for (double eta : {0.0, 1e-2}) {
      const GradientCheck c = gradient_fd_check(p.disc, p.h, p.data, eta, xi);
      report.add_below("gradient", "dir" + std::to_string(k) + (eta > 0.0 ? "_eta" : ""), c.rel_err, 1e-2);
    }
  }
  return report;
}

VerificationReport run_taylor_suite(std::uint64_t seed) {
  VerificationReport report;
  const ProbeProblem p = make_probe_problem(seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};
  for (int k = 0; k < 5; ++k) {
    const RobinField xi = random_smooth_field(p.disc.mesh(), BoundaryTag::Gamma, rng, 1.0, 0.5);
    const std::string tag = "dir" + std::to_string(k);

    const EigenFdCheck fd = eigenvalue_fd_check(p.disc, p.h, xi, {1e-2, 1e-3, 1e-4});
    std::vector<double> errs;
    for (const auto& pt : fd.points) errs.push_back(pt.rel_err);
    report.add_below("taylor", tag + "_lambda_fd_rel_err", errs.back(), 2e-2);
    report.add("taylor", tag + "_lambda_fd_decreasing", errs.front() / errs.back(), 1.0, strictly_decreasing(errs));

    const auto rem = taylor_remainders(p.disc, p.h, xi, eps);
    std::vector<double> ratios;
    for (const auto& pt : rem) ratios.push_back(pt.u_ratio);
    const double drop = ratios.front() / ratios.back();
    report.add("taylor", tag + "_u_remainder_monotone", drop, 1.0, strictly_decreasing(ratios));
    report.add("taylor", tag + "_u_remainder_drop", drop, 5.0, drop >= 5.0);
  }
  return report;
}

VerificationReport run_adjoint_suite(std::uint64_t seed) {
  VerificationReport report;
  const ProbeProblem p = make_probe_problem(seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int k = 0; k < 5; ++k) {
    const RobinField xi = random_smooth_field(p.disc.mesh(), BoundaryTag::Gamma, rng, 1.0, 0.5);
    const BoundaryField misfit = random_smooth_field(p.disc.mesh(), BoundaryTag::GammaD, rng, 0.0, 1.0);
    const DualityCheck c = duality_check(p.disc, p.h, xi, misfit);
    const std::string tag = "pair" + std::to_string(k);
    report.add_below("adjoint", tag + "_duality_rel_err", c.rel_err, 1e-6);
    report.add_below("adjoint", tag + "_phi_orthogonality", c.phi_orthogonality, 1e-10);
  }
  return report;
}

}  // namespace robin
