#include "robin/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robin/errors.hpp"

namespace robin {

namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseSymMatrix>;

struct ConstrainedPencil {
  SparseSymMatrix a;  // (K + B(h)) on free nodes
  SparseSymMatrix m;  // M on free nodes
  Ldlt solver;        // factorization of a - shift m
  double shift = 0.0;
};

void build_pencil(const Discretization& disc, const RobinField& h, const EigenOptions& options,
                  ConstrainedPencil& pencil) {
  if (!(options.tol > 0.0)) throw ParameterError("eigensolver tolerance must be positive");
  if (options.max_iter < 1) throw ParameterError("eigensolver needs max_iter >= 1");
  h.check_on(disc.mesh());
  if (!h.admissible()) throw DomainError("Robin coefficient must be strictly positive on GAMMA");
  const auto& red = disc.reduction();
  pencil.a = red.reduce(disc.stiffness() + disc.robin_mass(h));
  pencil.m = red.reduce(disc.mass());
  if (options.shift != 0.0) {
    pencil.solver.compute(SparseSymMatrix(pencil.a - options.shift * pencil.m));
    if (pencil.solver.info() == Eigen::Success && pencil.solver.vectorD().minCoeff() > 0.0) {
      pencil.shift = options.shift;
      return;
    }
  }
  pencil.solver.compute(pencil.a);
  if (pencil.solver.info() != Eigen::Success || !(pencil.solver.vectorD().minCoeff() > 0.0)) {
    throw SingularityError("factorization of K + B(h) failed");
  }
}

void m_orthogonalize(const SparseSymMatrix& m, const std::vector<Vector>& basis, Vector& w) {
  // two passes keep the deflated vector orthogonal to working precision
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& v : basis) w -= v.dot(m * w) * v;
  }
}

EigenPair inverse_iteration(const ConstrainedPencil& pencil, Vector u, const std::vector<Vector>& deflate,
                            const EigenOptions& options) {
  m_orthogonalize(pencil.m, deflate, u);
  u /= std::sqrt(u.dot(pencil.m * u));

  double lambda = u.dot(pencil.a * u);
  double residual = 0.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    Vector w = pencil.solver.solve(pencil.m * u);
    m_orthogonalize(pencil.m, deflate, w);
    const Vector mw = pencil.m * w;
    const double norm_sq = w.dot(mw);
    const double next = w.dot(pencil.a * w) / norm_sq;
    u = w / std::sqrt(norm_sq);

    const Vector mu = pencil.m * u;
    residual = (pencil.a * u - next * mu).norm() / (next * mu).norm();
    const bool settled = std::abs(next - lambda) <= options.tol * std::abs(next);
    lambda = next;
    if (settled && residual <= options.tol) return {lambda, std::move(u), residual, it};
  }
  throw ConvergenceError("inverse iteration did not converge in " + std::to_string(options.max_iter) +
                             " iterations (residual " + std::to_string(residual) + ")",
                         residual);
}

void fix_sign(const SparseSymMatrix& m, Vector& u) {
  if ((m * u).sum() < 0.0) u = -u;
}

}  // namespace

EigenPair principal_eigenpair(const Discretization& disc, const RobinField& h, EigenOptions options) {
  ConstrainedPencil pencil;
  build_pencil(disc, h, options, pencil);
  const auto& red = disc.reduction();
  if (options.initial && options.initial->size() != red.full_size()) {
    throw InputError("initial eigenvector guess does not match the mesh");
  }
  Vector start = options.initial ? red.restrict_free(*options.initial) : Vector::Ones(red.free_size());
  if (!(start.squaredNorm() > 0.0)) throw InputError("initial eigenvector guess vanishes on the free nodes");
  EigenPair pair = inverse_iteration(pencil, std::move(start), {}, options);
  fix_sign(pencil.m, pair.u);
  pair.u = red.expand(pair.u);
  return pair;
}

Spectrum lowest_eigenvalues(const Discretization& disc, const RobinField& h, int k, EigenOptions options) {
  if (k < 1) throw ParameterError("lowest_eigenvalues needs k >= 1");
  options.shift = 0.0;
  ConstrainedPencil pencil;
  build_pencil(disc, h, options, pencil);
  const auto& red = disc.reduction();
  const Index n = red.free_size();
  if (k > n) throw ParameterError("requested more eigenvalues than free nodes");

  std::vector<Vector> found;
  Spectrum out;
  for (int j = 0; j < k; ++j) {
    Vector start(n);
    if (j == 0) {
      start.setOnes();
    } else {
      // generic deterministic start; the constant vector is blind to
      // non-radial modes on symmetric domains
      for (Index i = 0; i < n; ++i) start[i] = std::sin(12.9898 * static_cast<double>(i + 1) + 78.233 * j);
    }
    EigenPair pair = inverse_iteration(pencil, std::move(start), found, options);
    fix_sign(pencil.m, pair.u);
    found.push_back(pair.u);
    out.values.push_back(pair.lambda);
  }
  // deflation converges in order, but degenerate pairs may swap by roundoff
  std::vector<std::size_t> order(found.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.values[a] < out.values[b]; });
  Spectrum sorted;
  for (std::size_t i : order) {
    sorted.values.push_back(out.values[i]);
    sorted.vectors.push_back(red.expand(found[i]));
  }
  return sorted;
}

}  // namespace robin
