#include "robin/radial_oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "robin/errors.hpp"

namespace robin {

namespace {

struct GridMode {
  double lambda = 0.0;
  std::vector<double> r;
  std::vector<double> u;  // includes u(r_outer) = 0
  double du_outer = 0.0;
};

// Tridiagonal system: sub[i] u_{i-1} + diag[i] u_i + sup[i] u_{i+1}.
struct Tridiagonal {
  std::vector<double> sub, diag, sup;

  std::vector<double> solve(const std::vector<double>& rhs) const {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n);
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = diag[i] - sub[i] * c[i - 1];
      c[i] = i + 1 < n ? sup[i] / m : 0.0;
      d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
  }
};

GridMode solve_grid(double h, double a, double b, int n) {
  const double dr = (b - a) / n;
  const double inv = 1.0 / (dr * dr);
  const auto r_at = [&](double i) { return a + i * dr; };

  // unknowns u_0 .. u_{n-1}; u_n = 0
  const auto nu = static_cast<std::size_t>(n);
  Tridiagonal t{std::vector<double>(nu, 0.0), std::vector<double>(nu, 0.0), std::vector<double>(nu, 0.0)};
  std::vector<double> weight(nu);
  for (std::size_t i = 0; i < nu; ++i) {
    const double rm = r_at(static_cast<double>(i) - 0.5);
    const double rp = r_at(static_cast<double>(i) + 0.5);
    weight[i] = r_at(static_cast<double>(i));
    if (i == 0) {
      // ghost point u_{-1} = u_1 - 2 dr h u_0 from the centered Robin condition
      t.diag[0] = (rp + rm + 2.0 * dr * h * rm) * inv;
      t.sup[0] = -(rp + rm) * inv;
    } else {
      t.sub[i] = -rm * inv;
      t.diag[i] = (rp + rm) * inv;
      t.sup[i] = i + 1 < nu ? -rp * inv : 0.0;
    }
  }

  std::vector<double> u(nu, 1.0);
  double lambda = 0.0;
  bool converged = false;
  for (int it = 0; it < 1000; ++it) {
    std::vector<double> rhs(nu);
    for (std::size_t i = 0; i < nu; ++i) rhs[i] = weight[i] * u[i];
    std::vector<double> w = t.solve(rhs);
    double uu = 0.0;
    double uw = 0.0;
    double wmax = 0.0;
    for (std::size_t i = 0; i < nu; ++i) {
      uu += u[i] * weight[i] * u[i];
      uw += u[i] * weight[i] * w[i];
      wmax = std::max(wmax, std::abs(w[i]));
    }
    const double next = uu / uw;
    for (std::size_t i = 0; i < nu; ++i) u[i] = w[i] / wmax;
    if (it > 2 && std::abs(next - lambda) <= 1e-15 * std::abs(next)) {
      lambda = next;
      converged = true;
      break;
    }
    lambda = next;
  }
  if (!converged) throw ConvergenceError("radial oracle inverse iteration did not converge", 0.0);

  GridMode mode;
  mode.lambda = lambda;
  mode.r.resize(nu + 1);
  mode.u.assign(nu + 1, 0.0);
  for (std::size_t i = 0; i <= nu; ++i) mode.r[i] = r_at(static_cast<double>(i));
  double sum = 0.0;
  for (std::size_t i = 0; i < nu; ++i) sum += u[i];
  const double sign = sum < 0.0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < nu; ++i) mode.u[i] = sign * u[i];

  // normalize 2 pi \int r u^2 dr = 1 (trapezoid)
  double norm = 0.0;
  for (std::size_t i = 0; i < nu; ++i) {
    const double f0 = mode.r[i] * mode.u[i] * mode.u[i];
    const double f1 = mode.r[i + 1] * mode.u[i + 1] * mode.u[i + 1];
    norm += 0.5 * dr * (f0 + f1);
  }
  const double scale = 1.0 / std::sqrt(2.0 * std::numbers::pi * norm);
  for (auto& v : mode.u) v *= scale;
  mode.du_outer = (3.0 * mode.u[nu] - 4.0 * mode.u[nu - 1] + mode.u[nu - 2]) / (2.0 * dr);
  return mode;
}

void check_params(double h, double a, double b) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("radial oracle needs h > 0");
  if (!(a > 0.0) || !(b > a)) throw ParameterError("radial oracle needs 0 < r_inner < r_outer");
}

}  // namespace

double radial_eigenvalue_fd(double h_const, double r_inner, double r_outer, int n_grid) {
  check_params(h_const, r_inner, r_outer);
  if (n_grid < 4) throw ParameterError("radial oracle grid too small");
  return solve_grid(h_const, r_inner, r_outer, n_grid).lambda;
}

RadialSolution radial_principal(double h_const, double r_inner, double r_outer, int n_grid) {
  check_params(h_const, r_inner, r_outer);
  if (n_grid < 1000) throw ParameterError("radial oracle needs n_grid >= 1000");
  const GridMode coarse = solve_grid(h_const, r_inner, r_outer, n_grid);
  const GridMode fine = solve_grid(h_const, r_inner, r_outer, 2 * n_grid);

  RadialSolution out;
  out.lambda_coarse = coarse.lambda;
  out.lambda_fine = fine.lambda;
  out.lambda = (4.0 * fine.lambda - coarse.lambda) / 3.0;
  out.du_at_outer = (4.0 * fine.du_outer - coarse.du_outer) / 3.0;
  out.r_samples = fine.r;
  out.u_samples = fine.u;
  return out;
}

double bessel_j0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 200; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

double bessel_y0_series(double x) {
  if (!(x > 0.0)) throw ParameterError("Y0 needs x > 0");
  constexpr double euler_gamma = 0.57721566490153286061;
  const double q = 0.25 * x * x;
  double term = 1.0;  // q^m / (m!)^2 with sign
  double harmonic = 0.0;
  double sum = 0.0;
  for (int m = 1; m < 200; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    harmonic += 1.0 / m;
    const double add = -term * harmonic;  // (-1)^{m+1} H_m q^m / (m!)^2
    sum += add;
    if (std::abs(add) < 1e-18 * std::max(1.0, std::abs(sum)) && m > 2) break;
  }
  return (2.0 / std::numbers::pi) * ((std::log(0.5 * x) + euler_gamma) * bessel_j0_series(x) + sum);
}

double dirichlet_annulus_eigenvalue(double r_inner, double r_outer) {
  if (!(r_inner > 0.0) || !(r_outer > r_inner)) throw ParameterError("annulus needs 0 < r_inner < r_outer");
  const auto f = [&](double k) {
    return bessel_j0_series(k * r_inner) * bessel_y0_series(k * r_outer) -
           bessel_j0_series(k * r_outer) * bessel_y0_series(k * r_inner);
  };
  // the first root lies just below pi / (r_outer - r_inner); bracket by scanning
  const double step = 1e-3 / (r_outer - r_inner);
  double lo = step;
  double flo = f(lo);
  double hi = lo;
  double fhi = flo;
  const double k_max = 2.0 * std::numbers::pi / (r_outer - r_inner);
  while (hi < k_max) {
    hi = lo + step;
    fhi = f(hi);
    if ((flo < 0.0) != (fhi < 0.0)) break;
    lo = hi;
    flo = fhi;
  }
  if ((flo < 0.0) == (fhi < 0.0)) throw ConvergenceError("no sign change for the Bessel cross product", 0.0);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double k = 0.5 * (lo + hi);
  return k * k;
}

}  // namespace robin
