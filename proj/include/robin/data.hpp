#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "robin/eigensolver.hpp"

namespace robin {

/// Identifier of the uniform generator used by add_noise, recorded in data files.
inline constexpr const char* kNoiseRngId = "mt19937_64";

struct Provenance {
  bool noisy = false;
  double eps0 = 0.0;
  std::uint64_t seed = 0;
  double eps_lambda = 0.0;
};

/// Measured pair (lambda, g): eigenvalue and Neumann trace samples on
/// GAMMA_D keyed by polar angle.
struct SpectralData {
  double lambda = 0.0;
  std::vector<double> theta;  // strictly increasing, in [0, 2*pi)
  std::vector<double> g;
  Provenance provenance;
  std::string target;  // name of the generating coefficient, empty if unknown

  /// Throws InputError unless the samples satisfy the invariants.
  void validate() const;
};

/// Principal eigensolve on `gen`, Neumann trace on GAMMA_D, sampled by angle.
SpectralData synthesize_data(const Discretization& gen, const RobinField& h_true, EigenOptions options = {});

/// L2 norm of the periodic piecewise-linear interpolant of samples on a
/// circle (chord-length edges, unit radius). Ratios of these norms are
/// radius-independent.
double periodic_l2_norm(const std::vector<double>& theta, const std::vector<double>& values);

/// Uniform noise: g~ = g + eps(x) * rms(g), eps i.i.d. on (-eps0, eps0);
/// lambda~ = lambda (1 + eps_lambda) with eps_lambda the realized relative
/// L2 noise ||g~ - g|| / ||g||. rms(g) = ||g||_{L2} / sqrt(|GAMMA_D|).
SpectralData add_noise(const SpectralData& data, double eps0, std::uint64_t seed);

/// Realized relative L2 noise between noisy and clean samples on the same angles.
double realized_relative_noise(const SpectralData& clean, const SpectralData& noisy);

/// Periodic linear interpolation in angle.
double periodic_interpolate(const std::vector<double>& theta, const std::vector<double>& values, double at);

/// Samples -> boundary field on `tag` of `mesh`, by periodic linear
/// interpolation at the node angles.
BoundaryField sample_to_boundary(const TriMesh& mesh, BoundaryTag tag, const std::vector<double>& theta,
                                 const std::vector<double>& values);

/// g samples onto the GAMMA_D nodes of `target`.
BoundaryField transfer_to_mesh(const SpectralData& data, const TriMesh& target);

void write_spectral_data(const SpectralData& data, std::ostream& out);
SpectralData read_spectral_data(std::istream& in);
void save_spectral_data(const SpectralData& data, const std::filesystem::path& path);
SpectralData load_spectral_data(const std::filesystem::path& path);

/// Two-column `theta,<name>` CSV of boundary samples.
struct AngularSamples {
  std::vector<double> theta;
  std::vector<double> values;
};
AngularSamples load_angular_csv(const std::filesystem::path& path);
void save_angular_csv(const std::filesystem::path& path, const std::string& value_name,
                      const std::vector<double>& theta, const std::vector<double>& values);
/// Boundary field written as `theta,<name>` rows sorted by angle.
void save_boundary_field_csv(const std::filesystem::path& path, const std::string& value_name, const TriMesh& mesh,
                             const BoundaryField& field);

}  // namespace robin
