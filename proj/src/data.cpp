#include "robin/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "robin/errors.hpp"

namespace robin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_double(double v) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << std::setprecision(17) << v;
  return ss.str();
}

double parse_double(const std::string& text, std::size_t line) {
  std::istringstream ss(text);
  ss.imbue(std::locale::classic());
  double v = 0.0;
  std::string extra;
  if (!(ss >> v) || (ss >> extra)) throw ParseError(line, "expected a number, got '" + text + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits "a,b" into two trimmed fields.
bool split_pair(const std::string& line, std::string& a, std::string& b) {
  const auto comma = line.find(',');
  if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) return false;
  a = trim(line.substr(0, comma));
  b = trim(line.substr(comma + 1));
  return true;
}

// Uniform on the open interval (0, 1) from the raw 64-bit stream; independent
// of the standard library's distribution implementation.
double open_unit(std::mt19937_64& rng) {
  for (;;) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

}  // namespace

void SpectralData::validate() const {
  if (theta.size() != g.size()) throw InputError("spectral data: theta and g differ in length");
  if (theta.size() < 3) throw InputError("spectral data needs at least 3 samples");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("spectral data: lambda must be positive");
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(theta[i] >= 0.0 && theta[i] < kTwoPi)) throw InputError("spectral data: theta outside [0, 2pi)");
    if (i > 0 && !(theta[i] > theta[i - 1])) throw InputError("spectral data: theta not strictly increasing");
    if (!std::isfinite(g[i])) throw InputError("spectral data: non-finite g sample");
  }
}

SpectralData synthesize_data(const Discretization& gen, const RobinField& h_true, EigenOptions options) {
  const EigenPair eig = principal_eigenpair(gen, h_true, options);
  const BoundaryField trace = neumann_trace(gen, eig.u, eig.lambda, h_true);
  const auto arc = boundary_arc_parameterization(gen.mesh(), BoundaryTag::GammaD);

  SpectralData out;
  out.lambda = eig.lambda;
  out.theta.reserve(arc.size());
  out.g.reserve(arc.size());
  for (const auto& node : arc) {
    const auto it = std::lower_bound(trace.nodes.begin(), trace.nodes.end(), node.node);
    out.theta.push_back(node.theta);
    out.g.push_back(trace.values[it - trace.nodes.begin()]);
  }
  out.validate();
  return out;
}

double periodic_l2_norm(const std::vector<double>& theta, const std::vector<double>& values) {
  const std::size_t n = theta.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    double gap = theta[j] - theta[i];
    if (j == 0) gap += kTwoPi;
    const double chord = 2.0 * std::sin(0.5 * gap);
    const double a = values[i];
    const double b = values[j];
    sum += chord * (a * a + a * b + b * b) / 3.0;
  }
  return std::sqrt(sum);
}

SpectralData add_noise(const SpectralData& data, double eps0, std::uint64_t seed) {
  if (!(eps0 >= 0.0) || !std::isfinite(eps0)) throw ParameterError("noise level eps0 must be nonnegative");
  data.validate();
  if (data.provenance.noisy) throw InputError("data already carries noise");

  const std::vector<double> ones(data.theta.size(), 1.0);
  const double sqrt_length = periodic_l2_norm(data.theta, ones);
  const double g_norm = periodic_l2_norm(data.theta, data.g);
  const double amplitude = g_norm / sqrt_length;

  SpectralData out = data;
  if (eps0 > 0.0) {
    std::mt19937_64 rng(seed);
    for (auto& v : out.g) v += eps0 * (2.0 * open_unit(rng) - 1.0) * amplitude;
  }
  std::vector<double> diff(data.g.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = out.g[i] - data.g[i];
  const double eps_lambda = g_norm > 0.0 ? periodic_l2_norm(data.theta, diff) / g_norm : 0.0;

  out.lambda = data.lambda * (1.0 + eps_lambda);
  out.provenance = {true, eps0, seed, eps_lambda};
  return out;
}

double realized_relative_noise(const SpectralData& clean, const SpectralData& noisy) {
  if (clean.theta != noisy.theta) throw InputError("noise comparison needs identical sample angles");
  std::vector<double> diff(clean.g.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = noisy.g[i] - clean.g[i];
  return periodic_l2_norm(clean.theta, diff) / periodic_l2_norm(clean.theta, clean.g);
}

double periodic_interpolate(const std::vector<double>& theta, const std::vector<double>& values, double at) {
  const std::size_t n = theta.size();
  if (n == 0 || values.size() != n) throw InputError("interpolation needs a nonempty sample list");
  if (n == 1) return values[0];
  at = std::fmod(at, kTwoPi);
  if (at < 0.0) at += kTwoPi;

  const auto upper = std::upper_bound(theta.begin(), theta.end(), at);
  std::size_t hi = static_cast<std::size_t>(upper - theta.begin());
  std::size_t lo = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  if (hi == 0) {  // before the first sample: wrap from the last one
    lo = n - 1;
    t0 = theta[lo] - kTwoPi;
    t1 = theta[0];
  } else if (hi == n) {  // after the last sample: wrap to the first one
    lo = n - 1;
    hi = 0;
    t0 = theta[lo];
    t1 = theta[0] + kTwoPi;
  } else {
    lo = hi - 1;
    t0 = theta[lo];
    t1 = theta[hi];
  }
  const double w = (at - t0) / (t1 - t0);
  return (1.0 - w) * values[lo] + w * values[hi];
}

BoundaryField sample_to_boundary(const TriMesh& mesh, BoundaryTag tag, const std::vector<double>& theta,
                                 const std::vector<double>& values) {
  if (theta.empty()) throw InputError("cannot transfer an empty sample list");
  return BoundaryField::from_function(mesh, tag, [&](const Point& p) {
    return periodic_interpolate(theta, values, polar_angle(p));
  });
}

BoundaryField transfer_to_mesh(const SpectralData& data, const TriMesh& target) {
  if (data.theta.empty()) throw InputError("cannot transfer an empty sample list");
  return sample_to_boundary(target, BoundaryTag::GammaD, data.theta, data.g);
}

void write_spectral_data(const SpectralData& data, std::ostream& out) {
  out << "# lambda " << format_double(data.lambda) << '\n';
  if (data.provenance.noisy) {
    out << "# provenance noisy eps0=" << format_double(data.provenance.eps0) << " seed=" << data.provenance.seed
        << " eps_lambda=" << format_double(data.provenance.eps_lambda) << '\n';
    out << "# rng " << kNoiseRngId << '\n';
  } else {
    out << "# provenance clean\n";
  }
  if (!data.target.empty()) out << "# target " << data.target << '\n';
  out << "theta,g\n";
  for (std::size_t i = 0; i < data.theta.size(); ++i) {
    out << format_double(data.theta[i]) << ',' << format_double(data.g[i]) << '\n';
  }
}

SpectralData read_spectral_data(std::istream& in) {
  SpectralData out;
  bool have_lambda = false;
  bool have_provenance = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      if (key == "lambda") {
        std::string value;
        ss >> value;
        out.lambda = parse_double(value, line_no);
        have_lambda = true;
      } else if (key == "provenance") {
        std::string kind;
        ss >> kind;
        if (kind == "clean") {
          out.provenance = {};
        } else if (kind == "noisy") {
          out.provenance.noisy = true;
          std::string item;
          while (ss >> item) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ParseError(line_no, "malformed provenance item '" + item + "'");
            const std::string k = item.substr(0, eq);
            const std::string v = item.substr(eq + 1);
            if (k == "eps0") {
              out.provenance.eps0 = parse_double(v, line_no);
            } else if (k == "seed") {
              try {
                out.provenance.seed = std::stoull(v);
              } catch (const std::exception&) {
                throw ParseError(line_no, "malformed seed '" + v + "'");
              }
            } else if (k == "eps_lambda") {
              out.provenance.eps_lambda = parse_double(v, line_no);
            } else {
              throw ParseError(line_no, "unknown provenance item '" + k + "'");
            }
          }
        } else {
          throw ParseError(line_no, "provenance must be 'clean' or 'noisy'");
        }
        have_provenance = true;
      } else if (key == "target") {
        ss >> out.target;
      }
      continue;
    }
    std::string a, b;
    if (!split_pair(line, a, b)) throw ParseError(line_no, "expected 'theta,g'");
    if (a == "theta") continue;  // column header
    out.theta.push_back(parse_double(a, line_no));
    out.g.push_back(parse_double(b, line_no));
  }
  if (!have_lambda) throw ParseError(line_no, "missing '# lambda' header");
  if (!have_provenance) throw ParseError(line_no, "missing '# provenance' header");
  out.validate();
  return out;
}

void save_spectral_data(const SpectralData& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  write_spectral_data(data, out);
}

SpectralData load_spectral_data(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_spectral_data(in);
}

AngularSamples load_angular_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  AngularSamples out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::string a, b;
    if (!split_pair(line, a, b)) throw ParseError(line_no, "expected 'theta,value'");
    if (a == "theta") continue;
    out.theta.push_back(parse_double(a, line_no));
    out.values.push_back(parse_double(b, line_no));
  }
  if (out.theta.empty()) throw InputError("'" + path.string() + "' holds no samples");
  for (std::size_t i = 1; i < out.theta.size(); ++i) {
    if (!(out.theta[i] > out.theta[i - 1])) throw InputError("'" + path.string() + "': theta not increasing");
  }
  return out;
}

void save_angular_csv(const std::filesystem::path& path, const std::string& value_name,
                      const std::vector<double>& theta, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  out << "theta," << value_name << '\n';
  for (std::size_t i = 0; i < theta.size(); ++i) out << format_double(theta[i]) << ',' << format_double(values[i]) << '\n';
}

void save_boundary_field_csv(const std::filesystem::path& path, const std::string& value_name, const TriMesh& mesh,
                             const BoundaryField& field) {
  field.check_on(mesh);
  const auto arc = boundary_arc_parameterization(mesh, field.tag);
  std::vector<double> theta;
  std::vector<double> values;
  for (const auto& node : arc) {
    const auto it = std::lower_bound(field.nodes.begin(), field.nodes.end(), node.node);
    theta.push_back(node.theta);
    values.push_back(field.values[it - field.nodes.begin()]);
  }
  save_angular_csv(path, value_name, theta, values);
}

}  // namespace robin
