// robin_recover: mesh generation, data synthesis, reconstruction and
// verification from the command line.
//
// Exit codes: 0 ok, 2 bad parameters or input, 3 solver failure,
// 4 reconstruction did not converge (outputs still written), 5 a
// verification check failed.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "robin/verification.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace robin;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kSeedEnv = "ROBIN_RECOVER_SEED";

enum ExitCode : int { kOk = 0, kParams = 2, kSolver = 3, kNoConvergence = 4, kVerification = 5 };

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw ParameterError(std::string(kSeedEnv) + " must be a nonnegative integer");
  }
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string short_double(double v) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << v;
  return ss.str();
}

struct MeshArgs {
  std::vector<double> annulus;
  std::string file;

  void add_to(CLI::App* app, const std::string& what) {
    app->add_option("--annulus", annulus, what + " annulus: r_inner r_outer n_circum n_radial")->expected(4);
    app->add_option("--mesh", file, what + " mesh file");
  }

  TriMesh build() const {
    if (annulus.empty() == file.empty()) throw ParameterError("give exactly one of --annulus or --mesh");
    if (!file.empty()) return load_mesh(file);
    const auto as_int = [](double v, const char* name) {
      if (v != std::floor(v) || v < 0 || v > 1e6) throw ParameterError(std::string(name) + " must be an integer");
      return static_cast<int>(v);
    };
    return build_annulus_mesh(annulus[0], annulus[1], as_int(annulus[2], "n_circum"), as_int(annulus[3], "n_radial"));
  }

  json describe() const {
    if (!file.empty()) return json{{"mesh_file", fs::absolute(file).string()}};
    return json{{"annulus", annulus}};
  }
};

/// Holds the manifest for one output directory.
class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& argv)
      : start_(std::chrono::steady_clock::now()) {
    doc_["tool"] = "robin_recover";
    doc_["version"] = kVersion;
    doc_["command"] = std::move(command);
    doc_["argv"] = argv;
    doc_["cwd"] = fs::current_path().string();
    doc_["started_utc"] = utc_now();
  }

  json& operator[](const char* key) { return doc_[key]; }

  void write(const fs::path& dir) {
    doc_["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream out(dir / "manifest.json");
    if (!out) throw InputError("cannot write " + (dir / "manifest.json").string());
    out << doc_.dump(2) << '\n';
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

fs::path prepare_out_dir(const std::string& dir) {
  if (dir.empty()) throw ParameterError("--out is required");
  fs::create_directories(dir);
  return fs::path(dir);
}

RobinField field_from_spec(const TriMesh& mesh, const std::string& spec, const char* what) {
  std::istringstream ss(spec);
  ss.imbue(std::locale::classic());
  double v = 0.0;
  std::string rest;
  if ((ss >> v) && !(ss >> rest)) return RobinField::constant(mesh, BoundaryTag::Gamma, v);
  if (!fs::exists(spec)) throw ParameterError(std::string(what) + ": '" + spec + "' is neither a number nor a file");
  const AngularSamples s = load_angular_csv(spec);
  return sample_to_boundary(mesh, BoundaryTag::Gamma, s.theta, s.values);
}

/// Closed-form ground truth: built-in name or sampled `theta,h` file.
ClosedForm truth_from_spec(const std::string& spec) {
  if (spec == "paper4") return paper4_target;
  if (!fs::exists(spec)) throw ParameterError("unknown target '" + spec + "'");
  const AngularSamples s = load_angular_csv(spec);
  return [s](const Point& p) { return periodic_interpolate(s.theta, s.values, polar_angle(p)); };
}

// --- mesh --------------------------------------------------------------------

struct MeshCmd {
  MeshArgs mesh;
  std::string out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("mesh", "Write an annulus mesh file");
    mesh.add_to(sub, "Source");
    sub->add_option("--out", out, "Output mesh file")->required();
  }

  int run() const {
    save_mesh(mesh.build(), out);
    std::cout << "wrote " << out << '\n';
    return kOk;
  }
};

// --- synth -------------------------------------------------------------------

struct SynthCmd {
  MeshArgs mesh;
  std::string target = "paper4";
  std::string target_file;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  bool deterministic = false;
  CLI::Option* noise_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("synth", "Synthesize spectral data from a target coefficient");
    mesh.add_to(sub, "Generation");
    sub->add_option("--target", target, "Built-in target name")->check(CLI::IsMember({"paper4"}));
    sub->add_option("--target-file", target_file, "Target as a theta,h CSV on the inner circle");
    noise_opt = sub->add_option("--noise", noise, "Uniform noise half-width eps0");
    seed_opt = sub->add_option("--seed", seed, std::string("Noise seed (default: $") + kSeedEnv + " or 0)");
    sub->add_option("--out", out, "Output directory")->required();
    sub->add_flag("--deterministic", deterministic, "Single-threaded assembly");
  }

  int run(const std::vector<std::string>& argv) {
    Manifest manifest("synth", argv);
    const std::uint64_t used_seed = seed_opt->count() > 0 ? seed : default_seed();
    const std::string target_spec = target_file.empty() ? target : target_file;
    const ClosedForm truth = truth_from_spec(target_spec);

    const ExecutionPolicy policy = deterministic ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel;
    const Discretization gen(mesh.build(), policy);
    const RobinField h_true = RobinField::from_function(gen.mesh(), BoundaryTag::Gamma, truth);
    if (!h_true.admissible()) throw ParameterError("target coefficient is not positive on the inner circle");

    SpectralData data = synthesize_data(gen, h_true);
    data.target = target_file.empty() ? target : fs::absolute(target_file).string();
    if (noise_opt->count() > 0) data = add_noise(data, noise, used_seed);

    const fs::path dir = prepare_out_dir(out);
    save_mesh(gen.mesh(), dir / "mesh.txt");
    save_spectral_data(data, dir / "data.csv");

    manifest["parameters"] = {{"mesh", mesh.describe()},
                              {"target", data.target},
                              {"noise_eps0", noise_opt->count() > 0 ? json(noise) : json(nullptr)},
                              {"deterministic", deterministic}};
    manifest["seed"] = used_seed;
    manifest["outputs"] = {"mesh.txt", "data.csv"};
    manifest["results"] = {{"lambda", data.lambda}, {"eps_lambda", data.provenance.eps_lambda}};
    manifest.write(dir);

    std::cout << "lambda " << std::setprecision(12) << data.lambda << "  samples " << data.theta.size();
    if (data.provenance.noisy) std::cout << "  realized noise " << data.provenance.eps_lambda;
    std::cout << '\n';
    return kOk;
  }
};

// --- reconstruct ---------------------------------------------------------------

struct RunOutcome {
  int code = kOk;
  std::string message;
};

struct ReconstructCmd {
  std::string data_dir;
  MeshArgs mesh;
  std::string h0 = "1";
  double tau = 0.1;
  std::vector<double> etas = {0.0};
  double tol = 1e-5;
  int max_iter = 1000;
  std::string norm = "c1";
  std::string truth = "auto";
  bool allow_crime = false;
  bool deterministic = false;
  int jobs = 1;
  std::string out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("reconstruct", "Recover the Robin coefficient from spectral data");
    sub->add_option("--data", data_dir, "Directory written by synth")->required();
    mesh.add_to(sub, "Reconstruction");
    sub->add_option("--h0", h0, "Initial guess: constant or theta,h CSV");
    sub->add_option("--tau", tau, "Fixed step size");
    sub->add_option("--eta", etas, "Tikhonov weight; several values run a sweep")->expected(1, 64);
    sub->add_option("--tol", tol, "Stop when the descent direction norm is at most tol");
    sub->add_option("--max-iter", max_iter, "Maximum number of gradient evaluations");
    sub->add_option("--norm", norm, "Stopping norm")->check(CLI::IsMember({"c1", "l2"}));
    sub->add_option("--truth", truth, "Ground truth for the error column: auto, none, paper4 or a CSV");
    sub->add_flag("--allow-inverse-crime", allow_crime, "Permit the generation mesh for reconstruction");
    sub->add_flag("--deterministic", deterministic, "Single-threaded, reproducible run");
    sub->add_option("--jobs", jobs, "Parallel runs for an eta sweep")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "Output directory")->required();
  }

  int run(const std::vector<std::string>& argv) {
    const fs::path data_path(data_dir);
    const SpectralData spectral = load_spectral_data(data_path / "data.csv");
    const ExecutionPolicy policy = deterministic ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel;
    const Discretization disc(mesh.build(), policy);

    if (fs::exists(data_path / "mesh.txt")) {
      const TriMesh gen = load_mesh(data_path / "mesh.txt");
      if (gen.same_as(disc.mesh()) && !allow_crime) {
        throw ParameterError(
            "inverse crime: the reconstruction mesh equals the generation mesh "
            "(pass --allow-inverse-crime to proceed anyway)");
      }
    } else if (!allow_crime) {
      std::cerr << "warning: " << (data_path / "mesh.txt") << " missing, cannot check for an inverse crime\n";
    }

    ReconstructionConfig config;
    config.tau = tau;
    config.tol = tol;
    config.max_iter = max_iter;
    config.gradient_norm = norm == "l2" ? GradientNorm::BoundaryL2 : GradientNorm::DiscreteC1;
    for (double eta : etas) {
      config.eta = eta;
      config.validate();
    }
    const RobinField start = field_from_spec(disc.mesh(), h0, "--h0");
    if (!start.admissible()) throw ParameterError("--h0 must be strictly positive");

    std::string truth_spec = truth;
    if (truth_spec == "auto") truth_spec = spectral.target.empty() ? "none" : spectral.target;
    std::optional<ClosedForm> closed;
    if (truth_spec != "none") closed = truth_from_spec(truth_spec);

    const BoundaryData data = prepare_data(spectral, disc.mesh());
    const fs::path root = prepare_out_dir(out);
    const bool sweep = etas.size() > 1;

    std::vector<RunOutcome> outcomes(etas.size());
    std::mutex log_mutex;
    auto run_one = [&](std::size_t i) {
      ReconstructionConfig cfg = config;
      cfg.eta = etas[i];
      const fs::path dir = sweep ? root / ("eta_" + short_double(etas[i])) : root;
      fs::create_directories(dir);
      Manifest manifest("reconstruct", argv);
      manifest["parameters"] = {{"data", fs::absolute(data_path).string()},
                                {"mesh", mesh.describe()},
                                {"h0", h0},
                                {"tau", tau},
                                {"eta", cfg.eta},
                                {"tol", tol},
                                {"max_iter", max_iter},
                                {"norm", norm},
                                {"truth", truth_spec},
                                {"allow_inverse_crime", allow_crime},
                                {"deterministic", deterministic}};
      manifest["seed"] = spectral.provenance.seed;
      manifest["outputs"] = {"trace.csv", "h.csv"};

      ReconstructionTrace trace;
      RobinField h_final;
      RunOutcome outcome;
      try {
        ReconstructionResult result = reconstruct(disc, data, start, cfg, closed ? &*closed : nullptr);
        trace = std::move(result.trace);
        h_final = std::move(result.h);
        if (!result.converged) {
          outcome = {kNoConvergence, "did not converge within " + std::to_string(max_iter) + " iterations"};
        }
      } catch (const ReconstructionError& err) {
        trace = err.partial_trace();
        h_final = trace.rows.empty() ? start : trace.rows.back().h;
        outcome = {kSolver, err.what()};
      }

      std::ofstream tf(dir / "trace.csv");
      trace.write_csv(tf);
      save_boundary_field_csv(dir / "h.csv", "h", disc.mesh(), h_final);

      json summary = {{"iterations", trace.rows.size()}, {"exit_code", outcome.code}};
      if (!trace.rows.empty()) {
        const TraceRow& last = trace.rows.back();
        summary["F"] = last.functional;
        summary["grad_norm"] = last.grad_norm;
        summary["lambda"] = last.lambda;
        if (last.rel_err) summary["rel_err"] = *last.rel_err;
      }
      manifest["results"] = summary;
      manifest.write(dir);

      std::lock_guard<std::mutex> lock(log_mutex);
      std::cout << "eta " << cfg.eta << ": " << trace.rows.size() << " iterations";
      if (!trace.rows.empty()) {
        std::cout << ", F " << trace.rows.back().functional << ", |G| " << trace.rows.back().grad_norm;
        if (trace.rows.back().rel_err) std::cout << ", rel_err " << *trace.rows.back().rel_err;
      }
      std::cout << '\n';
      if (outcome.code != kOk) std::cerr << "eta " << cfg.eta << ": " << outcome.message << '\n';
      outcomes[i] = outcome;
    };

    const std::size_t workers = deterministic ? 1 : std::min<std::size_t>(static_cast<std::size_t>(jobs), etas.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < etas.size();) run_one(i);
      });
    }
    for (std::size_t i; (i = next++) < etas.size();) run_one(i);
    for (auto& t : pool) t.join();

    if (sweep) {
      Manifest top("reconstruct", argv);
      top["parameters"] = {{"eta", etas}, {"jobs", jobs}, {"deterministic", deterministic}};
      json runs = json::array();
      for (std::size_t i = 0; i < etas.size(); ++i) {
        runs.push_back({{"eta", etas[i]}, {"dir", "eta_" + short_double(etas[i])}, {"exit_code", outcomes[i].code}});
      }
      top["runs"] = runs;
      top.write(root);
    }

    int code = kOk;
    for (const auto& o : outcomes) {
      if (o.code == kSolver) return kSolver;
      if (o.code != kOk) code = o.code;
    }
    return code;
  }
};

// --- verify --------------------------------------------------------------------

struct VerifyCmd {
  std::string suite = "all";
  std::uint64_t seed = 0;
  std::string report;
  CLI::Option* seed_opt = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("verify", "Run the built-in verification suites");
    sub->add_option("--suite", suite, "Suite to run")
        ->check(CLI::IsMember({"oracle", "gradient", "taylor", "adjoint", "all"}));
    seed_opt = sub->add_option("--seed", seed, "Seed for random directions");
    sub->add_option("--report", report, "Also write the report as CSV");
  }

  int run() const {
    const std::uint64_t used_seed = seed_opt->count() > 0 ? seed : default_seed();
    VerificationReport result;
    if (suite == "oracle" || suite == "all") result.append(run_oracle_suite());
    if (suite == "gradient" || suite == "all") result.append(run_gradient_suite(used_seed));
    if (suite == "taylor" || suite == "all") result.append(run_taylor_suite(used_seed));
    if (suite == "adjoint" || suite == "all") result.append(run_adjoint_suite(used_seed));

    if (suite == "oracle" || suite == "all") {
      std::cout << "mesh      lambda_fem        lambda_oracle     rel_err\n";
      for (const auto& r : oracle_comparison(oracle_suite_meshes())) {
        std::cout << std::left << std::setw(10) << (std::to_string(r.n_circum) + "x" + std::to_string(r.n_radial))
                  << std::setprecision(12) << std::setw(18) << r.lambda_fem << std::setw(18) << r.lambda_oracle
                  << std::setprecision(3) << r.rel_err << '\n';
      }
      std::cout << std::right << '\n';
    }
    result.write_text(std::cout);
    if (!report.empty()) {
      std::ofstream out(report);
      if (!out) throw InputError("cannot write " + report);
      result.write_csv(out);
    }
    return result.all_passed() ? kOk : kVerification;
  }
};

int dispatch(const std::vector<std::string>& args);

// --- replay --------------------------------------------------------------------

struct ReplayCmd {
  std::string manifest;
  std::string out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    sub->add_option("manifest", manifest, "manifest.json")->required();
    sub->add_option("--out", out, "Output directory replacing the recorded one");
  }

  int run() const {
    std::ifstream in(manifest);
    if (!in) throw InputError("cannot read " + manifest);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw InputError(manifest + ": " + e.what());
    }
    if (!doc.contains("argv") || !doc.contains("cwd")) throw InputError(manifest + ": not a run manifest");
    std::vector<std::string> args = doc["argv"].get<std::vector<std::string>>();
    if (!args.empty() && args.front() == "replay") throw InputError("refusing to replay a replay");

    const std::string out_abs = out.empty() ? std::string() : fs::absolute(out).string();
    if (!out_abs.empty()) {
      for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--out") args[i + 1] = out_abs;
      }
    }
    fs::current_path(doc["cwd"].get<std::string>());
    return dispatch(args);
  }
};

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Robin coefficient recovery from spectral data"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  MeshCmd mesh_cmd;
  SynthCmd synth_cmd;
  ReconstructCmd recon_cmd;
  VerifyCmd verify_cmd;
  ReplayCmd replay_cmd;
  mesh_cmd.add(app);
  synth_cmd.add(app);
  recon_cmd.add(app);
  verify_cmd.add(app);
  replay_cmd.add(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParams;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  if (name == "mesh") return mesh_cmd.run();
  if (name == "synth") return synth_cmd.run(args);
  if (name == "reconstruct") return recon_cmd.run(args);
  if (name == "verify") return verify_cmd.run();
  return replay_cmd.run();
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(args);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParams;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParams;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParams;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParams;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParams;
  } catch (const TopologyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParams;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParams;
  }
}
