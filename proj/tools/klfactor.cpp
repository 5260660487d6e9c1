// klfactor — command-line front end: ingest matrices and configs, dispatch to
// the computational modules, emit deterministic JSON/CSV reports.
//
// Exit codes: 0 success, 2 validation error (the message names the failing
// invariant), 3 numerical failure. KLFACTOR_LOG in {error, info, debug}
// controls diagnostics on stderr; all data travels through files.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "klfactor/correlation.hpp"
#include "klfactor/galerkin.hpp"
#include "klfactor/io.hpp"
#include "klfactor/spectral.hpp"
#include "klfactor/version.hpp"
#include "klfactor/weak_dist.hpp"

namespace fs = std::filesystem;
using namespace klfactor;

namespace {

int log_level() {
  static const int level = [] {
    const char* raw = std::getenv("KLFACTOR_LOG");
    if (!raw) return 0;
    const std::string value(raw);
    if (value == "debug") return 2;
    if (value == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& message) {
  if (log_level() >= 1) std::cerr << "klfactor[info]: " << message << '\n';
}

void log_debug(const std::string& message) {
  if (log_level() >= 2) std::cerr << "klfactor[debug]: " << message << '\n';
}

std::string out_path(const std::string& out_dir, const std::string& name) {
  fs::create_directories(out_dir);
  return (fs::path(out_dir) / name).string();
}

Json base_report(const std::string& command) {
  Json report;
  report["version"] = kVersion;
  report["command"] = command;
  return report;
}

SnapshotSet load_snapshots(const std::string& snapshots_path,
                           const std::string& weights_path,
                           bool uniform_weights) {
  const SnapshotCsv csv = load_snapshot_csv(snapshots_path);
  if (uniform_weights) {
    return SnapshotSet::uniform(csv.values, csv.labels);
  }
  if (weights_path.empty()) {
    throw ValidationError("ParseError",
                          "either --weights or --uniform-weights is required");
  }
  return SnapshotSet::create(csv.values,
                             weights_from_json(load_json(weights_path)),
                             csv.labels);
}

Json complex_json(const Complex& z) {
  Json out;
  out["re"] = z.real();
  out["im"] = z.imag();
  return out;
}

// --- pod --------------------------------------------------------------------

struct PodOptions {
  std::string snapshots;
  std::string weights;
  bool uniform_weights = false;
  int rank = -1;
  double rank_tol = 1e-12;
  int max_dim = 10000;
  std::string out = ".";
};

int run_pod(const PodOptions& opt) {
  const SnapshotSet snap =
      load_snapshots(opt.snapshots, opt.weights, opt.uniform_weights);
  log_debug("snapshots: d=" + std::to_string(snap.dim()) +
            " m=" + std::to_string(snap.count()));
  const CorrelationOp corr = build_correlation(snap, opt.max_dim);
  const RSvd svd = eig_decompose(corr, snap, opt.rank_tol);
  const int rank = opt.rank < 0 ? static_cast<int>(svd.rank()) : opt.rank;
  const KLExpansion kl = kl_truncate(svd, rank);

  const std::string modes_csv = out_path(opt.out, "modes.csv");
  const std::string coeffs_csv = out_path(opt.out, "coeffs.csv");
  write_matrix_csv(modes_csv, kl.modes);
  write_matrix_csv(coeffs_csv, kl.coeff_fns);

  Json report = base_report("pod");
  Json config;
  config["snapshots"] = opt.snapshots;
  config["weights"] = opt.uniform_weights ? "uniform" : opt.weights;
  config["rank"] = rank;
  config["out"] = opt.out;
  report["config"] = std::move(config);
  Json tolerances;
  tolerances["rank_tol"] = opt.rank_tol;
  tolerances["weight_validation"] = 1e-9;
  tolerances["max_dim"] = opt.max_dim;
  report["tolerances"] = std::move(tolerances);
  report["lambda"] = std::vector<double>(svd.eigenvalues.begin(),
                                         svd.eigenvalues.end());
  report["trace"] = corr.trace;
  report["modes_csv"] = "modes.csv";
  report["coeffs_csv"] = "coeffs.csv";
  report["discarded_energy"] = kl.discarded_energy;
  write_json(out_path(opt.out, "report.json"), report);
  log_info("pod report written to " + out_path(opt.out, "report.json"));
  return 0;
}

// --- mercer -----------------------------------------------------------------

struct MercerOptions {
  std::string snapshots;
  std::string weights;
  bool uniform_weights = false;
  double rank_tol = 1e-12;
  std::string out = ".";
};

int run_mercer(const MercerOptions& opt) {
  const SnapshotSet snap =
      load_snapshots(opt.snapshots, opt.weights, opt.uniform_weights);
  const CompanionGram companion = companion_gram(snap, opt.rank_tol);
  const CorrelationOp corr = build_correlation(snap);
  const RSvd svd = eig_decompose(corr, snap, opt.rank_tol);

  const std::string gram_csv = out_path(opt.out, "gram.csv");
  const std::string coeffs_csv = out_path(opt.out, "coeffs.csv");
  write_matrix_csv(gram_csv, companion.gram);
  write_matrix_csv(coeffs_csv, companion.coeff_fns);

  // The companion operator shares the nonzero spectrum with C; report the
  // worst disagreement over the shared leading block.
  const Eigen::Index shared =
      std::min(companion.eigenvalues.size(), svd.eigenvalues.size());
  double gap = 0.0;
  for (Eigen::Index i = 0; i < shared; ++i) {
    gap = std::max(gap,
                   std::abs(companion.eigenvalues[i] - svd.eigenvalues[i]));
  }

  Json report = base_report("mercer");
  Json config;
  config["snapshots"] = opt.snapshots;
  config["weights"] = opt.uniform_weights ? "uniform" : opt.weights;
  config["out"] = opt.out;
  report["config"] = std::move(config);
  Json tolerances;
  tolerances["rank_tol"] = opt.rank_tol;
  tolerances["weight_validation"] = 1e-9;
  report["tolerances"] = std::move(tolerances);
  report["eigenvalues"] = std::vector<double>(companion.eigenvalues.begin(),
                                              companion.eigenvalues.end());
  report["lambda_direct"] = std::vector<double>(svd.eigenvalues.begin(),
                                                svd.eigenvalues.end());
  report["max_spectrum_gap"] = gap;
  report["gram_csv"] = "gram.csv";
  report["coeffs_csv"] = "coeffs.csv";
  write_json(out_path(opt.out, "report.json"), report);
  log_info("mercer report written to " + out_path(opt.out, "report.json"));
  return 0;
}

// --- algebra ----------------------------------------------------------------

struct AlgebraOptions {
  std::string spec;
  std::string element;
  std::string element_b;
  std::string fn;
  int degree = 2;
  double tol = 1e-9;
  bool auto_normalise = false;
  std::string out = ".";
};

int run_algebra(const AlgebraOptions& opt) {
  const ProbAlgebra alg =
      algebra_from_json(load_json(opt.spec), opt.auto_normalise);
  const Element a = element_from_csv(alg, opt.element);

  Json report = base_report("algebra");
  Json config;
  config["spec"] = opt.spec;
  config["element"] = opt.element;
  if (!opt.element_b.empty()) config["element_b"] = opt.element_b;
  if (!opt.fn.empty()) config["fn"] = opt.fn;
  config["degree"] = opt.degree;
  config["out"] = opt.out;
  report["config"] = std::move(config);
  Json tolerances;
  tolerances["classify_tol"] = opt.tol;
  tolerances["independence_tol"] = opt.tol;
  report["tolerances"] = std::move(tolerances);

  report["expectation"] = complex_json(expectation(alg, a));
  report["variance"] = variance(alg, a);
  const ClassFlags flags = classify(alg, a, opt.tol);
  Json flag_doc;
  flag_doc["self_adjoint"] = flags.self_adjoint;
  flag_doc["positive"] = flags.positive;
  flag_doc["projection"] = flags.projection;
  report["classify"] = std::move(flag_doc);

  if (flags.self_adjoint) {
    report["spectrum"] = spectrum(alg, a);
    report["law"] = measure_to_json(law(alg, a));
    Json norms;
    norms["p1"] = lp_norm(alg, a, 1.0);
    norms["p2"] = lp_norm(alg, a, 2.0);
    norms["pinf"] = lp_norm(alg, a, kInfiniteExponent);
    report["lp_norms"] = std::move(norms);
    if (!opt.fn.empty()) {
      const FnSpec fn = fnspec_from_json(load_json(opt.fn));
      const Element mapped = apply_fn(alg, a, fn);
      Json fn_doc;
      fn_doc["spec"] = fnspec_to_json(fn);
      fn_doc["expectation"] = complex_json(expectation(alg, mapped));
      fn_doc["law"] = measure_to_json(law(alg, mapped));
      report["fn_result"] = std::move(fn_doc);
    }
  }

  if (!opt.element_b.empty()) {
    const Element b = element_from_csv(alg, opt.element_b);
    Json pair;
    pair["inner2"] = complex_json(inner2(alg, a, b));
    pair["covariance"] = complex_json(covariance(alg, a, b));
    pair["independent"] = independence_test(alg, a, b, opt.degree, opt.tol);
    if (flags.self_adjoint && classify(alg, b, opt.tol).self_adjoint) {
      pair["uncertainty_gap"] = uncertainty_gap(alg, a, b);
    }
    report["pair"] = std::move(pair);
  }

  write_json(out_path(opt.out, "report.json"), report);
  log_info("algebra report written to " + out_path(opt.out, "report.json"));
  return 0;
}

// --- synth ------------------------------------------------------------------

struct SynthOptions {
  std::string model;
  std::string times;
  int n_paths = 0;
  std::string lags;
  std::optional<std::uint64_t> seed_override;
  std::string out = ".";
};

std::vector<double> parse_lags(const std::string& text) {
  std::vector<double> lags;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      std::size_t used = 0;
      lags.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ValidationError("ParseError", "bad lag value '" + token + "'");
    }
  }
  if (lags.empty()) {
    throw ValidationError("ParseError", "no lags given");
  }
  return lags;
}

int run_synth(const SynthOptions& opt) {
  StationaryModel model = stationary_model_from_json(load_json(opt.model));
  if (opt.seed_override) model.seed = *opt.seed_override;
  const std::vector<double> times = load_vector_csv(opt.times);
  const Eigen::MatrixXd paths = synth_stationary(model, times, opt.n_paths);
  write_matrix_csv(out_path(opt.out, "paths.csv"), paths);

  Json report = base_report("synth");
  Json config;
  config["model"] = opt.model;
  config["times"] = opt.times;
  config["paths"] = opt.n_paths;
  config["seed"] = model.seed;
  config["out"] = opt.out;
  if (!opt.lags.empty()) config["lags"] = opt.lags;
  report["config"] = std::move(config);
  Json tolerances;
  tolerances["z_flag"] = 4.0;
  report["tolerances"] = std::move(tolerances);
  report["paths_csv"] = "paths.csv";

  if (!opt.lags.empty()) {
    const AutocovReport check =
        autocov_check(paths, times, model, parse_lags(opt.lags));
    Json rows = Json::array();
    for (const AutocovRow& row : check.rows) {
      Json entry;
      entry["lag"] = row.lag;
      entry["empirical"] = row.empirical;
      entry["target"] = row.target;
      entry["std_error"] = row.std_error;
      entry["z_score"] = row.z_score;
      entry["flagged"] = row.flagged;
      rows.push_back(std::move(entry));
    }
    report["autocov"] = std::move(rows);
  }
  write_json(out_path(opt.out, "report.json"), report);
  log_info("synth report written to " + out_path(opt.out, "report.json"));
  return 0;
}

// --- galerkin ----------------------------------------------------------------

struct GalerkinOptions {
  std::string problem;
  std::string out = ".";
};

int run_galerkin(const GalerkinOptions& opt) {
  const GalerkinProblem problem =
      galerkin_problem_from_json(load_json(opt.problem));
  GalerkinSystem sys =
      assemble(problem.alg, problem.kappa, problem.load, problem.u0);
  if (problem.keep > 0) sys = truncate_system(sys, problem.keep);
  const Trajectory traj = solve(sys, problem.horizon, problem.steps);
  const CompareReport compare =
      reference_compare(problem.alg, problem.kappa, problem.load, problem.u0,
                        sys, traj);
  const double residual = galerkin_residual(sys, traj);

  Eigen::MatrixXd table(traj.coeffs.rows(), traj.coeffs.cols() + 1);
  for (Eigen::Index k = 0; k < table.rows(); ++k) {
    table(k, 0) = traj.times[static_cast<std::size_t>(k)];
  }
  table.rightCols(traj.coeffs.cols()) = traj.coeffs;
  write_matrix_csv(out_path(opt.out, "trajectory.csv"), table);

  Json report = base_report("galerkin");
  Json config;
  config["problem"] = opt.problem;
  config["T"] = problem.horizon;
  config["steps"] = problem.steps;
  config["keep"] = problem.keep > 0 ? problem.keep : sys.kept();
  config["out"] = opt.out;
  report["config"] = std::move(config);
  Json tolerances;
  tolerances["kappa_validation"] = 1e-9;
  report["tolerances"] = std::move(tolerances);
  Json errors;
  errors["max_abs_error"] = compare.max_abs_error;
  errors["max_weighted_l2"] = compare.max_weighted_l2;
  errors["galerkin_residual"] = residual;
  report["errors"] = std::move(errors);
  report["trajectory_csv"] = "trajectory.csv";
  write_json(out_path(opt.out, "report.json"), report);
  log_info("galerkin report written to " + out_path(opt.out, "report.json"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"correlation factorisations, Karhunen-Loeve expansions, and a "
               "finite probability-algebra engine"};
  app.require_subcommand(1);

  PodOptions pod;
  CLI::App* pod_cmd =
      app.add_subcommand("pod", "snapshot correlation, eigenexpansion, and "
                                "Karhunen-Loeve truncation");
  pod_cmd->add_option("--snapshots", pod.snapshots, "snapshot CSV, one column "
                                                    "per snapshot")
      ->required();
  pod_cmd->add_option("--weights", pod.weights, "sidecar JSON with weights");
  pod_cmd->add_flag("--uniform-weights", pod.uniform_weights,
                    "use weights 1/m");
  pod_cmd->add_option("--rank", pod.rank, "truncation rank (default: all)");
  pod_cmd->add_option("--rank-tol", pod.rank_tol,
                      "relative eigenvalue retention threshold");
  pod_cmd->add_option("--max-dim", pod.max_dim, "dense dimension cap");
  pod_cmd->add_option("--out", pod.out, "output directory");

  MercerOptions mercer;
  CLI::App* mercer_cmd = app.add_subcommand(
      "mercer", "companion Gram/kernel operator and its spectrum");
  mercer_cmd->add_option("--snapshots", mercer.snapshots, "snapshot CSV")
      ->required();
  mercer_cmd->add_option("--weights", mercer.weights, "sidecar JSON");
  mercer_cmd->add_flag("--uniform-weights", mercer.uniform_weights,
                       "use weights 1/m");
  mercer_cmd->add_option("--rank-tol", mercer.rank_tol,
                         "relative eigenvalue retention threshold");
  mercer_cmd->add_option("--out", mercer.out, "output directory");

  AlgebraOptions algebra;
  CLI::App* algebra_cmd = app.add_subcommand(
      "algebra", "states, classification, laws, and norms of elements");
  algebra_cmd->add_option("--spec", algebra.spec, "algebra spec JSON")
      ->required();
  algebra_cmd->add_option("--element", algebra.element, "element CSV")
      ->required();
  algebra_cmd->add_option("--element-b", algebra.element_b,
                          "second element CSV for pair statistics");
  algebra_cmd->add_option("--fn", algebra.fn, "FnSpec JSON to apply");
  algebra_cmd->add_option("--degree", algebra.degree,
                          "independence monomial degree");
  algebra_cmd->add_option("--tol", algebra.tol, "classification tolerance");
  algebra_cmd->add_flag("--auto-normalise", algebra.auto_normalise,
                        "rescale weights or the density trace");
  algebra_cmd->add_option("--out", algebra.out, "output directory");

  SynthOptions synth;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "stationary process synthesis from a spectral density");
  synth_cmd->add_option("--model", synth.model, "StationaryModel JSON")
      ->required();
  synth_cmd->add_option("--times", synth.times, "time grid CSV")->required();
  synth_cmd->add_option("--paths", synth.n_paths, "number of sample paths")
      ->required();
  synth_cmd->add_option("--lags", synth.lags,
                        "comma-separated lags for the autocovariance check");
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt =
      synth_cmd->add_option("--seed", seed_value, "override the model seed");
  synth_cmd->add_option("--out", synth.out, "output directory");

  GalerkinOptions galerkin;
  CLI::App* galerkin_cmd = app.add_subcommand(
      "galerkin", "stochastic Galerkin demo for the random linear ODE");
  galerkin_cmd->add_option("--problem", galerkin.problem, "problem JSON")
      ->required();
  galerkin_cmd->add_option("--out", galerkin.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }

  try {
    if (pod_cmd->parsed()) return run_pod(pod);
    if (mercer_cmd->parsed()) return run_mercer(mercer);
    if (algebra_cmd->parsed()) return run_algebra(algebra);
    if (synth_cmd->parsed()) {
      if (seed_opt->count() > 0) synth.seed_override = seed_value;
      return run_synth(synth);
    }
    if (galerkin_cmd->parsed()) return run_galerkin(galerkin);
  } catch (const ValidationError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const NumericalError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
  return 0;
}
