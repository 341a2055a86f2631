#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirmix/baselines.hpp"
#include "dirmix/dense_inference.hpp"
#include "dirmix/model_io.hpp"
#include "dirmix/oracles.hpp"
#include "dirmix/rng.hpp"
#include "dirmix/sparse_inference.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitMethodError = 3;

struct CommonArgs {
  std::string model_path;
  std::string obs_csv;
  std::string obs_file;
  double alpha_scale = 1.0;
  int cap = dirmix::kDefaultMaskCap;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--model", args->model_path, "model JSON file")->required();
  cmd->add_option("--obs", args->obs_csv,
                  "comma-separated vocabulary indices; empty string for n = 0");
  cmd->add_option("--obs-file", args->obs_file, "file with one vocabulary index per line")
      ->excludes("--obs");
  cmd->add_option("--alpha-scale", args->alpha_scale, "multiply all alpha entries");
  cmd->add_option("--cap", args->cap, "mask cap for dense 2^n tables");
  cmd->add_option("--format", args->format, "report format: json or tsv")
      ->check(CLI::IsMember({"json", "tsv"}));
}

dirmix::ObservationSeq read_observations(const CommonArgs& args, const dirmix::Model& model) {
  if (!args.obs_file.empty()) {
    return dirmix::load_observations_file(args.obs_file, model.vocab_size());
  }
  return dirmix::parse_observations(args.obs_csv, model.vocab_size());
}

json decomposition_json(const dirmix::TreeDecomposition& td) {
  json bags = json::array();
  for (const dirmix::SubsetMask b : td.bags) {
    json bag = json::array();
    for (int i = 0; i < 64; ++i) {
      if ((b >> i) & 1) bag.push_back(i);
    }
    bags.push_back(bag);
  }
  return json{{"bags", bags}, {"parent", td.parent}, {"root", td.root}, {"width", td.width}};
}

void emit(const json& report, const std::string& format) {
  if (format == "json") {
    std::cout << report.dump(2) << "\n";
    return;
  }
  // TSV summary: 4 decimals to match the granularity of printed tables.
  const auto num = [](const json& v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v.get<double>());
    return std::string(buf);
  };
  for (const auto& [key, value] : report.items()) {
    if (key == "theta_mean" || key == "theta_stderr") continue;
    if (value.is_number_float()) {
      std::cout << key << "\t" << num(value) << "\n";
    } else if (value.is_string() || value.is_number() || value.is_boolean()) {
      std::cout << key << "\t" << value.dump() << "\n";
    }
  }
  if (report.contains("theta_mean")) {
    const json& theta = report["theta_mean"];
    const json labels = report.value("causes", json::array());
    for (std::size_t z = 0; z < theta.size(); ++z) {
      const std::string label =
          z < labels.size() ? labels[z].get<std::string>() : "z" + std::to_string(z + 1);
      std::cout << "theta[" << label << "]\t" << num(theta[z]) << "\n";
    }
  }
}

json base_report(const CommonArgs& args, const dirmix::ObservationSeq& obs,
                 const dirmix::ModelFile& mf) {
  json report;
  report["model"] = args.model_path;
  report["obs"] = obs.tokens;
  report["alpha_scale"] = args.alpha_scale;
  if (!mf.causes.empty()) report["causes"] = mf.causes;
  return report;
}

int run_infer(const CommonArgs& args, const std::string& method, double eps,
              std::uint64_t seed, long iterations, long burn_in, double tol, int max_iters,
              bool dump_decomposition) {
  const dirmix::ModelFile mf = dirmix::load_model_file(args.model_path, args.alpha_scale);
  const dirmix::ObservationSeq obs = read_observations(args, mf.model);
  json report = base_report(args, obs, mf);
  report["method"] = method;
  json diag;

  const auto t0 = Clock::now();
  if (method == "exact") {
    const dirmix::InferenceResult r = dirmix::posterior_mean(mf.model, obs, args.cap);
    report["probability"] = r.probability;
    report["log_probability"] = r.log_probability;
    report["ptilde"] = r.ptilde_full;
    report["theta_mean"] = r.theta_mean;
  } else if (method == "sparse") {
    const dirmix::InteractionGraph graph = dirmix::interaction_graph(mf.model, obs, eps);
    const dirmix::TreeDecomposition td = dirmix::tree_decompose(graph);
    const dirmix::InferenceResult r = dirmix::sparse_posterior_mean(mf.model, obs, td, eps);
    report["probability"] = r.probability;
    report["log_probability"] = r.log_probability;
    report["ptilde"] = r.ptilde_full;
    report["theta_mean"] = r.theta_mean;
    diag["width"] = td.width;
    diag["eps"] = eps;
    if (eps > 0.0) diag["approximate"] = true;
    if (dump_decomposition) report["decomposition"] = decomposition_json(td);
  } else if (method == "ml") {
    dirmix::EMOptions opts;
    opts.max_iters = max_iters;
    opts.tol = tol;
    const dirmix::EMResult r = dirmix::em_max_likelihood(mf.model, obs, opts);
    report["theta_mean"] = r.theta;
    diag["iterations"] = r.iterations;
    diag["log_likelihood"] = r.log_likelihood;
  } else if (method == "vb") {
    dirmix::VBOptions opts;
    opts.max_iters = max_iters;
    opts.tol = tol;
    const dirmix::VBResult r = dirmix::variational_bayes(mf.model, obs, opts);
    report["theta_mean"] = r.theta_mean;
    report["gamma"] = r.gamma;
    diag["iterations"] = r.iterations;
  } else {  // gibbs
    dirmix::GibbsOptions opts;
    opts.iterations = iterations;
    opts.burn_in = burn_in;
    opts.seed = seed;
    const dirmix::GibbsResult r = dirmix::gibbs_sample(mf.model, obs, opts);
    report["theta_mean"] = r.theta_mean;
    report["theta_stderr"] = r.theta_stderr;
    diag["seed"] = r.seed;
    diag["burn_in"] = r.burn_in;
    diag["batches"] = r.batches;
    diag["kept_samples"] = r.kept;
  }
  diag["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
  report["diagnostics"] = diag;
  emit(report, args.format);
  return kExitOk;
}

int run_oracle(const CommonArgs& args, const std::string& kind, double budget,
               bool algebraic) {
  const dirmix::ModelFile mf =
      dirmix::load_model_file(args.model_path, args.alpha_scale, algebraic);
  const dirmix::ObservationSeq obs = read_observations(args, mf.model);
  json report = base_report(args, obs, mf);
  report["kind"] = kind;

  const auto t0 = Clock::now();
  if (kind == "brute") {
    report["ptilde"] = dirmix::brute_force_ptilde(mf.model, obs, budget);
  } else if (kind == "partition") {
    report["ptilde"] = dirmix::partition_ptilde(mf.model, obs, budget);
  } else if (kind == "factor") {
    report["ptilde"] = dirmix::factor_product_ptilde(mf.model, obs, args.cap);
  } else {  // permanent of the beta matrix
    std::vector<std::vector<double>> matrix(mf.model.vocab_size());
    for (int v = 0; v < mf.model.vocab_size(); ++v) {
      for (int z = 0; z < mf.model.num_causes(); ++z) {
        matrix[v].push_back(mf.model.beta(v, z));
      }
    }
    report["permanent"] = dirmix::permanent(matrix);
  }
  report["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
  emit(report, args.format);
  return kExitOk;
}

int run_graph(const CommonArgs& args, double eps) {
  const dirmix::ModelFile mf = dirmix::load_model_file(args.model_path, args.alpha_scale);
  const dirmix::ObservationSeq obs = read_observations(args, mf.model);
  const dirmix::InteractionGraph graph = dirmix::interaction_graph(mf.model, obs, eps);
  const dirmix::TreeDecomposition td = dirmix::tree_decompose(graph);
  const dirmix::ValidationReport vr = dirmix::validate_decomposition(graph, td);

  json report = base_report(args, obs, mf);
  report["eps"] = eps;
  report["n"] = graph.n;
  json edges = json::array();
  for (int i = 0; i < graph.n; ++i) {
    for (int j = i + 1; j < graph.n; ++j) {
      if (graph.has_edge(i, j)) edges.push_back(json::array({i, j}));
    }
  }
  report["edges"] = edges;
  report["decomposition"] = decomposition_json(td);
  report["validation"] = json{{"ok", vr.ok()}, {"violations", vr.violations}};
  emit(report, args.format);
  return kExitOk;
}

// Seeded synthetic instances for timing: dense has all beta positive, sparse
// places each cause's support on a window of the observation chain.
int run_bench(const std::string& kind, int n, int m, int support, int reps,
              std::uint64_t seed, int cap, const std::string& format) {
  dirmix::Rng rng(seed);
  std::vector<double> alpha(m);
  for (double& a : alpha) a = 0.1 + 0.9 * rng.uniform();
  std::vector<std::vector<double>> beta(n, std::vector<double>(m, 0.0));
  for (int z = 0; z < m; ++z) {
    if (kind == "dense") {
      for (int v = 0; v < n; ++v) beta[v][z] = 0.05 + 0.95 * rng.uniform();
    } else {
      const int start = static_cast<int>(rng.uniform() * (n - support + 1));
      for (int v = start; v < start + support; ++v) beta[v][z] = 0.05 + 0.95 * rng.uniform();
    }
  }
  const dirmix::Model model(alpha, beta);
  dirmix::ObservationSeq obs;
  for (int i = 0; i < n; ++i) obs.tokens.push_back(i);

  json rows = json::array();
  for (int rep = 0; rep < reps; ++rep) {
    const auto t0 = Clock::now();
    json row{{"kind", kind}, {"n", n}, {"m", m}, {"rep", rep}};
    if (kind == "dense") {
      const dirmix::InferenceResult r = dirmix::posterior_mean(model, obs, cap);
      row["probability"] = r.probability;
    } else {
      const dirmix::InteractionGraph graph = dirmix::interaction_graph(model, obs, 0.0);
      const dirmix::TreeDecomposition td = dirmix::tree_decompose(graph);
      const dirmix::InferenceResult r = dirmix::sparse_posterior_mean(model, obs, td, 0.0);
      row["probability"] = r.probability;
      row["width"] = td.width;
    }
    row["seconds"] =
        std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0).count() /
        1e6;
    rows.push_back(row);
  }
  if (format == "json") {
    std::cout << rows.dump(2) << "\n";
  } else {
    for (const json& row : rows) {
      std::cout << row["kind"].get<std::string>() << "\t" << row["n"] << "\t" << row["m"]
                << "\t" << row["seconds"] << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact marginal inference for Dirichlet-prior mixtures"};
  app.require_subcommand(1);

  CommonArgs infer_args;
  std::string method = "exact";
  double infer_eps = 0.0;
  std::uint64_t seed = 1;
  long iterations = 1000000;
  long burn_in = -1;
  double tol = 1e-10;
  int max_iters = 100000;
  bool dump_decomposition = false;
  CLI::App* infer = app.add_subcommand("infer", "posterior mean and probability");
  add_common(infer, &infer_args);
  infer->add_option("--method", method, "exact | sparse | ml | vb | gibbs")
      ->check(CLI::IsMember({"exact", "sparse", "ml", "vb", "gibbs"}));
  infer->add_option("--eps", infer_eps, "sparsity threshold (0 keeps the method exact)");
  infer->add_option("--seed", seed, "RNG seed (gibbs)");
  infer->add_option("--iterations", iterations, "Gibbs iterations");
  infer->add_option("--burn-in", burn_in, "Gibbs burn-in; -1 means 10% of iterations");
  infer->add_option("--tol", tol, "convergence tolerance (ml, vb)");
  infer->add_option("--max-iters", max_iters, "iteration limit (ml, vb)");
  infer->add_flag("--dump-decomposition", dump_decomposition,
                  "include the tree decomposition in the report (sparse)");

  CommonArgs oracle_args;
  std::string kind = "brute";
  double budget = 1e8;
  bool algebraic = false;
  CLI::App* oracle = app.add_subcommand("oracle", "brute-force reference computations");
  add_common(oracle, &oracle_args);
  oracle->add_option("--kind", kind, "brute | partition | factor | permanent")
      ->check(CLI::IsMember({"brute", "partition", "factor", "permanent"}));
  oracle->add_option("--budget", budget, "enumeration budget");
  oracle->add_flag("--algebraic", algebraic, "allow non-positive alpha entries");

  CommonArgs graph_args;
  double graph_eps = 0.0;
  CLI::App* graph = app.add_subcommand("graph", "interaction graph and tree decomposition");
  add_common(graph, &graph_args);
  graph->add_option("--eps", graph_eps, "sparsity threshold");

  std::string bench_kind = "dense";
  int bench_n = 12;
  int bench_m = 1000;
  int bench_support = 3;
  int bench_reps = 3;
  std::uint64_t bench_seed = 1;
  int bench_cap = dirmix::kDefaultMaskCap;
  std::string bench_format = "json";
  CLI::App* bench = app.add_subcommand("bench", "timing on generated instances");
  bench->add_option("--kind", bench_kind, "dense | sparse")
      ->check(CLI::IsMember({"dense", "sparse"}));
  bench->add_option("--n", bench_n, "observation count");
  bench->add_option("--m", bench_m, "cause count");
  bench->add_option("--support", bench_support, "per-cause support size (sparse)");
  bench->add_option("--reps", bench_reps, "repetitions");
  bench->add_option("--seed", bench_seed, "instance seed");
  bench->add_option("--cap", bench_cap, "mask cap");
  bench->add_option("--format", bench_format, "json or tsv")
      ->check(CLI::IsMember({"json", "tsv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (infer->parsed()) {
      return run_infer(infer_args, method, infer_eps, seed, iterations, burn_in, tol,
                       max_iters, dump_decomposition);
    }
    if (oracle->parsed()) {
      return run_oracle(oracle_args, kind, budget, algebraic);
    }
    if (graph->parsed()) {
      return run_graph(graph_args, graph_eps);
    }
    return run_bench(bench_kind, bench_n, bench_m, bench_support, bench_reps, bench_seed,
                     bench_cap, bench_format);
  } catch (const dirmix::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const dirmix::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMethodError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
}
