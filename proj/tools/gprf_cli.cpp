// gprf command-line harness: dataset generation, MAP fitting with the
// full-GP / local / GPRF / hybrid methods, metric recomputation, and a
// self-contained verification suite for the library's structural identities.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gprf/gprf.hpp"

namespace fs = std::filesystem;
using namespace gprf;

namespace {

const auto kProcessStart = std::chrono::steady_clock::now();

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitSizeGuard = 3;

// ---------------------------------------------------------------------------
// config handling

KernelSpec kernel_from_config(const KeyValueFile& cfg, KernelSpec base) {
  if (cfg.has("kernel")) base.family = kernel_family_from_name(cfg.get("kernel"));
  if (cfg.has("sigma_f2"))
    base.hyperparams.signal_variance = cfg.get_double("sigma_f2", 1.0);
  if (cfg.has("lengthscales")) {
    base.hyperparams.lengthscales.clear();
    for (const auto& tok : split(cfg.get("lengthscales"), ','))
      base.hyperparams.lengthscales.push_back(std::stod(tok));
  }
  if (cfg.has("sigma_n2"))
    base.hyperparams.noise_variance = cfg.get_double("sigma_n2", 0.0);
  base.jitter = cfg.get_double("jitter", cfg.has("sigma_f2") || cfg.has("kernel")
                                             ? 1e-8 * base.hyperparams.signal_variance
                                             : base.jitter);
  return base;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& resolved) {
  std::ofstream out(out_dir / "manifest.txt");
  out << "# gprf run manifest\n";
  out << "version=" << kVersion << "\n";
  out << "command=" << command << "\n";
  for (const auto& [k, v] : resolved) out << k << "=" << v << "\n";
}

int resolve_workers(long long requested) {
  if (requested > 0) return static_cast<int>(requested);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---------------------------------------------------------------------------
// generate

int run_generate(const fs::path& config_path) {
  const KeyValueFile cfg = parse_key_value_file(config_path);
  cfg.reject_unknown({"generator", "n", "d", "D", "seed", "kernel", "sigma_f2",
                      "lengthscales", "sigma_n2", "jitter", "sigma_obs",
                      "clusters", "region_side_km", "cluster_sigma_km",
                      "depth_sigma_km", "out_dir", "name"});

  const std::string generator = cfg.require("generator");
  SyntheticSpec spec;
  spec.n = static_cast<int>(cfg.get_int("n", 1000));
  spec.num_outputs = static_cast<int>(cfg.get_int("D", 50));
  spec.seed = cfg.get_u64("seed", 0);
  spec.sigma_obs = cfg.get_double("sigma_obs", generator == "events" ? 20.0 : 2.0);
  spec.clusters = static_cast<int>(cfg.get_int("clusters", 0));
  spec.region_side_km = cfg.get_double("region_side_km", 300.0);
  spec.cluster_sigma_km = cfg.get_double("cluster_sigma_km", 30.0);
  spec.depth_sigma_km = cfg.get_double("depth_sigma_km", 15.0);

  Dataset data;
  if (generator == "uniform") {
    spec.d = static_cast<int>(cfg.get_int("d", 2));
    spec.kernel = kernel_from_config(cfg, default_uniform_kernel());
    data = gen_uniform(spec);
  } else if (generator == "events") {
    spec.d = static_cast<int>(cfg.get_int("d", 3));
    spec.kernel = kernel_from_config(cfg, default_events_kernel());
    data = gen_events(spec);
  } else {
    throw ValidationError("generator must be 'uniform' or 'events'");
  }

  const fs::path out_dir = cfg.resolve(cfg.get("out_dir", "."));
  fs::create_directories(out_dir);
  const std::string name = cfg.get("name", "dataset");
  const fs::path csv = out_dir / (name + ".csv");
  write_dataset(csv, data);

  write_manifest(out_dir, "generate",
                 {{"generator", generator},
                  {"n", std::to_string(spec.n)},
                  {"d", std::to_string(spec.d)},
                  {"D", std::to_string(spec.num_outputs)},
                  {"seed", std::to_string(spec.seed)},
                  {"kernel", kernel_family_name(spec.kernel.family)},
                  {"sigma_f2", format_double(spec.kernel.hyperparams.signal_variance)},
                  {"sigma_n2", format_double(spec.kernel.hyperparams.noise_variance)},
                  {"sigma_obs", format_double(spec.sigma_obs)},
                  {"rng", kGeneratorId},
                  {"output", csv.string()}});
  std::cout << "wrote " << csv.string() << " (" << spec.n << " points, "
            << spec.num_outputs << " outputs)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

struct FitSetup {
  Dataset data;
  KernelSpec kernel;
  Partition partition;
  EdgeSet edges;        // as configured (stage-2 edges for hybrid)
  std::string method;
  std::string edge_rule;
  LocationPrior prior;
  FitConfig fit_config;
  int hybrid_stage1_iters = 0;
  fs::path out_dir;
  bool deterministic_clock = false;
};

EdgeSet build_edges(const std::string& rule, const Partition& partition,
                    const Matrix& X0) {
  if (rule == "empty") return edges_empty(partition.num_blocks());
  if (rule == "complete") return edges_complete(partition.num_blocks());
  if (rule == "grid8") return edges_grid_neighbors(partition);
  if (rule.rfind("dist:", 0) == 0) {
    const double tau = std::stod(rule.substr(5));
    return edges_distance_threshold(partition, X0, tau);
  }
  throw ValidationError("unknown edge rule: " + rule);
}

FitSetup load_fit_setup(const KeyValueFile& cfg) {
  cfg.reject_unknown({"dataset", "method", "partition", "m_target",
                      "cells_per_side", "cells_x", "cells_y", "max_block_size",
                      "edges", "kernel", "sigma_f2", "lengthscales", "sigma_n2",
                      "jitter", "sigma_obs", "optimize_x", "optimize_theta",
                      "max_iters", "grad_tol", "wall_budget_s",
                      "trajectory_stride", "workers", "depth_softplus", "clock",
                      "hybrid_stage1_iters", "out_dir"});
  FitSetup s;
  s.data = read_dataset(cfg.resolve(cfg.require("dataset")));
  s.kernel = kernel_from_config(cfg, s.data.spec.kernel);
  s.method = cfg.require("method");
  if (s.method != "full_gp" && s.method != "local" && s.method != "gprf" &&
      s.method != "hybrid")
    throw ValidationError("method must be full_gp, local, gprf, or hybrid");

  const Index n = s.data.X_obs.rows();
  const Index d = s.data.X_obs.cols();

  // Partition and edges are built once, from the observed locations, and
  // stay fixed while the latent locations move.
  const std::string partition_kind = cfg.get("partition", "grid");
  if (partition_kind == "grid") {
    if (d != 2) throw ValidationError("grid partition requires 2-D points");
    int cx, cy;
    if (cfg.has("cells_x") || cfg.has("cells_y")) {
      cx = static_cast<int>(cfg.get_int("cells_x", 1));
      cy = static_cast<int>(cfg.get_int("cells_y", 1));
    } else if (cfg.has("cells_per_side")) {
      cx = cy = static_cast<int>(cfg.get_int("cells_per_side", 1));
    } else {
      const double m_target = cfg.get_double("m_target", 100.0);
      const int cells = std::max(
          1, static_cast<int>(std::llround(static_cast<double>(n) / m_target)));
      std::tie(cx, cy) = squarest_grid(cells);
    }
    s.partition = grid_partition(s.data.X_obs, cx, cy, Rect::of(s.data.X_obs));
  } else if (partition_kind == "patree") {
    const int max_bs = static_cast<int>(cfg.get_int("max_block_size", 400));
    s.partition = pa_tree_partition(s.data.X_obs, max_bs);
  } else {
    throw ValidationError("partition must be grid or patree");
  }

  s.edge_rule = cfg.get("edges", "grid8");
  s.edges = build_edges(s.edge_rule, s.partition, s.data.X_obs);

  s.prior.X_obs = s.data.X_obs;
  s.prior.sigma_obs =
      Vector::Constant(d, cfg.get_double("sigma_obs", s.data.spec.sigma_obs));

  FitConfig fc;
  fc.optimize_X = cfg.get_bool("optimize_x", true);
  fc.optimize_theta = cfg.get_bool("optimize_theta", false);
  fc.max_iters = static_cast<int>(cfg.get_int("max_iters", 200));
  fc.grad_tol = cfg.get_double("grad_tol", 1e-5);
  fc.wall_clock_budget_s = cfg.get_double(
      "wall_budget_s", std::numeric_limits<double>::infinity());
  fc.trajectory_stride = static_cast<int>(cfg.get_int("trajectory_stride", 1));
  fc.workers = resolve_workers(cfg.get_int("workers", 0));
  fc.depth_softplus =
      cfg.get_bool("depth_softplus", s.data.generator == "events" && d == 3);
  const std::string clock = cfg.get("clock", "wall");
  if (clock != "wall" && clock != "deterministic")
    throw ValidationError("clock must be wall or deterministic");
  fc.deterministic_clock = clock == "deterministic";
  fc.clock_epoch = kProcessStart;
  s.deterministic_clock = fc.deterministic_clock;
  s.fit_config = fc;
  s.hybrid_stage1_iters = static_cast<int>(
      cfg.get_int("hybrid_stage1_iters", std::max(1, fc.max_iters / 2)));

  s.out_dir = cfg.resolve(cfg.get("out_dir", "."));
  return s;
}

// Concatenate stage trajectories: steps continue counting; deterministic
// clocks restart per fit() call, so offset them (wall clocks share the
// process epoch already).
Trajectory append_trajectory(Trajectory a, const Trajectory& b,
                             bool deterministic_clock) {
  if (a.records.empty()) return b;
  const int step0 = a.records.back().step;
  const double t0 = deterministic_clock ? a.records.back().wall_time_s : 0.0;
  for (TrajectoryRecord r : b.records) {
    r.step += step0;
    r.wall_time_s += t0;
    a.records.push_back(r);
  }
  return a;
}

int run_fit(const fs::path& config_path) {
  const KeyValueFile cfg = parse_key_value_file(config_path);
  FitSetup s = load_fit_setup(cfg);
  fs::create_directories(s.out_dir);

  const Matrix& X_true = s.data.X_true;
  const double initial_error = mean_location_error(s.data.X_obs, X_true);

  Eigen::setNbThreads(s.fit_config.workers);

  FitResult result;
  int stage1_iters = 0;
  if (s.method == "full_gp") {
    result = fit_full_gp(s.kernel, s.data.X_obs, s.data.Y, s.prior,
                         s.fit_config, &X_true);
  } else if (s.method == "local") {
    GprfModel model{s.kernel, s.partition, edges_empty(s.partition.num_blocks()),
                    s.data.X_obs, s.data.Y};
    result = fit(model, s.prior, s.fit_config, &X_true);
  } else if (s.method == "gprf") {
    GprfModel model{s.kernel, s.partition, s.edges, s.data.X_obs, s.data.Y};
    result = fit(model, s.prior, s.fit_config, &X_true);
  } else {  // hybrid: local first, then continue with the configured edges
    FitConfig stage1 = s.fit_config;
    stage1.max_iters = std::min(s.hybrid_stage1_iters, s.fit_config.max_iters);
    GprfModel local{s.kernel, s.partition, edges_empty(s.partition.num_blocks()),
                    s.data.X_obs, s.data.Y};
    FitResult r1 = fit(local, s.prior, stage1, &X_true);
    stage1_iters = r1.iterations;

    FitConfig stage2 = s.fit_config;
    stage2.max_iters = std::max(1, s.fit_config.max_iters - r1.iterations);
    KernelSpec k2 = s.kernel;
    k2.hyperparams = r1.theta_hat;
    GprfModel coupled{k2, s.partition, s.edges, r1.X_hat, s.data.Y};
    result = fit(coupled, s.prior, stage2, &X_true);
    result.trajectory = append_trajectory(std::move(r1.trajectory),
                                          result.trajectory,
                                          s.deterministic_clock);
    result.iterations += r1.iterations;
  }

  const double final_error = mean_location_error(result.X_hat, X_true);
  const double wall_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - kProcessStart)
                            .count();

  write_matrix_csv(s.out_dir / "x_hat.csv", result.X_hat);
  write_trajectory_csv(s.out_dir / "trajectory.csv", result.trajectory);
  write_partition_csv(s.out_dir / "partition.csv", s.partition);
  const EdgeSet& used_edges =
      s.method == "local" ? edges_empty(s.partition.num_blocks()) : s.edges;
  write_edges_csv(s.out_dir / "edges.csv", used_edges);

  std::vector<std::pair<std::string, std::string>> summary = {
      {"method", s.method},
      {"n", std::to_string(s.data.X_obs.rows())},
      {"d", std::to_string(s.data.X_obs.cols())},
      {"D", std::to_string(s.data.Y.cols())},
      {"M", std::to_string(s.partition.num_blocks())},
      {"mean_block_size", format_double(s.partition.mean_block_size())},
      {"num_edges", std::to_string(s.method == "local" ? 0 : s.edges.num_edges())},
      {"edge_rule", s.method == "local" ? "empty" : s.edge_rule},
      {"initial_error", format_double(initial_error)},
      {"final_error", format_double(final_error)},
      {"final_objective", format_double(result.final_objective)},
      {"iterations", std::to_string(result.iterations)},
      {"stage1_iters", std::to_string(stage1_iters)},
      {"wall_time_s", format_double(wall_s)},
      {"stop_reason", result.stop_reason},
      {"workers", std::to_string(s.fit_config.workers)},
  };
  std::ofstream sum(s.out_dir / "summary.txt");
  for (const auto& [k, v] : summary) sum << k << "=" << v << "\n";

  std::vector<std::pair<std::string, std::string>> resolved = summary;
  resolved.emplace_back("dataset", cfg.resolve(cfg.require("dataset")).string());
  resolved.emplace_back("max_iters", std::to_string(s.fit_config.max_iters));
  resolved.emplace_back("grad_tol", format_double(s.fit_config.grad_tol));
  resolved.emplace_back("optimize_x", s.fit_config.optimize_X ? "true" : "false");
  resolved.emplace_back("optimize_theta", s.fit_config.optimize_theta ? "true" : "false");
  resolved.emplace_back("clock", s.deterministic_clock ? "deterministic" : "wall");
  resolved.emplace_back("sigma_obs", format_double(s.prior.sigma_obs(0)));
  write_manifest(s.out_dir, "fit", resolved);

  std::cout << "method=" << s.method << " initial_error="
            << format_double(initial_error)
            << " final_error=" << format_double(final_error)
            << " iters=" << result.iterations << " (" << result.stop_reason
            << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval: recompute metrics from a saved X_hat

int run_eval(const fs::path& config_path) {
  const KeyValueFile cfg = parse_key_value_file(config_path);
  cfg.reject_unknown({"dataset", "x_hat", "out_dir"});
  const Dataset data = read_dataset(cfg.resolve(cfg.require("dataset")));
  const Matrix X_hat = read_matrix_csv(cfg.resolve(cfg.require("x_hat")));
  const double err = mean_location_error(X_hat, data.X_true);
  const double initial = mean_location_error(data.X_obs, data.X_true);
  std::cout << "initial_error=" << format_double(initial)
            << " final_error=" << format_double(err) << "\n";
  if (cfg.has("out_dir")) {
    const fs::path out_dir = cfg.resolve(cfg.get("out_dir", "."));
    fs::create_directories(out_dir);
    std::ofstream sum(out_dir / "eval_summary.txt");
    sum << "initial_error=" << format_double(initial) << "\n"
        << "final_error=" << format_double(err) << "\n";
    write_manifest(out_dir, "eval",
                   {{"dataset", cfg.resolve(cfg.require("dataset")).string()},
                    {"x_hat", cfg.resolve(cfg.require("x_hat")).string()},
                    {"final_error", format_double(err)}});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify: the theorem suite on self-contained fixtures

struct VerifyState {
  bool all_pass = true;
  void report(const std::string& name, bool pass, double residual,
              double bound) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << name
              << ": residual=" << format_double(residual)
              << " (bound " << format_double(bound) << ")\n";
    all_pass = all_pass && pass;
  }
};

GprfModel random_verify_model(std::uint64_t seed, int n, int max_blocks) {
  auto stream = RandomStream::for_stream(seed, 7);
  const double side = std::sqrt(static_cast<double>(n)) * 2.0;
  Matrix X(n, 2);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = stream.uniform(0.0, side);
    X(i, 1) = stream.uniform(0.0, side);
  }
  const int M = 2 + static_cast<int>(stream.uniform() * (max_blocks - 1));
  std::vector<int> assignment(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) assignment[static_cast<size_t>(i)] = i % M;
  Partition partition = make_explicit_partition(std::move(assignment));

  std::vector<std::pair<int, int>> edge_pool;
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j)
      if (stream.uniform() < 0.6) edge_pool.emplace_back(i, j);
  EdgeSet edges = make_edge_set(M, std::move(edge_pool));

  KernelSpec kernel =
      make_kernel(KernelFamily::SquaredExponentialPlain, 1.0, {3.0}, 0.1);
  GaussianFactor factor = factorize(cov_matrix(kernel, X, X, true));
  const int D = 3;
  Matrix Z(n, D);
  for (Index c = 0; c < Z.cols(); ++c)
    for (Index r = 0; r < Z.rows(); ++r) Z(r, c) = stream.normal();
  return GprfModel{kernel, partition, edges, X, factor.chol * Z};
}

int run_verify(bool inject_q12_bug) {
  VerifyState v;

  {  // block-tree exactness on the OU chain
    const OuChainFixture fx = ou_chain_fixture(200, 20, 2.0, 0.0, 2);
    GprfModel chain{fx.gp.kernel, fx.partition, fx.edges, fx.gp.X, fx.gp.Y};
    const double gap = std::abs(gprf_value(chain) - full_loglik(fx.gp));
    v.report("tree exactness (OU chain, n=200, m=20)", gap <= 1e-6, gap, 1e-6);
  }

  {  // Theorem 1: quadratic-form identity of the assembled precision
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GprfModel model = random_verify_model(seed, 60, 5);
      PrecisionAssembly pa = assemble_precision(model);
      if (inject_q12_bug && !model.edges.edges.empty()) {
        // Negative control: corrupt the sign of one off-diagonal block.
        const auto& [i, j] = model.edges.edges.front();
        const auto& bi = model.partition.blocks[static_cast<size_t>(i)];
        const auto& bj = model.partition.blocks[static_cast<size_t>(j)];
        for (int p : bi)
          for (int q : bj) {
            pa.precision(p, q) = -pa.precision(p, q);
            pa.precision(q, p) = -pa.precision(q, p);
          }
      }
      const double direct = gprf_value(model);
      const double quad = -0.5 * (model.Y.transpose() * pa.precision * model.Y).trace();
      const double reassembled = quad + static_cast<double>(model.Y.cols()) * pa.constant;
      worst = std::max(worst,
                       std::abs(reassembled - direct) / std::max(1.0, std::abs(direct)));
    }
    v.report("theorem 1 precision quadratic form (5 random fields)",
             worst <= 1e-8, worst, 1e-8);
  }

  {  // Theorem 2: Bethe free energy is zero at the true marginals
    double worst_f = 0.0, worst_kl = 0.0;
    for (std::uint64_t seed = 11; seed <= 15; ++seed) {
      const BetheReport rep = bethe_check(random_verify_model(seed, 50, 5));
      worst_f = std::max(worst_f, std::abs(rep.free_energy));
      for (double kl : rep.kl_terms) worst_kl = std::max(worst_kl, std::abs(kl));
    }
    v.report("theorem 2 Bethe free energy zero", worst_f <= 1e-9, worst_f, 1e-9);
    v.report("theorem 2 per-term KL zero", worst_kl <= 1e-10, worst_kl, 1e-10);
  }

  {  // committee-machine equivalence of the extended-field conditional
    double worst = 0.0;
    for (std::uint64_t seed = 21; seed <= 25; ++seed) {
      GprfModel model = random_verify_model(seed, 45, 3);
      auto stream = RandomStream::for_stream(seed, 9);
      Matrix Xstar(2, 2);
      for (Index i = 0; i < 2; ++i)
        for (Index c = 0; c < 2; ++c)
          Xstar(i, c) = stream.uniform(0.0, std::sqrt(45.0) * 2.0);
      const BcmPrediction bcm = bcm_predict(model, Xstar);
      const Prediction cond = gprf_conditional(model, Xstar);
      const double scale = std::max(1.0, bcm.mean.cwiseAbs().maxCoeff());
      worst = std::max(worst, (bcm.mean - cond.mean).cwiseAbs().maxCoeff() / scale);
      worst = std::max(worst, (bcm.cov - cond.cov).cwiseAbs().maxCoeff() /
                                  std::max(1.0, bcm.cov.cwiseAbs().maxCoeff()));
    }
    v.report("BCM == extended-field conditional", worst <= 1e-8, worst, 1e-8);
  }

  {  // analytic gradients against central finite differences
    double worst = 0.0;
    for (std::uint64_t seed = 31; seed <= 33; ++seed) {
      GprfModel model = random_verify_model(seed, 24, 3);
      const ObjectiveReport rep = gprf_gradient(model);
      const double h = 1e-5;
      auto stream = RandomStream::for_stream(seed, 13);
      for (int trial = 0; trial < 6; ++trial) {
        const Index i = static_cast<Index>(stream.uniform() * model.X.rows());
        const Index c = static_cast<Index>(stream.uniform() * model.X.cols());
        GprfModel pert = model;
        pert.X(i, c) = model.X(i, c) + h;
        const double up = gprf_value(pert);
        pert.X(i, c) = model.X(i, c) - h;
        const double dn = gprf_value(pert);
        const double fd = (up - dn) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - rep.grad_X(i, c)) /
                                    std::max({1.0, std::abs(fd)}));
      }
    }
    v.report("objective input gradients vs finite differences",
             worst <= 1e-4, worst, 1e-4);
  }

  std::cout << (v.all_pass ? "verification suite: all checks passed\n"
                           : "verification suite: FAILURES\n");
  return v.all_pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian process random field toolkit"};
  app.require_subcommand(1);

  std::string config_file;
  auto* gen = app.add_subcommand("generate", "generate a synthetic dataset");
  gen->add_option("--config", config_file, "key=value config file")->required();
  auto* fit_cmd = app.add_subcommand("fit", "MAP-fit latent locations");
  fit_cmd->add_option("--config", config_file, "key=value config file")->required();
  auto* eval_cmd = app.add_subcommand("eval", "recompute metrics from a saved fit");
  eval_cmd->add_option("--config", config_file, "key=value config file")->required();
  auto* verify_cmd =
      app.add_subcommand("verify", "run the structural verification suite");
  bool inject_bug = false;
  verify_cmd->add_flag("--inject-q12-bug", inject_bug,
                       "negative control: corrupt one precision block");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return run_generate(config_file);
    if (fit_cmd->parsed()) return run_fit(config_file);
    if (eval_cmd->parsed()) return run_eval(config_file);
    if (verify_cmd->parsed()) return run_verify(inject_bug);
    return kExitValidation;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  } catch (const SizeGuardError& e) {
    std::cerr << "size guard: " << e.what() << "\n";
    return kExitSizeGuard;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
