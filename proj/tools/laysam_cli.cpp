// Command-line front end. Every stage reads and writes plain files in an
// output directory so stages can be rerun or swapped with external tools.
//
//   out-dir/config.json    accumulated run configuration
//   out-dir/data.csv       current instance
//   out-dir/clean.csv      instance before outlier injection
//   out-dir/planted.csv    generating solution
//   out-dir/outliers.json  planted outlier indices
//   out-dir/anchor.csv     anchor solution used for layering and solver start
//   out-dir/coreset.csv    coreset rows with their weight and provenance columns
//   out-dir/solution.csv   solver output
//   out-dir/metrics.csv    evaluation rows

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "laysam/io.hpp"
#include "laysam/pipeline.hpp"

namespace fs = std::filesystem;
using namespace laysam;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  int threads = 1;
  fs::path out_dir = "laysam_out";
};

// Options that override config.json fields only when given on the command line.
class Overrides {
 public:
  template <typename T, typename Setter>
  void add(CLI::App* app, const std::string& name, const std::string& help, Setter setter) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, help);
    apply_.push_back([value, opt, setter](RunConfig& c) {
      if (opt->count() > 0) setter(c, *value);
    });
  }
  void operator()(RunConfig& config) const {
    for (const auto& f : apply_) f(config);
  }

 private:
  std::vector<std::function<void(RunConfig&)>> apply_;
};

fs::path in_dir(const Globals& g, const char* name) { return g.out_dir / name; }

RunConfig load_config(const Globals& g) {
  const fs::path path = in_dir(g, "config.json");
  RunConfig config = fs::exists(path) ? RunConfig::load(path) : RunConfig{};
  return config;
}

void save_config(const Globals& g, RunConfig& config) {
  config.seed = g.seed;
  config.validate();
  config.save(in_dir(g, "config.json"));
}

PointSet load_data(const Globals& g) { return io::read_table(in_dir(g, "data.csv")).points; }

void write_solution(const fs::path& path, const RunConfig& config, const Solution& solution,
                    const TrimmedCostReport& report, int iterations) {
  io::SolutionFile file;
  file.task = config.task;
  if (const auto* c = std::get_if<CenterSet>(&solution)) {
    file.k = c->k();
    file.d = c->dim();
  } else {
    file.k = 1;
    file.d = std::get<Hyperplane>(solution).dim();
  }
  file.values = solution_values(solution);
  file.cost = report.cost;
  file.inlier_weight = report.inlier_weight;
  file.outlier_weight = report.outlier_weight();
  file.power = config.power;
  file.iterations = iterations;
  io::write_solution(path, file);
}

Solution read_solution_file(const fs::path& path) {
  const auto file = io::read_solution(path);
  return solution_from_values(file.task, file.k, file.d, file.values);
}

Solution load_or_make_anchor(const Globals& g, const RunConfig& config, const PointSet& points) {
  const fs::path path = in_dir(g, "anchor.csv");
  if (fs::exists(path)) return read_solution_file(path);
  Solution anchor = make_anchor(points, config, stage_seed(Seed{g.seed}, Stage::anchor));
  write_solution(path, config, anchor, solution_cost(points, anchor, double(config.z), config.power), 0);
  return anchor;
}

IndexList load_truth(const Globals& g) {
  const fs::path path = in_dir(g, "outliers.json");
  return fs::exists(path) ? io::read_indices(path) : IndexList{};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(io::parse_double(item));
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

void add_problem_options(CLI::App* app, Overrides& ov) {
  ov.add<std::int64_t>(app, "--k", "number of centers", [](RunConfig& c, auto v) { c.k = v; });
  ov.add<std::int64_t>(app, "--z", "number of outliers", [](RunConfig& c, auto v) { c.z = v; });
  ov.add<int>(app, "--power", "1 for median-type, 2 for means-type losses",
              [](RunConfig& c, auto v) { c.power = v; });
}

void add_coreset_options(CLI::App* app, Overrides& ov) {
  ov.add<std::string>(app, "--method", "laysam, unisam, nn or full",
                      [](RunConfig& c, auto v) { c.method = v; });
  ov.add<double>(app, "--eps", "approximation parameter in (0, 1]",
                 [](RunConfig& c, auto v) { c.epsilon = v; });
  ov.add<double>(app, "--eta", "failure probability in (0, 1)", [](RunConfig& c, auto v) { c.eta = v; });
  ov.add<double>(app, "--constant", "multiplier of the per-layer sample size",
                 [](RunConfig& c, auto v) { c.constant = v; });
  ov.add<std::int64_t>(app, "--size", "total coreset size",
                       [](RunConfig& c, auto v) { c.coreset_size = v; });
  ov.add<std::int64_t>(app, "--per-layer", "samples per layer (layered method)",
                       [](RunConfig& c, auto v) { c.per_layer = v; });
}

void add_solver_options(CLI::App* app, Overrides& ov) {
  ov.add<int>(app, "--max-iter", "solver iteration cap", [](RunConfig& c, auto v) { c.max_iter = v; });
  ov.add<double>(app, "--tol", "relative cost decrease that stops the solver",
                 [](RunConfig& c, auto v) { c.tol = v; });
}

void add_instance_options(CLI::App* app, Overrides& ov) {
  ov.add<std::int64_t>(app, "--n", "number of points", [](RunConfig& c, auto v) { c.n = v; });
  ov.add<std::int64_t>(app, "--d", "dimension (regression: features plus response)",
                       [](RunConfig& c, auto v) { c.d = v; });
}

void print_metrics(const io::MetricRow& row) {
  std::cout << io::kMetricsHeader << '\n' << io::format_metric_row(row) << '\n';
}

// ---- subcommands ----

void cmd_gen(const Globals& g, const Overrides& ov, const std::string& task, const std::string& input) {
  RunConfig config = load_config(g);
  ov(config);
  PointSet points;
  if (!input.empty()) {
    points = io::read_table(input).points;
    config.task = points.has_response() ? "regress" : "cluster";
    config.n = points.size();
    config.d = points.dim();
  } else {
    config.task = task;
    config.z = std::min<std::int64_t>(config.z, config.n - 1);
    config.validate();
    const Seed seed = stage_seed(Seed{g.seed}, Stage::generate);
    if (task == "cluster") {
      auto inst = gen_syncluster(config.n, config.d, config.k, seed);
      points = std::move(inst.points);
      write_solution(in_dir(g, "planted.csv"), config, inst.centers,
                     trimmed_cluster_cost(points, inst.centers, 0, config.power), 0);
    } else {
      auto inst = gen_synregression(config.n, config.d, seed);
      points = std::move(inst.points);
      write_solution(in_dir(g, "planted.csv"), config, inst.h,
                     trimmed_regression_cost(points, inst.h, 0, config.power), 0);
    }
  }
  config.z = std::min<std::int64_t>(config.z, config.n - 1);
  config.normalized = false;
  io::write_dataset(in_dir(g, "data.csv"), points);
  fs::remove(in_dir(g, "clean.csv"));
  fs::remove(in_dir(g, "outliers.json"));
  fs::remove(in_dir(g, "anchor.csv"));
  save_config(g, config);
  std::cout << "wrote " << points.size() << " x " << points.dim() << " points to "
            << in_dir(g, "data.csv").string() << '\n';
}

void cmd_inject(const Globals& g, const Overrides& ov) {
  RunConfig config = load_config(g);
  ov(config);
  config.validate();
  const fs::path clean = in_dir(g, "clean.csv");
  if (!fs::exists(clean)) fs::copy_file(in_dir(g, "data.csv"), clean);
  const PointSet points = io::read_table(clean).points;
  const auto injected = inject_outliers(points, config.z, parse_distribution(config.distribution),
                                        config.sigma, stage_seed(Seed{g.seed}, Stage::inject));
  io::write_dataset(in_dir(g, "data.csv"), injected.points);
  io::write_indices(in_dir(g, "outliers.json"), injected.truth.outliers);
  fs::remove(in_dir(g, "anchor.csv"));
  config.normalized = false;
  save_config(g, config);
  std::cout << "injected " << config.z << " outliers (" << config.distribution
            << ", sigma " << config.sigma << ")\n";
}

void cmd_normalize(const Globals& g, const Overrides& ov) {
  RunConfig config = load_config(g);
  ov(config);
  const PointSet points = load_data(g);
  if (!points.has_response()) throw std::invalid_argument("normalize applies to regression data");
  const auto normalized = normalize_features(points, RegionBox{config.region});
  io::write_dataset(in_dir(g, "data.csv"), normalized.points);
  nlohmann::json maps = nlohmann::json::array();
  for (const auto& m : normalized.maps) maps.push_back({{"scale", m.scale}, {"offset", m.offset}});
  std::ofstream(in_dir(g, "normalize.json")) << nlohmann::json{{"region", config.region}, {"maps", maps}}.dump(2)
                                             << '\n';
  fs::remove(in_dir(g, "anchor.csv"));
  config.normalized = true;
  save_config(g, config);
  std::cout << "normalized features to [0, " << config.region << "]\n";
}

void cmd_coreset(const Globals& g, const Overrides& ov) {
  RunConfig config = load_config(g);
  // Size controls belong to one construction and do not carry over.
  config.coreset_size.reset();
  config.per_layer.reset();
  ov(config);
  config.validate();
  const PointSet points = load_data(g);
  const Solution anchor = load_or_make_anchor(g, config, points);
  const auto start = std::chrono::steady_clock::now();
  const Coreset coreset = make_coreset(points, config, anchor, stage_seed(Seed{g.seed}, Stage::coreset));
  config.construct_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_coreset(in_dir(g, "coreset.csv"), coreset);
  save_config(g, config);
  std::cout << config.method << " coreset: " << coreset.size() << " rows, total weight "
            << io::format_double(coreset.data.total_weight()) << ", " << config.construct_seconds << " s\n";
}

void cmd_solve(const Globals& g, const Overrides& ov) {
  RunConfig config = load_config(g);
  ov(config);
  config.validate();
  const PointSet points = load_data(g);
  const Solution anchor = load_or_make_anchor(g, config, points);
  const fs::path coreset_path = in_dir(g, "coreset.csv");
  const Coreset coreset = config.method == "full" || !fs::exists(coreset_path)
                              ? identity_coreset(points)
                              : io::read_coreset(coreset_path);
  const auto start = std::chrono::steady_clock::now();
  const Solved solved = solve_coreset(coreset, config, anchor);
  if (config.method == "full") config.construct_seconds = 0.0;
  config.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_solution(in_dir(g, "solution.csv"), config, solved.solution, solved.report, solved.iterations);
  save_config(g, config);
  std::cout << "solved on " << coreset.size() << " rows: cost " << io::format_double(solved.report.cost)
            << " after " << solved.iterations << " iterations, " << config.solve_seconds << " s\n";
}

void cmd_eval(const Globals& g, const Overrides& ov) {
  RunConfig config = load_config(g);
  ov(config);
  const PointSet points = load_data(g);
  const fs::path coreset_path = in_dir(g, "coreset.csv");
  const Coreset coreset = config.method == "full" || !fs::exists(coreset_path)
                              ? identity_coreset(points)
                              : io::read_coreset(coreset_path);
  const Solution solution = read_solution_file(in_dir(g, "solution.csv"));
  const auto metrics = evaluate_solution(points, load_truth(g), coreset, solution, config,
                                         {config.construct_seconds, config.solve_seconds});
  const io::MetricRow row{config.method, config.sigma, "0", metrics};
  io::write_metrics(in_dir(g, "metrics.csv"), {row});
  if (metrics.empty_truth) std::cerr << "note: no planted outliers, outlier metrics set to 1\n";
  print_metrics(row);
}

void cmd_probe(const Globals& g, const Overrides& ov, double L, std::int64_t trials) {
  RunConfig config = load_config(g);
  ov(config);
  config.validate();
  const PointSet points = load_data(g);
  const Solution anchor = load_or_make_anchor(g, config, points);
  Coreset coreset = io::read_coreset(in_dir(g, "coreset.csv"));
  coreset.params.epsilon = config.epsilon;
  if (L < 0) L = 0.5 * solution_cost(points, anchor, double(config.z), 1).cost;
  const Seed seed = stage_seed(Seed{g.seed}, Stage::probe);
  ProbeResult r;
  if (const auto* c = std::get_if<CenterSet>(&anchor)) {
    r = range_probe(points, coreset, *c, L, config.z, config.power, trials, seed);
  } else {
    r = range_probe(points, coreset, std::get<Hyperplane>(anchor), RegionBox{config.region}, L, config.z,
                    config.power, trials, seed);
  }
  const nlohmann::json out = {{"L", L},
                              {"trials", trials},
                              {"max_abs_error", r.max_abs_error},
                              {"bound", r.bound},
                              {"anchor_cost", r.anchor_cost},
                              {"violations", r.violations},
                              {"out_of_range", r.out_of_range}};
  std::ofstream(in_dir(g, "probe.json")) << out.dump(2) << '\n';
  std::cout << out.dump(2) << '\n';
}

io::MetricRow summary_row(const std::string& method, double sigma, const std::vector<MetricReport>& runs,
                          bool mean) {
  auto stat = [&](auto field) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.*field);
    const double mu = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    if (mean) return mu;
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / double(v.size() - 1));
  };
  MetricReport m;
  m.l1_loss = stat(&MetricReport::l1_loss);
  m.l2_loss = stat(&MetricReport::l2_loss);
  m.recall_precision = stat(&MetricReport::recall_precision);
  m.pre_recall = stat(&MetricReport::pre_recall);
  m.construct_seconds = stat(&MetricReport::construct_seconds);
  m.solve_seconds = stat(&MetricReport::solve_seconds);
  return {method, sigma, mean ? "mean" : "std", m};
}

void cmd_bench(const Globals& g, const Overrides& ov, const std::string& task, const std::string& sigmas,
               const std::string& methods, bool normalize) {
  RunConfig config = load_config(g);
  config.task = task;
  ov(config);
  config.sigmas = parse_list(sigmas);
  config.methods = split(methods);
  config.normalized = normalize;
  save_config(g, config);

  std::vector<io::MetricRow> rows;
  for (double sigma : config.sigmas) {
    std::map<std::string, std::vector<MetricReport>> per_method;
    for (int t = 0; t < config.trials; ++t) {
      const Seed trial_seed = derive_seed(Seed{g.seed}, static_cast<std::uint64_t>(t));
      PointSet clean = task == "cluster"
                           ? gen_syncluster(config.n, config.d, config.k, stage_seed(trial_seed, Stage::generate)).points
                           : gen_synregression(config.n, config.d, stage_seed(trial_seed, Stage::generate)).points;
      auto injected = inject_outliers(clean, config.z, parse_distribution(config.distribution), sigma,
                                      stage_seed(trial_seed, Stage::inject));
      PointSet points = normalize && task == "regress"
                            ? normalize_features(injected.points, RegionBox{config.region}).points
                            : std::move(injected.points);
      const Solution anchor = make_anchor(points, config, stage_seed(trial_seed, Stage::anchor));
      for (const auto& method : config.methods) {
        RunConfig mc = config;
        mc.method = method;
        const auto outcome = run_method(points, injected.truth.outliers, anchor, mc,
                                        stage_seed(trial_seed, Stage::coreset));
        rows.push_back({method, sigma, std::to_string(t), outcome.metrics});
        per_method[method].push_back(outcome.metrics);
        std::cerr << io::format_metric_row(rows.back()) << '\n';
      }
    }
    for (const auto& method : config.methods) {
      rows.push_back(summary_row(method, sigma, per_method[method], true));
      rows.push_back(summary_row(method, sigma, per_method[method], false));
    }
  }
  io::write_metrics(in_dir(g, "metrics.csv"), rows);
  std::cout << io::kMetricsHeader << '\n';
  for (const auto& r : rows) {
    if (r.trial == "mean" || r.trial == "std") std::cout << io::format_metric_row(r) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered sampling coresets for clustering and regression with outliers"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "base random seed");
  app.add_option("--threads", g.threads, "worker threads for distance kernels")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "directory holding the pipeline files");

  Overrides gen_ov, inject_ov, norm_ov, coreset_ov, solve_ov, eval_ov, probe_ov, bench_ov;

  std::string gen_task = "cluster", gen_input;
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance or import a CSV");
  gen->add_option("task", gen_task, "cluster or regress")->check(CLI::IsMember({"cluster", "regress"}));
  gen->add_option("--input", gen_input, "import this dataset CSV instead of generating")->check(CLI::ExistingFile);
  add_instance_options(gen, gen_ov);
  gen_ov.add<std::int64_t>(gen, "--k", "number of planted centers", [](RunConfig& c, auto v) { c.k = v; });

  auto* inject = app.add_subcommand("inject", "perturb z random points into outliers");
  inject_ov.add<std::int64_t>(inject, "--z", "number of outliers", [](RunConfig& c, auto v) { c.z = v; });
  inject_ov.add<std::string>(inject, "--dist", "gauss or uniform", [](RunConfig& c, auto v) { c.distribution = v; });
  inject_ov.add<double>(inject, "--sigma", "perturbation scale", [](RunConfig& c, auto v) { c.sigma = v; });

  auto* norm = app.add_subcommand("normalize", "map regression features into [0, D]");
  norm_ov.add<double>(norm, "--region", "region bound D", [](RunConfig& c, auto v) { c.region = v; });

  auto* coreset = app.add_subcommand("coreset", "build a coreset around the anchor solution");
  add_coreset_options(coreset, coreset_ov);
  add_problem_options(coreset, coreset_ov);

  auto* solve = app.add_subcommand("solve", "run the trimmed solver on the coreset");
  add_problem_options(solve, solve_ov);
  add_solver_options(solve, solve_ov);
  solve_ov.add<std::string>(solve, "--method", "coreset method; full solves on the raw data",
                            [](RunConfig& c, auto v) { c.method = v; });

  auto* eval = app.add_subcommand("eval", "evaluate the solution on the full instance");

  double probe_L = -1;
  std::int64_t probe_trials = 200;
  auto* probe = app.add_subcommand("probe", "compare coreset and full cost over the solution range");
  probe->add_option("--L", probe_L, "range radius (default: half the anchor's mean inlier distance)");
  probe->add_option("--trials", probe_trials, "sampled solutions")->check(CLI::PositiveNumber);
  add_problem_options(probe, probe_ov);
  probe_ov.add<double>(probe, "--eps", "epsilon the coreset was built with",
                       [](RunConfig& c, auto v) { c.epsilon = v; });

  std::string bench_task = "cluster", bench_sigmas = "50,100,200", bench_methods = "laysam,unisam";
  bool bench_normalize = false;
  auto* bench = app.add_subcommand("bench", "sweep sigma x method x trial on synthetic data");
  bench->add_option("task", bench_task, "cluster or regress")->check(CLI::IsMember({"cluster", "regress"}));
  bench->add_option("--sigmas", bench_sigmas, "comma-separated perturbation scales");
  bench->add_option("--methods", bench_methods, "comma-separated methods");
  bench->add_flag("--normalize", bench_normalize, "normalize regression features after injection");
  add_instance_options(bench, bench_ov);
  add_problem_options(bench, bench_ov);
  add_coreset_options(bench, bench_ov);
  add_solver_options(bench, bench_ov);
  bench_ov.add<std::string>(bench, "--dist", "gauss or uniform", [](RunConfig& c, auto v) { c.distribution = v; });
  bench_ov.add<int>(bench, "--trials", "trials per sigma", [](RunConfig& c, auto v) { c.trials = v; });

  CLI11_PARSE(app, argc, argv);

  try {
    set_num_threads(g.threads);
    fs::create_directories(g.out_dir);
    if (gen->parsed()) cmd_gen(g, gen_ov, gen_task, gen_input);
    if (inject->parsed()) cmd_inject(g, inject_ov);
    if (norm->parsed()) cmd_normalize(g, norm_ov);
    if (coreset->parsed()) cmd_coreset(g, coreset_ov);
    if (solve->parsed()) cmd_solve(g, solve_ov);
    if (eval->parsed()) cmd_eval(g, eval_ov);
    if (probe->parsed()) cmd_probe(g, probe_ov, probe_L, probe_trials);
    if (bench->parsed()) cmd_bench(g, bench_ov, bench_task, bench_sigmas, bench_methods, bench_normalize);
  } catch (const std::exception& e) {
    std::cerr << "laysam: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
