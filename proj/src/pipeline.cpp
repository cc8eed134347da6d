#include "laysam/pipeline.hpp"

#include <chrono>

namespace laysam {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

LayeredSamplingOptions layered_options(Index n, const RunConfig& config) {
  LayeredSamplingOptions options;
  options.epsilon = config.epsilon;
  options.eta = config.eta;
  options.constant = config.constant;
  if (config.per_layer) {
    options.per_layer_override = *config.per_layer;
  } else if (config.coreset_size) {
    options.per_layer_override = per_layer_for_size(n, config.z, config.epsilon, *config.coreset_size);
  }
  return options;
}

bool is_cluster(const RunConfig& config) { return config.task == "cluster"; }

}  // namespace

Seed stage_seed(Seed base, Stage stage) {
  return derive_seed(base, static_cast<std::uint64_t>(stage));
}

Solution make_anchor(const PointSet& points, const RunConfig& config, Seed seed) {
  if (is_cluster(config)) {
    LocalSearchOptions options;
    options.sample_factor = config.seed_sample_factor;
    options.power = config.power;
    return local_search_outliers_seed(points, config.k, config.z, options, seed).centers;
  }
  return regression_init(points, config.z, config.init_sample_factor, seed).h;
}

Index default_coreset_size(Index n, const RunConfig& config) {
  const Index m = outer_count(config.z, config.epsilon);
  if (m >= n) return n;
  const int layers = default_layer_count(n, config.z);
  const Index k = is_cluster(config) ? config.k : 1;
  const Index per_layer = config.per_layer.value_or(
      layer_sample_target(config.constant, config.epsilon, config.eta, k, config.d, layers));
  return std::min(n, m + (layers + 1) * per_layer);
}

Index per_layer_for_size(Index n, Index z, double epsilon, Index size) {
  const Index m = outer_count(z, epsilon);
  const int layers = default_layer_count(n, z);
  const Index per_layer = (size - m) / (layers + 1);
  if (per_layer < 1) {
    throw std::invalid_argument("coreset size " + std::to_string(size) +
                                " cannot hold the outer set of " + std::to_string(m) +
                                " points plus one sample per layer; raise epsilon or the size");
  }
  return per_layer;
}

Coreset make_coreset(const PointSet& points, const RunConfig& config, const Solution& anchor,
                     Seed seed) {
  const Index n = points.size();
  if (config.method == "full") return identity_coreset(points);
  if (config.method == "laysam") {
    const auto options = layered_options(n, config);
    if (is_cluster(config)) {
      return layered_coreset_clustering(points, std::get<CenterSet>(anchor), config.z, options, seed);
    }
    return layered_coreset_regression(points, std::get<Hyperplane>(anchor), config.z, options, seed);
  }
  const Index m = config.coreset_size.value_or(default_coreset_size(n, config));
  if (config.method == "unisam") return uniform_coreset(points, m, seed);
  if (config.method == "nn") return nn_coreset(points, m, seed);
  throw std::invalid_argument("unknown method '" + config.method + "'");
}

Solved solve_coreset(const Coreset& coreset, const RunConfig& config, const Solution& init) {
  const double z = static_cast<double>(config.z);
  if (is_cluster(config)) {
    KMeansOptions options{.max_iter = config.max_iter, .tol = config.tol, .power = config.power};
    auto result = kmeans_minus_minus(coreset.data, z, std::get<CenterSet>(init), options);
    return {std::move(result.centers), std::move(result.report), result.iterations};
  }
  RegressionSolveOptions options;
  options.max_iter = config.max_iter;
  options.tol = config.tol;
  options.power = config.power;
  auto result = trimmed_regression_solve(coreset.data, z, std::get<Hyperplane>(init), options);
  return {std::move(result.h), std::move(result.report), result.iterations};
}

TrimmedCostReport solution_cost(const PointSet& points, const Solution& solution, double z,
                                int power) {
  if (const auto* centers = std::get_if<CenterSet>(&solution)) {
    return trimmed_cluster_cost(points, *centers, z, power);
  }
  return trimmed_regression_cost(points, std::get<Hyperplane>(solution), z, power);
}

MetricReport evaluate_solution(const PointSet& points, const IndexList& truth,
                               const Coreset& coreset, const Solution& solution,
                               const RunConfig& config, const Timings& timings) {
  const double z = static_cast<double>(config.z);
  const auto l1 = solution_cost(points, solution, z, 1);
  const auto l2 = solution_cost(points, solution, z, 2);
  // Predicted outliers are the ones trimmed under the solver's own power.
  const auto& predicted = config.power == 1 ? l1.outliers : l2.outliers;
  return eval_metrics(truth, predicted, coreset.source, l1.cost, l2.cost, timings);
}

TrialOutcome run_method(const PointSet& points, const IndexList& truth, const Solution& anchor,
                        const RunConfig& config, Seed seed) {
  TrialOutcome out;
  Timings timings;
  auto start = std::chrono::steady_clock::now();
  out.coreset = make_coreset(points, config, anchor, seed);
  timings.construct_seconds = seconds_since(start);
  start = std::chrono::steady_clock::now();
  out.solved = solve_coreset(out.coreset, config, anchor);
  timings.solve_seconds = seconds_since(start);
  out.metrics = evaluate_solution(points, truth, out.coreset, out.solved.solution, config, timings);
  return out;
}

Vector solution_values(const Solution& solution) {
  if (const auto* centers = std::get_if<CenterSet>(&solution)) {
    return centers->centers().reshaped<Eigen::RowMajor>();
  }
  return std::get<Hyperplane>(solution).coeffs();
}

Solution solution_from_values(const std::string& task, Index k, Index d, const Vector& values) {
  if (task == "cluster") {
    if (values.size() != k * d) throw std::invalid_argument("solution has the wrong number of values");
    Matrix c = values.reshaped<Eigen::RowMajor>(k, d);
    return CenterSet(std::move(c));
  }
  if (values.size() != d) throw std::invalid_argument("solution has the wrong number of values");
  return Hyperplane(values);
}

}  // namespace laysam
