#pragma once

#include <variant>

#include "laysam/baselines.hpp"
#include "laysam/clustering.hpp"
#include "laysam/harness.hpp"
#include "laysam/regression.hpp"
#include "laysam/run_config.hpp"

namespace laysam {

// A solution of either task. Clustering holds k centers, regression one hyperplane.
using Solution = std::variant<CenterSet, Hyperplane>;

// Substream ids so every stage draws from its own stream of the run seed.
enum class Stage : std::uint64_t { generate = 1, inject = 2, anchor = 3, coreset = 4, probe = 5 };
Seed stage_seed(Seed base, Stage stage);

/// Initial solution: local search with outliers for clustering, a trimmed
/// random-sample fit for regression.
Solution make_anchor(const PointSet& points, const RunConfig& config, Seed seed);

/// Coreset size the layered construction would produce with the default
/// per-layer target. Used as the default size of the baselines.
Index default_coreset_size(Index n, const RunConfig& config);

/// Per-layer count that makes the layered coreset hit a total size budget.
/// Throws when the outer set alone does not fit.
Index per_layer_for_size(Index n, Index z, double epsilon, Index size);

/// Coreset for config.method. "full" returns the identity coreset.
Coreset make_coreset(const PointSet& points, const RunConfig& config, const Solution& anchor,
                     Seed seed);

struct Solved {
  Solution solution;
  TrimmedCostReport report;  // on the coreset
  int iterations = 0;
};

/// Runs k-means-- or trimmed regression on the coreset, started at init.
Solved solve_coreset(const Coreset& coreset, const RunConfig& config, const Solution& init);

/// Trimmed cost of a solution on a point set.
TrimmedCostReport solution_cost(const PointSet& points, const Solution& solution, double z,
                                int power);

/// Losses and outlier metrics of a solution evaluated on the full instance.
MetricReport evaluate_solution(const PointSet& points, const IndexList& truth,
                               const Coreset& coreset, const Solution& solution,
                               const RunConfig& config, const Timings& timings);

struct TrialOutcome {
  Coreset coreset;
  Solved solved;
  MetricReport metrics;
};

/// Builds the coreset for one method around a given anchor, then solves on it and scores the result.
TrialOutcome run_method(const PointSet& points, const IndexList& truth, const Solution& anchor,
                        const RunConfig& config, Seed seed);

/// Flattened solution values (k*d for clustering, d for regression).
Vector solution_values(const Solution& solution);
Solution solution_from_values(const std::string& task, Index k, Index d, const Vector& values);

}  // namespace laysam
