#pragma once

#include <optional>
#include <string>
#include <vector>

#include "laysam/core.hpp"

namespace laysam {

/// Points around an anchor solution split into rings H_0..H_N by distance
/// (ball annuli for clustering, slabs for regression) plus the outer set
/// holding exactly the outer_target farthest points.
struct LayerPartition {
  double base_radius = 0.0;      // r
  double outer_threshold = 0.0;  // 2^N r: the largest non-outer distance
  int layer_count = 1;           // N
  std::vector<IndexList> layers;  // N + 1 lists, ascending indices
  IndexList outer;                // ascending indices
  Index outer_target = 0;         // ceil((1 + 1/eps) z)
};

enum class OriginKind { layer, outer, uniform, nn };

struct Origin {
  OriginKind kind = OriginKind::outer;
  int layer = 0;

  std::string to_string() const;
  static Origin parse(const std::string& text);
  friend bool operator==(const Origin&, const Origin&) = default;
};

struct LayeredSamplingOptions {
  double epsilon = 0.2;
  double eta = 0.1;
  // Constant in front of the per-layer sample bound.
  double constant = 0.05;
  std::optional<Index> per_layer_override;
  std::optional<int> layer_count_override;
};

struct CoresetParams {
  std::string method;
  double epsilon = 0.0;
  double eta = 0.0;
  std::vector<Index> layer_targets;
};

/// A weighted summary of an instance. Rows are ordered by source index.
struct Coreset {
  WeightedPointSet data;
  std::vector<Origin> origin;
  IndexList source;  // row in the original instance
  CoresetParams params;

  Index size() const { return data.size(); }
};

/// ceil((1 + 1/eps) z), robust to the representation error of eps.
Index outer_count(Index z, double epsilon);

/// ceil(log2((n - z) / z)), at least 1.
int default_layer_count(Index n, Index z);

/// Per-layer sample size ceil(c / eps^2 * k * d * ln(max(d/eps, 2)) * ln((N+1)/eta)).
Index layer_sample_target(double constant, double epsilon, double eta, Index k, Index d,
                          int layer_count);

/// Rank-based layering of per-point anchor distances. Returns nullopt when
/// the outer set would swallow the whole instance (the coreset is then P).
std::optional<LayerPartition> build_layers(const Vector& distances, Index z, double epsilon,
                                           std::optional<int> layer_count_override);

/// Samples each layer uniformly (seeded substream per layer), weights the
/// draws |H_i| / |S_i|, and keeps the outer set with unit weight.
Coreset assemble_layered_coreset(const PointSet& points, const LayerPartition& partition,
                                 const std::vector<Index>& layer_targets, Seed seed);

/// The whole instance with unit weights, every row tagged outer.
Coreset identity_coreset(const PointSet& points);

}  // namespace laysam
