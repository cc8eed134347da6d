#include "laysam/layering.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>

namespace laysam {

std::string Origin::to_string() const {
  switch (kind) {
    case OriginKind::layer:
      return "layer" + std::to_string(layer);
    case OriginKind::outer:
      return "outer";
    case OriginKind::uniform:
      return "uniform";
    case OriginKind::nn:
      return "nn";
  }
  return "outer";
}

Origin Origin::parse(const std::string& text) {
  if (text == "outer") return {OriginKind::outer, 0};
  if (text == "uniform") return {OriginKind::uniform, 0};
  if (text == "nn") return {OriginKind::nn, 0};
  if (text.rfind("layer", 0) == 0 && text.size() > 5) {
    int layer = 0;
    const char* first = text.data() + 5;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, layer);
    if (ec == std::errc() && ptr == last && layer >= 0) return {OriginKind::layer, layer};
  }
  throw std::invalid_argument("unknown coreset origin tag '" + text + "'");
}

Index outer_count(Index z, double epsilon) {
  const double exact = (1.0 + 1.0 / epsilon) * static_cast<double>(z);
  return static_cast<Index>(std::ceil(exact * (1.0 - 1e-12)));
}

int default_layer_count(Index n, Index z) {
  const double ratio = static_cast<double>(n - z) / static_cast<double>(z);
  const int layers = static_cast<int>(std::ceil(std::log2(ratio) - 1e-12));
  return std::max(layers, 1);
}

Index layer_sample_target(double constant, double epsilon, double eta, Index k, Index d,
                          int layer_count) {
  const double size = constant / (epsilon * epsilon) * static_cast<double>(k) *
                      static_cast<double>(d) *
                      std::log(std::max(static_cast<double>(d) / epsilon, 2.0)) *
                      std::log(static_cast<double>(layer_count + 1) / eta);
  return std::max<Index>(1, static_cast<Index>(std::ceil(size)));
}

std::optional<LayerPartition> build_layers(const Vector& distances, Index z, double epsilon,
                                           std::optional<int> layer_count_override) {
  const Index n = distances.size();
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("build_layers: epsilon must lie in (0, 1]");
  }
  if (z <= 0 || z >= n) {
    throw std::invalid_argument("build_layers: need 0 < z < n (z=" + std::to_string(z) +
                                ", n=" + std::to_string(n) + ")");
  }
  if (layer_count_override && *layer_count_override < 0) {
    throw std::invalid_argument("build_layers: layer count override must be nonnegative");
  }
  const Index m = outer_count(z, epsilon);
  if (m >= n) return std::nullopt;

  LayerPartition part;
  part.outer_target = m;
  part.layer_count = layer_count_override ? std::max(*layer_count_override, 1)
                                          : default_layer_count(n, z);
  const int N = part.layer_count;

  const auto top = select_top_m(std::span<const double>(distances.data(), n), m);
  part.outer = top.indices;
  part.outer_threshold = top.threshold;
  part.base_radius = std::ldexp(top.threshold, -N);
  part.layers.assign(static_cast<std::size_t>(N) + 1, {});

  std::vector<char> is_outer(static_cast<std::size_t>(n), 0);
  for (Index i : part.outer) is_outer[static_cast<std::size_t>(i)] = 1;

  const double r = part.base_radius;
  for (Index i = 0; i < n; ++i) {
    if (is_outer[static_cast<std::size_t>(i)]) continue;
    const double dist = distances[i];
    int layer = 0;
    if (dist > r) {
      // Smallest i with dist <= 2^i r, found from the log estimate and then
      // corrected with exact power-of-two comparisons.
      layer = static_cast<int>(std::ceil(std::log2(dist / r)));
      layer = std::clamp(layer, 1, N);
      while (layer > 1 && dist <= std::ldexp(r, layer - 1)) --layer;
      while (layer < N && dist > std::ldexp(r, layer)) ++layer;
    }
    part.layers[static_cast<std::size_t>(layer)].push_back(i);
  }
  return part;
}

Coreset assemble_layered_coreset(const PointSet& points, const LayerPartition& partition,
                                 const std::vector<Index>& layer_targets, Seed seed) {
  if (layer_targets.size() != partition.layers.size()) {
    throw std::invalid_argument("assemble_layered_coreset: one target per layer required");
  }
  struct Entry {
    Index source;
    double weight;
    Origin origin;
  };
  std::vector<Entry> entries;
  entries.reserve(partition.outer.size() + 64 * partition.layers.size());

  for (std::size_t i = 0; i < partition.layers.size(); ++i) {
    const IndexList& layer = partition.layers[i];
    const Index population = static_cast<Index>(layer.size());
    if (population == 0) continue;
    const Index take = std::min(std::max<Index>(layer_targets[i], 1), population);
    const double weight = static_cast<double>(population) / static_cast<double>(take);
    const Origin origin{OriginKind::layer, static_cast<int>(i)};
    // Layers are drawn one after another, each from its own substream.
    for (Index pos : sample_without_replacement(population, take, derive_seed(seed, i))) {
      entries.push_back({layer[static_cast<std::size_t>(pos)], weight, origin});
    }
  }
  for (Index i : partition.outer) entries.push_back({i, 1.0, Origin{OriginKind::outer, 0}});

  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.source < b.source; });

  Coreset out;
  out.source.reserve(entries.size());
  out.origin.reserve(entries.size());
  Vector weights(static_cast<Index>(entries.size()));
  for (std::size_t e = 0; e < entries.size(); ++e) {
    out.source.push_back(entries[e].source);
    out.origin.push_back(entries[e].origin);
    weights[static_cast<Index>(e)] = entries[e].weight;
  }
  out.data = WeightedPointSet(points.subset(out.source), std::move(weights));
  out.params.layer_targets = layer_targets;
  return out;
}

Coreset identity_coreset(const PointSet& points) {
  Coreset out;
  const Index n = points.size();
  out.source.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out.source[static_cast<std::size_t>(i)] = i;
  out.origin.assign(static_cast<std::size_t>(n), Origin{OriginKind::outer, 0});
  out.data = WeightedPointSet::unit(points);
  return out;
}

}  // namespace laysam
