#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace laysam {

/// Everything a pipeline stage needs, persisted as one JSON file in the
/// output directory so later stages pick up earlier parameters.
struct RunConfig {
  std::string task = "cluster";  // cluster | regress
  std::string method = "laysam";  // laysam | unisam | nn | full

  std::int64_t n = 10000;
  std::int64_t d = 5;
  std::int64_t k = 5;
  std::int64_t z = 0;

  double epsilon = 0.2;
  double eta = 0.1;
  double constant = 0.05;
  std::optional<std::int64_t> coreset_size;
  std::optional<std::int64_t> per_layer;

  double sigma = 0.0;
  std::string distribution = "gauss";
  double region = 10.0;  // D for normalized regression features
  bool normalized = false;

  int power = 2;
  std::uint64_t seed = 1;
  int max_iter = 100;
  double tol = 1e-6;
  std::int64_t seed_sample_factor = 40;
  std::int64_t init_sample_factor = 2;

  int trials = 1;
  std::vector<double> sigmas;
  std::vector<std::string> methods;

  // Filled in by the stages.
  double construct_seconds = 0.0;
  double solve_seconds = 0.0;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  static RunConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
};

}  // namespace laysam
