#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "laysam/core.hpp"
#include "laysam/harness.hpp"
#include "laysam/layering.hpp"

namespace laysam::io {

namespace fs = std::filesystem;

/// Malformed input. Carries the file name plus a 1-based line and column.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

/// Contents of a dataset or coreset CSV. Feature columns are x1..xd (or
/// x1..x{d-1},y with a response); `w`, `origin` and `index` are optional.
struct Table {
  PointSet points;
  std::optional<Vector> weights;
  std::optional<std::vector<Origin>> origin;
  std::optional<IndexList> source;
};

Table read_table(const fs::path& path);
void write_dataset(const fs::path& path, const PointSet& points, const Vector* weights = nullptr);

/// Dataset columns plus mandatory `w` and `origin`, and the source row `index`.
void write_coreset(const fs::path& path, const Coreset& coreset);
Coreset read_coreset(const fs::path& path);

/// JSON array of zero-based row indices.
void write_indices(const fs::path& path, const IndexList& indices);
IndexList read_indices(const fs::path& path);

/// One row of k*d (clustering) or d (regression) solution values plus the
/// trimmed-cost summary it achieved.
struct SolutionFile {
  std::string task;  // "cluster" or "regress"
  Index k = 1;
  Index d = 0;
  Vector values;
  double cost = 0.0;
  double inlier_weight = 0.0;
  double outlier_weight = 0.0;
  int power = 2;
  int iterations = 0;
};

void write_solution(const fs::path& path, const SolutionFile& solution);
SolutionFile read_solution(const fs::path& path);

struct MetricRow {
  std::string method;
  double sigma = 0.0;
  std::string trial;  // trial number, or "mean" / "std" for summary rows
  MetricReport metrics;
};

extern const char* const kMetricsHeader;
std::string format_metric_row(const MetricRow& row);
void write_metrics(const fs::path& path, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metrics(const fs::path& path);

}  // namespace laysam::io
