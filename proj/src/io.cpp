#include "laysam/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace laysam::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == ' ') ++b;
  return s.substr(b);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

double parse_field(const std::string& text, const fs::path& path, std::size_t line,
                   std::size_t column) {
  double value = 0.0;
  try {
    value = parse_double(text);
  } catch (const std::invalid_argument&) {
    throw ParseError(path.string(), line, column, "expected a number, found '" + text + "'");
  }
  if (!std::isfinite(value)) throw ParseError(path.string(), line, column, "value must be finite");
  return value;
}

void write_header(std::ostream& out, Index d, bool has_response) {
  for (Index j = 0; j < d; ++j) {
    if (j > 0) out << ',';
    if (has_response && j == d - 1) {
      out << 'y';
    } else {
      out << 'x' << (j + 1);
    }
  }
}

void write_row(std::ostream& out, const PointSet& points, Index i) {
  for (Index j = 0; j < points.dim(); ++j) {
    if (j > 0) out << ',';
    out << format_double(points.coords()(i, j));
  }
}

}  // namespace

ParseError::ParseError(const std::string& file, std::size_t line, std::size_t column,
                       const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                         what),
      line_(line),
      column_(column) {}

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buffer, ptr);
}

double parse_double(const std::string& text) {
  const std::string s = strip(text);
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (s.empty() || ec != std::errc() || ptr != last) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return value;
}

Table read_table(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, 1, "missing header row");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = strip(h);

  // Column roles from the header.
  std::vector<Index> coord_cols;
  Index weight_col = -1, origin_col = -1, index_col = -1;
  bool has_response = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    const auto col = static_cast<Index>(c);
    if (name == "w") {
      weight_col = col;
    } else if (name == "origin") {
      origin_col = col;
    } else if (name == "index") {
      index_col = col;
    } else if (name == "y") {
      if (has_response) throw ParseError(path.string(), 1, c + 1, "duplicate 'y' column");
      has_response = true;
      coord_cols.push_back(col);
    } else if (name.size() > 1 && name[0] == 'x') {
      const std::string expected = "x" + std::to_string(coord_cols.size() + 1);
      if (has_response || name != expected) {
        throw ParseError(path.string(), 1, c + 1, "expected column '" + expected + "', found '" + name + "'");
      }
      coord_cols.push_back(col);
    } else {
      throw ParseError(path.string(), 1, c + 1, "unknown column '" + name + "'");
    }
  }
  if (coord_cols.empty()) throw ParseError(path.string(), 1, 1, "no coordinate columns");

  std::vector<double> coords;
  std::vector<double> weights;
  std::vector<Origin> origin;
  IndexList source;
  std::size_t line_no = 1;
  Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(path.string(), line_no, std::min(fields.size(), header.size()) + 1,
                       "expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()));
    }
    for (Index c : coord_cols) {
      coords.push_back(parse_field(fields[static_cast<std::size_t>(c)], path, line_no, c + 1));
    }
    if (weight_col >= 0) {
      const double w = parse_field(fields[static_cast<std::size_t>(weight_col)], path, line_no, weight_col + 1);
      if (!(w >= 0.0)) throw ParseError(path.string(), line_no, weight_col + 1, "negative weight");
      weights.push_back(w);
    }
    if (origin_col >= 0) {
      try {
        origin.push_back(Origin::parse(strip(fields[static_cast<std::size_t>(origin_col)])));
      } catch (const std::invalid_argument& e) {
        throw ParseError(path.string(), line_no, origin_col + 1, e.what());
      }
    }
    if (index_col >= 0) {
      const double v = parse_field(fields[static_cast<std::size_t>(index_col)], path, line_no, index_col + 1);
      if (v < 0 || v != std::floor(v)) {
        throw ParseError(path.string(), line_no, index_col + 1, "index must be a nonnegative integer");
      }
      source.push_back(static_cast<Index>(v));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(path.string(), line_no, 1, "no data rows");

  const auto d = static_cast<Index>(coord_cols.size());
  Matrix m = Eigen::Map<Matrix>(coords.data(), rows, d);
  Table table;
  try {
    table.points = PointSet(std::move(m), has_response);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string(), 2, 1, e.what());
  }
  if (weight_col >= 0) table.weights = Eigen::Map<Vector>(weights.data(), rows);
  if (origin_col >= 0) table.origin = std::move(origin);
  if (index_col >= 0) table.source = std::move(source);
  return table;
}

void write_dataset(const fs::path& path, const PointSet& points, const Vector* weights) {
  auto out = open_out(path);
  write_header(out, points.dim(), points.has_response());
  if (weights) out << ",w";
  out << '\n';
  for (Index i = 0; i < points.size(); ++i) {
    write_row(out, points, i);
    if (weights) out << ',' << format_double((*weights)[i]);
    out << '\n';
  }
}

void write_coreset(const fs::path& path, const Coreset& coreset) {
  auto out = open_out(path);
  const PointSet& points = coreset.data.points();
  write_header(out, points.dim(), points.has_response());
  out << ",w,origin,index\n";
  for (Index i = 0; i < points.size(); ++i) {
    write_row(out, points, i);
    out << ',' << format_double(coreset.data.weights()[i]) << ','
        << coreset.origin[static_cast<std::size_t>(i)].to_string() << ','
        << coreset.source[static_cast<std::size_t>(i)] << '\n';
  }
}

Coreset read_coreset(const fs::path& path) {
  Table table = read_table(path);
  if (!table.weights) throw ParseError(path.string(), 1, 1, "coreset file needs a 'w' column");
  if (!table.origin) throw ParseError(path.string(), 1, 1, "coreset file needs an 'origin' column");
  Coreset out;
  const Index n = table.points.size();
  if (table.source) {
    out.source = std::move(*table.source);
  } else {
    out.source.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) out.source[static_cast<std::size_t>(i)] = i;
  }
  out.origin = std::move(*table.origin);
  out.data = WeightedPointSet(std::move(table.points), std::move(*table.weights));
  return out;
}

void write_indices(const fs::path& path, const IndexList& indices) {
  auto out = open_out(path);
  out << nlohmann::json(indices).dump() << '\n';
}

IndexList read_indices(const fs::path& path) {
  auto in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 1, e.byte, e.what());
  }
  if (!j.is_array()) throw ParseError(path.string(), 1, 1, "expected a JSON array of row indices");
  IndexList out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer() || j[i].get<long long>() < 0) {
      throw ParseError(path.string(), 1, i + 1, "entry " + std::to_string(i) + " is not a nonnegative integer");
    }
    out.push_back(j[i].get<Index>());
  }
  return out;
}

void write_solution(const fs::path& path, const SolutionFile& s) {
  auto out = open_out(path);
  out << "task,k,d,power,iterations,cost,inlier_weight,outlier_weight";
  for (Index i = 0; i < s.values.size(); ++i) out << ",s" << (i + 1);
  out << '\n'
      << s.task << ',' << s.k << ',' << s.d << ',' << s.power << ',' << s.iterations << ','
      << format_double(s.cost) << ',' << format_double(s.inlier_weight) << ','
      << format_double(s.outlier_weight);
  for (Index i = 0; i < s.values.size(); ++i) out << ',' << format_double(s.values[i]);
  out << '\n';
}

SolutionFile read_solution(const fs::path& path) {
  auto in = open_in(path);
  std::string header, row;
  if (!std::getline(in, header)) throw ParseError(path.string(), 1, 1, "missing header row");
  if (!std::getline(in, row)) throw ParseError(path.string(), 2, 1, "missing solution row");
  const auto names = split_csv_line(strip(header));
  const auto fields = split_csv_line(strip(row));
  if (names.size() < 8 || fields.size() != names.size()) {
    throw ParseError(path.string(), 2, 1, "solution row does not match header");
  }
  auto num = [&](std::size_t c) { return parse_field(fields[c], path, 2, c + 1); };
  SolutionFile s;
  s.task = strip(fields[0]);
  if (s.task != "cluster" && s.task != "regress") {
    throw ParseError(path.string(), 2, 1, "task must be 'cluster' or 'regress'");
  }
  s.k = static_cast<Index>(num(1));
  s.d = static_cast<Index>(num(2));
  s.power = static_cast<int>(num(3));
  s.iterations = static_cast<int>(num(4));
  s.cost = num(5);
  s.inlier_weight = num(6);
  s.outlier_weight = num(7);
  s.values.resize(static_cast<Index>(fields.size() - 8));
  for (std::size_t c = 8; c < fields.size(); ++c) s.values[static_cast<Index>(c - 8)] = num(c);
  const Index expected = s.task == "cluster" ? s.k * s.d : s.d;
  if (s.values.size() != expected) {
    throw ParseError(path.string(), 2, 9, "expected " + std::to_string(expected) + " solution values");
  }
  return s;
}

const char* const kMetricsHeader =
    "method,sigma,trial,l1_loss,l2_loss,recall_precision,pre_recall,construct_seconds,solve_seconds";

std::string format_metric_row(const MetricRow& row) {
  const MetricReport& m = row.metrics;
  std::ostringstream out;
  out << row.method << ',' << format_double(row.sigma) << ',' << row.trial << ','
      << format_double(m.l1_loss) << ',' << format_double(m.l2_loss) << ','
      << format_double(m.recall_precision) << ',' << format_double(m.pre_recall) << ','
      << format_double(m.construct_seconds) << ',' << format_double(m.solve_seconds);
  return out.str();
}

void write_metrics(const fs::path& path, const std::vector<MetricRow>& rows) {
  auto out = open_out(path);
  out << kMetricsHeader << '\n';
  for (const auto& row : rows) out << format_metric_row(row) << '\n';
}

std::vector<MetricRow> read_metrics(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || strip(line) != kMetricsHeader) {
    throw ParseError(path.string(), 1, 1, "unexpected metrics header");
  }
  std::vector<MetricRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto f = split_csv_line(strip(line));
    if (f.size() != 9) throw ParseError(path.string(), line_no, 1, "expected 9 fields");
    auto num = [&](std::size_t c) { return parse_field(f[c], path, line_no, c + 1); };
    MetricRow row;
    row.method = f[0];
    row.sigma = num(1);
    row.trial = f[2];
    row.metrics.l1_loss = num(3);
    row.metrics.l2_loss = num(4);
    row.metrics.recall_precision = num(5);
    row.metrics.pre_recall = num(6);
    row.metrics.construct_seconds = num(7);
    row.metrics.solve_seconds = num(8);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace laysam::io
