#include "laysam/core.hpp"

#include <atomic>
#include <limits>
#include <unordered_map>

namespace laysam {

namespace {

std::atomic<int> g_threads{1};

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": entries must be finite");
  }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Seed derive_seed(Seed base, std::uint64_t stream) {
  return Seed{splitmix64(splitmix64(base.value) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))};
}

Rng::Rng(Seed seed) : engine_(splitmix64(seed.value)) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // Rejection on the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

PointSet::PointSet(Matrix coords, bool has_response)
    : coords_(std::move(coords)), has_response_(has_response) {
  if (coords_.rows() < 1 || coords_.cols() < 1) {
    throw std::invalid_argument("PointSet: need n >= 1 and d >= 1");
  }
  if (has_response_ && coords_.cols() < 2) {
    throw std::invalid_argument("PointSet: a response layout needs d >= 2");
  }
  check_finite(coords_, "PointSet");
}

PointSet PointSet::subset(std::span<const Index> rows) const {
  Matrix out(static_cast<Index>(rows.size()), dim());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= size()) throw std::out_of_range("PointSet::subset: row out of range");
    out.row(static_cast<Index>(r)) = coords_.row(rows[r]);
  }
  return PointSet(std::move(out), has_response_);
}

WeightedPointSet::WeightedPointSet(PointSet points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (weights_.size() != points_.size()) {
    throw std::invalid_argument("WeightedPointSet: " + std::to_string(weights_.size()) +
                                " weights for " + std::to_string(points_.size()) + " points");
  }
  if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
    throw std::invalid_argument("WeightedPointSet: weights must be finite and nonnegative");
  }
  total_weight_ = compensated_sum(std::span<const double>(weights_.data(), weights_.size()));
  if (!(total_weight_ > 0.0)) throw std::invalid_argument("WeightedPointSet: total weight must be positive");
}

WeightedPointSet WeightedPointSet::unit(PointSet points) {
  const Index n = points.size();
  return WeightedPointSet(std::move(points), Vector::Ones(n));
}

CenterSet::CenterSet(Matrix centers) : centers_(std::move(centers)) {
  if (centers_.rows() < 1 || centers_.cols() < 1) throw std::invalid_argument("CenterSet: need k >= 1 centers");
  check_finite(centers_, "CenterSet");
}

void set_num_threads(int threads) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  g_threads.store(threads);
}

int num_threads() { return g_threads.load(); }

NearestCenters nearest_centers(const PointSet& points, const CenterSet& centers) {
  if (centers.k() < 1) throw std::invalid_argument("min_distances: center set is empty");
  if (centers.dim() != points.dim()) {
    throw std::invalid_argument("min_distances: points have d=" + std::to_string(points.dim()) +
                                " but centers have d=" + std::to_string(centers.dim()));
  }
  NearestCenters out{Vector(points.size()), Eigen::VectorXi(points.size())};
  nearest_centers(points.coords(), centers.centers(), out.distances, out.nearest);
  return out;
}

Vector min_distances(const PointSet& points, const CenterSet& centers) {
  return nearest_centers(points, centers).distances;
}

TopSelection select_top_m(std::span<const double> values, Index m, Seed seed) {
  const Index n = static_cast<Index>(values.size());
  if (m < 0 || m > n) {
    throw std::invalid_argument("select_top_m: m=" + std::to_string(m) + " outside [0, " +
                                std::to_string(n) + "]");
  }
  IndexList order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  auto before = [&](Index a, Index b) {
    return ranks_before(values[static_cast<std::size_t>(a)], a, values[static_cast<std::size_t>(b)], b);
  };

  // Quickselect on the total order; afterwards order[0..m) are the m largest
  // and order[m] is the largest of the rest.
  Rng rng(seed);
  Index lo = 0, hi = n;  // active range [lo, hi)
  const Index target = std::min(m, n - 1);
  while (hi - lo > 1) {
    const Index p = lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(hi - lo)));
    std::swap(order[static_cast<std::size_t>(p)], order[static_cast<std::size_t>(hi - 1)]);
    const Index pivot = order[static_cast<std::size_t>(hi - 1)];
    Index store = lo;
    for (Index i = lo; i < hi - 1; ++i) {
      if (before(order[static_cast<std::size_t>(i)], pivot)) {
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(store)]);
        ++store;
      }
    }
    std::swap(order[static_cast<std::size_t>(store)], order[static_cast<std::size_t>(hi - 1)]);
    if (store == target) break;
    if (store < target) {
      lo = store + 1;
    } else {
      hi = store;
    }
  }

  TopSelection out;
  if (n == 0) return out;
  out.indices.assign(order.begin(), order.begin() + m);
  std::sort(out.indices.begin(), out.indices.end());
  out.threshold = (m < n) ? values[static_cast<std::size_t>(order[static_cast<std::size_t>(m)])] : 0.0;
  return out;
}

IndexList sample_without_replacement(Index population, Index m, Rng& rng) {
  if (m < 0 || population < 0 || m > population) {
    throw std::invalid_argument("sample_without_replacement: cannot draw " + std::to_string(m) +
                                " from " + std::to_string(population));
  }
  IndexList out;
  out.reserve(static_cast<std::size_t>(m));
  if (2 * m >= population) {
    // Dense: partial Fisher-Yates over the full index range.
    IndexList all(static_cast<std::size_t>(population));
    for (Index i = 0; i < population; ++i) all[static_cast<std::size_t>(i)] = i;
    for (Index i = 0; i < m; ++i) {
      const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(population - i)));
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
    }
    out.assign(all.begin(), all.begin() + m);
  } else {
    // Sparse: the same Fisher-Yates walk with the permuted slots kept in a map.
    std::unordered_map<Index, Index> moved;
    auto slot = [&](Index i) {
      auto it = moved.find(i);
      return it == moved.end() ? i : it->second;
    };
    for (Index i = 0; i < m; ++i) {
      const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(population - i)));
      const Index vi = slot(i), vj = slot(j);
      out.push_back(vj);
      moved[j] = vi;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

IndexList sample_without_replacement(Index population, Index m, Seed seed) {
  Rng rng(seed);
  return sample_without_replacement(population, m, rng);
}

}  // namespace laysam
