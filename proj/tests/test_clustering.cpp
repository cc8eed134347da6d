#include <doctest.h>

#include <set>

#include "laysam/clustering.hpp"
#include "laysam/harness.hpp"
#include "oracles.hpp"

using namespace laysam;

namespace {

Matrix column(std::initializer_list<double> v) {
  Matrix m(static_cast<Index>(v.size()), 1);
  Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("trimmed_cluster_cost examples") {
    auto r = trimmed_cluster_cost(PointSet(column({0, 1})), CenterSet(column({0})), 1, 1);
    CHECK(r.cost == 0.0);
    REQUIRE(r.outliers.size() == 1);
    CHECK(r.outliers[0].index == 1);

    r = trimmed_cluster_cost(PointSet(column({0, 1, 3, 10})), CenterSet(column({0, 3})), 1, 2);
    CHECK(r.cost == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(r.inlier_weight == 3.0);

    // Boundary point 5 with weight 2 splits: one unit out, one unit in.
    const WeightedPointSet w(PointSet(column({0, 1, 5})), (Vector(3) << 1, 1, 2).finished());
    r = trimmed_cluster_cost(w, CenterSet(column({0})), 1, 1);
    CHECK(r.cost == doctest::Approx(2.0).epsilon(1e-15));
    REQUIRE(r.outliers.size() == 1);
    CHECK(r.outliers[0].index == 2);
    CHECK(r.outliers[0].weight == 1.0);
  }

  TEST_CASE("trimmed_cluster_cost rejects bad arguments") {
    const PointSet p(column({0, 1}));
    CHECK_THROWS_AS(trimmed_cluster_cost(p, CenterSet(column({0})), 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(trimmed_cluster_cost(p, CenterSet(column({0})), 0, 3), std::invalid_argument);
    CHECK_THROWS_AS(trimmed_cluster_cost(p, CenterSet(), 0, 1), std::invalid_argument);
  }

  TEST_CASE("trimmed cost equals the expand-sort-drop oracle on unit weights") {
    Rng rng(Seed{2024});
    for (int rep = 0; rep < 1000; ++rep) {
      const auto n = static_cast<Index>(2 + rng.below(11));
      const auto d = static_cast<Index>(1 + rng.below(3));
      const auto k = static_cast<Index>(1 + rng.below(3));
      Matrix P(n, d), C(k, d);
      for (Index i = 0; i < n; ++i)
        for (Index c = 0; c < d; ++c) P(i, c) = static_cast<double>(rng.below(5));  // ties
      for (Index j = 0; j < k; ++j)
        for (Index c = 0; c < d; ++c) C(j, c) = rng.uniform(0, 4);
      const int z = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      const int power = 1 + static_cast<int>(rng.below(2));
      const auto report = trimmed_cluster_cost(PointSet(P), CenterSet(C), z, power);
      const double want =
          oracle::expand_sort_drop(to_std(oracle::pairwise_min_distances(P, C)), z, power);
      CHECK(rel_err(report.cost, want) <= 1e-12);
      CHECK(report.outlier_weight() == doctest::Approx(z));

      // Rank consistency: inliers are never farther than outliers.
      std::set<Index> out;
      for (const auto& o : report.outliers) out.insert(o.index);
      double max_in = 0, min_out = INFINITY;
      for (Index i = 0; i < n; ++i) {
        if (out.count(i)) {
          min_out = std::min(min_out, report.distances[i]);
        } else {
          max_in = std::max(max_in, report.distances[i]);
        }
      }
      CHECK(max_in <= min_out);
    }
  }

  TEST_CASE("weighted trimming matches unit expansion and the sequential walk") {
    Rng rng(Seed{77});
    for (int rep = 0; rep < 200; ++rep) {
      const auto n = static_cast<Index>(2 + rng.below(10));
      Matrix P(n, 2);
      std::vector<int> iw(static_cast<std::size_t>(n));
      Vector w(n);
      for (Index i = 0; i < n; ++i) {
        P(i, 0) = rng.uniform(-5, 5);
        P(i, 1) = rng.uniform(-5, 5);
        iw[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng.below(4));
        w[i] = iw[static_cast<std::size_t>(i)];
      }
      Matrix C(2, 2);
      C << 0, 0, 2, 2;
      const int total = static_cast<int>(w.sum());
      const int z = static_cast<int>(rng.below(static_cast<std::uint64_t>(total)));
      const int power = 1 + rep % 2;
      const auto r = trimmed_cluster_cost(WeightedPointSet(PointSet(P), w), CenterSet(C), z, power);
      const auto dist = to_std(oracle::pairwise_min_distances(P, C));
      CHECK(rel_err(r.cost, oracle::expand_integer_weights(dist, iw, z, power)) <= 1e-12);

      // Fractional weights and a fractional z.
      Vector fw(n);
      std::vector<double> fws(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i) fws[static_cast<std::size_t>(i)] = fw[i] = rng.uniform(0.1, 3.0);
      const double fz = rng.uniform(0.0, 0.9) * fw.sum();
      const auto fr = trimmed_cluster_cost(WeightedPointSet(PointSet(P), fw), CenterSet(C), fz, power);
      std::vector<double> removed;
      const double want = oracle::sequential_trim(dist, fws, fz, power, &removed);
      CHECK(rel_err(fr.cost, want) <= 1e-12);
      CHECK(fr.outlier_weight() == doctest::Approx(fz).epsilon(1e-12));
      int split = 0;
      for (const auto& o : fr.outliers) {
        CHECK(o.weight == doctest::Approx(removed[static_cast<std::size_t>(o.index)]).epsilon(1e-12));
        if (o.weight < fw[o.index] * (1 - 1e-12)) ++split;
      }
      CHECK(split <= 1);
    }
  }

  TEST_CASE("layer count follows ceil(log2((n - z) / z))") {
    CHECK(default_layer_count(110, 10) == 4);
    CHECK(default_layer_count(100, 50) == 1);  // floor of one layer
    CHECK(default_layer_count(90, 10) == 3);
    CHECK(outer_count(5, 1.0) == 10);
    CHECK(outer_count(500, 0.2) == 3000);
    CHECK(outer_count(3, 0.7) == 8);  // 7.2857 rounds up
  }

  TEST_CASE("build_layers_clustering on a 1-D ramp") {
    Matrix P(100, 1);
    for (Index i = 0; i < 100; ++i) P(i, 0) = static_cast<double>(i);
    const auto part = build_layers_clustering(PointSet(P), CenterSet(column({0})), 5, 1.0);
    REQUIRE(part.has_value());
    CHECK(part->outer_target == 10);
    IndexList outer;
    for (Index i = 90; i < 100; ++i) outer.push_back(i);
    CHECK(part->outer == outer);
    CHECK(part->outer_threshold == 89.0);
    CHECK(part->layer_count == 5);  // ceil(log2(95/5))
    CHECK(std::ldexp(part->base_radius, part->layer_count) == 89.0);

    // Partition and geometry invariants.
    std::set<Index> seen(part->outer.begin(), part->outer.end());
    for (std::size_t layer = 0; layer < part->layers.size(); ++layer) {
      for (Index i : part->layers[layer]) {
        CHECK(seen.insert(i).second);
        const double dist = P(i, 0);
        CHECK(dist <= std::ldexp(part->base_radius, static_cast<int>(layer)));
        if (layer >= 1) CHECK(dist > std::ldexp(part->base_radius, static_cast<int>(layer) - 1));
      }
    }
    CHECK(seen.size() == 100);
  }

  TEST_CASE("coincident points fall into layer zero and the outer set takes the lowest indices") {
    const Matrix P = Matrix::Constant(30, 2, 1.5);
    Matrix anchor(1, 2);
    anchor << 1.5, 1.5;
    const auto part = build_layers_clustering(PointSet(P), CenterSet(anchor), 2, 0.5);
    REQUIRE(part.has_value());
    CHECK(part->base_radius == 0.0);
    CHECK(part->outer == IndexList{0, 1, 2, 3, 4, 5});
    CHECK(part->layers[0].size() == 24);
    for (std::size_t l = 1; l < part->layers.size(); ++l) CHECK(part->layers[l].empty());
  }

  TEST_CASE("degenerate layering returns the full set") {
    Matrix P(10, 1);
    for (Index i = 0; i < 10; ++i) P(i, 0) = static_cast<double>(i);
    CHECK_FALSE(build_layers_clustering(PointSet(P), CenterSet(column({0})), 5, 0.5).has_value());
    const auto cs = layered_coreset_clustering(PointSet(P), CenterSet(column({0})), 5, {.epsilon = 0.5}, Seed{1});
    CHECK(cs.size() == 10);
    CHECK(cs.data.weights() == Vector::Ones(10));
    for (const auto& o : cs.origin) CHECK(o.kind == OriginKind::outer);
    CHECK_THROWS_AS(build_layers_clustering(PointSet(P), CenterSet(column({0})), 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(build_layers_clustering(PointSet(P), CenterSet(column({0})), 1, 1.5), std::invalid_argument);
  }

  TEST_CASE("layered coreset: weights, sizes and the identity case") {
    const auto inst = gen_syncluster(3000, 3, 4, Seed{5});
    const auto injected = inject_outliers(inst.points, 30, NoiseDistribution::gauss, 100, Seed{6});
    const PointSet& P = injected.points;

    LayeredSamplingOptions opt{.epsilon = 0.3, .eta = 0.1, .per_layer_override = 40};
    const auto cs = layered_coreset_clustering(P, inst.centers, 30, opt, Seed{9});
    CHECK(rel_err(cs.data.total_weight(), 3000.0) <= 1e-9);
    const auto part = *build_layers_clustering(P, inst.centers, 30, 0.3);
    Index expected = part.outer_target, outer = 0;
    for (const auto& layer : part.layers) expected += std::min<Index>(40, static_cast<Index>(layer.size()));
    CHECK(cs.size() == expected);
    for (Index i = 0; i < cs.size(); ++i) {
      const auto& o = cs.origin[static_cast<std::size_t>(i)];
      if (o.kind == OriginKind::outer) {
        ++outer;
        CHECK(cs.data.weights()[i] == 1.0);
      } else {
        const auto pop = static_cast<double>(part.layers[static_cast<std::size_t>(o.layer)].size());
        CHECK(cs.data.weights()[i] == pop / std::min(40.0, pop));
      }
    }
    CHECK(outer == outer_count(30, 0.3));
    CHECK(std::is_sorted(cs.source.begin(), cs.source.end()));
    // Every planted outlier is in the outer set.
    std::set<Index> src(cs.source.begin(), cs.source.end());
    for (Index i : injected.truth.outliers) CHECK(src.count(i) == 1);

    // Same seed, same coreset.
    const auto again = layered_coreset_clustering(P, inst.centers, 30, opt, Seed{9});
    CHECK(again.source == cs.source);
    CHECK(again.data.weights() == cs.data.weights());

    // Any instance and seed conserves weight with the default sample bound.
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto c = layered_coreset_clustering(P, inst.centers, 30, {.epsilon = 0.5, .eta = 0.2, .constant = 0.002}, Seed{s});
      CHECK(rel_err(c.data.total_weight(), 3000.0) <= 1e-9);
    }
  }

  TEST_CASE("identity coreset reproduces the full cost for any solution") {
    const auto inst = gen_syncluster(400, 2, 3, Seed{1});
    const auto P = inject_outliers(inst.points, 8, NoiseDistribution::uniform, 50, Seed{2}).points;
    const auto cs = layered_coreset_clustering(P, inst.centers, 8, {.epsilon = 0.5, .per_layer_override = 400}, Seed{3});
    CHECK(cs.size() == 400);
    CHECK(cs.data.weights() == Vector::Ones(400));
    Rng rng(Seed{4});
    for (int t = 0; t < 50; ++t) {
      const CenterSet C = sample_center_range(inst.centers, 20.0, rng);
      for (int power : {1, 2}) {
        const double a = trimmed_cluster_cost(cs.data, C, 8, power).cost;
        const double b = trimmed_cluster_cost(P, C, 8, power).cost;
        CHECK(rel_err(a, b) <= 1e-9);
      }
    }
  }

  TEST_CASE("default per-layer target uses the documented bound") {
    // c/eps^2 * k d ln(max(d/eps, 2)) ln((N+1)/eta)
    const double raw = 0.05 / 0.04 * 5 * 5 * std::log(25.0) * std::log(8.0 / 0.1);
    CHECK(layer_sample_target(0.05, 0.2, 0.1, 5, 5, 7) == static_cast<Index>(std::ceil(raw)));
    CHECK(layer_sample_target(0.05, 0.9, 0.5, 1, 1, 1) >= 1);
  }

  TEST_CASE("k-means-- with one cluster and no outliers lands on the weighted centroid") {
    Matrix P(4, 2);
    P << 0, 0, 2, 0, 0, 4, 10, 10;
    const Vector w = (Vector(4) << 1, 2, 3, 0.5).finished();
    Matrix init(1, 2);
    init << 100, -100;
    const auto res = kmeans_minus_minus(WeightedPointSet(PointSet(P), w), 0, CenterSet(init));
    const Eigen::RowVector2d centroid = (w.transpose() * P) / w.sum();
    CHECK((res.centers.center(0) - centroid).norm() <= 1e-12);
    CHECK(res.iterations <= 2);
  }

  TEST_CASE("k-means-- on the five-point line reaches the brute-force optimum") {
    const PointSet P(column({0, 1, 10, 11, 100}));
    const double best = oracle::brute_force_1d_two_means({0, 1, 10, 11, 100}, 1);
    CHECK(best == doctest::Approx(0.25));

    const auto res = kmeans_minus_minus(WeightedPointSet::unit(P), 1, CenterSet(column({0, 10})));
    CHECK(res.centers.center(0)(0) == doctest::Approx(0.5));
    CHECK(res.centers.center(1)(0) == doctest::Approx(10.5));
    CHECK(res.report.cost == doctest::Approx(best));
    REQUIRE(res.report.outliers.size() == 1);
    CHECK(res.report.outliers[0].index == 4);

    // From {0, 100} the far center keeps the point at 100 and the search
    // stalls in a local optimum that is no better than the brute-force one.
    const auto stuck = kmeans_minus_minus(WeightedPointSet::unit(P), 1, CenterSet(column({0, 100})));
    CHECK(stuck.report.cost >= best);
  }

  TEST_CASE("k-means-- cost never increases") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      Rng rng(Seed{s});
      const auto k = static_cast<Index>(2 + rng.below(4));
      const auto inst = gen_syncluster(300, 3, k, Seed{s});
      const auto P = inject_outliers(inst.points, 10, NoiseDistribution::gauss, 60, Seed{s + 100}).points;
      Vector w(P.size());
      for (Index i = 0; i < w.size(); ++i) w[i] = rng.uniform(0.2, 2.0);
      const auto init = local_search_outliers_seed(P, k, 10, {.sample_factor = 5}, Seed{s}).centers;
      for (int power : {1, 2}) {
        const auto res = kmeans_minus_minus(WeightedPointSet(P, w), 10.5, init, {.max_iter = 50, .tol = 0, .power = power});
        for (std::size_t t = 1; t < res.cost_history.size(); ++t) {
          CHECK(res.cost_history[t] <= res.cost_history[t - 1] * (1 + 1e-12));
        }
      }
    }
  }

  TEST_CASE("k-means-- re-seeds a center that loses all of its mass") {
    const PointSet P(column({0, 1, 2, 50, 51}));
    // The center at 1000 attracts nothing.
    const auto res = kmeans_minus_minus(WeightedPointSet::unit(P), 0, CenterSet(column({1, 1000})), {.max_iter = 10});
    CHECK(res.reseeded >= 1);
    CHECK(res.report.cost == doctest::Approx((1 + 0 + 1 + 0.25 + 0.25) / 5.0));
  }

  TEST_CASE("k-median update uses the coordinate-wise weighted median") {
    Matrix P(5, 2);
    P << 0, 0, 1, 5, 2, 1, 3, 2, 100, 100;
    const auto res = kmeans_minus_minus(WeightedPointSet::unit(PointSet(P)), 1, CenterSet(Matrix::Zero(1, 2)),
                                        {.max_iter = 1, .power = 1});
    CHECK(res.centers.center(0)(0) == 1.0);
    CHECK(res.centers.center(0)(1) == 1.0);
  }

  TEST_CASE("local search returns the k distinct points of a tiny sample") {
    const PointSet P(column({3, 3, 7, 7, 7}));
    const auto res = local_search_outliers_seed(P, 2, 0, {}, Seed{1});
    std::set<double> got{res.centers.center(0)(0), res.centers.center(1)(0)};
    CHECK(got == std::set<double>{3, 7});
    CHECK_FALSE(res.duplicates);

    const auto dup = local_search_outliers_seed(PointSet(column({4, 4, 4})), 2, 0, {}, Seed{1});
    CHECK(dup.duplicates);
    CHECK(dup.centers.k() == 2);
  }

  TEST_CASE("local search finds planted clusters despite far outliers") {
    int good = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      Rng rng(Seed{1000 + s});
      Matrix P(105, 1);
      for (Index i = 0; i < 50; ++i) P(i, 0) = rng.uniform(-0.5, 0.5);
      for (Index i = 50; i < 100; ++i) P(i, 0) = 100 + rng.uniform(-0.5, 0.5);
      for (Index i = 100; i < 105; ++i) P(i, 0) = 1e6;
      const auto res = local_search_outliers_seed(PointSet(P), 2, 5, {}, Seed{s});
      CHECK(res.centers.k() == 2);
      const double a = std::min(res.centers.center(0)(0), res.centers.center(1)(0));
      const double b = std::max(res.centers.center(0)(0), res.centers.center(1)(0));
      if (std::abs(a) <= 5 && std::abs(b - 100) <= 5) ++good;

      // Centers come from the sample.
      std::set<double> sample;
      for (Index i : res.sample) sample.insert(P(i, 0));
      CHECK(sample.count(a) == 1);
      CHECK(sample.count(b) == 1);
    }
    CHECK(good >= 9);
  }
}
