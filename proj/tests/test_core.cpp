#include <doctest.h>

#include <map>
#include <set>

#include "laysam/core.hpp"
#include "oracles.hpp"

using namespace laysam;

namespace {

Matrix column(std::initializer_list<double> v) {
  Matrix m(static_cast<Index>(v.size()), 1);
  Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

Matrix random_matrix(Index rows, Index cols, Rng& rng, double lo = -10, double hi = 10) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("point sets validate their shape") {
    CHECK_THROWS_AS(PointSet(Matrix(0, 3)), std::invalid_argument);
    CHECK_THROWS_AS(PointSet(column({1.0}), true), std::invalid_argument);
    Matrix bad = column({1.0, 2.0});
    bad(1, 0) = NAN;
    CHECK_THROWS_AS(PointSet{bad}, std::invalid_argument);

    const auto unit = WeightedPointSet::unit(PointSet(column({1, 2, 3})));
    CHECK(unit.total_weight() == 3.0);
    CHECK_THROWS_AS(WeightedPointSet(PointSet(column({1, 2})), Vector::Constant(2, -1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(WeightedPointSet(PointSet(column({1, 2})), Vector::Zero(2)),
                    std::invalid_argument);
  }

  TEST_CASE("min_distances examples") {
    CHECK(min_distances(PointSet(column({0, 3})), CenterSet(column({0}))) ==
          (Vector(2) << 0, 3).finished());

    Matrix p(1, 2);
    p << 0, 0;
    Matrix c(2, 2);
    c << 3, 4, 10, 10;
    const auto nc = nearest_centers(PointSet(p), CenterSet(c));
    CHECK(nc.distances[0] == 5.0);
    CHECK(nc.nearest[0] == 0);

    CHECK_THROWS_AS(min_distances(PointSet(p), CenterSet(column({1}))), std::invalid_argument);
  }

  TEST_CASE("min_distances matches the exhaustive pair scan and ignores center order") {
    Rng rng(Seed{7});
    for (int rep = 0; rep < 20; ++rep) {
      const Matrix P = random_matrix(20, 3, rng);
      Matrix C = random_matrix(4, 3, rng);
      const Vector got = min_distances(PointSet(P), CenterSet(C));
      const Vector want = oracle::pairwise_min_distances(P, C);
      CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12);

      C.row(0).swap(C.row(3));
      CHECK(min_distances(PointSet(P), CenterSet(C)) == got);
    }
  }

  TEST_CASE("min_distances is identical across thread counts") {
    Rng rng(Seed{11});
    const Matrix P = random_matrix(50000, 4, rng);
    const Matrix C = random_matrix(7, 4, rng);
    set_num_threads(1);
    const auto a = nearest_centers(PointSet(P), CenterSet(C));
    set_num_threads(4);
    const auto b = nearest_centers(PointSet(P), CenterSet(C));
    set_num_threads(1);
    CHECK(a.distances == b.distances);
    CHECK(a.nearest == b.nearest);
  }

  TEST_CASE("select_top_m examples") {
    const std::vector<double> a{5, 1, 9};
    auto s = select_top_m(a, 0);
    CHECK(s.indices.empty());
    CHECK(s.threshold == 9.0);

    const std::vector<double> b{2, 7, 7, 1};
    s = select_top_m(b, 2);
    CHECK(s.indices == IndexList{1, 2});
    CHECK(s.threshold == 2.0);

    const std::vector<double> c{4, 4, 4};
    s = select_top_m(c, 1);
    CHECK(s.indices == IndexList{0});
    CHECK(s.threshold == 4.0);

    s = select_top_m(c, 3);
    CHECK(s.indices.size() == 3);
    CHECK(s.threshold == 0.0);

    CHECK_THROWS_AS(select_top_m(c, 4), std::invalid_argument);
  }

  TEST_CASE("select_top_m agrees with a stable sort on random inputs with ties") {
    Rng rng(Seed{3});
    for (int rep = 0; rep < 500; ++rep) {
      const auto n = static_cast<Index>(1 + rng.below(40));
      std::vector<double> v(static_cast<std::size_t>(n));
      for (auto& x : v) x = static_cast<double>(rng.below(6));  // many ties
      const auto m = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n + 1)));
      const auto got = select_top_m(v, m, Seed{static_cast<std::uint64_t>(rep)});

      auto order = oracle::rank_order(v);
      IndexList want(order.begin(), order.begin() + m);
      std::sort(want.begin(), want.end());
      REQUIRE(got.indices == want);
      const double threshold = m < n ? v[static_cast<std::size_t>(order[static_cast<std::size_t>(m)])] : 0.0;
      CHECK(got.threshold == threshold);

      // Every unselected value is <= every selected value.
      std::set<Index> chosen(got.indices.begin(), got.indices.end());
      for (Index i = 0; i < n; ++i) {
        if (chosen.count(i)) continue;
        for (Index j : got.indices) CHECK(v[static_cast<std::size_t>(i)] <= v[static_cast<std::size_t>(j)]);
      }
    }
  }

  TEST_CASE("sample_without_replacement edge cases") {
    CHECK(sample_without_replacement(5, 5, Seed{1}) == IndexList{0, 1, 2, 3, 4});
    CHECK(sample_without_replacement(10, 0, Seed{1}).empty());
    CHECK_THROWS_AS(sample_without_replacement(3, 4, Seed{1}), std::invalid_argument);
    CHECK(sample_without_replacement(1000, 17, Seed{9}) == sample_without_replacement(1000, 17, Seed{9}));
    const auto s = sample_without_replacement(100000, 300, Seed{5});
    CHECK(std::set<Index>(s.begin(), s.end()).size() == 300);
    CHECK(s.back() < 100000);
  }

  TEST_CASE("sample_without_replacement is uniform over pairs") {
    std::map<std::pair<Index, Index>, int> counts;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
      const auto s = sample_without_replacement(4, 2, derive_seed(Seed{42}, static_cast<std::uint64_t>(t)));
      counts[{s[0], s[1]}]++;
    }
    CHECK(counts.size() == 6);
    for (const auto& [pair, count] : counts) {
      CHECK(std::abs(count / static_cast<double>(trials) - 1.0 / 6.0) <= 0.01);
    }
  }

  TEST_CASE("the sparse sampling path is uniform as well") {
    // population 50, m 3 takes the hash-map branch; each index should appear
    // with probability 3/50.
    std::vector<int> hits(50, 0);
    const int trials = 60000;
    for (int t = 0; t < trials; ++t) {
      for (Index i : sample_without_replacement(50, 3, derive_seed(Seed{8}, static_cast<std::uint64_t>(t)))) {
        hits[static_cast<std::size_t>(i)]++;
      }
    }
    for (int h : hits) CHECK(std::abs(h / static_cast<double>(trials) - 0.06) <= 0.006);
  }

  TEST_CASE("rng variates have the right first two moments") {
    Rng rng(Seed{99});
    double s = 0, s2 = 0, u = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x = rng.normal();
      s += x;
      s2 += x * x;
      u += rng.uniform();
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.01);
    CHECK(std::abs(u / n - 0.5) < 0.005);
  }

  TEST_CASE("compensated summation recovers small terms") {
    std::vector<double> v{1e16, 1.0, -1e16, 1.0};
    CHECK(compensated_sum(v) == 2.0);
  }
}
