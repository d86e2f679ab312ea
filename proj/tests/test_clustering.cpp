#include <catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "repdays/clustering.hpp"
#include "repdays/error.hpp"
#include "test_support.hpp"

using namespace repdays;

namespace {

DistanceMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  DistanceMatrix dm(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) dm.set(i, j, rows[i][j]);
  return dm;
}

std::set<std::set<std::size_t>> partition(const ClusterModel& m) {
  std::set<std::set<std::size_t>> out;
  for (const auto& c : m.members) out.insert({c.begin(), c.end()});
  return out;
}

}  // namespace

TEST_CASE("ahc on a hand-sized matrix") {
  //     0  1  2  3
  // 0   -  1  4  6
  // 1      -  3  5
  // 2         -  2
  const auto dm = from_rows({{0, 1, 4, 6}, {1, 0, 3, 5}, {4, 3, 0, 2}, {6, 5, 2, 0}});

  auto complete = ahc(dm, Linkage::Complete);
  REQUIRE(complete.merges.size() == 3);
  CHECK(complete.merges[0] == Merge{0, 1, 1.0, 4, 2});
  CHECK(complete.merges[1] == Merge{2, 3, 2.0, 5, 2});
  CHECK(complete.merges[2] == Merge{4, 5, 6.0, 6, 4});

  auto average = ahc(dm, Linkage::Average);
  CHECK(average.merges[2].distance == (4.0 + 6.0 + 3.0 + 5.0) / 4.0);
}

TEST_CASE("ties break on the smaller then larger id") {
  const auto dm = from_rows({{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}});
  auto h = ahc(dm, Linkage::Average);
  CHECK(h.merges[0].left == 0);
  CHECK(h.merges[0].right == 1);
  CHECK(h.merges[1].left == 2);
  CHECK(h.merges[1].right == 3);
  CHECK(h.merges[2].left == 4);
  CHECK(h.merges[2].right == 5);
}

TEST_CASE("ahc equals the from-definition reference") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::size_t> size(2, 30);
  for (int t = 0; t < 40; ++t) {
    const bool integer = t % 2 == 0;
    auto dm = testing::random_matrix(size(gen), gen, integer);
    for (auto linkage : {Linkage::Complete, Linkage::Average}) {
      auto got = ahc(dm, linkage);
      auto want = testing::naive_ahc(dm, linkage);
      REQUIRE(got.merges.size() == want.size());
      for (std::size_t s = 0; s < want.size(); ++s) {
        INFO("trial " << t << " merge " << s);
        CHECK(got.merges[s].left == want[s].left);
        CHECK(got.merges[s].right == want[s].right);
        CHECK(got.merges[s].size == want[s].size);
        CHECK(got.merges[s].id == dm.size() + s);
        if (integer)
          CHECK(got.merges[s].distance == want[s].distance);
        else
          CHECK_THAT(got.merges[s].distance, Catch::Matchers::WithinAbs(want[s].distance, 1e-12));
      }
    }
  }
}

TEST_CASE("merge heights never decrease") {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 20; ++t) {
    auto dm = testing::random_matrix(25, gen, false);
    for (auto linkage : {Linkage::Complete, Linkage::Average}) {
      auto h = ahc(dm, linkage);
      for (std::size_t s = 1; s < h.merges.size(); ++s)
        CHECK(h.merges[s].distance >= h.merges[s - 1].distance - 1e-12);
    }
  }
}

TEST_CASE("cuts are nested and relabelled by first member") {
  std::mt19937_64 gen(3);
  auto dm = testing::random_matrix(20, gen, false);
  auto h = ahc(dm, Linkage::Average);
  for (std::size_t k = 1; k <= 20; ++k) {
    auto m = cut(h, k);
    CHECK(m.k == k);
    REQUIRE(m.members.size() == k);
    std::size_t total = 0;
    for (std::size_t c = 0; c < k; ++c) {
      total += m.members[c].size();
      CHECK(std::is_sorted(m.members[c].begin(), m.members[c].end()));
      for (auto i : m.members[c]) CHECK(m.assignments[i] == c);
      if (c > 0) CHECK(m.members[c - 1].front() < m.members[c].front());
    }
    CHECK(total == 20);
    if (k < 20) {
      // every cluster of the finer cut lies inside one cluster of the coarser cut
      auto fine = cut(h, k + 1);
      for (const auto& c : fine.members) {
        std::set<std::size_t> parents;
        for (auto i : c) parents.insert(m.assignments[i]);
        CHECK(parents.size() == 1);
      }
    }
  }
  CHECK(cut(h, 1).assignments == std::vector<std::size_t>(20, 0));
  CHECK_THROWS_AS(cut(h, 0), ArgumentError);
  CHECK_THROWS_AS(cut(h, 21), ArgumentError);
}

TEST_CASE("centroids are element-wise means") {
  auto ds = testing::constant_days({0.0, 0.1, 0.9, 1.0});
  std::vector<std::size_t> labels{5, 5, 2, 2};
  auto m = make_model(ds, labels, Method::AhcAverage);
  REQUIRE(m.k == 2);
  CHECK(m.assignments == std::vector<std::size_t>{0, 0, 1, 1});
  CHECK(m.centroids[0](3, 0) == Catch::Approx(0.05));
  CHECK(m.centroids[1](3, 0) == Catch::Approx(0.95));
  CHECK_THROWS_AS(compute_centroids(ds, {{0, 1}, {}}), ArgumentError);
}

TEST_CASE("medoid minimises summed distance with lowest index on ties") {
  const auto dm = from_rows({{0, 1, 2, 3}, {1, 0, 1, 2}, {2, 1, 0, 1}, {3, 2, 1, 0}});
  CHECK(medoid(dm, std::vector<std::size_t>{0, 1, 2, 3}) == 1);
  CHECK(medoid(dm, std::vector<std::size_t>{0, 2}) == 0);
  CHECK(medoid(dm, std::vector<std::size_t>{3}) == 3);
}

TEST_CASE("fit_ahc attaches centroids") {
  auto ds = testing::random_dataset(12, 2, 8);
  auto dm = distance_matrix(ds);
  auto m = fit_ahc(ds, dm, Linkage::Complete, 4);
  CHECK(m.method == Method::AhcComplete);
  CHECK(m.centroids.size() == 4);
  CHECK(m.centroids == compute_centroids(ds, m.members));
}

TEST_CASE("kmeans with K = N leaves every day alone") {
  auto ds = testing::random_dataset(9, 2, 21);
  auto m = kmeans(ds, 9, {1, 3, 300});
  CHECK(m.k == 9);
  for (const auto& c : m.members) CHECK(c.size() == 1);
  CHECK(inertia(ds, m) == 0.0);
  CHECK(*m.params.inertia == 0.0);
}

TEST_CASE("kmeans is deterministic for a seed") {
  auto ds = testing::random_dataset(60, 2, 12);
  auto a = kmeans(ds, 5, {17, 4, 300});
  auto b = kmeans(ds, 5, {17, 4, 300});
  CHECK(a == b);
  CHECK(a.params.seed == 17u);
  CHECK(a.params.restarts == 4u);
  CHECK(*a.params.inertia == Catch::Approx(inertia(ds, a)).epsilon(1e-12));
}

TEST_CASE("kmeans recovers separated blobs for every seed") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<std::vector<std::vector<double>>> v;
  const double centers[3] = {0.1, 0.5, 0.9};
  for (int i = 0; i < 30; ++i) {
    std::vector<std::vector<double>> day(24, std::vector<double>(1));
    for (auto& h : day) h[0] = centers[i % 3] + noise(gen);
    v.push_back(day);
  }
  auto ds = testing::make_dataset(v);
  std::set<std::set<std::size_t>> truth;
  for (int c = 0; c < 3; ++c) {
    std::set<std::size_t> s;
    for (std::size_t i = c; i < 30; i += 3) s.insert(i);
    truth.insert(s);
  }
  for (std::uint64_t seed = 1; seed <= 10; ++seed) CHECK(partition(kmeans(ds, 3, {seed, 5, 300})) == truth);
}

TEST_CASE("lloyd inertia never increases") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    auto ds = testing::random_dataset(80, 2, seed);
    auto m = kmeans(ds, 6, {seed, 1, 300});
    const auto& trace = m.params.inertia_trace;
    REQUIRE_FALSE(trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9);
    CHECK(trace.back() == Catch::Approx(*m.params.inertia).epsilon(1e-12));
  }
}

TEST_CASE("more restarts never do worse") {
  auto ds = testing::random_dataset(50, 1, 77);
  const double one = *kmeans(ds, 4, {5, 1, 300}).params.inertia;
  const double ten = *kmeans(ds, 4, {5, 10, 300}).params.inertia;
  CHECK(ten <= one);
}

TEST_CASE("kmeans argument checks") {
  auto ds = testing::random_dataset(5, 1, 1);
  CHECK_THROWS_AS(kmeans(ds, 1), ArgumentError);
  CHECK_THROWS_AS(kmeans(ds, 6), ArgumentError);
  CHECK(method_from_string("kmeans") == Method::KMeans);
  CHECK(method_from_string(to_string(Method::AhcComplete)) == Method::AhcComplete);
  CHECK(linkage_of(Method::KMeans) == std::nullopt);
  CHECK(method_for(Linkage::Average) == Method::AhcAverage);
  CHECK_THROWS_AS(method_from_string("ward"), ArgumentError);
}
