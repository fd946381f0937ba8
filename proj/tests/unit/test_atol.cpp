#include <tdacloud/tdacloud.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace tdacloud;

namespace {

SelectedDiagram diagram(int dim, std::vector<std::pair<double, double>> pts) {
  SelectedDiagram d;
  d.dim = dim;
  for (auto [b, e] : pts) d.pairs.push_back({dim, b, e});
  return d;
}

std::vector<BirthDeathPair> random_pairs(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<BirthDeathPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = u(rng);
    out.push_back({1, b, b + u(rng)});
  }
  return out;
}

}  // namespace

TEST(Atol, TwoCenterFit) {
  const std::vector<SelectedDiagram> ds{diagram(1, {{0, 1}, {2, 3}})};
  const AtolModel m = fit_atol(ds, 2, 42);
  ASSERT_EQ(m.k(), 2u);
  std::vector<DiagramPoint> centers = m.centers;
  std::sort(centers.begin(), centers.end());
  EXPECT_EQ(centers[0], (DiagramPoint{0, 1}));
  EXPECT_EQ(centers[1], (DiagramPoint{2, 3}));
  EXPECT_NEAR(m.scales[0], std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(m.scales[1], std::sqrt(2.0), 1e-15);
}

TEST(Atol, TwoCenterTransform) {
  const std::vector<SelectedDiagram> ds{diagram(1, {{0, 1}, {2, 3}})};
  const AtolModel m = fit_atol(ds, 2, 42);
  const DescriptorVector v = atol_transform(m, diagram(1, {{0, 1}}));
  ASSERT_EQ(v.size(), 2u);
  const std::size_t first = m.centers[0] == DiagramPoint{0, 1} ? 0 : 1;
  EXPECT_NEAR(v[first], 1.0, 1e-12);
  EXPECT_NEAR(v[1 - first], std::exp(-2.0), 1e-12);

  const DescriptorVector twice = atol_transform(m, diagram(1, {{0, 1}, {0, 1}}));
  EXPECT_EQ(twice[0], 2.0 * v[0]);
  EXPECT_EQ(twice[1], 2.0 * v[1]);
}

TEST(Atol, CollapsedPoolGivesUnitScale) {
  const std::vector<SelectedDiagram> ds{diagram(2, {{0.5, 0.7}, {0.5, 0.7}, {0.5, 0.7}})};
  const AtolModel m = fit_atol(ds, 5, 1);
  ASSERT_EQ(m.k(), 1u);
  EXPECT_EQ(m.centers[0], (DiagramPoint{0.5, 0.7}));
  EXPECT_EQ(m.scales[0], 1.0);
  const DescriptorVector v = atol_transform(m, ds[0]);
  ASSERT_EQ(v.size(), 5u);
  EXPECT_EQ(v[0], 3.0);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_EQ(v[i], 0.0);
}

TEST(Atol, LoneCenterScaleIsLargestDistance) {
  // Three distinct points but budget 1: sigma is the largest distance from
  // the single center to a pooled point.
  const std::vector<SelectedDiagram> ds{diagram(1, {{0, 0}, {0, 2}, {0, 4}})};
  const AtolModel m = fit_atol(ds, 1, 3);
  ASSERT_EQ(m.k(), 1u);
  EXPECT_NEAR(m.centers[0].death, 2.0, 1e-12);
  EXPECT_NEAR(m.scales[0], 2.0, 1e-12);
}

TEST(Atol, EmptyDiagramGivesZeroVector) {
  const std::vector<SelectedDiagram> ds{diagram(1, {{0, 1}, {2, 3}})};
  const AtolModel m = fit_atol(ds, 4, 0);
  const DescriptorVector v = atol_transform(m, SelectedDiagram{});
  EXPECT_EQ(v, DescriptorVector(4, 0.0));
}

TEST(Atol, EmptyPoolIsDataError) {
  const std::vector<SelectedDiagram> ds{SelectedDiagram{}, SelectedDiagram{}};
  EXPECT_THROW(fit_atol(ds, 3, 0), DataError);
}

TEST(Atol, AdditiveAndPermutationInvariant) {
  std::mt19937_64 rng(2024);
  std::vector<SelectedDiagram> pool;
  for (int i = 0; i < 10; ++i) {
    SelectedDiagram d;
    d.dim = 1;
    d.pairs = random_pairs(rng, 30);
    pool.push_back(d);
  }
  const AtolModel m = fit_atol(pool, 10, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_pairs(rng, 1 + trial % 17);
    const auto q = random_pairs(rng, 1 + trial % 11);
    std::vector<BirthDeathPair> both = p;
    both.insert(both.end(), q.begin(), q.end());
    const auto vp = atol_transform(m, p), vq = atol_transform(m, q), vb = atol_transform(m, both);
    for (std::size_t i = 0; i < vb.size(); ++i) EXPECT_EQ(vb[i], vp[i] + vq[i]);
    std::shuffle(both.begin(), both.end(), rng);
    EXPECT_EQ(atol_transform(m, both), vb);
    for (double x : vb) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, static_cast<double>(both.size()));
    }
  }
}

TEST(Atol, EntriesMatchDirectSummation) {
  std::mt19937_64 rng(7);
  SelectedDiagram d;
  d.dim = 2;
  d.pairs = random_pairs(rng, 50);
  const std::vector<SelectedDiagram> ds{d};
  const AtolModel m = fit_atol(ds, 6, 9);
  const DescriptorVector v = atol_transform(m, d);
  for (std::size_t i = 0; i < m.k(); ++i) {
    double sum = 0.0;
    for (const auto& p : d.pairs) {
      sum += std::exp(-std::hypot(p.birth - m.centers[i].birth, p.death - m.centers[i].death) / m.scales[i]);
    }
    EXPECT_NEAR(v[i], sum, 1e-9);
  }
}

TEST(Atol, ScalesAreHalfNearestCenterDistance) {
  std::mt19937_64 rng(8);
  SelectedDiagram d;
  d.pairs = random_pairs(rng, 200);
  const std::vector<SelectedDiagram> ds{d};
  const AtolModel m = fit_atol(ds, 10, 1);
  ASSERT_EQ(m.k(), 10u);
  for (std::size_t i = 0; i < m.k(); ++i) {
    double nearest = INFINITY;
    for (std::size_t j = 0; j < m.k(); ++j) {
      if (i != j) nearest = std::min(nearest, distance(m.centers[i], m.centers[j]));
    }
    EXPECT_DOUBLE_EQ(m.scales[i], 0.5 * nearest);
    EXPECT_GT(m.scales[i], 0.0);
  }
}

TEST(Atol, FitDeterministic) {
  std::mt19937_64 rng(11);
  SelectedDiagram d;
  d.pairs = random_pairs(rng, 10000);
  const std::vector<SelectedDiagram> ds{d};
  EXPECT_EQ(fit_atol(ds, 10, 3), fit_atol(ds, 10, 3));
}

TEST(KMeans, SeparatedClusters) {
  std::vector<DiagramPoint> pts(5, {0, 0});
  pts.insert(pts.end(), 5, {10, 10});
  auto c = kmeans(pts, 2, 1);
  std::sort(c.begin(), c.end());
  EXPECT_EQ(c[0], (DiagramPoint{0, 0}));
  EXPECT_EQ(c[1], (DiagramPoint{10, 10}));
}

TEST(KMeans, KEqualsDistinctGivesZeroObjective) {
  const std::vector<DiagramPoint> pts{{0, 1}, {2, 5}, {3, 3}, {2, 5}};
  const auto c = kmeans(pts, 3, 4);
  EXPECT_EQ(kmeans_objective(pts, c), 0.0);
  EXPECT_THROW(kmeans(pts, 4, 4), ArgumentError);
  EXPECT_EQ(count_distinct(pts), 3u);
}

TEST(KMeans, BeatsRandomCenterTriples) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<DiagramPoint> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({u(rng), u(rng)});
  const double best = kmeans_objective(pts, kmeans(pts, 3, 5));
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  for (int t = 0; t < 50; ++t) {
    const std::vector<DiagramPoint> random{pts[pick(rng)], pts[pick(rng)], pts[pick(rng)]};
    EXPECT_LE(best, kmeans_objective(pts, random) + 1e-12);
  }
}
