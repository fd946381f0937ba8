#include <algorithm>
#include <cmath>
#include <limits>

#include "random.hpp"
#include "tdacloud/atol.hpp"
#include "tdacloud/errors.hpp"

namespace tdacloud {

double distance(const DiagramPoint& a, const DiagramPoint& b) {
  return std::hypot(a.birth - b.birth, a.death - b.death);
}

namespace {

double squared(const DiagramPoint& a, const DiagramPoint& b) {
  const double db = a.birth - b.birth, dd = a.death - b.death;
  return db * db + dd * dd;
}

std::size_t nearest(const DiagramPoint& p, std::span<const DiagramPoint> centers, double* best_out = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = squared(p, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best_out) *best_out = best_d;
  return best;
}

}  // namespace

std::size_t count_distinct(std::span<const DiagramPoint> points) {
  std::vector<DiagramPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

double kmeans_objective(std::span<const DiagramPoint> points, std::span<const DiagramPoint> centers) {
  double total = 0.0;
  for (const auto& p : points) {
    double d = 0.0;
    nearest(p, centers, &d);
    total += d;
  }
  return total;
}

std::vector<DiagramPoint> kmeans(std::span<const DiagramPoint> points, std::size_t k, std::uint64_t seed,
                                 const KMeansOptions& options) {
  if (k == 0) throw ArgumentError("k-means needs k >= 1");
  if (k > count_distinct(points)) {
    throw ArgumentError("k-means k=" + std::to_string(k) + " exceeds the number of distinct points");
  }
  const std::size_t n = points.size();
  detail::Rng rng(seed);

  // k-means++ seeding: first center uniform, then D^2 sampling.
  std::vector<DiagramPoint> centers;
  centers.reserve(k);
  centers.push_back(points[rng.below(n)]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared(points[i], centers[0]);
  while (centers.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = n;
    const double target = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      pick = i;
      if (acc > target) break;
    }
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared(points[i], centers.back()));
  }

  std::vector<std::size_t> assign(n);
  // Running means, so a cluster of identical points keeps that exact point.
  std::vector<DiagramPoint> mean(k);
  std::vector<std::size_t> count(k);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    std::fill(mean.begin(), mean.end(), DiagramPoint{});
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = nearest(points[i], centers, &d2[i]);
      assign[i] = c;
      const double w = 1.0 / static_cast<double>(++count[c]);
      mean[c].birth += (points[i].birth - mean[c].birth) * w;
      mean[c].death += (points[i].death - mean[c].death) * w;
    }
    double moved = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      DiagramPoint next;
      if (count[c] == 0) {
        // Re-seed with the worst-served point, then stop it being reused.
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i) {
          if (d2[i] > d2[far]) far = i;
        }
        next = points[far];
        d2[far] = 0.0;
      } else {
        next = mean[c];
      }
      moved = std::max(moved, distance(next, centers[c]));
      centers[c] = next;
    }
    if (moved < options.tolerance) break;
  }
  return centers;
}

}  // namespace tdacloud
