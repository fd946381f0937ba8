#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tdacloud/persistence.hpp"

namespace tdacloud {

/// A point of a persistence diagram embedded as (birth, death).
struct DiagramPoint {
  double birth = 0.0;
  double death = 0.0;
  friend bool operator==(const DiagramPoint&, const DiagramPoint&) = default;
  friend auto operator<=>(const DiagramPoint&, const DiagramPoint&) = default;
};

double distance(const DiagramPoint& a, const DiagramPoint& b);

struct KMeansOptions {
  std::size_t max_iterations = 300;
  double tolerance = 1e-7;  // stop once no center moves farther than this
};

/// Lloyd's algorithm from a seeded k-means++ start. Empty clusters are
/// re-seeded with the point farthest from its center (lowest index wins
/// ties). Requires 1 <= k <= number of distinct points.
std::vector<DiagramPoint> kmeans(std::span<const DiagramPoint> points, std::size_t k, std::uint64_t seed,
                                 const KMeansOptions& options = {});

/// Sum of squared distances from each point to its nearest center.
double kmeans_objective(std::span<const DiagramPoint> points, std::span<const DiagramPoint> centers);

std::size_t count_distinct(std::span<const DiagramPoint> points);

using DescriptorVector = std::vector<double>;

/// Fitted ATOL quantizer: k centers with laplacian contrast scales.
struct AtolModel {
  std::size_t budget = 0;
  std::vector<DiagramPoint> centers;
  std::vector<double> scales;
  std::uint64_t seed = 0;

  std::size_t k() const { return centers.size(); }
  friend bool operator==(const AtolModel&, const AtolModel&) = default;
};

/// Pools every (birth, death) point of every diagram and quantizes the pool
/// with k = min(budget, distinct points) centers. Each scale is half the
/// distance to the nearest other center; a lone center gets the largest
/// distance to any pooled point (or 1 when that is 0).
AtolModel fit_atol(std::span<const SelectedDiagram> diagrams, std::size_t budget, std::uint64_t seed);

/// Entry i = sum over the diagram's pairs x of exp(-|x - c_i| / s_i);
/// entries past k are zero. Terms are accumulated in fixed point (2^-40) so
/// the result does not depend on pair order and is additive over disjoint
/// unions.
DescriptorVector atol_transform(const AtolModel& model, std::span<const BirthDeathPair> pairs);
DescriptorVector atol_transform(const AtolModel& model, const SelectedDiagram& diagram);

}  // namespace tdacloud
