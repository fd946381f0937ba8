#include <algorithm>
#include <cmath>

#include "tdacloud/atol.hpp"
#include "tdacloud/errors.hpp"

namespace tdacloud {

AtolModel fit_atol(std::span<const SelectedDiagram> diagrams, std::size_t budget, std::uint64_t seed) {
  if (budget == 0) throw ArgumentError("ATOL budget must be at least 1");
  std::vector<DiagramPoint> pool;
  for (const auto& diagram : diagrams) {
    for (const auto& p : diagram.pairs) {
      if (!p.infinite()) pool.push_back({p.birth, p.death});
    }
  }
  if (pool.empty()) {
    throw DataError("cannot fit an ATOL model: every diagram is empty");
  }

  AtolModel model;
  model.budget = budget;
  model.seed = seed;
  const std::size_t k = std::min(budget, count_distinct(pool));
  for (const auto& c : kmeans(pool, k, seed)) {
    if (std::find(model.centers.begin(), model.centers.end(), c) == model.centers.end()) {
      model.centers.push_back(c);
    }
  }

  model.scales.resize(model.centers.size());
  if (model.centers.size() == 1) {
    double reach = 0.0;
    for (const auto& p : pool) reach = std::max(reach, distance(p, model.centers[0]));
    model.scales[0] = reach > 0.0 ? reach : 1.0;
  } else {
    for (std::size_t i = 0; i < model.centers.size(); ++i) {
      double closest = kInfinity;
      for (std::size_t j = 0; j < model.centers.size(); ++j) {
        if (j != i) closest = std::min(closest, distance(model.centers[i], model.centers[j]));
      }
      model.scales[i] = 0.5 * closest;
    }
  }
  return model;
}

namespace {
constexpr double kFixedScale = 0x1.0p40;
}

DescriptorVector atol_transform(const AtolModel& model, std::span<const BirthDeathPair> pairs) {
  std::vector<std::int64_t> acc(model.k(), 0);
  for (const auto& p : pairs) {
    if (p.infinite()) continue;
    const DiagramPoint x{p.birth, p.death};
    for (std::size_t i = 0; i < model.k(); ++i) {
      const double term = std::exp(-distance(x, model.centers[i]) / model.scales[i]);
      acc[i] += std::llround(term * kFixedScale);
    }
  }
  DescriptorVector out(model.budget, 0.0);
  for (std::size_t i = 0; i < model.k(); ++i) {
    out[i] = static_cast<double>(acc[i]) / kFixedScale;
  }
  return out;
}

DescriptorVector atol_transform(const AtolModel& model, const SelectedDiagram& diagram) {
  return atol_transform(model, diagram.pairs);
}

}  // namespace tdacloud
