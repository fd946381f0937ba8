#include "tdacloud/descriptor_index.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "tdacloud/parallel.hpp"

namespace tdacloud {

void PipelineConfig::validate() const {
  if (budget == 0) throw ArgumentError("budget b must be at least 1");
  if (downsample == 0) throw ArgumentError("downsample target must be at least 1");
}

std::string PipelineConfig::fingerprint() const {
  return "backend=" + std::string(to_string(backend)) + ";b=" + std::to_string(budget) +
         ";seed=" + std::to_string(seed) + ";downsample=" + std::to_string(downsample) +
         ";normalize=" + (normalize ? "1" : "0");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_entry_id(const std::string& id) {
  if (id.empty()) throw ArgumentError("cloud ids must be non-empty");
  if (id.find_first_of(",\n\r") != std::string::npos) {
    throw ArgumentError("cloud id '" + id + "' contains a comma or newline");
  }
}

}  // namespace

PointCloud prepare_cloud(const PointCloud& cloud, const PipelineConfig& config) {
  validate_cloud(cloud);
  PointCloud work = downsample_uniform(cloud, config.downsample);
  if (config.normalize) work = normalize(work);
  return work;
}

Filtration build_filtration(const PointCloud& prepared, const PipelineConfig& config) {
  if (config.backend == Backend::alpha) return build_alpha(prepared);
  RipsOptions options;
  options.max_dim = 3;
  return build_rips(prepared, options);
}

ProcessedCloud process_cloud(const PointCloud& cloud, const PipelineConfig& config) {
  ProcessedCloud out;
  const auto t0 = Clock::now();
  const PointCloud work = prepare_cloud(cloud, config);
  out.points_used = work.size();

  const auto t1 = Clock::now();
  const PersistenceSet pset = compute_persistence(build_filtration(work, config), 2);
  out.persistence_seconds = seconds_since(t1);

  const auto t2 = Clock::now();
  out.diagram = select_diagram(pset);
  out.other_seconds = std::chrono::duration<double>(t1 - t0).count() + seconds_since(t2);
  return out;
}

BuildResult build_index(std::span<const PointCloud> clouds, const PipelineConfig& config, std::size_t threads) {
  config.validate();
  if (clouds.size() < 2) {
    throw ArgumentError("an index needs at least 2 clouds, got " + std::to_string(clouds.size()));
  }
  std::set<std::string> seen;
  for (const auto& c : clouds) {
    check_entry_id(c.id);
    if (!seen.insert(c.id).second) throw ArgumentError("duplicate cloud id '" + c.id + "'");
  }

  std::vector<std::optional<ProcessedCloud>> processed(clouds.size());
  BuildResult result;
  result.report.resize(clouds.size());
  parallel_for(clouds.size(), threads, [&](std::size_t i) {
    CloudReport& r = result.report[i];
    r.id = clouds[i].id;
    r.source = clouds[i].source;
    const auto start = Clock::now();
    try {
      processed[i] = process_cloud(clouds[i], config);
      r.selected_dim = processed[i]->diagram.dim;
      r.pair_count = processed[i]->diagram.pairs.size();
      r.points_used = processed[i]->points_used;
    } catch (const ContractViolation&) {
      throw;
    } catch (const Error& e) {
      r.skipped = true;
      r.reason = e.what();
    }
    r.seconds = seconds_since(start);
  });

  std::vector<SelectedDiagram> diagrams;
  std::vector<std::size_t> kept;
  std::string reasons;
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    if (processed[i]) {
      kept.push_back(i);
      diagrams.push_back(processed[i]->diagram);
    } else {
      reasons += "\n  " + clouds[i].id + ": " + result.report[i].reason;
    }
  }
  if (kept.empty()) {
    throw DataError("every cloud failed to process:" + reasons);
  }

  DescriptorIndex& index = result.index;
  index.config = config;
  index.convention = config.backend == Backend::alpha ? ValueConvention::squared_radius : ValueConvention::distance;
  index.model = fit_atol(diagrams, config.budget, config.seed);
  index.entries.resize(kept.size());
  parallel_for(kept.size(), threads, [&](std::size_t k) {
    index.entries[k] = {clouds[kept[k]].id, diagrams[k].dim, atol_transform(index.model, diagrams[k])};
  });
  return result;
}

DescriptorVector describe_cloud(const DescriptorIndex& index, const PointCloud& cloud, QueryTiming* timing) {
  const ProcessedCloud processed = process_cloud(cloud, index.config);
  if (processed.diagram.pairs.empty()) {
    throw DataError("query cloud '" + cloud.id + "' has a degenerate persistence diagram (no finite pairs)");
  }
  const auto t0 = Clock::now();
  DescriptorVector v = atol_transform(index.model, processed.diagram);
  if (timing) {
    timing->persistence_seconds = processed.persistence_seconds;
    timing->other_seconds = processed.other_seconds + seconds_since(t0);
  }
  return v;
}

RetrievalResult rank_vector(const DescriptorIndex& index, const std::string& query_id,
                            std::span<const double> vector, std::size_t top_n) {
  if (top_n == 0) throw ArgumentError("topN must be at least 1");
  if (index.entries.empty()) throw ArgumentError("cannot query an empty index");
  if (vector.size() != index.model.budget) {
    throw ArgumentError("query vector has length " + std::to_string(vector.size()) + ", index expects " +
                        std::to_string(index.model.budget));
  }
  std::vector<Match> all;
  all.reserve(index.entries.size());
  for (const auto& e : index.entries) {
    double sum = 0.0;
    for (std::size_t i = 0; i < vector.size(); ++i) {
      const double d = e.vector[i] - vector[i];
      sum += d * d;
    }
    all.push_back({e.id, std::sqrt(sum)});
  }
  const std::size_t keep = std::min(top_n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                    [](const Match& a, const Match& b) {
                      return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
                    });
  all.resize(keep);
  return {query_id, std::move(all), index.entries.size()};
}

RetrievalResult query(const DescriptorIndex& index, const PointCloud& cloud, std::size_t top_n, QueryTiming* timing) {
  if (top_n == 0) throw ArgumentError("topN must be at least 1");
  if (index.entries.empty()) throw ArgumentError("cannot query an empty index");
  QueryTiming local;
  const DescriptorVector v = describe_cloud(index, cloud, &local);
  const auto t0 = Clock::now();
  RetrievalResult r = rank_vector(index, cloud.id, v, top_n);
  local.other_seconds += seconds_since(t0);
  if (timing) *timing = local;
  return r;
}

std::optional<std::string> fingerprint_mismatch(const DescriptorIndex& index, const PipelineConfig& requested) {
  if (index.config == requested) return std::nullopt;
  return "pipeline fingerprint mismatch: index uses '" + index.config.fingerprint() + "', requested '" +
         requested.fingerprint() + "'; the index configuration is used";
}

}  // namespace tdacloud
