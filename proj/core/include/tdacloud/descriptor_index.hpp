#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tdacloud/atol.hpp"
#include "tdacloud/errors.hpp"
#include "tdacloud/filtration.hpp"
#include "tdacloud/persistence.hpp"
#include "tdacloud/point_cloud.hpp"

namespace tdacloud {

/// Everything that determines how a cloud becomes a descriptor. Queries
/// always reuse the configuration stored in the index.
struct PipelineConfig {
  Backend backend = Backend::alpha;
  std::size_t budget = 10;
  std::uint64_t seed = 42;
  std::size_t downsample = 10000;
  bool normalize = true;

  void validate() const;
  std::string fingerprint() const;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Downsampling followed by optional normalization.
PointCloud prepare_cloud(const PointCloud& cloud, const PipelineConfig& config);

/// Alpha complex, or the full Rips complex up to tetrahedra.
Filtration build_filtration(const PointCloud& prepared, const PipelineConfig& config);

/// Result of running one cloud through downsample, normalize, filtration,
/// persistence and diagram selection.
struct ProcessedCloud {
  SelectedDiagram diagram;
  std::size_t points_used = 0;
  double persistence_seconds = 0.0;  // filtration + reduction
  double other_seconds = 0.0;
};

ProcessedCloud process_cloud(const PointCloud& cloud, const PipelineConfig& config);

struct IndexEntry {
  std::string id;
  int selected_dim = 0;
  DescriptorVector vector;
  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

struct DescriptorIndex {
  PipelineConfig config;
  ValueConvention convention = ValueConvention::squared_radius;
  AtolModel model;
  std::vector<IndexEntry> entries;

  friend bool operator==(const DescriptorIndex&, const DescriptorIndex&) = default;
};

struct CloudReport {
  std::string id;
  std::string source;
  bool skipped = false;
  std::string reason;
  int selected_dim = -1;
  std::size_t pair_count = 0;
  std::size_t points_used = 0;
  double seconds = 0.0;
};

struct BuildResult {
  DescriptorIndex index;
  std::vector<CloudReport> report;
};

/// Builds the descriptor database. Clouds whose pipeline fails with a data
/// or resource error are skipped and reported; the ATOL model is fitted on
/// the diagrams of the remaining clouds.
BuildResult build_index(std::span<const PointCloud> clouds, const PipelineConfig& config, std::size_t threads = 1);

struct Match {
  std::string id;
  double distance = 0.0;
  friend bool operator==(const Match&, const Match&) = default;
};

struct RetrievalResult {
  std::string query_id;
  std::vector<Match> ranked;  // ascending distance, ties by id
  std::size_t index_size = 0;
};

struct QueryTiming {
  double persistence_seconds = 0.0;
  double other_seconds = 0.0;
};

DescriptorVector describe_cloud(const DescriptorIndex& index, const PointCloud& cloud, QueryTiming* timing = nullptr);

/// Exhaustive Euclidean ranking of the index against a descriptor.
RetrievalResult rank_vector(const DescriptorIndex& index, const std::string& query_id,
                            std::span<const double> vector, std::size_t top_n);

/// Runs the index's own pipeline on the cloud and ranks the database.
RetrievalResult query(const DescriptorIndex& index, const PointCloud& cloud, std::size_t top_n,
                      QueryTiming* timing = nullptr);

/// Describes why `requested` differs from the index configuration, or
/// nullopt when they agree.
std::optional<std::string> fingerprint_mismatch(const DescriptorIndex& index, const PipelineConfig& requested);

// ---------------------------------------------------------------------------
// Evaluation

/// Query id -> positive database ids.
using GroundTruth = std::map<std::string, std::set<std::string>>;

/// Reads "query_id,positive_id" rows; an optional header row is skipped.
GroundTruth load_ground_truth(const std::filesystem::path& path);

/// Throws DataError listing ids that the index does not contain.
void validate_ground_truth(const GroundTruth& gt, const DescriptorIndex& index);

/// Percentage of results whose top-n ids include a positive.
double recall_at_n(std::span<const RetrievalResult> results, const GroundTruth& gt, std::size_t n);

/// max(1, ceil(index_size / 100)).
std::size_t top_percent_n(std::size_t index_size);

double recall_top_percent(std::span<const RetrievalResult> results, const GroundTruth& gt);

// ---------------------------------------------------------------------------
// Persistence of the index

enum class IndexFormatProblem { malformed, version, truncated, checksum };

class IndexFormatError : public DataError {
 public:
  IndexFormatError(IndexFormatProblem problem, const std::string& what) : DataError(what), problem_(problem) {}
  IndexFormatProblem problem() const noexcept { return problem_; }

 private:
  IndexFormatProblem problem_;
};

std::string serialize_index(const DescriptorIndex& index);
DescriptorIndex parse_index(std::string_view text, const std::string& source = "<memory>");

void save_index(const DescriptorIndex& index, const std::filesystem::path& path);
DescriptorIndex load_index(const std::filesystem::path& path);

}  // namespace tdacloud
