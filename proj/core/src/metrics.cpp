#include <fstream>

#include "tdacloud/descriptor_index.hpp"
#include "tdacloud/text_format.hpp"

namespace tdacloud {

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ground truth '" + path.string() + "'");
  GroundTruth gt;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto comma = body.find(',');
    if (comma == std::string_view::npos || body.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError(path.string(), line_no, "expected 'query_id,positive_id'");
    }
    const auto q = trim(body.substr(0, comma));
    const auto p = trim(body.substr(comma + 1));
    if (line_no == 1 && q == "query_id" && p == "positive_id") continue;
    if (q.empty() || p.empty()) throw ParseError(path.string(), line_no, "empty id");
    gt[std::string(q)].insert(std::string(p));
  }
  return gt;
}

void validate_ground_truth(const GroundTruth& gt, const DescriptorIndex& index) {
  std::set<std::string> ids;
  for (const auto& e : index.entries) ids.insert(e.id);
  std::string missing;
  for (const auto& [query_id, positives] : gt) {
    for (const auto& p : positives) {
      if (!ids.count(p)) missing += (missing.empty() ? "" : ", ") + p;
    }
  }
  if (!missing.empty()) {
    throw DataError("ground truth references ids missing from the index: " + missing);
  }
}

double recall_at_n(std::span<const RetrievalResult> results, const GroundTruth& gt, std::size_t n) {
  if (n == 0) throw ArgumentError("recall@N needs N >= 1");
  if (results.empty()) throw ArgumentError("recall needs at least one query result");
  std::string missing;
  for (const auto& r : results) {
    if (!gt.count(r.query_id)) missing += (missing.empty() ? "" : ", ") + r.query_id;
  }
  if (!missing.empty()) throw DataError("queries missing from ground truth: " + missing);

  std::size_t hits = 0;
  for (const auto& r : results) {
    const std::size_t depth = std::min(n, r.index_size);
    if (r.ranked.size() < depth) {
      throw ArgumentError("result for '" + r.query_id + "' holds " + std::to_string(r.ranked.size()) +
                          " matches; recall@" + std::to_string(n) + " needs " + std::to_string(depth));
    }
    const auto& positives = gt.at(r.query_id);
    for (std::size_t k = 0; k < depth; ++k) {
      if (positives.count(r.ranked[k].id)) {
        ++hits;
        break;
      }
    }
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(results.size());
}

std::size_t top_percent_n(std::size_t index_size) { return std::max<std::size_t>(1, (index_size + 99) / 100); }

double recall_top_percent(std::span<const RetrievalResult> results, const GroundTruth& gt) {
  if (results.empty()) throw ArgumentError("recall needs at least one query result");
  return recall_at_n(results, gt, top_percent_n(results.front().index_size));
}

}  // namespace tdacloud
