#include <array>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "tdacloud/descriptor_index.hpp"
#include "tdacloud/text_format.hpp"

namespace tdacloud {
namespace {

constexpr std::string_view kMagic = "TDACLOUD-INDEX v1";
constexpr std::string_view kMagicPrefix = "TDACLOUD-INDEX v";

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016" PRIx64, v);
  return buf.data();
}

// Everything except the checksum line itself is covered.
std::string checksum_of(std::string_view header_without_checksum, std::string_view body) {
  return "fnv1a64:" + hex64(fnv1a(body, fnv1a(header_without_checksum)));
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string serialize_index(const DescriptorIndex& index) {
  const auto& cfg = index.config;
  std::string header;
  header += std::string(kMagic) + '\n';
  header += "backend=" + std::string(to_string(cfg.backend)) + '\n';
  header += "convention=" + std::string(to_string(index.convention)) + '\n';
  header += "b=" + std::to_string(cfg.budget) + '\n';
  header += "seed=" + std::to_string(cfg.seed) + '\n';
  header += "downsample=" + std::to_string(cfg.downsample) + '\n';
  header += "normalize=" + std::string(cfg.normalize ? "1" : "0") + '\n';
  header += "entry_count=" + std::to_string(index.entries.size()) + '\n';
  header += "model_k=" + std::to_string(index.model.k()) + '\n';

  std::string body;
  for (std::size_t i = 0; i < index.model.k(); ++i) {
    body += format_double17(index.model.centers[i].birth) + ',' + format_double17(index.model.centers[i].death) +
            ',' + format_double17(index.model.scales[i]) + '\n';
  }
  for (const auto& e : index.entries) {
    body += e.id + ',' + std::to_string(e.selected_dim);
    for (double v : e.vector) body += ',' + format_double17(v);
    body += '\n';
  }
  return header + "checksum=" + checksum_of(header, body) + "\n\n" + body;
}

DescriptorIndex parse_index(std::string_view text, const std::string& source) {
  auto fail = [&](IndexFormatProblem problem, const std::string& what) -> IndexFormatError {
    return IndexFormatError(problem, source + ": " + what);
  };

  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw fail(IndexFormatProblem::truncated, "empty index file");
  if (lines[0] != kMagic) {
    if (lines[0].substr(0, kMagicPrefix.size()) == kMagicPrefix) {
      throw fail(IndexFormatProblem::version, "unsupported index version '" + std::string(lines[0]) + "'");
    }
    throw fail(IndexFormatProblem::malformed, "not a tdacloud index (bad magic line)");
  }

  std::map<std::string, std::string, std::less<>> header;
  std::string header_text = std::string(lines[0]) + '\n';
  std::size_t i = 1;
  for (; i < lines.size() && !lines[i].empty(); ++i) {
    const auto eq = lines[i].find('=');
    if (eq == std::string_view::npos) {
      throw fail(IndexFormatProblem::malformed, "header line " + std::to_string(i + 1) + " is not key=value");
    }
    const std::string key(lines[i].substr(0, eq));
    header[key] = std::string(lines[i].substr(eq + 1));
    if (key != "checksum") header_text += std::string(lines[i]) + '\n';
  }
  if (i == lines.size()) throw fail(IndexFormatProblem::truncated, "header is not terminated by a blank line");
  const std::size_t body_start = i + 1;

  for (const char* key : {"backend", "convention", "b", "seed", "downsample", "normalize", "entry_count",
                          "model_k", "checksum"}) {
    if (!header.count(key)) throw fail(IndexFormatProblem::malformed, std::string("missing header key '") + key + "'");
  }
  auto number = [&](const char* key) {
    unsigned long long v = 0;
    if (!parse_uint(header.at(key), v)) {
      throw fail(IndexFormatProblem::malformed, std::string("header '") + key + "' is not an integer");
    }
    return v;
  };
  const auto entry_count = static_cast<std::size_t>(number("entry_count"));
  const auto model_k = static_cast<std::size_t>(number("model_k"));

  if (lines.size() - body_start < model_k + entry_count) {
    throw fail(IndexFormatProblem::truncated, "expected " + std::to_string(model_k + entry_count) + " body rows, found " +
                                                  std::to_string(lines.size() - body_start));
  }
  if (lines.size() - body_start > model_k + entry_count) {
    throw fail(IndexFormatProblem::malformed, "unexpected rows after the last entry");
  }
  std::string body;
  for (std::size_t k = body_start; k < lines.size(); ++k) {
    body += std::string(lines[k]) + '\n';
  }
  if (header.at("checksum") != checksum_of(header_text, body)) {
    throw fail(IndexFormatProblem::checksum, "checksum mismatch; the index file is corrupted");
  }

  DescriptorIndex index;
  try {
    index.config.backend = parse_backend(header.at("backend"));
    index.convention = parse_convention(header.at("convention"));
  } catch (const ArgumentError& e) {
    throw fail(IndexFormatProblem::malformed, e.what());
  }
  index.config.budget = static_cast<std::size_t>(number("b"));
  index.config.seed = number("seed");
  index.config.downsample = static_cast<std::size_t>(number("downsample"));
  const auto& norm_flag = header.at("normalize");
  if (norm_flag != "0" && norm_flag != "1") throw fail(IndexFormatProblem::malformed, "normalize must be 0 or 1");
  index.config.normalize = norm_flag == "1";
  index.model.budget = index.config.budget;
  index.model.seed = index.config.seed;

  auto real = [&](std::string_view tok, std::size_t line_no) {
    double v = 0.0;
    if (!parse_double(tok, v)) {
      throw fail(IndexFormatProblem::malformed, "bad number '" + std::string(tok) + "' on line " + std::to_string(line_no));
    }
    return v;
  };
  for (std::size_t k = 0; k < model_k; ++k) {
    const std::size_t ln = body_start + k;
    const auto fields = split(lines[ln], ',');
    if (fields.size() != 3) throw fail(IndexFormatProblem::malformed, "model row " + std::to_string(ln + 1) + " needs 3 fields");
    index.model.centers.push_back({real(fields[0], ln + 1), real(fields[1], ln + 1)});
    index.model.scales.push_back(real(fields[2], ln + 1));
  }
  for (std::size_t k = 0; k < entry_count; ++k) {
    const std::size_t ln = body_start + model_k + k;
    const auto fields = split(lines[ln], ',');
    if (fields.size() != 2 + index.config.budget) {
      throw fail(IndexFormatProblem::malformed, "entry row " + std::to_string(ln + 1) + " needs " +
                                                    std::to_string(2 + index.config.budget) + " fields");
    }
    IndexEntry e;
    e.id = std::string(fields[0]);
    unsigned long long dim = 0;
    if (!parse_uint(fields[1], dim) || dim > 2) {
      throw fail(IndexFormatProblem::malformed, "bad selected dimension on line " + std::to_string(ln + 1));
    }
    e.selected_dim = static_cast<int>(dim);
    for (std::size_t f = 2; f < fields.size(); ++f) e.vector.push_back(real(fields[f], ln + 1));
    index.entries.push_back(std::move(e));
  }
  return index;
}

void save_index(const DescriptorIndex& index, const std::filesystem::path& path) {
  const std::string text = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write index '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("failed writing index '" + path.string() + "'");
}

DescriptorIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open index '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_index(ss.str(), path.string());
}

}  // namespace tdacloud
