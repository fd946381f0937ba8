#include "cli/run_config.hpp"

#include <tdacloud/text_format.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

namespace tdacloud::cli {
namespace {

bool parse_bool(std::string_view v, const std::string& where) {
  std::string s(v);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw ArgumentError(where + ": expected a boolean, got '" + std::string(v) + "'");
}

std::size_t parse_count(std::string_view v, const std::string& where) {
  unsigned long long n = 0;
  if (!parse_uint(v, n)) {
    throw ArgumentError(where + ": expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

ConfigOverrides parse_config_text(const std::string& text, const std::string& source) {
  ConfigOverrides out;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string_view line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ArgumentError(where + ": expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      if (key == "backend") out.backend = parse_backend(value);
      else if (key == "budget" || key == "b") out.budget = parse_count(value, where);
      else if (key == "seed") out.seed = parse_count(value, where);
      else if (key == "downsample") out.downsample = parse_count(value, where);
      else if (key == "normalize") out.normalize = parse_bool(value, where);
      else if (key == "threads") out.threads = parse_thread_count(std::string(value), where);
      else throw ArgumentError(where + ": unknown key '" + key + "'");
    } catch (const ArgumentError& e) {
      const std::string msg = e.what();
      if (msg.rfind(where, 0) == 0) throw;
      throw ArgumentError(where + ": " + msg);
    }
  }
  return out;
}

ConfigOverrides load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

std::size_t parse_thread_count(const std::string& text, const std::string& what) {
  const std::size_t n = parse_count(text, what);
  if (n == 0) throw ArgumentError(what + ": thread count must be at least 1");
  return n;
}

RunConfig resolve_config(const ConfigOverrides& flags, const ConfigOverrides& file,
                         const std::map<std::string, std::string>& env) {
  RunConfig rc;
  auto pick = [](const auto& a, const auto& b, auto fallback) {
    if (a) return *a;
    if (b) return *b;
    return fallback;
  };
  rc.pipeline.backend = pick(flags.backend, file.backend, rc.pipeline.backend);
  rc.pipeline.budget = pick(flags.budget, file.budget, rc.pipeline.budget);
  rc.pipeline.seed = pick(flags.seed, file.seed, rc.pipeline.seed);
  rc.pipeline.downsample = pick(flags.downsample, file.downsample, rc.pipeline.downsample);
  rc.pipeline.normalize = pick(flags.normalize, file.normalize, rc.pipeline.normalize);
  rc.pipeline_explicit = flags.any_pipeline() || file.any_pipeline();

  std::size_t fallback = std::max(1u, std::thread::hardware_concurrency());
  if (auto it = env.find("TDACLOUD_THREADS"); it != env.end() && !it->second.empty()) {
    fallback = parse_thread_count(it->second, "TDACLOUD_THREADS");
  }
  rc.threads = pick(flags.threads, file.threads, fallback);
  rc.pipeline.validate();
  return rc;
}

}  // namespace tdacloud::cli
