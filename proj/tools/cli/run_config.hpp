#pragma once

#include <tdacloud/descriptor_index.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace tdacloud::cli {

// Values given explicitly on the command line or in a config file. Unset
// fields fall through to the next source.
struct ConfigOverrides {
  std::optional<Backend> backend;
  std::optional<std::size_t> budget;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> downsample;
  std::optional<bool> normalize;
  std::optional<std::size_t> threads;

  bool any_pipeline() const { return backend || budget || seed || downsample || normalize; }
};

struct RunConfig {
  PipelineConfig pipeline;
  std::size_t threads = 1;
  // True when any pipeline value came from a flag or the config file.
  bool pipeline_explicit = false;
};

// Parses "key=value" lines; '#' starts a comment. Unknown keys and malformed
// values raise ArgumentError naming the file and line.
ConfigOverrides parse_config_text(const std::string& text, const std::string& source);
ConfigOverrides load_config_file(const std::filesystem::path& path);

// flags > config file > TDACLOUD_THREADS (threads only) > defaults
RunConfig resolve_config(const ConfigOverrides& flags, const ConfigOverrides& file,
                         const std::map<std::string, std::string>& env);

std::size_t parse_thread_count(const std::string& text, const std::string& what);

}  // namespace tdacloud::cli
