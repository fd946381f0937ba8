#pragma once

#include <tdacloud/point_cloud.hpp>

#include <cstddef>
#include <exception>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tdacloud::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitArgument = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitContract = 4;

/// Runs one command line (without the program name). `env` supplies
/// environment variables such as TDACLOUD_THREADS.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env = {});

int exit_code_for(const std::exception& e) noexcept;

/// "1,5,10" or "1..25", or a mix of both.
std::vector<std::size_t> parse_n_list(std::string_view text);

/// Tokens such as "kind=rotate" "degrees=90" "axis=0,0,1".
PerturbationSpec parse_perturbation_tokens(const std::vector<std::string>& tokens);

/// Shortest round-trip decimal that always shows a fractional part.
std::string format_recall(double value);

}  // namespace tdacloud::cli
