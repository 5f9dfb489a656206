#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace plap::cli {

enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kConfigError = 2 };

/// Entry point of the `plap` executable. argv[0] is the program name.
int run(int argc, const char* const* argv);

/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args);

/// 64-bit FNV-1a, used for the config hash stamped on every output.
std::uint64_t fnv1a(std::string_view bytes);

const char* version();

}  // namespace plap::cli
