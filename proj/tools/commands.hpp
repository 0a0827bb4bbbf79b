#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "lrsi/config.hpp"

namespace lrsi::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericError = 3, kVerifyFailed = 4 };

// Values given on the command line; they take precedence over config keys
// of the same name.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out;
};

// Reads the config file (if any) and merges the overrides.
json load_config(const std::string& path, const Overrides& ov);

int cmd_forward(const json& cfg, std::ostream& log);
int cmd_synth(const json& cfg, std::ostream& log);
int cmd_reconstruct(const json& cfg, std::ostream& log);
// Suites: flat, reciprocity, boundary, farfield, stationary_phase, all.
int cmd_verify(const json& cfg, const std::string& suite, std::ostream& report);

// Runs a command body and maps exceptions to exit codes.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace lrsi::cli
