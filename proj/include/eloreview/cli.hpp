#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eloreview/domain.hpp"

namespace eloreview {

// Everything a run needs beyond the experiment config itself: pool
// preparation settings and an optional persona directory. Parsed from the
// key-value config file; command-line flags override afterwards.
struct CliConfig {
    ExperimentConfig experiment;
    double pool_max_variance;  // +inf disables the filter
    std::vector<double> pool_interval_edges;
    std::optional<int> pool_sample_n;
    std::optional<std::string> personas_dir;

    CliConfig();
};

CliConfig parse_config_file(const std::filesystem::path& path);

// Full command-line entry point, in-process so tests can drive it.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.
int run_cli(const std::vector<std::string>& args);

}  // namespace eloreview
