#pragma once

#include <optional>
#include <string>

#include "harqlink/config.hpp"

namespace harqlink {

// Command-line adjustments applied on top of the loaded configuration.
struct CliOptions {
    std::string out_path;           // empty = stdout
    std::string variant = "renewal";  // highlighted service-recursion variant
    std::optional<uint64_t> seed;
    std::optional<uint64_t> frames;
    std::optional<SensingMode> mode;
    std::optional<int> workers;
    bool corrupt_p = false;  // negative control for the validate root check
};

int cmd_analyze(const Config& cfg, const CliOptions& opt);
int cmd_sweep(const Config& cfg, const CliOptions& opt);
int cmd_simulate(const Config& cfg, const CliOptions& opt);
int cmd_validate(const Config& cfg, const CliOptions& opt);

}  // namespace harqlink
