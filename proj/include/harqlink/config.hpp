#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "harqlink/channel.hpp"
#include "harqlink/sim.hpp"

namespace harqlink {

using ordered_json = nlohmann::ordered_json;

struct SweepSpec {
    enum class Axis { kPacketBits, kTheta, kLambda, kDeadline };
    Axis axis = Axis::kPacketBits;
    std::vector<double> values;
    std::string tag;
    // System-section keys applied on top of the base parameters before the
    // axis value. Kept ordered so the echoed configuration is stable.
    std::map<std::string, double> overrides;
};

const char* axis_name(SweepSpec::Axis axis);

struct Config {
    // Raw system-section values. Kept alongside params so sweeps can apply
    // overrides (including dB powers, which depend on the noise floor) and
    // rebuild consistently.
    std::map<std::string, double> system;
    SystemParams params;
    std::vector<SweepSpec> sweeps;
    SimConfig sim;
    ordered_json resolved;  // normalized configuration with defaults filled in
};

// Configuration problems carry the JSON path of the offending key.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

Config config_from_json(const ordered_json& root);
Config load_config(const std::string& path);

// Builds and validates SystemParams from raw system-section values.
SystemParams params_from_system(const std::map<std::string, double>& system);

// Applies one system-section key (as used by sweep overrides and axes),
// enforcing the key's own constraints. path names the source for errors.
void apply_system_value(std::map<std::string, double>& system, const std::string& key,
                        double value, const std::string& path);

}  // namespace harqlink
