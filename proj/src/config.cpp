#include "harqlink/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace harqlink {

namespace {

const char* const kSystemKeys[] = {
    "frame_duration_s",     "sensing_duration_s",      "bandwidth_hz",
    "primary_activity_prob", "noise_variance",          "primary_signal_variance",
    "fading_mean_power",     "power_busy_db",           "power_idle_db",
    "detection_threshold",   "packet_bits",             "deadline_frames",
    "qos_exponent_per_bit",
};

bool is_system_key(const std::string& key) {
    for (const char* k : kSystemKeys) {
        if (key == k) {
            return true;
        }
    }
    return false;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

double num_at(const ordered_json& obj, const std::string& path, const std::string& key) {
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        fail(path + "." + key, "expected a number");
    }
    return v.get<double>();
}

long long int_at(const ordered_json& obj, const std::string& path, const std::string& key) {
    double v = num_at(obj, path, key);
    if (!(std::isfinite(v)) || v != std::floor(v) || std::abs(v) > 9e15) {
        fail(path + "." + key, "expected an integer");
    }
    return static_cast<long long>(v);
}

void check_integer_valued(const std::string& key, double value, const std::string& path) {
    if (!std::isfinite(value) || value != std::floor(value) || std::abs(value) > 9e15) {
        fail(path, key + " must be an integer");
    }
}

SweepSpec::Axis parse_axis(const std::string& name, const std::string& path) {
    if (name == "packet_bits") {
        return SweepSpec::Axis::kPacketBits;
    }
    if (name == "theta") {
        return SweepSpec::Axis::kTheta;
    }
    if (name == "lambda") {
        return SweepSpec::Axis::kLambda;
    }
    if (name == "deadline") {
        return SweepSpec::Axis::kDeadline;
    }
    fail(path, "unknown axis '" + name + "' (expected packet_bits, theta, lambda or deadline)");
}

void reject_unknown_keys(const ordered_json& obj, const std::string& path,
                         const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (known.find(it.key()) == known.end()) {
            fail(path + "." + it.key(), "unknown key");
        }
    }
}

}  // namespace

const char* axis_name(SweepSpec::Axis axis) {
    switch (axis) {
        case SweepSpec::Axis::kPacketBits:
            return "packet_bits";
        case SweepSpec::Axis::kTheta:
            return "theta";
        case SweepSpec::Axis::kLambda:
            return "lambda";
        case SweepSpec::Axis::kDeadline:
            return "deadline";
    }
    return "unknown";
}

void apply_system_value(std::map<std::string, double>& system, const std::string& key,
                        double value, const std::string& path) {
    if (!is_system_key(key)) {
        fail(path, "unknown key");
    }
    if (!std::isfinite(value)) {
        fail(path, "expected a finite number");
    }
    if (key == "packet_bits" || key == "deadline_frames") {
        check_integer_valued(key, value, path);
    }
    system[key] = value;
}

SystemParams params_from_system(const std::map<std::string, double>& system) {
    auto at = [&](const char* key) { return system.at(key); };
    SystemParams sp;
    sp.frame_s = at("frame_duration_s");
    sp.sensing_s = at("sensing_duration_s");
    sp.bandwidth_hz = at("bandwidth_hz");
    sp.activity_prob = at("primary_activity_prob");
    sp.noise_var = at("noise_variance");
    sp.signal_var = at("primary_signal_variance");
    sp.fading_mean = at("fading_mean_power");
    sp.power_busy = power_from_db(at("power_busy_db"), sp.noise_var);
    sp.power_idle = power_from_db(at("power_idle_db"), sp.noise_var);
    sp.threshold = at("detection_threshold");
    sp.packet_bits = static_cast<long long>(at("packet_bits"));
    sp.max_attempts = static_cast<int>(at("deadline_frames"));
    sp.qos_exponent = at("qos_exponent_per_bit");
    try {
        validate_params(sp);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("system.") + e.what());
    }
    return sp;
}

Config config_from_json(const ordered_json& root) {
    if (!root.is_object()) {
        fail("config", "expected a JSON object");
    }
    reject_unknown_keys(root, "config", {"system", "sweeps", "sim"});
    if (!root.contains("system") || !root.at("system").is_object()) {
        fail("config.system", "required object is missing");
    }

    Config cfg;
    const ordered_json& sys = root.at("system");
    reject_unknown_keys(sys, "system",
                        std::set<std::string>(std::begin(kSystemKeys), std::end(kSystemKeys)));
    for (const char* key : kSystemKeys) {
        std::string k = key;
        if (!sys.contains(k)) {
            if (k == "qos_exponent_per_bit") {
                cfg.system[k] = 0.0;
                continue;
            }
            fail("system." + k, "required key is missing");
        }
        apply_system_value(cfg.system, k, num_at(sys, "system", k), "system." + k);
    }
    cfg.params = params_from_system(cfg.system);

    if (root.contains("sweeps")) {
        const ordered_json& sweeps = root.at("sweeps");
        if (!sweeps.is_array()) {
            fail("sweeps", "expected an array");
        }
        std::set<std::string> tags;
        for (size_t i = 0; i < sweeps.size(); ++i) {
            std::string path = "sweeps[" + std::to_string(i) + "]";
            const ordered_json& sj = sweeps.at(i);
            if (!sj.is_object()) {
                fail(path, "expected an object");
            }
            reject_unknown_keys(sj, path, {"axis", "values", "tag", "overrides"});
            if (!sj.contains("axis") || !sj.at("axis").is_string()) {
                fail(path + ".axis", "required string is missing");
            }
            SweepSpec spec;
            spec.axis = parse_axis(sj.at("axis").get<std::string>(), path + ".axis");
            if (!sj.contains("values") || !sj.at("values").is_array() || sj.at("values").empty()) {
                fail(path + ".values", "required non-empty array is missing");
            }
            for (size_t v = 0; v < sj.at("values").size(); ++v) {
                const auto& vj = sj.at("values").at(v);
                std::string vpath = path + ".values[" + std::to_string(v) + "]";
                if (!vj.is_number()) {
                    fail(vpath, "expected a number");
                }
                double val = vj.get<double>();
                if (!std::isfinite(val)) {
                    fail(vpath, "expected a finite number");
                }
                if (spec.axis == SweepSpec::Axis::kPacketBits ||
                    spec.axis == SweepSpec::Axis::kDeadline) {
                    check_integer_valued("value", val, vpath);
                }
                if (spec.axis == SweepSpec::Axis::kDeadline && val < 1) {
                    fail(vpath, "deadline values must be at least 1");
                }
                if (val < 0) {
                    fail(vpath, "value must be nonnegative");
                }
                spec.values.push_back(val);
            }
            if (sj.contains("tag")) {
                if (!sj.at("tag").is_string()) {
                    fail(path + ".tag", "expected a string");
                }
                spec.tag = sj.at("tag").get<std::string>();
            } else {
                spec.tag = axis_name(spec.axis);
            }
            if (!tags.insert(spec.tag).second) {
                fail(path + ".tag", "duplicate sweep tag '" + spec.tag + "'");
            }
            if (sj.contains("overrides")) {
                const ordered_json& ov = sj.at("overrides");
                if (!ov.is_object()) {
                    fail(path + ".overrides", "expected an object");
                }
                for (auto it = ov.begin(); it != ov.end(); ++it) {
                    std::string opath = path + ".overrides." + it.key();
                    if (!it.value().is_number()) {
                        fail(opath, "expected a number");
                    }
                    std::map<std::string, double> probe = cfg.system;
                    apply_system_value(probe, it.key(), it.value().get<double>(), opath);
                    spec.overrides[it.key()] = it.value().get<double>();
                }
                // the merged parameters must themselves be valid
                std::map<std::string, double> merged = cfg.system;
                for (const auto& [k, v] : spec.overrides) {
                    merged[k] = v;
                }
                try {
                    params_from_system(merged);
                } catch (const ConfigError& e) {
                    fail(path + ".overrides", e.what());
                }
            }
            cfg.sweeps.push_back(std::move(spec));
        }
    }

    if (root.contains("sim")) {
        const ordered_json& sim = root.at("sim");
        if (!sim.is_object()) {
            fail("sim", "expected an object");
        }
        reject_unknown_keys(sim, "sim",
                            {"frames", "seed", "batches", "sensing_mode", "theta_grid", "workers"});
        if (sim.contains("frames")) {
            long long v = int_at(sim, "sim", "frames");
            if (v < 1) {
                fail("sim.frames", "must be positive");
            }
            cfg.sim.frames = static_cast<uint64_t>(v);
        }
        if (sim.contains("seed")) {
            long long v = int_at(sim, "sim", "seed");
            if (v < 0) {
                fail("sim.seed", "must be nonnegative");
            }
            cfg.sim.seed = static_cast<uint64_t>(v);
        }
        if (sim.contains("batches")) {
            long long v = int_at(sim, "sim", "batches");
            if (v < 1 || v > 1000000) {
                fail("sim.batches", "must be in [1, 1000000]");
            }
            cfg.sim.batches = static_cast<int>(v);
        }
        if (sim.contains("sensing_mode")) {
            if (!sim.at("sensing_mode").is_string()) {
                fail("sim.sensing_mode", "expected a string");
            }
            std::string mode = sim.at("sensing_mode").get<std::string>();
            if (mode == "statistical") {
                cfg.sim.mode = SensingMode::kStatistical;
            } else if (mode == "physical") {
                cfg.sim.mode = SensingMode::kPhysical;
            } else {
                fail("sim.sensing_mode", "expected 'statistical' or 'physical'");
            }
        }
        if (sim.contains("theta_grid")) {
            const ordered_json& grid = sim.at("theta_grid");
            if (!grid.is_array()) {
                fail("sim.theta_grid", "expected an array");
            }
            for (size_t i = 0; i < grid.size(); ++i) {
                const auto& tj = grid.at(i);
                std::string tpath = "sim.theta_grid[" + std::to_string(i) + "]";
                if (!tj.is_number()) {
                    fail(tpath, "expected a number");
                }
                double th = tj.get<double>();
                if (!(th > 0.0) || !std::isfinite(th)) {
                    fail(tpath, "must be positive");
                }
                cfg.sim.theta_grid.push_back(th);
            }
        }
        if (sim.contains("workers")) {
            long long v = int_at(sim, "sim", "workers");
            if (v < 0 || v > 4096) {
                fail("sim.workers", "must be in [0, 4096]");
            }
            cfg.sim.workers = static_cast<int>(v);
        }
    }

    ordered_json res;
    ordered_json sysj;
    for (const char* key : kSystemKeys) {
        sysj[key] = cfg.system.at(key);
    }
    res["system"] = std::move(sysj);
    ordered_json sweepsj = ordered_json::array();
    for (const SweepSpec& spec : cfg.sweeps) {
        ordered_json sj;
        sj["axis"] = axis_name(spec.axis);
        sj["tag"] = spec.tag;
        sj["values"] = spec.values;
        ordered_json ov = ordered_json::object();
        for (const auto& [k, v] : spec.overrides) {
            ov[k] = v;
        }
        sj["overrides"] = std::move(ov);
        sweepsj.push_back(std::move(sj));
    }
    res["sweeps"] = std::move(sweepsj);
    ordered_json simj;
    simj["frames"] = cfg.sim.frames;
    simj["seed"] = cfg.sim.seed;
    simj["batches"] = cfg.sim.batches;
    simj["sensing_mode"] = cfg.sim.mode == SensingMode::kPhysical ? "physical" : "statistical";
    simj["theta_grid"] = cfg.sim.theta_grid;
    // the worker count steers scheduling only, never a number in the report,
    // so it is left out of the echo to keep equal runs byte-identical
    res["sim"] = std::move(simj);
    cfg.resolved = std::move(res);
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    ordered_json root;
    try {
        root = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_json(root);
}

}  // namespace harqlink
