#include "harqlink/report.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "harqlink/version.hpp"

namespace harqlink {

ordered_json tool_json() {
    ordered_json j;
    j["name"] = kToolName;
    j["version"] = kToolVersion;
    return j;
}

ordered_json derived_json(const SystemParams& sp, const ScenarioProfile& pr) {
    ordered_json j;
    j["sensing_samples"] = sensing_samples(sp);
    j["symbols_per_frame"] = symbols_per_frame(sp);
    j["power_busy_linear"] = sp.power_busy;
    j["power_idle_linear"] = sp.power_idle;
    j["false_alarm_prob"] = pr.p_fa;
    j["detection_prob"] = pr.p_det;
    j["scenario_probs"] = pr.prob;
    j["scenario_snr"] = pr.snr;
    j["scenario_gain_scales"] = pr.gain_scale;
    j["decode_threshold"] = pr.kappa;
    return j;
}

ordered_json chain_json(const HarqChain& ch, const SystemParams& sp) {
    ThroughputMetrics tm = throughput_metrics(ch, sp);
    ordered_json j;
    j["attempt_fail_probs"] = ch.p;
    j["stationary"] = ch.pi;
    j["p_lost"] = ch.p_lost;
    j["service_rate_bcu"] = tm.service_rate_bcu;
    j["service_rate_bps"] = tm.service_rate_bps;
    j["goodput_bcu"] = tm.goodput_bcu;
    j["goodput_bps"] = tm.goodput_bps;
    return j;
}

ordered_json effcap_json(const EffCapResult& r) {
    ordered_json j;
    j["theta_per_bit"] = r.theta;
    j["root"] = r.chi_star;
    j["log_root"] = r.log_chi;
    j["bits_per_frame"] = r.per_frame_bits;
    j["bcu"] = r.bcu;
    j["bps"] = r.bps;
    return j;
}

ordered_json sim_report_json(const SimReport& rep) {
    ordered_json j;
    j["frames"] = rep.frames;
    j["batch_frames"] = rep.batch_frames;
    j["batches"] = rep.batches;
    j["seed"] = rep.seed;
    j["sensing_mode"] = rep.mode == SensingMode::kPhysical ? "physical" : "statistical";
    j["kernel_variant"] = rep.kernel_variant;

    ordered_json counts;
    counts["packets_delivered"] = rep.packets_delivered;
    counts["packets_lost"] = rep.packets_lost;
    counts["attempt_visits"] = rep.attempt_visits;
    counts["attempt_fails"] = rep.attempt_fails;
    counts["busy_frames"] = rep.busy_frames;
    counts["idle_frames"] = rep.idle_frames;
    counts["detections"] = rep.detections;
    counts["false_alarms"] = rep.false_alarms;
    j["counts"] = std::move(counts);

    ordered_json est;
    est["attempt_fail_probs"] = rep.p_hat;
    est["attempt_fail_se"] = rep.p_se;
    est["occupancy"] = rep.pi_hat;
    est["occupancy_se"] = rep.pi_se;
    est["p_lost"] = rep.p_lost_hat;
    est["p_lost_se"] = rep.p_lost_se;
    est["false_alarm_prob"] = rep.p_fa_hat;
    est["false_alarm_se"] = rep.p_fa_se;
    est["detection_prob"] = rep.p_det_hat;
    est["detection_se"] = rep.p_det_se;
    est["service_rate_bcu"] = rep.service_rate_bcu_hat;
    est["service_rate_bcu_se"] = rep.service_rate_bcu_se;
    est["goodput_bcu"] = rep.goodput_bcu_hat;
    est["goodput_bcu_se"] = rep.goodput_bcu_se;
    j["estimates"] = std::move(est);

    ordered_json caps = ordered_json::array();
    for (const EffCapEstimate& e : rep.effcap) {
        ordered_json c;
        c["theta_per_bit"] = e.theta;
        c["bcu"] = e.estimate_bcu;
        c["ci95_lo_bcu"] = e.ci_lo_bcu;
        c["ci95_hi_bcu"] = e.ci_hi_bcu;
        c["window_frames"] = e.window_frames;
        c["windows"] = e.windows;
        c["window_reduced"] = e.window_reduced;
        caps.push_back(std::move(c));
    }
    j["effective_capacity"] = std::move(caps);
    return j;
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string dump_report(const ordered_json& doc) {
    return doc.dump(2) + "\n";
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    out << content;
    if (!out) {
        throw std::runtime_error("failed writing output file: " + path);
    }
}

std::string tagged_path(const std::string& path, const std::string& tag) {
    size_t slash = path.find_last_of('/');
    size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + "_" + tag;
    }
    return path.substr(0, dot) + "_" + tag + path.substr(dot);
}

}  // namespace harqlink
