#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "harqlink/channel.hpp"

namespace harqlink {

enum class SensingMode {
    kStatistical,  // sensing outcome drawn from the analytic probabilities
    kPhysical,     // energy detector run on generated baseband samples
};

struct SimConfig {
    uint64_t frames = 2000000;  // total frames; rounded down to a multiple of batches
    uint64_t seed = 1;
    int batches = 200;  // independent replications, each restarted from an empty link
    SensingMode mode = SensingMode::kStatistical;
    std::vector<double> theta_grid;  // QoS exponents for the service-rate estimate
    int workers = 0;                 // 0 = hardware concurrency; result-invariant
};

struct EffCapEstimate {
    double theta = 0.0;
    double estimate_bcu = 0.0;
    double ci_lo_bcu = 0.0;  // 95% jackknife interval
    double ci_hi_bcu = 0.0;
    uint64_t window_frames = 0;  // averaging window actually used
    int windows = 0;
    bool window_reduced = false;  // true when theta*n forced a shorter window
};

struct SimReport {
    uint64_t frames = 0;
    uint64_t batch_frames = 0;
    int batches = 0;
    uint64_t seed = 0;
    SensingMode mode = SensingMode::kStatistical;
    std::string kernel_variant;

    uint64_t packets_delivered = 0;
    uint64_t packets_lost = 0;
    std::vector<uint64_t> attempt_visits;  // frames spent with m prior failures
    std::vector<uint64_t> attempt_fails;   // of those, attempts that failed
    uint64_t busy_frames = 0;
    uint64_t idle_frames = 0;
    uint64_t detections = 0;
    uint64_t false_alarms = 0;

    std::vector<double> p_hat;  // per-attempt conditional failure estimates
    std::vector<double> p_se;
    std::vector<double> pi_hat;  // occupancy of each attempt state
    std::vector<double> pi_se;
    double p_lost_hat = 0.0;
    double p_lost_se = 0.0;
    double p_fa_hat = 0.0;
    double p_fa_se = 0.0;
    double p_det_hat = 0.0;
    double p_det_se = 0.0;
    double service_rate_bcu_hat = 0.0;
    double service_rate_bcu_se = 0.0;
    double goodput_bcu_hat = 0.0;
    double goodput_bcu_se = 0.0;
    std::vector<EffCapEstimate> effcap;
};

// Frame-level Monte Carlo of the link. Every batch is a pure function of
// (params, seed, batch id), so reports are identical for any worker count.
SimReport simulate(const SystemParams& sp, const SimConfig& cfg);

}  // namespace harqlink
