#include "harqlink/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace harqlink {

namespace {

void require(bool ok, const char* field, const char* what) {
    if (!ok) {
        throw std::invalid_argument(std::string(field) + ": " + what);
    }
}

}  // namespace

double power_from_db(double db, double noise_var) {
    return noise_var * std::pow(10.0, db / 10.0);
}

long long sensing_samples(const SystemParams& sp) {
    double nb = sp.sensing_s * sp.bandwidth_hz;
    long long r = std::llround(nb);
    require(r >= 1 && std::abs(nb - static_cast<double>(r)) <= 1e-6 * std::max(1.0, nb),
            "sensing_duration_s", "sensing sample count N*B must be a positive integer");
    return r;
}

double symbols_per_frame(const SystemParams& sp) {
    return (sp.frame_s - sp.sensing_s) * sp.bandwidth_hz;
}

void validate_params(const SystemParams& sp) {
    require(std::isfinite(sp.frame_s) && sp.frame_s > 0.0, "frame_duration_s", "must be positive");
    require(std::isfinite(sp.sensing_s) && sp.sensing_s > 0.0, "sensing_duration_s",
            "must be positive");
    require(sp.sensing_s < sp.frame_s, "sensing_duration_s", "must be less than frame_duration_s");
    require(std::isfinite(sp.bandwidth_hz) && sp.bandwidth_hz > 0.0, "bandwidth_hz",
            "must be positive");
    require(sp.activity_prob >= 0.0 && sp.activity_prob <= 1.0, "primary_activity_prob",
            "must be in [0, 1]");
    require(std::isfinite(sp.noise_var) && sp.noise_var > 0.0, "noise_variance",
            "must be positive");
    require(std::isfinite(sp.signal_var) && sp.signal_var > 0.0, "primary_signal_variance",
            "must be positive");
    require(std::isfinite(sp.fading_mean) && sp.fading_mean > 0.0, "fading_mean_power",
            "must be positive");
    require(std::isfinite(sp.power_busy) && sp.power_busy > 0.0, "power_busy_db",
            "busy-state power must be positive");
    require(std::isfinite(sp.power_idle) && sp.power_idle >= sp.power_busy, "power_idle_db",
            "idle-state power must be at least the busy-state power");
    require(std::isfinite(sp.threshold) && sp.threshold >= 0.0, "detection_threshold",
            "must be nonnegative");
    require(sp.packet_bits >= 0, "packet_bits", "must be nonnegative");
    require(sp.max_attempts >= 1, "deadline_frames", "must be at least 1");
    require(std::isfinite(sp.qos_exponent) && sp.qos_exponent >= 0.0, "qos_exponent_per_bit",
            "must be nonnegative");
    sensing_samples(sp);
}

double false_alarm_prob(const SystemParams& sp) {
    double nb = static_cast<double>(sensing_samples(sp));
    return reg_upper_gamma(nb * sp.threshold / sp.noise_var, nb);
}

double detection_prob(const SystemParams& sp) {
    double nb = static_cast<double>(sensing_samples(sp));
    return reg_upper_gamma(nb * sp.threshold / (sp.noise_var + sp.signal_var), nb);
}

double decode_threshold(const SystemParams& sp) {
    return std::exp2(static_cast<double>(sp.packet_bits) / symbols_per_frame(sp)) - 1.0;
}

ScenarioProfile scenario_profile(const SystemParams& sp) {
    ScenarioProfile pr;
    pr.p_fa = false_alarm_prob(sp);
    pr.p_det = detection_prob(sp);
    double rho = sp.activity_prob;
    pr.prob = {rho * pr.p_det, rho * (1.0 - pr.p_det), (1.0 - rho) * pr.p_fa,
               (1.0 - rho) * (1.0 - pr.p_fa)};
    double denom_busy = sp.noise_var + sp.signal_var;
    pr.snr = {sp.power_busy / denom_busy, sp.power_idle / denom_busy,
              sp.power_busy / sp.noise_var, sp.power_idle / sp.noise_var};
    for (int i = 0; i < 4; ++i) {
        pr.gain_scale[i] = pr.snr[i] * sp.fading_mean;
    }
    pr.kappa = decode_threshold(sp);
    return pr;
}

}  // namespace harqlink
