#pragma once

#include <array>

#include "harqlink/numerics.hpp"

namespace harqlink {

// Physical and protocol parameters for one link configuration. Powers are
// per-symbol linear values (see power_from_db).
struct SystemParams {
    double frame_s = 0.0;        // frame duration T
    double sensing_s = 0.0;      // sensing duration N
    double bandwidth_hz = 0.0;   // bandwidth B
    double activity_prob = 0.0;  // primary user busy probability
    double noise_var = 0.0;      // sigma_w^2
    double signal_var = 0.0;     // sigma_s^2, primary signal at the sensor
    double fading_mean = 0.0;    // sigma_h^2, mean of the exponential channel gain
    double power_busy = 0.0;     // transmit power when the band is sensed busy
    double power_idle = 0.0;     // transmit power when the band is sensed idle
    double threshold = 0.0;      // energy detector threshold
    long long packet_bits = 0;   // n
    int max_attempts = 1;        // retransmission budget M (attempts per packet)
    double qos_exponent = 0.0;   // theta, per bit
};

// Converts a dB power setting (relative to the per-symbol noise floor) to
// the linear per-symbol power used in SystemParams.
double power_from_db(double db, double noise_var);

// Throws std::invalid_argument naming the offending field. Requires the
// sensing sample count N*B to be a positive integer (within 1e-6 relative).
void validate_params(const SystemParams& sp);

// Number of sensing samples N*B, validated and rounded to the exact integer.
long long sensing_samples(const SystemParams& sp);

// Data symbols per frame, (T - N) * B.
double symbols_per_frame(const SystemParams& sp);

// Post-sensing state of one frame. Order: busy/detected, busy/missed,
// idle/false-alarm, idle/clear.
struct ScenarioProfile {
    double p_fa = 0.0;                  // false alarm probability
    double p_det = 0.0;                 // detection probability
    std::array<double, 4> prob{};       // scenario probabilities, sum to 1
    std::array<double, 4> snr{};        // per-scenario mean SNR factor
    std::array<double, 4> gain_scale{}; // snr * fading_mean, exponential scales
    double kappa = 0.0;                 // per-frame SNR threshold for decoding
};

double false_alarm_prob(const SystemParams& sp);
double detection_prob(const SystemParams& sp);

// Decode threshold kappa = 2^(n / ((T-N)B)) - 1.
double decode_threshold(const SystemParams& sp);

ScenarioProfile scenario_profile(const SystemParams& sp);

}  // namespace harqlink
