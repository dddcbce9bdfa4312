#pragma once

#include <cstdint>

#include "harqlink/channel.hpp"
#include "harqlink/kernels.hpp"
#include "harqlink/rng.hpp"

namespace testutil {

// Reference operating point used across the test suite: 100 us frames with a
// 20 us sensing slot over 1 MHz, unit noise and fading power, busy/idle
// transmit powers at 0/10 dB over the noise floor.
inline harqlink::SystemParams reference_params() {
    harqlink::SystemParams sp;
    sp.frame_s = 100e-6;
    sp.sensing_s = 20e-6;
    sp.bandwidth_hz = 1e6;
    sp.activity_prob = 0.1;
    sp.noise_var = 1.0;
    sp.signal_var = 1.0;
    sp.fading_mean = 1.0;
    sp.power_busy = harqlink::power_from_db(0.0, 1.0);
    sp.power_idle = harqlink::power_from_db(10.0, 1.0);
    sp.threshold = 1.4;
    sp.packet_bits = 240;
    sp.max_attempts = 4;
    sp.qos_exponent = 1e-3;
    return sp;
}

// Deterministic uniform in [0, 1) for property tests.
class TestRng {
  public:
    explicit TestRng(uint64_t seed) : key_{static_cast<uint32_t>(seed),
                                          static_cast<uint32_t>(seed >> 32)} {}

    double next() {
        uint32_t block[4];
        harqlink::kernels::PhiloxCtr ctr;
        ctr.c0 = static_cast<uint32_t>(counter_);
        ctr.c1 = static_cast<uint32_t>(counter_ >> 32);
        ++counter_;
        harqlink::kernels::scalar::philox_fill(ctr, key_, 1, block);
        return harqlink::to_unit_double(harqlink::block_u64(block, 0));
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }

  private:
    harqlink::kernels::PhiloxKey key_;
    uint64_t counter_ = 0;
};

}  // namespace testutil
