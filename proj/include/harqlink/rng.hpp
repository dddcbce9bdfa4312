#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "harqlink/kernels.hpp"

// Counter-based random streams for the frame simulator. Every draw is a pure
// function of (seed, batch, stream, frame, sub-block), so results do not
// depend on scheduling or worker count.
namespace harqlink {

enum class RngStream : uint32_t {
    kActivity = 0,
    kSensingDecision = 1,
    kFading = 2,
    kSensingSamples = 3,
};

kernels::PhiloxKey key_from_seed(uint64_t seed);

// Counter layout: c0 = frame index within the batch, c1 = stream id,
// c2 = batch id, c3 = sub-block index within the frame.
kernels::PhiloxCtr make_ctr(uint32_t frame, RngStream stream, uint32_t batch, uint32_t sub_block);

// Fills one 16-byte block per frame for frames [frame0, frame0 + count).
void fill_frame_blocks(uint64_t seed, uint32_t batch, RngStream stream, uint32_t sub_block,
                       uint32_t frame0, size_t count, std::vector<uint32_t>& out);

inline uint64_t block_u64(const uint32_t* block, int half) {
    return static_cast<uint64_t>(block[2 * half]) |
           (static_cast<uint64_t>(block[2 * half + 1]) << 32);
}

// Maps to [0, 1) with 53 random bits.
inline double to_unit_double(uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Exponential with the given mean; u in [0, 1).
double exp_from_unit(double u, double mean);

// Standard normal pair from two uniforms (polar form is avoided so the
// draw count per sample is fixed).
std::pair<double, double> normal_pair_from_units(double u1, double u2);

}  // namespace harqlink
