#include "harqlink/rng.hpp"

#include <cmath>

namespace harqlink {

kernels::PhiloxKey key_from_seed(uint64_t seed) {
    kernels::PhiloxKey key;
    key.k0 = static_cast<uint32_t>(seed);
    key.k1 = static_cast<uint32_t>(seed >> 32);
    return key;
}

kernels::PhiloxCtr make_ctr(uint32_t frame, RngStream stream, uint32_t batch, uint32_t sub_block) {
    kernels::PhiloxCtr ctr;
    ctr.c0 = frame;
    ctr.c1 = static_cast<uint32_t>(stream);
    ctr.c2 = batch;
    ctr.c3 = sub_block;
    return ctr;
}

void fill_frame_blocks(uint64_t seed, uint32_t batch, RngStream stream, uint32_t sub_block,
                       uint32_t frame0, size_t count, std::vector<uint32_t>& out) {
    out.resize(4 * count);
    kernels::philox_fill(make_ctr(frame0, stream, batch, sub_block), key_from_seed(seed), count,
                         out.data());
}

double exp_from_unit(double u, double mean) {
    return -mean * std::log1p(-u);
}

std::pair<double, double> normal_pair_from_units(double u1, double u2) {
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace harqlink
