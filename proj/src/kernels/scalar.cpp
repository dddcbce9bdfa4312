#include "harqlink/kernels.hpp"

namespace harqlink::kernels::scalar {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(uint32_t x[4], uint32_t k0, uint32_t k1) {
    uint64_t p0 = static_cast<uint64_t>(kMul0) * x[0];
    uint64_t p1 = static_cast<uint64_t>(kMul1) * x[2];
    uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    uint32_t lo0 = static_cast<uint32_t>(p0);
    uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    uint32_t lo1 = static_cast<uint32_t>(p1);
    uint32_t y0 = hi1 ^ x[1] ^ k0;
    uint32_t y2 = hi0 ^ x[3] ^ k1;
    x[0] = y0;
    x[1] = lo1;
    x[2] = y2;
    x[3] = lo0;
}

}  // namespace

void philox_fill(PhiloxCtr ctr, PhiloxKey key, size_t nblocks, uint32_t* out) {
    for (size_t i = 0; i < nblocks; ++i) {
        uint32_t x[4] = {static_cast<uint32_t>(ctr.c0 + i), ctr.c1, ctr.c2, ctr.c3};
        uint32_t k0 = key.k0;
        uint32_t k1 = key.k1;
        round_once(x, k0, k1);
        for (int r = 1; r < 10; ++r) {
            k0 += kWeyl0;
            k1 += kWeyl1;
            round_once(x, k0, k1);
        }
        out[4 * i + 0] = x[0];
        out[4 * i + 1] = x[1];
        out[4 * i + 2] = x[2];
        out[4 * i + 3] = x[3];
    }
}

double sum_squares(const double* v, size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (size_t i = 0; i < n; ++i) {
        acc[i % 4] += v[i] * v[i];
    }
    return ((acc[0] + acc[1]) + acc[2]) + acc[3];
}

}  // namespace harqlink::kernels::scalar
