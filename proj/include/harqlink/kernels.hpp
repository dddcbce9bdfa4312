#pragma once

#include <cstddef>
#include <cstdint>

// Hot simulator kernels with scalar reference and AVX2 implementations.
// The active variant is chosen once at startup (CPU detection, overridable
// via HARQLINK_KERNEL=scalar|avx2 or set_variant). Both variants are
// bit-identical by construction and equivalence-tested.
namespace harqlink::kernels {

struct PhiloxKey {
    uint32_t k0 = 0;
    uint32_t k1 = 0;
};

struct PhiloxCtr {
    uint32_t c0 = 0;
    uint32_t c1 = 0;
    uint32_t c2 = 0;
    uint32_t c3 = 0;
};

// Generates nblocks Philox4x32-10 blocks with counter c0 = ctr.c0 + i
// (i = 0..nblocks-1, wrapping mod 2^32) and c1..c3 fixed. Writes 4 words
// per block to out.
using PhiloxFillFn = void (*)(PhiloxCtr ctr, PhiloxKey key, size_t nblocks, uint32_t* out);

// Sum of squares with a fixed 4-lane accumulation pattern
// (acc[i % 4] += v[i]^2, reduced as ((acc0+acc1)+acc2)+acc3).
using SumSquaresFn = double (*)(const double* v, size_t n);

namespace scalar {
void philox_fill(PhiloxCtr ctr, PhiloxKey key, size_t nblocks, uint32_t* out);
double sum_squares(const double* v, size_t n);
}  // namespace scalar

namespace avx2 {
void philox_fill(PhiloxCtr ctr, PhiloxKey key, size_t nblocks, uint32_t* out);
double sum_squares(const double* v, size_t n);
}  // namespace avx2

bool avx2_supported();

// Active entry points (resolved at startup).
extern PhiloxFillFn philox_fill;
extern SumSquaresFn sum_squares;

const char* active_variant();

// Forces a variant ("scalar" or "avx2"). Throws if the variant is unknown
// or unsupported on this CPU. Intended for tests and benchmarking.
void set_variant(const char* name);

}  // namespace harqlink::kernels
