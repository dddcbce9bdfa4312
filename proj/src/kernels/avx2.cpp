#include "harqlink/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define HARQLINK_HAVE_AVX2_BUILD 1
#endif

namespace harqlink::kernels::avx2 {

#ifdef HARQLINK_HAVE_AVX2_BUILD

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

// One Philox round on two blocks held in AoS order [c0 c1 c2 c3 | c0' c1' c2' c3'].
// Viewed as 64-bit lanes the even 32-bit elements are exactly c0 and c2, so a
// single mul_epu32 against [kMul0, kMul1] yields both products per block.
inline __m256i round_pair(__m256i x, __m256i keyvec) {
    const __m256i mults = _mm256_set_epi32(0, static_cast<int>(kMul1), 0, static_cast<int>(kMul0),
                                           0, static_cast<int>(kMul1), 0, static_cast<int>(kMul0));
    const __m256i mask02 = _mm256_set_epi32(0, -1, 0, -1, 0, -1, 0, -1);
    __m256i prod = _mm256_mul_epu32(x, mults);
    // prod elements per 128-bit lane: [lo0, hi0, lo1, hi1]; the new block is
    // [hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0].
    __m256i prod_rev = _mm256_shuffle_epi32(prod, _MM_SHUFFLE(0, 1, 2, 3));
    __m256i ctr_sel = _mm256_and_si256(_mm256_shuffle_epi32(x, _MM_SHUFFLE(0, 3, 0, 1)), mask02);
    return _mm256_xor_si256(_mm256_xor_si256(prod_rev, ctr_sel), keyvec);
}

}  // namespace

void philox_fill(PhiloxCtr ctr, PhiloxKey key, size_t nblocks, uint32_t* out) {
    __m256i keyvec[10];
    uint32_t k0 = key.k0;
    uint32_t k1 = key.k1;
    for (int r = 0; r < 10; ++r) {
        keyvec[r] = _mm256_set_epi32(0, static_cast<int>(k1), 0, static_cast<int>(k0),
                                     0, static_cast<int>(k1), 0, static_cast<int>(k0));
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    const __m256i step = _mm256_set_epi32(0, 0, 0, 2, 0, 0, 0, 2);
    uint32_t c0b = ctr.c0 + 1u;
    __m256i ctrvec = _mm256_set_epi32(static_cast<int>(ctr.c3), static_cast<int>(ctr.c2),
                                      static_cast<int>(ctr.c1), static_cast<int>(c0b),
                                      static_cast<int>(ctr.c3), static_cast<int>(ctr.c2),
                                      static_cast<int>(ctr.c1), static_cast<int>(ctr.c0));
    size_t pairs = nblocks / 2;
    for (size_t i = 0; i < pairs; ++i) {
        __m256i x = ctrvec;
        for (int r = 0; r < 10; ++r) {
            x = round_pair(x, keyvec[r]);
        }
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + 8 * i), x);
        ctrvec = _mm256_add_epi32(ctrvec, step);
    }
    if (nblocks % 2 != 0) {
        PhiloxCtr tail = ctr;
        tail.c0 = ctr.c0 + static_cast<uint32_t>(nblocks - 1);
        scalar::philox_fill(tail, key, 1, out + 4 * (nblocks - 1));
    }
}

double sum_squares(const double* v, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x = _mm256_loadu_pd(v + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(x, x));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (; i < n; ++i) {
        lane[i % 4] += v[i] * v[i];
    }
    return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

#else

void philox_fill(PhiloxCtr ctr, PhiloxKey key, size_t nblocks, uint32_t* out) {
    scalar::philox_fill(ctr, key, nblocks, out);
}

double sum_squares(const double* v, size_t n) {
    return scalar::sum_squares(v, n);
}

#endif

}  // namespace harqlink::kernels::avx2
