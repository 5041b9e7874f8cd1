#include "crowdhub/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <array>
#include <bit>

#define CROWDHUB_AVX2 __attribute__((target("avx2")))

namespace crowdhub::kernels {
namespace {

// Lane masks for every 4-bit pattern: lane k is all-ones when bit k is set.
struct LaneMasks {
    alignas(32) std::array<std::array<std::int64_t, 4>, 16> lanes{};
    constexpr LaneMasks() {
        for (int p = 0; p < 16; ++p)
            for (int k = 0; k < 4; ++k) lanes[p][k] = (p >> k) & 1 ? -1 : 0;
    }
};
constexpr LaneMasks kLaneMasks{};

CROWDHUB_AVX2 inline __m256d lane_mask(unsigned pattern) {
    return _mm256_castsi256_pd(
        _mm256_load_si256(reinterpret_cast<const __m256i*>(kLaneMasks.lanes[pattern].data())));
}

inline unsigned nibble(const Word* bits, std::size_t r) {
    return static_cast<unsigned>((bits[r / kWordBits] >> (r % kWordBits)) & 0xF);
}

CROWDHUB_AVX2 void threshold_mask(double lead, const double* via, const double* tail, double base, double limit,
                                  std::size_t n, Word* out) {
    const std::size_t words = words_for(n);
    for (std::size_t w = 0; w < words; ++w) out[w] = 0;
    const __m256d vlead = _mm256_set1_pd(lead);
    const __m256d vbase = _mm256_set1_pd(base);
    const __m256d vlimit = _mm256_set1_pd(limit);
    std::size_t r = 0;
    for (; r + 4 <= n; r += 4) {
        __m256d d = _mm256_add_pd(vlead, _mm256_loadu_pd(via + r));
        d = _mm256_add_pd(d, _mm256_loadu_pd(tail + r));
        d = _mm256_sub_pd(d, vbase);
        const int m = _mm256_movemask_pd(_mm256_cmp_pd(d, vlimit, _CMP_LE_OQ));
        // r is a multiple of 4, so the nibble never straddles a word.
        out[r / kWordBits] |= static_cast<Word>(m) << (r % kWordBits);
    }
    for (; r < n; ++r) {
        const double detour = ((lead + via[r]) + tail[r]) - base;
        if (detour <= limit) out[r / kWordBits] |= Word{1} << (r % kWordBits);
    }
}

CROWDHUB_AVX2 void or_into(Word* dst, const Word* src, std::size_t words) {
    std::size_t k = 0;
    for (; k + 4 <= words; k += 4) {
        const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + k));
        const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + k));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + k), _mm256_or_si256(a, b));
    }
    for (; k < words; ++k) dst[k] |= src[k];
}

CROWDHUB_AVX2 double masked_sum(const Word* bits, const double* values, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t r = 0;
    for (; r + 4 <= n; r += 4) {
        if (r % kWordBits == 0 && bits[r / kWordBits] == 0) {
            r += kWordBits - 4;
            continue;
        }
        const unsigned p = nibble(bits, r);
        if (p == 0) continue;
        acc = _mm256_add_pd(acc, _mm256_and_pd(lane_mask(p), _mm256_loadu_pd(values + r)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; r < n; ++r)
        if ((bits[r / kWordBits] >> (r % kWordBits)) & 1) sum += values[r];
    return sum;
}

CROWDHUB_AVX2 void masked_add(const Word* bits, double weight, double* acc, std::size_t n) {
    const __m256d vw = _mm256_set1_pd(weight);
    std::size_t r = 0;
    for (; r + 4 <= n; r += 4) {
        if (r % kWordBits == 0 && bits[r / kWordBits] == 0) {
            r += kWordBits - 4;
            continue;
        }
        const unsigned p = nibble(bits, r);
        if (p == 0) continue;
        const __m256d cur = _mm256_loadu_pd(acc + r);
        _mm256_storeu_pd(acc + r, _mm256_add_pd(cur, _mm256_and_pd(lane_mask(p), vw)));
    }
    for (; r < n; ++r)
        if ((bits[r / kWordBits] >> (r % kWordBits)) & 1) acc[r] += weight;
}

}  // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable table{Isa::Avx2, "avx2", threshold_mask, or_into, masked_sum, masked_add};
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &table : nullptr;
}

}  // namespace crowdhub::kernels

#else

namespace crowdhub::kernels {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace crowdhub::kernels

#endif
