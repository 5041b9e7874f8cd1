#include "crowdhub/kernels.hpp"

#include <bit>

namespace crowdhub::kernels {
namespace {

void threshold_mask(double lead, const double* via, const double* tail, double base, double limit, std::size_t n,
                    Word* out) {
    const std::size_t words = words_for(n);
    for (std::size_t w = 0; w < words; ++w) out[w] = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const double detour = ((lead + via[r]) + tail[r]) - base;
        if (detour <= limit) out[r / kWordBits] |= Word{1} << (r % kWordBits);
    }
}

void or_into(Word* dst, const Word* src, std::size_t words) {
    for (std::size_t k = 0; k < words; ++k) dst[k] |= src[k];
}

double masked_sum(const Word* bits, const double* values, std::size_t n) {
    double sum = 0.0;
    const std::size_t words = words_for(n);
    for (std::size_t w = 0; w < words; ++w) {
        Word m = bits[w];
        while (m) {
            const int b = std::countr_zero(m);
            sum += values[w * kWordBits + static_cast<std::size_t>(b)];
            m &= m - 1;
        }
    }
    return sum;
}

void masked_add(const Word* bits, double weight, double* acc, std::size_t n) {
    const std::size_t words = words_for(n);
    for (std::size_t w = 0; w < words; ++w) {
        Word m = bits[w];
        while (m) {
            const int b = std::countr_zero(m);
            acc[w * kWordBits + static_cast<std::size_t>(b)] += weight;
            m &= m - 1;
        }
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::Scalar, "scalar", threshold_mask, or_into, masked_sum, masked_add};
    return table;
}

}  // namespace crowdhub::kernels
