#pragma once

// Data-parallel inner loops used by the feasibility tensor and the CA
// estimator. Every kernel has a scalar reference implementation; vector
// variants are selected at runtime and must agree with it (bit-exactly for
// the mask and OR kernels, to rounding for the reductions).

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace crowdhub::kernels {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;
    const char* name;

    // out bit r = ((lead + via[r]) + tail[r]) - base <= limit, for r < n.
    // Writes words_for(n) words; unused high bits are cleared.
    void (*threshold_mask)(double lead, const double* via, const double* tail, double base, double limit,
                           std::size_t n, Word* out);

    // dst[k] |= src[k]
    void (*or_into)(Word* dst, const Word* src, std::size_t words);

    // sum of values[r] over set bits r < n
    double (*masked_sum)(const Word* bits, const double* values, std::size_t n);

    // acc[r] += weight for every set bit r < n
    void (*masked_add)(const Word* bits, double weight, double* acc, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the binary or the CPU lacks the instruction set.
const KernelTable* avx2_kernels();

// Best table for this CPU, unless overridden by CROWDHUB_ISA=scalar|avx2 in
// the environment or by force_isa().
const KernelTable& active();

// Pins the active table. Returns false (leaving the selection unchanged) when
// the requested ISA is unavailable.
bool force_isa(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace crowdhub::kernels
