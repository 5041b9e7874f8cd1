#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crowdhub/instance.hpp"
#include "crowdhub/kernels.hpp"

namespace crowdhub {

using kernels::Word;

// Extra distance a courier travelling i -> j covers when picking up at h and
// dropping off at r. Negative only when the distances violate the triangle
// inequality; no clamping is applied.
inline double detour(RegionId i, RegionId j, RegionId h, RegionId r, const SquareMatrix& dist) {
    return ((dist(i, h) + dist(h, r)) + dist(r, j)) - dist(i, j);
}

// Candidate hubs are addressed by their slot in Instance::hub_candidates.
using HubSlot = std::size_t;
using HubSet = std::vector<HubSlot>;  // sorted, distinct

struct OpenHubMask {
    std::vector<char> open;

    static OpenHubMask none(std::size_t n_candidates) { return {std::vector<char>(n_candidates, 0)}; }
    static OpenHubMask of(std::size_t n_candidates, std::span<const HubSlot> slots);

    std::size_t count() const;
    HubSet slots() const;
};

// Region ids of the given slots, sorted and de-duplicated.
std::vector<RegionId> hub_regions(const Instance& inst, std::span<const HubSlot> slots);

// Feasibility over (i, j, r) with the hub dimension already reduced.
// Row (i, j) is a bitset over destination regions r.
class RegionBitsets {
public:
    RegionBitsets() = default;
    explicit RegionBitsets(std::size_t n) : n_(n), words_(kernels::words_for(n)), data_(n * n * words_, 0) {}

    std::size_t n() const { return n_; }
    std::size_t words_per_row() const { return words_; }

    std::span<const Word> row(std::size_t i, std::size_t j) const { return {data_.data() + (i * n_ + j) * words_, words_}; }
    std::span<Word> row(std::size_t i, std::size_t j) { return {data_.data() + (i * n_ + j) * words_, words_}; }
    std::span<const Word> words() const { return data_; }
    std::span<Word> words() { return data_; }

    bool at(std::size_t i, std::size_t j, std::size_t r) const {
        return (row(i, j)[r / kernels::kWordBits] >> (r % kernels::kWordBits)) & 1;
    }

    bool operator==(const RegionBitsets&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t words_ = 0;
    std::vector<Word> data_;
};

// e[h][i][j][r] = detour(i, j, hub_h, r) <= tau, stored hub-major so that a
// hub's slice is one contiguous block of n*n rows.
class FeasibilityTensor {
public:
    static FeasibilityTensor build(const Instance& inst, double tau);
    static FeasibilityTensor build(const Instance& inst, double tau, const kernels::KernelTable& k);

    std::size_t n() const { return n_; }
    std::size_t n_hubs() const { return n_hubs_; }
    std::size_t words_per_row() const { return words_; }
    double tau() const { return tau_; }

    std::span<const Word> slice(HubSlot h) const {
        const std::size_t len = n_ * n_ * words_;
        return {data_.data() + h * len, len};
    }
    std::span<const Word> row(HubSlot h, std::size_t i, std::size_t j) const {
        return {data_.data() + ((h * n_ + i) * n_ + j) * words_, words_};
    }
    bool at(std::size_t i, std::size_t j, HubSlot h, std::size_t r) const {
        return (row(h, i, j)[r / kernels::kWordBits] >> (r % kernels::kWordBits)) & 1;
    }

    bool operator==(const FeasibilityTensor&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t n_hubs_ = 0;
    std::size_t words_ = 0;
    double tau_ = 0.0;
    std::vector<Word> data_;
};

// OR over open hubs. Throws ValidationError when no hub is open.
RegionBitsets aggregate(const FeasibilityTensor& tensor, const OpenHubMask& open);
RegionBitsets aggregate(const FeasibilityTensor& tensor, const OpenHubMask& open, const kernels::KernelTable& k);

// The slice of a single hub, as if it were the only one open.
RegionBitsets single_hub(const FeasibilityTensor& tensor, HubSlot h);

}  // namespace crowdhub
