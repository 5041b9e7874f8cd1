#include "crowdhub/feasibility.hpp"

#include <algorithm>

#include "crowdhub/error.hpp"

namespace crowdhub {

OpenHubMask OpenHubMask::of(std::size_t n_candidates, std::span<const HubSlot> slots) {
    OpenHubMask m = none(n_candidates);
    for (HubSlot h : slots) {
        if (h >= n_candidates) throw ValidationError("hub slot " + std::to_string(h) + " out of range");
        m.open[h] = 1;
    }
    return m;
}

std::size_t OpenHubMask::count() const { return static_cast<std::size_t>(std::count(open.begin(), open.end(), 1)); }

HubSet OpenHubMask::slots() const {
    HubSet s;
    for (std::size_t h = 0; h < open.size(); ++h)
        if (open[h]) s.push_back(h);
    return s;
}

std::vector<RegionId> hub_regions(const Instance& inst, std::span<const HubSlot> slots) {
    std::vector<RegionId> out;
    out.reserve(slots.size());
    for (HubSlot h : slots) out.push_back(inst.hub_candidates.at(h));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

FeasibilityTensor FeasibilityTensor::build(const Instance& inst, double tau) {
    return build(inst, tau, kernels::active());
}

FeasibilityTensor FeasibilityTensor::build(const Instance& inst, double tau, const kernels::KernelTable& k) {
    if (tau < 0.0) throw ValidationError("tau: must be >= 0");
    FeasibilityTensor t;
    t.n_ = inst.n_regions;
    t.n_hubs_ = inst.hub_candidates.size();
    t.words_ = kernels::words_for(t.n_);
    t.tau_ = tau;
    t.data_.assign(t.n_hubs_ * t.n_ * t.n_ * t.words_, 0);

    // Column j of dist, contiguous: t_{r j} over r.
    const SquareMatrix to_dest = inst.dist.transposed();
    const std::size_t n = t.n_;
    for (HubSlot h = 0; h < t.n_hubs_; ++h) {
        const auto hub = static_cast<std::size_t>(inst.hub_candidates[h]);
        const double* from_hub = inst.dist.row(hub).data();
        for (std::size_t i = 0; i < n; ++i) {
            const double lead = inst.dist(i, hub);
            for (std::size_t j = 0; j < n; ++j) {
                Word* out = t.data_.data() + ((h * n + i) * n + j) * t.words_;
                k.threshold_mask(lead, from_hub, to_dest.row(j).data(), inst.dist(i, j), tau, n, out);
            }
        }
    }
    return t;
}

RegionBitsets aggregate(const FeasibilityTensor& tensor, const OpenHubMask& open) {
    return aggregate(tensor, open, kernels::active());
}

RegionBitsets aggregate(const FeasibilityTensor& tensor, const OpenHubMask& open, const kernels::KernelTable& k) {
    if (open.open.size() != tensor.n_hubs())
        throw ValidationError("open hub mask has " + std::to_string(open.open.size()) + " entries, expected " +
                              std::to_string(tensor.n_hubs()));
    if (open.count() == 0) throw ValidationError("no open hub");
    RegionBitsets out(tensor.n());
    auto dst = out.words();
    for (HubSlot h = 0; h < tensor.n_hubs(); ++h) {
        if (!open.open[h]) continue;
        const auto src = tensor.slice(h);
        k.or_into(dst.data(), src.data(), src.size());
    }
    return out;
}

RegionBitsets single_hub(const FeasibilityTensor& tensor, HubSlot h) {
    RegionBitsets out(tensor.n());
    const auto src = tensor.slice(h);
    std::copy(src.begin(), src.end(), out.words().begin());
    return out;
}

}  // namespace crowdhub
