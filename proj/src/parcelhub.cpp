#include "crowdhub/parcelhub.hpp"

#include <algorithm>
#include <cmath>

#include "crowdhub/error.hpp"

namespace crowdhub {

namespace {

std::vector<RegionId> sorted_hubs(const Instance& inst, std::span<const RegionId> open_hubs) {
    std::vector<RegionId> hubs(open_hubs.begin(), open_hubs.end());
    std::sort(hubs.begin(), hubs.end());
    hubs.erase(std::unique(hubs.begin(), hubs.end()), hubs.end());
    if (hubs.empty()) throw ValidationError("at least one hub must be open");
    for (RegionId h : hubs)
        if (h < 0 || static_cast<std::size_t>(h) >= inst.n_regions)
            throw ValidationError("hub region " + std::to_string(h) + " out of range");
    return hubs;
}

void check_demand(const Instance& inst, std::span<const int> demand) {
    if (demand.size() != inst.n_regions) throw ValidationError("dimension mismatch: realized demand");
    for (int d : demand)
        if (d < 0) throw ValidationError("realized demand must be non-negative");
}

std::size_t nearest(const Instance& inst, const std::vector<RegionId>& hubs, std::size_t r) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < hubs.size(); ++k)
        if (inst.dist(r, static_cast<std::size_t>(hubs[k])) < inst.dist(r, static_cast<std::size_t>(hubs[best])))
            best = k;
    return best;
}

}  // namespace

int HubAssignment::row_sum(std::size_t r) const {
    int total = 0;
    for (std::size_t k = 0; k < hubs.size(); ++k) total += (*this)(r, k);
    return total;
}

HubAssignment assign_nearest(const Instance& inst, std::span<const RegionId> open_hubs,
                             std::span<const int> demand) {
    check_demand(inst, demand);
    HubAssignment a{sorted_hubs(inst, open_hubs), {}};
    a.counts.assign(inst.n_regions * a.hubs.size(), 0);
    for (std::size_t r = 0; r < inst.n_regions; ++r) a(r, nearest(inst, a.hubs, r)) = demand[r];
    return a;
}

HubAssignment assign_ca(const Instance& inst, std::span<const RegionId> open_hubs, std::span<const int> demand,
                        const std::vector<std::vector<double>>& z_per_hub, double gamma) {
    check_demand(inst, demand);
    if (!(gamma >= 0.0)) throw ValidationError("gamma must be non-negative");
    HubAssignment a{sorted_hubs(inst, open_hubs), {}};
    if (z_per_hub.size() != a.hubs.size()) throw ValidationError("dimension mismatch: z_per_hub rows vs open hubs");
    for (const auto& z : z_per_hub)
        if (z.size() != inst.n_regions) throw ValidationError("dimension mismatch: z_per_hub columns");
    a.counts.assign(inst.n_regions * a.hubs.size(), 0);

    std::vector<double> weights(a.hubs.size());
    for (std::size_t r = 0; r < inst.n_regions; ++r) {
        if (demand[r] == 0) continue;
        // Work relative to the row maximum so that large gamma cannot overflow.
        double top = 0.0;
        for (const auto& z : z_per_hub) top = std::max(top, z[r]);
        if (!(top > 0.0)) {
            a(r, nearest(inst, a.hubs, r)) = demand[r];
            continue;
        }
        for (std::size_t k = 0; k < a.hubs.size(); ++k) {
            const double z = z_per_hub[k][r];
            weights[k] = z > 0.0 ? std::exp(gamma * std::log(z / top)) : 0.0;
        }
        const auto split = apportion(weights, demand[r]);
        for (std::size_t k = 0; k < a.hubs.size(); ++k) a(r, k) = static_cast<int>(split[k]);
    }
    return a;
}

std::vector<std::vector<double>> single_hub_z(const Instance& inst, const FeasibilityTensor& tensor,
                                              std::span<const HubSlot> open, const CaOptions& opts) {
    // One representative slot per distinct region, in region order.
    std::vector<std::pair<RegionId, HubSlot>> reps;
    for (HubSlot s : open) {
        if (s >= inst.hub_candidates.size()) throw ValidationError("hub slot " + std::to_string(s) + " out of range");
        reps.emplace_back(inst.hub_candidates[s], s);
    }
    std::sort(reps.begin(), reps.end());
    reps.erase(std::unique(reps.begin(), reps.end(), [](auto& x, auto& y) { return x.first == y.first; }), reps.end());
    std::vector<std::vector<double>> out;
    out.reserve(reps.size());
    for (const auto& [region, slot] : reps) out.push_back(estimate(inst, single_hub(tensor, slot), opts).z);
    return out;
}

}  // namespace crowdhub
