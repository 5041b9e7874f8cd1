#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crowdhub/ca.hpp"
#include "crowdhub/instance.hpp"

namespace crowdhub {

// Parcels per (destination region, open hub). Hubs are region ids, sorted.
struct HubAssignment {
    std::vector<RegionId> hubs;
    std::vector<int> counts;  // row-major, n_regions x hubs.size()

    int operator()(std::size_t r, std::size_t k) const { return counts[r * hubs.size() + k]; }
    int& operator()(std::size_t r, std::size_t k) { return counts[r * hubs.size() + k]; }
    int row_sum(std::size_t r) const;
};

// All demand of a region goes to the closest open hub; ties to the lowest
// region id.
HubAssignment assign_nearest(const Instance& inst, std::span<const RegionId> open_hubs,
                             std::span<const int> demand);

// Demand of region r split over hubs in proportion to z_per_hub[k][r]^gamma,
// integerized by largest remainder. Hubs with z = 0 get no share (also at
// gamma = 0). Rows where every hub has z = 0 go to the nearest hub.
// `z_per_hub[k]` belongs to `open_hubs[k]` after sorting by region id.
HubAssignment assign_ca(const Instance& inst, std::span<const RegionId> open_hubs, std::span<const int> demand,
                        const std::vector<std::vector<double>>& z_per_hub, double gamma = 1.0);

// Single-hub CA estimate for each distinct open hub region, in sorted order.
std::vector<std::vector<double>> single_hub_z(const Instance& inst, const FeasibilityTensor& tensor,
                                              std::span<const HubSlot> open, const CaOptions& opts = {});

}  // namespace crowdhub
