#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "crowdhub/feasibility.hpp"
#include "crowdhub/instance.hpp"

namespace crowdhub {

using ParcelId = int;
using CourierId = int;

enum class ParcelState { Waiting, Reserved, PickedUp, Delivered, Unserved };

struct Parcel {
    ParcelId id = 0;
    RegionId hub = 0;
    RegionId dest = 0;
    ParcelState state = ParcelState::Waiting;
};

struct Courier {
    CourierId id = 0;
    RegionId origin = 0;
    RegionId dest = 0;
    double depart_time = 0.0;  // seconds
};

struct MatchDecision {
    CourierId courier = 0;
    std::optional<ParcelId> parcel;
    double detour = 0.0;  // meters; 0 when unmatched

    bool operator==(const MatchDecision&) const = default;
};

// Extra distance for `courier` to carry `parcel` from its hub to its destination.
inline double parcel_detour(const Parcel& parcel, const Courier& courier, const SquareMatrix& dist) {
    return detour(courier.origin, courier.dest, parcel.hub, parcel.dest, dist);
}

inline bool feasible(const Parcel& parcel, const Courier& courier, const SquareMatrix& dist, double tau) {
    return parcel_detour(parcel, courier, dist) <= tau;
}

// Left vertices 0..n_left-1 with adjacency lists into 0..n_right-1.
struct BipartiteGraph {
    std::size_t n_left = 0;
    std::size_t n_right = 0;
    std::vector<std::size_t> offsets{0};  // CSR row starts, size n_left + 1
    std::vector<int> targets;

    void add_row(std::span<const int> neighbours) {
        targets.insert(targets.end(), neighbours.begin(), neighbours.end());
        offsets.push_back(targets.size());
        ++n_left;
    }
    std::span<const int> neighbours(std::size_t u) const {
        return {targets.data() + offsets[u], offsets[u + 1] - offsets[u]};
    }
};

// Maximum-cardinality matching by Hopcroft-Karp. Returns, per left vertex, the
// matched right vertex or -1. Deterministic for a given adjacency order.
std::vector<int> max_bipartite_matching(const BipartiteGraph& g);

// Offline optimum with every courier known: one decision per matched pair,
// ordered by courier id.
std::vector<MatchDecision> match_static(std::span<const Parcel> parcels, std::span<const Courier> couriers,
                                        const SquareMatrix& dist, double tau);

// Optimum restricted to a batch of couriers and the parcels still waiting.
std::vector<MatchDecision> match_batch(std::span<const Parcel> waiting, std::span<const Courier> batch,
                                       const SquareMatrix& dist, double tau);

// Feasible waiting parcel with the smallest detour; ties by lowest parcel id.
MatchDecision match_min_detour(std::span<const Parcel> waiting, const Courier& courier, const SquareMatrix& dist,
                               double tau);

// Feasible waiting parcel whose destination has the lowest expected service
// ratio ca_z[r] / demand[r]; ties by smaller detour, then lowest id.
// Destinations without expected demand rank last.
MatchDecision match_ca_priority(std::span<const Parcel> waiting, const Courier& courier, const SquareMatrix& dist,
                                double tau, std::span<const double> ca_z, std::span<const double> demand);

// Service ratio used by the CA-priority rule.
std::vector<double> service_ratios(std::span<const double> ca_z, std::span<const double> demand);

// Offline optimum when stage 2 is decided together with stage 3: a parcel
// can be stored at whichever open hub suits its courier, so courier s can
// take any parcel whose destination r has reach(origin_s, dest_s, r) set.
// Solved as a max flow courier -> region -> sink with region capacities
// parcels_per_region[r]; returns the number of parcels served.
std::size_t match_joint_static(std::span<const int> parcels_per_region, std::span<const Courier> couriers,
                               const RegionBitsets& reach);

// Waiting parcels grouped by (hub, destination). Parcels in a group are
// interchangeable for every courier, so the dynamic rules only need to look
// at the lowest waiting id of each group.
class ParcelPool {
public:
    // `parcels` is indexed by id and must outlive the pool.
    ParcelPool(std::span<Parcel> parcels, std::span<const RegionId> open_hubs, std::size_t n_regions);

    std::size_t waiting() const { return waiting_; }
    void reserve(ParcelId id);

    MatchDecision min_detour(const Courier& courier, const SquareMatrix& dist, double tau);
    MatchDecision ca_priority(const Courier& courier, const SquareMatrix& dist, double tau,
                              std::span<const double> ratios);

    // Batch optimum. Only the lowest `batch.size()` waiting ids of each group
    // can be needed, so the graph is built from those.
    std::vector<MatchDecision> batch(std::span<const Courier> batch, const SquareMatrix& dist, double tau);

private:
    struct Group {
        RegionId hub;
        RegionId dest;
        std::vector<ParcelId> ids;  // ascending
        std::size_t cursor = 0;     // ids before the cursor are no longer waiting
        std::size_t waiting = 0;
    };

    std::optional<ParcelId> front(Group& g);

    std::span<Parcel> parcels_;
    std::vector<Group> groups_;  // only non-empty groups, ordered by (hub, dest)
    std::vector<std::size_t> group_of_;  // parcel id -> group index
    std::size_t waiting_ = 0;
};

}  // namespace crowdhub
