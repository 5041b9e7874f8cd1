#pragma once

#include <cstddef>
#include <cstdint>

#include "crowdhub/feasibility.hpp"
#include "crowdhub/instance.hpp"
#include "crowdhub/sim.hpp"

namespace crowdhub {

struct FlpSolution {
    HubSet hubs;                  // k candidate slots, sorted
    double total_distance = 0.0;  // sum_r d_r * distance to the closest hub
    bool exact = false;           // true when found by enumeration
};

// Demand-weighted objective of a hub set.
double flp_objective(const Instance& inst, const HubSet& hubs);

// Demand-weighted k-median over the candidates. Exact by enumeration when
// there are at most `enumeration_limit` subsets, otherwise greedy
// construction followed by first-improvement swaps.
FlpSolution solve_flp(const Instance& inst, std::size_t k, double enumeration_limit = 1e6);

struct NonPredictive {
    FlpSolution flp;
    PolicyRuns runs;  // nearest stage 2, minimal-detour stage 3
};

// Every stage decided on distance alone: FLP hubs, nearest hub, minimal
// detour. Replicated like sim::replicate, so the same base seed pairs it
// with any other pipeline.
NonPredictive run_nonpredictive(const Instance& inst, const CostParams& params, std::size_t k, const SimConfig& cfg,
                                std::size_t n_runs, std::uint64_t base_seed, unsigned threads = 0);

}  // namespace crowdhub
