#pragma once

#include <cstddef>
#include <vector>

#include "crowdhub/feasibility.hpp"
#include "crowdhub/instance.hpp"
#include "crowdhub/kernels.hpp"

namespace crowdhub {

struct CaOptions {
    double tol = 1e-6;      // stop once total leftover <= tol * total demand
    int max_iter = 50;
    bool record_history = false;
};

struct CaEstimate {
    std::vector<double> z;  // expected parcels/day delivered by couriers, per region
    int iterations_used = 0;
    double total_served = 0.0;
    bool converged = false;
    std::vector<std::vector<double>> history;  // z after each iteration, when requested
};

struct CaCost {
    double fixed = 0.0;
    double crowd = 0.0;
    double regular = 0.0;
    double total = 0.0;
};

// Continuum approximation of crowd-served demand for the hub set whose
// reduced feasibility is `feasible`.
//
// Each iteration spreads every OD pair's supply over the regions it can
// reach in proportion to their remaining demand, caps regions at their
// demand, and hands the overflow back to the pairs that fed each region as
// leftover supply for the next round. Pairs that reach no remaining demand
// keep their supply stranded.
CaEstimate estimate(const Instance& inst, const RegionBitsets& feasible, const CaOptions& opts = {});
CaEstimate estimate(const Instance& inst, const RegionBitsets& feasible, const CaOptions& opts,
                    const kernels::KernelTable& k);

// Throws ValidationError when no hub is open.
CaEstimate estimate(const Instance& inst, const FeasibilityTensor& tensor, const OpenHubMask& open,
                    const CaOptions& opts = {});

// f*|H| + p_cs * served + p_reg * (total_demand - served)
CaCost cost_of(const CostParams& params, std::size_t n_open, double served, double total_demand);
CaCost total_cost(const Instance& inst, const CostParams& params, const CaEstimate& est, std::size_t n_open);

// Cost of opening each candidate on its own.
std::vector<double> single_hub_values(const Instance& inst, const FeasibilityTensor& tensor,
                                      const CostParams& params, const CaOptions& opts = {});

}  // namespace crowdhub
