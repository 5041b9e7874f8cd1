#include "crowdhub/ca.hpp"

#include <algorithm>

#include "crowdhub/error.hpp"

namespace crowdhub {

CaEstimate estimate(const Instance& inst, const RegionBitsets& feasible, const CaOptions& opts) {
    return estimate(inst, feasible, opts, kernels::active());
}

CaEstimate estimate(const Instance& inst, const RegionBitsets& feasible, const CaOptions& opts,
                    const kernels::KernelTable& k) {
    if (opts.tol < 0.0) throw ValidationError("tol: must be >= 0");
    if (opts.max_iter < 1) throw ValidationError("max_iter: must be >= 1");
    const std::size_t n = inst.n_regions;
    if (feasible.n() != n) throw ValidationError("feasibility size does not match instance");

    const std::vector<double>& demand = inst.demand;
    const double total_demand = inst.total_demand();
    std::vector<double> remaining = demand;
    std::vector<double> supply(inst.supply.values().begin(), inst.supply.values().end());

    CaEstimate est;
    est.z.assign(n, 0.0);
    std::vector<double> reach(n), leftover(n), fed(n), share(n);

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        std::fill(reach.begin(), reach.end(), 0.0);
        for (std::size_t ij = 0; ij < n * n; ++ij) {
            if (!(supply[ij] > 0.0)) continue;
            const Word* row = feasible.row(ij / n, ij % n).data();
            const double reachable = k.masked_sum(row, remaining.data(), n);
            if (reachable > 0.0) k.masked_add(row, supply[ij] / reachable, reach.data(), n);
        }

        double total_leftover = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double y = remaining[r] * reach[r];
            leftover[r] = std::max(0.0, y - remaining[r]);
            est.z[r] = std::min(demand[r], est.z[r] + y);
            total_leftover += leftover[r];
        }
        est.iterations_used = iter;
        if (opts.record_history) est.history.push_back(est.z);
        if (total_leftover <= opts.tol * total_demand) {
            est.converged = true;
            break;
        }
        if (iter == opts.max_iter) break;

        // Overflow of region r returns to the pairs that reach it, in
        // proportion to their current supply.
        std::fill(fed.begin(), fed.end(), 0.0);
        for (std::size_t ij = 0; ij < n * n; ++ij)
            if (supply[ij] > 0.0) k.masked_add(feasible.row(ij / n, ij % n).data(), supply[ij], fed.data(), n);
        for (std::size_t r = 0; r < n; ++r) share[r] = fed[r] > 0.0 ? leftover[r] / fed[r] : 0.0;
        for (std::size_t ij = 0; ij < n * n; ++ij)
            if (supply[ij] > 0.0) supply[ij] *= k.masked_sum(feasible.row(ij / n, ij % n).data(), share.data(), n);
        for (std::size_t r = 0; r < n; ++r) remaining[r] = demand[r] - est.z[r];
    }

    est.total_served = 0.0;
    for (double v : est.z) est.total_served += v;
    return est;
}

CaEstimate estimate(const Instance& inst, const FeasibilityTensor& tensor, const OpenHubMask& open,
                    const CaOptions& opts) {
    return estimate(inst, aggregate(tensor, open), opts);
}

CaCost cost_of(const CostParams& params, std::size_t n_open, double served, double total_demand) {
    CaCost c;
    c.fixed = params.hub_cost * static_cast<double>(n_open);
    c.crowd = params.reward * served;
    c.regular = params.regular_cost * (total_demand - served);
    c.total = c.fixed + c.crowd + c.regular;
    return c;
}

CaCost total_cost(const Instance& inst, const CostParams& params, const CaEstimate& est, std::size_t n_open) {
    return cost_of(params, n_open, est.total_served, inst.total_demand());
}

std::vector<double> single_hub_values(const Instance& inst, const FeasibilityTensor& tensor,
                                      const CostParams& params, const CaOptions& opts) {
    std::vector<double> v(tensor.n_hubs());
    for (HubSlot h = 0; h < tensor.n_hubs(); ++h) {
        const CaEstimate est = estimate(inst, single_hub(tensor, h), opts);
        v[h] = total_cost(inst, params, est, 1).total;
    }
    return v;
}

}  // namespace crowdhub
