#pragma once

// Small hand-checkable instances shared by the unit tests.

#include <cmath>
#include <numeric>
#include <vector>

#include "crowdhub/instance.hpp"
#include "crowdhub/rng.hpp"

namespace crowdhub::testing {

// Regions on a line at the given coordinates; every region is a candidate.
inline Instance line_instance(const std::vector<double>& xs) {
    Instance inst;
    inst.n_regions = xs.size();
    inst.dist = SquareMatrix(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) inst.dist(i, j) = std::abs(xs[i] - xs[j]);
    inst.demand.assign(xs.size(), 0.0);
    inst.supply = SquareMatrix(xs.size());
    inst.hub_candidates.resize(xs.size());
    std::iota(inst.hub_candidates.begin(), inst.hub_candidates.end(), 0);
    for (double x : xs) inst.coords.push_back({x, 0.0});
    return inst;
}

// Random small instance on an integer grid with L1 distances.
inline Instance random_instance(Rng& rng, std::size_t n, double supply_scale = 1.0, double demand_scale = 10.0) {
    Instance inst;
    inst.n_regions = n;
    inst.dist = SquareMatrix(n);
    for (std::size_t i = 0; i < n; ++i) inst.coords.push_back({std::floor(rng.uniform(0, 2000)), std::floor(rng.uniform(0, 2000))});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inst.dist(i, j) = std::abs(inst.coords[i].x - inst.coords[j].x) + std::abs(inst.coords[i].y - inst.coords[j].y);
    inst.demand.resize(n);
    for (auto& d : inst.demand) d = std::floor(rng.uniform(0, demand_scale));
    inst.supply = SquareMatrix(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && rng.uniform() < 0.5) inst.supply(i, j) = supply_scale * rng.uniform();
    inst.hub_candidates.resize(n);
    std::iota(inst.hub_candidates.begin(), inst.hub_candidates.end(), 0);
    return inst;
}

}  // namespace crowdhub::testing
