#include "crowdhub/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crowdhub/error.hpp"

namespace crowdhub {

namespace {

double combinations(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t m = 1; m <= k; ++m) c = c * static_cast<double>(n - k + m) / static_cast<double>(m);
    return c;
}

// Distance from each region to each candidate, weighted by its demand.
struct Weighted {
    std::size_t n, c;
    std::vector<double> w;  // region-major
    double operator()(std::size_t r, std::size_t h) const { return w[r * c + h]; }
};

Weighted weigh(const Instance& inst) {
    Weighted t{inst.n_regions, inst.hub_candidates.size(), {}};
    t.w.resize(t.n * t.c);
    for (std::size_t r = 0; r < t.n; ++r)
        for (std::size_t h = 0; h < t.c; ++h)
            t.w[r * t.c + h] = inst.demand[r] * inst.dist(r, static_cast<std::size_t>(inst.hub_candidates[h]));
    return t;
}

double objective(const Weighted& t, const HubSet& hubs) {
    double total = 0.0;
    for (std::size_t r = 0; r < t.n; ++r) {
        double best = std::numeric_limits<double>::infinity();
        for (HubSlot h : hubs) best = std::min(best, t(r, h));
        total += best;
    }
    return total;
}

}  // namespace

double flp_objective(const Instance& inst, const HubSet& hubs) {
    if (hubs.empty()) throw ValidationError("hub set must be nonempty");
    return objective(weigh(inst), hubs);
}

FlpSolution solve_flp(const Instance& inst, std::size_t k, double enumeration_limit) {
    const std::size_t c = inst.hub_candidates.size();
    if (k < 1 || k > c) throw ValidationError("k must be between 1 and the candidate count");
    const Weighted t = weigh(inst);
    FlpSolution best;
    best.total_distance = std::numeric_limits<double>::infinity();

    if (combinations(c, k) <= enumeration_limit) {
        best.exact = true;
        HubSet combo(k);
        for (std::size_t m = 0; m < k; ++m) combo[m] = m;
        while (true) {
            const double v = objective(t, combo);
            if (v < best.total_distance) best.total_distance = v, best.hubs = combo;
            std::size_t m = k;
            while (m > 0 && combo[m - 1] == c - k + m - 1) --m;
            if (m == 0) break;
            ++combo[m - 1];
            for (std::size_t j = m; j < k; ++j) combo[j] = combo[j - 1] + 1;
        }
        return best;
    }

    // Greedy: add the candidate with the largest reduction, lowest slot on ties.
    HubSet hubs;
    std::vector<char> in(c, 0);
    while (hubs.size() < k) {
        HubSlot pick = 0;
        double pick_v = std::numeric_limits<double>::infinity();
        for (HubSlot h = 0; h < c; ++h) {
            if (in[h]) continue;
            HubSet trial = hubs;
            trial.push_back(h);
            const double v = objective(t, trial);
            if (v < pick_v) pick_v = v, pick = h;
        }
        hubs.push_back(pick);
        in[pick] = 1;
    }
    // Swap until no exchange of one open hub for one closed one improves.
    double v = objective(t, hubs);
    for (bool improved = true; improved;) {
        improved = false;
        for (std::size_t m = 0; m < k && !improved; ++m)
            for (HubSlot h = 0; h < c && !improved; ++h) {
                if (in[h]) continue;
                HubSet trial = hubs;
                trial[m] = h;
                const double tv = objective(t, trial);
                if (tv < v - 1e-9 * std::abs(v)) {
                    in[hubs[m]] = 0;
                    in[h] = 1;
                    hubs = trial;
                    v = tv;
                    improved = true;
                }
            }
    }
    std::sort(hubs.begin(), hubs.end());
    best.hubs = hubs;
    best.total_distance = v;
    return best;
}

NonPredictive run_nonpredictive(const Instance& inst, const CostParams& params, std::size_t k, const SimConfig& cfg,
                                std::size_t n_runs, std::uint64_t base_seed, unsigned threads) {
    NonPredictive out;
    out.flp = solve_flp(inst, k);
    const Deployment dep = deploy_plain(inst, out.flp.hubs);
    out.runs = replicate(inst, dep, params, cfg, {{Stage2Policy::Nearest, Stage3Policy::MinDetour}}, n_runs,
                         base_seed, threads)
                   .front();
    return out;
}

}  // namespace crowdhub
