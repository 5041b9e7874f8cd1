#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crowdhub/hubsearch.hpp"
#include "crowdhub/sim.hpp"

namespace crowdhub {

// Hub-set cost estimated by averaging simulated days instead of the CA.
struct SimEvaluatorConfig {
    std::size_t n_sims = 2;
    Stage3Policy stage3 = Stage3Policy::MinDetour;
    std::vector<std::uint64_t> seeds;  // one per simulation; empty: derived from base_seed
    std::uint64_t base_seed = 1;
    SimConfig sim;

    void validate() const;
    std::vector<std::uint64_t> resolved_seeds() const;
};

// Mean total cost over the configured days, nearest-hub stage 2.
double sim_cost(const HubSet& hubs, const Instance& inst, const CostParams& params, const SimEvaluatorConfig& cfg);

Evaluator sim_evaluator(const Instance& inst, const CostParams& params, const SimEvaluatorConfig& cfg);

struct CompareConfig {
    SearchConfig search;
    SimEvaluatorConfig optimize;      // days seen by the simulation-based search
    std::size_t eval_runs = 10;       // fresh days used to score both winners
    std::uint64_t eval_seed = 1;
};

struct CompareReport {
    HubSet ca_hubs, sim_hubs;
    double ca_search_cost = 0.0;   // CA objective of the CA winner
    double sim_search_cost = 0.0;  // simulated objective of the sim winner on its own days
    double ca_seconds = 0.0;       // tensor build plus search
    double sim_seconds = 0.0;
    std::size_t ca_evaluations = 0, sim_evaluations = 0;
    Stats ca_eval, sim_eval;       // total cost of each winner on the evaluation days
    std::vector<std::uint64_t> eval_seeds;

    // (ca_eval - sim_eval) / sim_eval, in percent.
    double gap_percent() const;
    // sim_seconds / ca_seconds.
    double time_ratio() const;
};

// Seeds of the evaluation days: replications of a stream separate from the
// optimisation days. Throws if any coincides with an optimisation seed.
std::vector<std::uint64_t> evaluation_seeds(const CompareConfig& cfg);

// Same search run twice, once with the CA evaluator and once with the
// simulation evaluator; both winners are then simulated on fresh days.
CompareReport compare(const Instance& inst, const CostParams& params, const CompareConfig& cfg);

}  // namespace crowdhub
