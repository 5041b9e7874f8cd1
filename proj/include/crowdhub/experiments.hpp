#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "crowdhub/baselines.hpp"
#include "crowdhub/hubsearch.hpp"
#include "crowdhub/sim.hpp"

namespace crowdhub {

// Commit the library was built from, or "unknown".
const char* build_git_hash();

// Rectangular text table with a CSV rendering. Cells are preformatted so the
// output is byte-stable.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
};

// Rounds to `decimals` places; the rounded value prints exactly with fixed().
double round_to(double x, int decimals);
std::string fixed(double x, int decimals);
std::string join_hubs(const Instance& inst, const HubSet& slots);  // region ids, ';'-separated

// Search with the CA evaluator over a freshly built space.
SearchResult locate(const Instance& inst, const FeasibilityTensor& tensor, const CostParams& params,
                    const SearchConfig& cfg);

// ---- CA against the static and dynamic benchmarks ----------------------

struct GridConfig {
    std::vector<double> lambda_levels{2110, 4221, 6331, 8441};  // couriers/day
    std::vector<double> tau_levels{250, 500, 750, 1000};       // meters
    std::vector<std::size_t> hub_counts{1, 3, 5, 7};
    std::size_t runs = 10;
    std::uint64_t seed = 1;
    SearchConfig search;  // hub bounds are overridden by each cell's count
    SimConfig sim;
    unsigned threads = 0;

    void validate() const;
};

struct GridRow {
    double lambda = 0.0, tau = 0.0;
    std::size_t hubs = 0;
    HubSet slots;
    // Percent of demand served, rounded to 4 places. Deviations are
    // (benchmark - ca) / ca in percent, computed from the rounded values.
    double ca_pct = 0.0, static_pct = 0.0, static_dev = 0.0, dynamic_pct = 0.0, dynamic_dev = 0.0;
    std::string error;     // empty on success
    double seconds = 0.0;  // wall-clock, reported separately
};

// Deviation of `bench` from `ca` as printed in the grid.
double percent_deviation(double bench, double ca);

// One row per (lambda, tau, |H|), in that nesting order. The static column
// is the joint stage-2/3 optimum of each day; the dynamic column uses CA
// stage 2 and CA-priority matching. Cells run concurrently; a failing cell
// yields a row with `error` set.
std::vector<GridRow> run_grid(const Instance& inst, const CostParams& params, const GridConfig& cfg);
Table grid_table(const Instance& inst, const std::vector<GridRow>& rows);
Table grid_timing(const std::vector<GridRow>& rows);

// ---- Cost split against the number of hubs ------------------------------

struct DecompositionRow {
    std::size_t k = 0;
    HubSet slots;
    CaCost cost;
    double served = 0.0;           // CA parcels/day
    double served_pct = 0.0;       // of total demand
    double marginal_served = 0.0;  // over k - 1 hubs
};

// For k = 1..max_hubs, the best k-hub set found by the search (or by adding
// one hub to the k-1 solution, whichever is cheaper) and its CA cost split.
std::vector<DecompositionRow> cost_decomposition(const Instance& inst, const CostParams& params,
                                                 std::size_t max_hubs, const SearchConfig& search);
Table decomposition_table(const Instance& inst, const std::vector<DecompositionRow>& rows);

// ---- Dynamic policies under endogenous supply ---------------------------

struct PolicyGridConfig {
    std::vector<double> taus{500, 1000, 1500, 2000};
    std::vector<double> rewards{3, 5, 7};
    SupplyModel model;
    double base_lambda = 0.0;  // supply at the model's base point; 0 takes the instance total
    std::size_t runs = 20;
    std::uint64_t seed = 1;
    SearchConfig search;  // min/max hubs: 1..params.max_hubs unless set tighter
    SimConfig sim;
    Stage2Policy stage2 = Stage2Policy::Ca;
    unsigned threads = 0;

    void validate() const;
};

struct PolicyRow {
    Stage3Policy policy = Stage3Policy::MinDetour;
    double tau = 0.0, reward = 0.0, lambda = 0.0;
    HubSet slots;
    Stats served, cost, detour;
    std::string error;
};

inline const std::vector<Stage3Policy> kDynamicPolicies{Stage3Policy::MinDetour, Stage3Policy::Batch,
                                                        Stage3Policy::CaPriority};

// For each (tau, reward): lambda from the supply model, hubs from the CA
// search, then every dynamic policy on the same days. Rows are grouped by
// policy (minimal detour, batch, CA), then tau, then reward.
std::vector<PolicyRow> policy_table(const Instance& inst, const CostParams& params, const PolicyGridConfig& cfg);
Table policy_rows_table(const Instance& inst, const std::vector<PolicyRow>& rows);

// ---- Predictive against distance-only pipeline --------------------------

struct PipelineComparison {
    NonPredictive baseline;
    HubSet ca_slots;
    PolicyRuns ca;  // CA stage 2 and CA-priority matching on the same days
    // Mean over days of (ca - baseline) / baseline served, in percent; days
    // where the baseline serves nothing are skipped.
    double mean_improvement_pct = 0.0;
    std::size_t days_ca_ahead = 0;  // days where the CA pipeline serves at least as many
};

PipelineComparison compare_pipelines(const Instance& inst, const CostParams& params, std::size_t k,
                                     const SearchConfig& search, const SimConfig& sim, std::size_t runs,
                                     std::uint64_t seed, unsigned threads = 0);

}  // namespace crowdhub
