#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "crowdhub/ca.hpp"
#include "crowdhub/feasibility.hpp"
#include "crowdhub/instance.hpp"
#include "crowdhub/rng.hpp"

namespace crowdhub {

// Overlap of two hubs' courier service areas, over candidate slots.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    explicit SimilarityMatrix(std::size_t n) : n_(n), s_(n * n, 0.0) {}
    std::size_t size() const { return n_; }
    double operator()(std::size_t a, std::size_t b) const { return s_[a * n_ + b]; }
    double& operator()(std::size_t a, std::size_t b) { return s_[a * n_ + b]; }

private:
    std::size_t n_ = 0;
    std::vector<double> s_;
};

// [sum min(e_a, e_b) lambda]^2 / ([sum e_a lambda] [sum e_b lambda]) over
// (i, j, r). Zero when either hub has no feasible weighted flow.
double similarity(const Instance& inst, const FeasibilityTensor& tensor, HubSlot a, HubSlot b);
SimilarityMatrix similarity_matrix(const Instance& inst, const FeasibilityTensor& tensor, unsigned threads = 0);

// Weighted feasible flow sum_{ijr} e_hijr * lambda_ij per candidate slot.
std::vector<double> hub_flows(const Instance& inst, const FeasibilityTensor& tensor);

// Turns single-hub costs into positive weights: (max v - v_h) + 1e-9 max v.
std::vector<double> quality_scores(std::span<const double> values);

// Everything the operators need about the candidate set.
struct SearchSpace {
    std::vector<double> values;   // single-hub cost v_h
    std::vector<double> quality;  // from quality_scores(values)
    std::vector<char> has_flow;   // hubs without flow are never added
    SimilarityMatrix sim;

    std::size_t size() const { return values.size(); }
};

SearchSpace make_search_space(const Instance& inst, const FeasibilityTensor& tensor, const CostParams& params,
                              const CaOptions& opts = {}, unsigned threads = 0);

struct SearchConfig {
    int n_starts = 5;     // eta
    int n_iters = 500;    // kappa
    double alpha = 4.5;
    double beta = 8.0;
    std::uint64_t seed = 1;
    bool use_max_similarity = false;
    std::size_t max_hubs = 5;   // Q
    std::size_t min_hubs = 1;   // set equal to max_hubs to fix the hub count
    std::size_t initial_hubs = 0;  // size of each construction; 0 means max_hubs
    unsigned threads = 0;       // 0: one per start, capped by hardware

    void validate(std::size_t n_candidates) const;
};

enum class Operator { Construct, Repair, Destroy, Swap };
std::string operator_name(Operator op);

struct TrajectoryStep {
    int start = 0;
    int iteration = 0;  // 0 is the construction
    Operator op = Operator::Construct;
    bool accepted = false;
    double cost = 0.0;     // of the candidate produced this step
    double current = 0.0;  // of the accepted state after the step
    HubSet hubs;           // candidate produced this step
};

struct SearchResult {
    HubSet best_hubs;
    double best_cost = 0.0;
    int best_start = 0;
    std::vector<TrajectoryStep> trajectory;  // ordered by (start, iteration)
    std::size_t evaluations = 0;             // distinct hub sets evaluated
};

using Evaluator = std::function<double(const HubSet&)>;

// q distinct hubs drawn without replacement, proportional to quality.
HubSet construct_initial(const SearchSpace& space, Rng& rng, std::size_t q);

// O1: add one hub outside `state` with weight quality^alpha / similarity^beta.
HubSet op_repair(const HubSet& state, const SearchSpace& space, const SearchConfig& cfg, Rng& rng);
// O2: drop one hub with weight inverse to its O1 metric against the others.
// Requires at least two hubs.
HubSet op_destroy(const HubSet& state, const SearchSpace& space, const SearchConfig& cfg, Rng& rng);
// O3: O2 then O1; the dropped hub may come back.
HubSet op_swap(const HubSet& state, const SearchSpace& space, const SearchConfig& cfg, Rng& rng);

// Multi-start large neighbourhood search. Starts run concurrently with seeds
// cfg.seed + start; evaluations are memoized per hub set and performed once.
SearchResult search(const SearchSpace& space, const SearchConfig& cfg, const Evaluator& evaluator);

// Total CA cost of a hub set.
Evaluator ca_evaluator(const Instance& inst, const FeasibilityTensor& tensor, const CostParams& params,
                       const CaOptions& opts = {});

// Exhaustive minimum over all hub sets with min_hubs..max_hubs members.
struct Enumerated {
    HubSet hubs;
    double cost = 0.0;
    std::size_t evaluated = 0;
};
Enumerated enumerate_best(std::size_t n_candidates, std::size_t min_hubs, std::size_t max_hubs,
                          const Evaluator& evaluator);

}  // namespace crowdhub
