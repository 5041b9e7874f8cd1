#include "crowdhub/simopt.hpp"

#include <algorithm>
#include <chrono>

#include "crowdhub/error.hpp"

namespace crowdhub {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Separates evaluation days from optimisation days.
constexpr std::uint64_t kEvalStream = 0x6576616cULL;

}  // namespace

void SimEvaluatorConfig::validate() const {
    if (n_sims < 1) throw ValidationError("n_sims must be >= 1");
    if (!seeds.empty() && seeds.size() != n_sims) throw ValidationError("seed count differs from n_sims");
    sim.validate();
}

std::vector<std::uint64_t> SimEvaluatorConfig::resolved_seeds() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out(n_sims);
    for (std::size_t k = 0; k < n_sims; ++k) out[k] = replication_seed(base_seed, k);
    return out;
}

double sim_cost(const HubSet& hubs, const Instance& inst, const CostParams& params, const SimEvaluatorConfig& cfg) {
    cfg.validate();
    if (hubs.empty()) throw ValidationError("hub set must be nonempty");
    const Deployment dep = deploy_plain(inst, hubs);
    double sum = 0.0;
    const auto seeds = cfg.resolved_seeds();
    for (std::uint64_t seed : seeds)
        sum += run(sample_day(inst, cfg.sim, seed), dep, Stage2Policy::Nearest, cfg.stage3, inst, params, cfg.sim)
                   .cost.total;
    return sum / static_cast<double>(seeds.size());
}

Evaluator sim_evaluator(const Instance& inst, const CostParams& params, const SimEvaluatorConfig& cfg) {
    cfg.validate();
    return [&inst, params, cfg](const HubSet& hubs) { return sim_cost(hubs, inst, params, cfg); };
}

double CompareReport::gap_percent() const {
    return sim_eval.mean != 0.0 ? 100.0 * (ca_eval.mean - sim_eval.mean) / sim_eval.mean : 0.0;
}

double CompareReport::time_ratio() const { return ca_seconds > 0.0 ? sim_seconds / ca_seconds : 0.0; }

std::vector<std::uint64_t> evaluation_seeds(const CompareConfig& cfg) {
    if (cfg.eval_runs < 1) throw ValidationError("eval_runs must be >= 1");
    const auto used = cfg.optimize.resolved_seeds();
    std::vector<std::uint64_t> out(cfg.eval_runs);
    for (std::size_t k = 0; k < cfg.eval_runs; ++k) {
        out[k] = replication_seed(derive_seed(cfg.eval_seed, kEvalStream), k);
        if (std::find(used.begin(), used.end(), out[k]) != used.end())
            throw ValidationError("evaluation seed coincides with an optimisation seed");
    }
    return out;
}

CompareReport compare(const Instance& inst, const CostParams& params, const CompareConfig& cfg) {
    cfg.optimize.validate();
    CompareReport rep;
    rep.eval_seeds = evaluation_seeds(cfg);
    const CaOptions opts;

    // Both searches need the search space; only the CA evaluator needs the
    // tensor at evaluation time, so its build is charged to the CA side.
    const auto t_ca = std::chrono::steady_clock::now();
    const auto tensor = FeasibilityTensor::build(inst, params.max_detour);
    const SearchSpace space = make_search_space(inst, tensor, params, opts, cfg.search.threads);
    const double space_seconds = seconds_since(t_ca);
    const SearchResult ca = search(space, cfg.search, ca_evaluator(inst, tensor, params, opts));
    rep.ca_seconds = seconds_since(t_ca);

    const auto t_sim = std::chrono::steady_clock::now();
    const SearchResult sim = search(space, cfg.search, sim_evaluator(inst, params, cfg.optimize));
    rep.sim_seconds = seconds_since(t_sim) + space_seconds;

    rep.ca_hubs = ca.best_hubs;
    rep.sim_hubs = sim.best_hubs;
    rep.ca_search_cost = ca.best_cost;
    rep.sim_search_cost = sim.best_cost;
    rep.ca_evaluations = ca.evaluations;
    rep.sim_evaluations = sim.evaluations;

    auto per_day = [&](const HubSet& hubs) {
        std::vector<double> costs;
        for (std::uint64_t seed : rep.eval_seeds) {
            SimEvaluatorConfig one = cfg.optimize;
            one.n_sims = 1;
            one.seeds = {seed};
            costs.push_back(sim_cost(hubs, inst, params, one));
        }
        return summarize(costs);
    };
    rep.ca_eval = per_day(rep.ca_hubs);
    rep.sim_eval = rep.sim_hubs == rep.ca_hubs ? rep.ca_eval : per_day(rep.sim_hubs);
    return rep;
}

}  // namespace crowdhub
