#include <doctest.h>

#include <algorithm>
#include <chrono>

#include "crowdhub/ca.hpp"
#include "crowdhub/error.hpp"
#include "crowdhub/simopt.hpp"

using namespace crowdhub;

namespace {

Instance town(std::uint64_t seed, double supply = 500) {
    SyntheticSpec spec;
    spec.seed = seed;
    spec.n_regions = 16;
    spec.width = 2500;
    spec.height = 1600;
    spec.demand_total = 350;
    spec.supply_total = supply;
    spec.n_candidates = 6;
    return generate_synthetic(spec);
}

double one_run_cost(const Instance& inst, const HubSet& hubs, std::uint64_t seed, Stage3Policy s3) {
    const SimConfig cfg;
    return run(sample_day(inst, cfg, seed), deploy_plain(inst, hubs), Stage2Policy::Nearest, s3, inst, CostParams{},
               cfg)
        .cost.total;
}

}  // namespace

TEST_CASE("simulated cost is the mean of independent runs") {
    const Instance inst = town(1);
    const HubSet hubs{1, 4};
    SimEvaluatorConfig cfg;
    cfg.n_sims = 1;
    cfg.seeds = {17};
    CHECK(sim_cost(hubs, inst, CostParams{}, cfg) == one_run_cost(inst, hubs, 17, Stage3Policy::MinDetour));

    cfg.n_sims = 2;
    cfg.seeds = {17, 18};
    const double expected = (one_run_cost(inst, hubs, 17, Stage3Policy::MinDetour) +
                             one_run_cost(inst, hubs, 18, Stage3Policy::MinDetour)) /
                            2.0;
    CHECK(sim_cost(hubs, inst, CostParams{}, cfg) == doctest::Approx(expected).epsilon(1e-15));

    cfg.stage3 = Stage3Policy::Static;
    cfg.seeds = {17, 18};
    CHECK(sim_cost(hubs, inst, CostParams{}, cfg) ==
          doctest::Approx((one_run_cost(inst, hubs, 17, Stage3Policy::Static) +
                           one_run_cost(inst, hubs, 18, Stage3Policy::Static)) /
                          2.0));
}

TEST_CASE("simulated cost is deterministic and validated") {
    const Instance inst = town(2);
    SimEvaluatorConfig cfg;
    cfg.base_seed = 9;
    CHECK(sim_cost({0, 3}, inst, CostParams{}, cfg) == sim_cost({0, 3}, inst, CostParams{}, cfg));
    CHECK(cfg.resolved_seeds() == std::vector<std::uint64_t>{replication_seed(9, 0), replication_seed(9, 1)});
    CHECK_THROWS_AS(sim_cost({}, inst, CostParams{}, cfg), ValidationError);
    cfg.n_sims = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.n_sims = 2;
    cfg.seeds = {1, 2, 3};
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("evaluation days never reuse optimisation days") {
    CompareConfig cfg;
    const auto eval = evaluation_seeds(cfg);
    CHECK(eval.size() == 10);
    for (auto s : cfg.optimize.resolved_seeds()) CHECK(std::find(eval.begin(), eval.end(), s) == eval.end());
    cfg.optimize.seeds = {eval[3], 5};
    CHECK_THROWS_AS(evaluation_seeds(cfg), ValidationError);
}

TEST_CASE("compare report") {
    const Instance inst = town(3);
    CompareConfig cfg;
    cfg.search.n_iters = 30;
    cfg.search.n_starts = 2;
    cfg.search.max_hubs = 2;
    cfg.search.min_hubs = 2;
    const CostParams params;
    const CompareReport rep = compare(inst, params, cfg);
    CHECK(rep.ca_hubs.size() == 2);
    CHECK(rep.sim_hubs.size() == 2);
    CHECK(rep.ca_evaluations >= 1);
    CHECK(rep.sim_evaluations >= 1);
    CHECK(rep.ca_seconds > 0.0);
    CHECK(rep.sim_seconds > 0.0);

    // The evaluation statistics recompute from independent runs.
    std::vector<double> costs;
    for (auto seed : rep.eval_seeds) costs.push_back(one_run_cost(inst, rep.ca_hubs, seed, Stage3Policy::MinDetour));
    CHECK(rep.ca_eval.mean == doctest::Approx(summarize(costs).mean));
    CHECK(rep.ca_eval.stdev == doctest::Approx(summarize(costs).stdev));
    CHECK(rep.sim_search_cost == doctest::Approx(sim_cost(rep.sim_hubs, inst, params, cfg.optimize)));

    // Identical winners give a zero gap.
    CompareReport same = rep;
    same.sim_hubs = same.ca_hubs;
    same.sim_eval = same.ca_eval;
    CHECK(same.gap_percent() == 0.0);

    // Same inputs, same hubs and objectives.
    const CompareReport again = compare(inst, params, cfg);
    CHECK(again.ca_hubs == rep.ca_hubs);
    CHECK(again.sim_hubs == rep.sim_hubs);
    CHECK(again.ca_eval.mean == rep.ca_eval.mean);
}

TEST_CASE("CA evaluation time does not grow with courier volume") {
    // Fastest of several batches, to damp scheduler noise.
    auto fastest = [](const Instance& inst) {
        const auto tensor = FeasibilityTensor::build(inst, 500.0);
        const auto eval = ca_evaluator(inst, tensor, CostParams{});
        double best = 1e9;
        for (int rep = 0; rep < 7; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            double sink = 0.0;
            for (int k = 0; k < 200; ++k) sink += eval({0, 2, 4});
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            CHECK(sink > 0.0);
        }
        return best;
    };
    const double base = fastest(town(4, 500));
    const double quad = fastest(town(4, 2000));
    CHECK(quad < 1.5 * base);
}
