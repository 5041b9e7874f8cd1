#include <doctest.h>

#include <sstream>

#include "crowdhub/error.hpp"
#include "crowdhub/experiments.hpp"

using namespace crowdhub;

namespace {

Instance village(std::uint64_t seed = 3) {
    SyntheticSpec spec;
    spec.seed = seed;
    spec.n_regions = 14;
    spec.width = 2500;
    spec.height = 1600;
    spec.demand_total = 250;
    spec.supply_total = 300;
    spec.n_candidates = 6;
    return generate_synthetic(spec);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        out.push_back(cells);
    }
    return out;
}

GridConfig small_grid() {
    GridConfig g;
    g.lambda_levels = {150, 400};
    g.tau_levels = {300, 800};
    g.hub_counts = {1, 2};
    g.runs = 3;
    g.seed = 5;
    g.search.n_iters = 20;
    g.search.n_starts = 2;
    return g;
}

}  // namespace

TEST_CASE("CSV rendering") {
    Table t{{"a", "b"}, {{"1", "x,y"}, {"2", "say \"hi\""}}};
    CHECK(t.to_csv() == "a,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
    CHECK(fixed(-0.00001, 4) == "0.0000");
    CHECK(fixed(2.5, 0) == "3");
    CHECK(fixed(1.23456, 2) == "1.23");
    CHECK(round_to(12.34567, 4) == 12.3457);
}

TEST_CASE("single-cell grid") {
    const Instance inst = village();
    GridConfig g = small_grid();
    g.lambda_levels = {300};
    g.tau_levels = {500};
    g.hub_counts = {2};
    const auto rows = run_grid(inst, CostParams{}, g);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].error.empty());
    CHECK(rows[0].slots.size() == 2);
    const auto csv = parse_csv(grid_table(inst, rows).to_csv());
    REQUIRE(csv.size() == 2);
    CHECK(csv[1][0] == "300");
    CHECK(csv[1][1] == "500");
}

TEST_CASE("grid rows: ordering, bounds and recomputable deviations") {
    const Instance inst = village();
    const GridConfig g = small_grid();
    const auto rows = run_grid(inst, CostParams{}, g);
    REQUIRE(rows.size() == 8);
    CHECK(rows[0].lambda == 150);
    CHECK(rows[1].hubs == 2);
    CHECK(rows[2].tau == 800);
    CHECK(rows[4].lambda == 400);
    for (const auto& r : rows) {
        CHECK(r.error.empty());
        CHECK(r.static_pct >= r.dynamic_pct);
        CHECK(r.ca_pct <= 100.0);
        CHECK(r.slots.size() == r.hubs);
    }
    const auto csv = parse_csv(grid_table(inst, rows).to_csv());
    CHECK(csv[0] == std::vector<std::string>{"lambda", "tau", "hubs", "hub_regions", "ca_pct", "static_pct",
                                             "static_dev_pct", "dynamic_pct", "dynamic_dev_pct", "error"});
    for (std::size_t k = 1; k < csv.size(); ++k) {
        const double ca = std::stod(csv[k][4]);
        CHECK(fixed(percent_deviation(std::stod(csv[k][5]), ca), 4) == csv[k][6]);
        CHECK(fixed(percent_deviation(std::stod(csv[k][7]), ca), 4) == csv[k][8]);
    }
}

TEST_CASE("grid output is byte-identical across runs and thread counts") {
    const Instance inst = village(4);
    GridConfig g = small_grid();
    g.threads = 1;
    const std::string one = grid_table(inst, run_grid(inst, CostParams{}, g)).to_csv();
    g.threads = 3;
    CHECK(grid_table(inst, run_grid(inst, CostParams{}, g)).to_csv() == one);
    CHECK(grid_table(inst, run_grid(inst, CostParams{}, g)).to_csv() == one);
    CHECK(grid_timing(run_grid(inst, CostParams{}, g)).rows.size() == 8);
}

TEST_CASE("a failing grid cell is flagged and the rest still run") {
    const Instance inst = village();
    GridConfig g = small_grid();
    g.hub_counts = {1, 9};
    const auto rows = run_grid(inst, CostParams{}, g);
    REQUIRE(rows.size() == 8);
    for (const auto& r : rows) CHECK(r.error.empty() == (r.hubs == 1));
    g.runs = 0;
    CHECK_THROWS_AS(run_grid(inst, CostParams{}, g), UsageError);
}

TEST_CASE("cost decomposition") {
    const Instance inst = village(6);
    SearchConfig s;
    s.n_iters = 40;
    const CostParams params;
    const auto rows = cost_decomposition(inst, params, 4, s);
    REQUIRE(rows.size() == 4);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].k == k + 1);
        CHECK(rows[k].slots.size() == k + 1);
        CHECK(rows[k].cost.fixed == 250.0 * static_cast<double>(k + 1));
        CHECK(rows[k].cost.total ==
              doctest::Approx(rows[k].cost.fixed + rows[k].cost.crowd + rows[k].cost.regular));
        if (k > 0) {
            CHECK(rows[k].served >= rows[k - 1].served - 1e-9);
            CHECK(rows[k].marginal_served == doctest::Approx(rows[k].served - rows[k - 1].served));
        }
    }
    CHECK(decomposition_table(inst, rows).rows.size() == 4);
    CHECK_THROWS_AS(cost_decomposition(inst, params, 7, s), UsageError);
}

TEST_CASE("policy table layout") {
    const Instance inst = village(7);
    PolicyGridConfig cfg;
    cfg.taus = {500, 1000};
    cfg.rewards = {3, 7};
    cfg.runs = 3;
    cfg.search.n_iters = 20;
    cfg.search.n_starts = 2;
    CostParams params;
    params.max_hubs = 3;
    const auto rows = policy_table(inst, params, cfg);
    REQUIRE(rows.size() == 12);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].error.empty());
        CHECK(rows[k].policy == kDynamicPolicies[k / 4]);
        CHECK(rows[k].lambda == scaled_supply(cfg.model, rows[k].tau, rows[k].reward, inst.total_supply()));
        CHECK(rows[k].slots == rows[k % 4].slots);  // same hubs for every policy
        CHECK(rows[k].slots.size() <= 3);
    }
    CHECK(rows[0].tau == 500);
    CHECK(rows[1].reward == 7);
    CHECK(rows[2].tau == 1000);
    const auto csv = parse_csv(policy_rows_table(inst, rows).to_csv());
    CHECK(csv[0][6] == "served_parcels");
    CHECK(csv[1][0] == "mindetour");
    CHECK(csv[12][0] == "ca");
    cfg.threads = 2;
    CHECK(policy_rows_table(inst, policy_table(inst, params, cfg)).to_csv() == policy_rows_table(inst, rows).to_csv());
}

TEST_CASE("pipeline comparison pairs days") {
    const Instance inst = village(8);
    SearchConfig s;
    s.n_iters = 20;
    const auto cmp = compare_pipelines(inst, CostParams{}, 2, s, SimConfig{}, 4, 3, 1);
    REQUIRE(cmp.ca.runs.size() == 4);
    REQUIRE(cmp.baseline.runs.runs.size() == 4);
    CHECK(cmp.ca_slots.size() == 2);
    double sum = 0.0;
    std::size_t ahead = 0, counted = 0;
    for (std::size_t d = 0; d < 4; ++d) {
        const double b = static_cast<double>(cmp.baseline.runs.runs[d].served);
        const double c = static_cast<double>(cmp.ca.runs[d].served);
        ahead += c >= b;
        if (b > 0) sum += 100.0 * (c - b) / b, ++counted;
    }
    CHECK(cmp.days_ca_ahead == ahead);
    CHECK(cmp.mean_improvement_pct == doctest::Approx(counted ? sum / static_cast<double>(counted) : 0.0));
}
