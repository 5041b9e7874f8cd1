#include "crowdhub/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "crowdhub/ca.hpp"
#include "crowdhub/error.hpp"
#include "crowdhub/parallel.hpp"

#ifndef CROWDHUB_GIT_HASH
#define CROWDHUB_GIT_HASH "unknown"
#endif

namespace crowdhub {

const char* build_git_hash() { return CROWDHUB_GIT_HASH; }

namespace {

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string one_line(const std::exception& e) {
    std::string s = e.what();
    for (char& c : s)
        if (c == '\n') c = ' ';
    return s;
}

// Cells run side by side, so each keeps its own work single-threaded.
SearchConfig cell_search(SearchConfig s, std::size_t min_hubs, std::size_t max_hubs, bool nested) {
    s.min_hubs = min_hubs;
    s.max_hubs = max_hubs;
    if (s.initial_hubs > max_hubs) s.initial_hubs = 0;
    if (nested) s.threads = 1;
    return s;
}

}  // namespace

std::string Table::to_csv() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out += ',';
            out += csv_cell(cells[k]);
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

double round_to(double x, int decimals) {
    const double scale = std::pow(10.0, decimals);
    const double r = std::round(x * scale) / scale;
    return r == 0.0 ? 0.0 : r;  // no "-0.0000"
}

std::string fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, round_to(x, decimals));
    return buf;
}

std::string join_hubs(const Instance& inst, const HubSet& slots) {
    std::string out;
    for (RegionId r : hub_regions(inst, slots)) {
        if (!out.empty()) out += ';';
        out += std::to_string(r);
    }
    return out;
}

SearchResult locate(const Instance& inst, const FeasibilityTensor& tensor, const CostParams& params,
                    const SearchConfig& cfg) {
    const CaOptions opts;
    const SearchSpace space = make_search_space(inst, tensor, params, opts, cfg.threads);
    return search(space, cfg, ca_evaluator(inst, tensor, params, opts));
}

// ---- grid -----------------------------------------------------------------

void GridConfig::validate() const {
    if (lambda_levels.empty() || tau_levels.empty() || hub_counts.empty()) throw UsageError("grid axes must be nonempty");
    for (double l : lambda_levels)
        if (!(l >= 0.0)) throw UsageError("lambda levels must be >= 0");
    for (double t : tau_levels)
        if (!(t >= 0.0)) throw UsageError("tau levels must be >= 0");
    for (std::size_t h : hub_counts)
        if (h < 1) throw UsageError("hub counts must be >= 1");
    if (runs < 1) throw UsageError("runs must be >= 1");
    sim.validate();
}

double percent_deviation(double bench, double ca) { return ca > 0.0 ? round_to(100.0 * (bench - ca) / ca, 4) : 0.0; }

std::vector<GridRow> run_grid(const Instance& inst, const CostParams& params, const GridConfig& cfg) {
    cfg.validate();
    std::vector<GridRow> rows;
    for (double lambda : cfg.lambda_levels)
        for (double tau : cfg.tau_levels)
            for (std::size_t h : cfg.hub_counts) {
                GridRow row;
                row.lambda = lambda;
                row.tau = tau;
                row.hubs = h;
                rows.push_back(row);
            }

    const bool nested = resolve_threads(cfg.threads) > 1 && rows.size() > 1;
    parallel_for(rows.size(), cfg.threads, [&](std::size_t c) {
        GridRow& row = rows[c];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (row.hubs > inst.hub_candidates.size()) throw ValidationError("more hubs than candidates");
            const Instance cell = inst.with_total_supply(row.lambda);
            CostParams p = params;
            p.max_detour = row.tau;
            const auto tensor = FeasibilityTensor::build(cell, row.tau);
            row.slots = locate(cell, tensor, p, cell_search(cfg.search, row.hubs, row.hubs, nested)).best_hubs;
            const Deployment dep = deploy(cell, tensor, row.slots);
            const double demand = cell.total_demand();
            const double scale = demand > 0.0 ? 100.0 / demand : 0.0;

            double static_sum = 0.0;
            std::vector<double> dynamic;
            for (std::size_t k = 0; k < cfg.runs; ++k) {
                const Realization day = sample_day(cell, cfg.sim, replication_seed(cfg.seed, k));
                static_sum += static_cast<double>(joint_static_served(day, dep));
                dynamic.push_back(static_cast<double>(
                    run(day, dep, Stage2Policy::Ca, Stage3Policy::CaPriority, cell, p, cfg.sim).served));
            }
            row.ca_pct = round_to(dep.ca.total_served * scale, 4);
            row.static_pct = round_to(static_sum / static_cast<double>(cfg.runs) * scale, 4);
            row.dynamic_pct = round_to(summarize(dynamic).mean * scale, 4);
            row.static_dev = percent_deviation(row.static_pct, row.ca_pct);
            row.dynamic_dev = percent_deviation(row.dynamic_pct, row.ca_pct);
        } catch (const std::exception& e) {
            row.error = one_line(e);
        }
        row.seconds = seconds_since(t0);
    });
    return rows;
}

Table grid_table(const Instance& inst, const std::vector<GridRow>& rows) {
    Table t{{"lambda", "tau", "hubs", "hub_regions", "ca_pct", "static_pct", "static_dev_pct", "dynamic_pct",
             "dynamic_dev_pct", "error"},
            {}};
    for (const auto& r : rows)
        t.rows.push_back({fixed(r.lambda, 0), fixed(r.tau, 0), std::to_string(r.hubs), join_hubs(inst, r.slots),
                          fixed(r.ca_pct, 4), fixed(r.static_pct, 4), fixed(r.static_dev, 4), fixed(r.dynamic_pct, 4),
                          fixed(r.dynamic_dev, 4), r.error});
    return t;
}

Table grid_timing(const std::vector<GridRow>& rows) {
    Table t{{"lambda", "tau", "hubs", "seconds"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({fixed(r.lambda, 0), fixed(r.tau, 0), std::to_string(r.hubs), fixed(r.seconds, 3)});
    return t;
}

// ---- decomposition ------------------------------------------------------------

std::vector<DecompositionRow> cost_decomposition(const Instance& inst, const CostParams& params,
                                                 std::size_t max_hubs, const SearchConfig& search_cfg) {
    const std::size_t c = inst.hub_candidates.size();
    if (max_hubs < 1 || max_hubs > c) throw UsageError("max_hubs must be between 1 and the candidate count");
    const CaOptions opts;
    const auto tensor = FeasibilityTensor::build(inst, params.max_detour);
    const SearchSpace space = make_search_space(inst, tensor, params, opts, search_cfg.threads);
    const Evaluator eval = ca_evaluator(inst, tensor, params, opts);

    std::vector<DecompositionRow> rows;
    HubSet previous;
    for (std::size_t k = 1; k <= max_hubs; ++k) {
        const SearchResult found = search(space, cell_search(search_cfg, k, k, false), eval);
        HubSet best = found.best_hubs;
        double best_cost = found.best_cost;
        // One hub added to the previous solution; keeps served non-decreasing.
        for (HubSlot h = 0; h < c && !previous.empty(); ++h) {
            if (std::binary_search(previous.begin(), previous.end(), h)) continue;
            HubSet grown = previous;
            grown.insert(std::upper_bound(grown.begin(), grown.end(), h), h);
            const double cost = eval(grown);
            if (cost < best_cost) best_cost = cost, best = grown;
        }
        DecompositionRow row;
        row.k = k;
        row.slots = best;
        const CaEstimate est = estimate(inst, tensor, OpenHubMask::of(tensor.n_hubs(), best), opts);
        row.cost = total_cost(inst, params, est, k);
        row.served = est.total_served;
        row.served_pct = inst.total_demand() > 0.0 ? 100.0 * est.total_served / inst.total_demand() : 0.0;
        row.marginal_served = row.served - (rows.empty() ? 0.0 : rows.back().served);
        rows.push_back(row);
        previous = best;
    }
    return rows;
}

Table decomposition_table(const Instance& inst, const std::vector<DecompositionRow>& rows) {
    Table t{{"hubs", "hub_regions", "fixed_cost", "crowd_cost", "regular_cost", "total_cost", "served",
             "served_pct", "marginal_served"},
            {}};
    for (const auto& r : rows)
        t.rows.push_back({std::to_string(r.k), join_hubs(inst, r.slots), fixed(r.cost.fixed, 2), fixed(r.cost.crowd, 2),
                          fixed(r.cost.regular, 2), fixed(r.cost.total, 2), fixed(r.served, 4),
                          fixed(r.served_pct, 4), fixed(r.marginal_served, 4)});
    return t;
}

// ---- policies -------------------------------------------------------------------

void PolicyGridConfig::validate() const {
    if (taus.empty() || rewards.empty()) throw UsageError("policy grid axes must be nonempty");
    for (double t : taus)
        if (!(t >= 0.0)) throw UsageError("tau levels must be >= 0");
    for (double r : rewards)
        if (!(r >= 0.0)) throw UsageError("reward levels must be >= 0");
    if (!(base_lambda >= 0.0)) throw UsageError("base lambda must be >= 0");
    if (runs < 1) throw UsageError("runs must be >= 1");
    model.validate();
    sim.validate();
}

std::vector<PolicyRow> policy_table(const Instance& inst, const CostParams& params, const PolicyGridConfig& cfg) {
    cfg.validate();
    const double base = cfg.base_lambda > 0.0 ? cfg.base_lambda : inst.total_supply();
    struct Cell {
        double tau, reward, lambda;
        HubSet slots;
        std::vector<PolicyRuns> runs;
        std::string error;
    };
    std::vector<Cell> cells;
    for (double tau : cfg.taus)
        for (double reward : cfg.rewards) cells.push_back({tau, reward, scaled_supply(cfg.model, tau, reward, base), {}, {}, {}});

    const bool nested = resolve_threads(cfg.threads) > 1 && cells.size() > 1;
    const std::size_t max_hubs = std::min<std::size_t>(static_cast<std::size_t>(params.max_hubs), inst.hub_candidates.size());
    parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
        Cell& cell = cells[c];
        try {
            const Instance scaled = inst.with_total_supply(cell.lambda);
            CostParams p = params;
            p.max_detour = cell.tau;
            p.reward = cell.reward;
            const auto tensor = FeasibilityTensor::build(scaled, cell.tau);
            SearchConfig s = cell_search(cfg.search, std::min(cfg.search.min_hubs, max_hubs),
                                         std::min(cfg.search.max_hubs, max_hubs), nested);
            cell.slots = locate(scaled, tensor, p, s).best_hubs;
            const Deployment dep = deploy(scaled, tensor, cell.slots);
            std::vector<std::pair<Stage2Policy, Stage3Policy>> policies;
            for (Stage3Policy s3 : kDynamicPolicies) policies.emplace_back(cfg.stage2, s3);
            cell.runs = replicate(scaled, dep, p, cfg.sim, policies, cfg.runs, cfg.seed, nested ? 1 : cfg.threads);
        } catch (const std::exception& e) {
            cell.error = one_line(e);
        }
    });

    std::vector<PolicyRow> rows;
    for (std::size_t k = 0; k < kDynamicPolicies.size(); ++k)
        for (const Cell& cell : cells) {
            PolicyRow row;
            row.policy = kDynamicPolicies[k];
            row.tau = cell.tau;
            row.reward = cell.reward;
            row.lambda = cell.lambda;
            row.slots = cell.slots;
            row.error = cell.error;
            if (cell.error.empty()) {
                row.served = cell.runs[k].served;
                row.cost = cell.runs[k].cost;
                row.detour = cell.runs[k].detour;
            }
            rows.push_back(row);
        }
    return rows;
}

Table policy_rows_table(const Instance& inst, const std::vector<PolicyRow>& rows) {
    Table t{{"policy", "tau", "reward", "lambda", "hubs", "hub_regions", "served_parcels", "served_sd", "total_cost",
             "total_cost_sd", "avg_detour", "avg_detour_sd", "error"},
            {}};
    for (const auto& r : rows)
        t.rows.push_back({policy_name(r.policy), fixed(r.tau, 0), fixed(r.reward, 2), fixed(r.lambda, 0),
                          std::to_string(r.slots.size()), join_hubs(inst, r.slots), fixed(r.served.mean, 2),
                          fixed(r.served.stdev, 2), fixed(r.cost.mean, 2), fixed(r.cost.stdev, 2),
                          fixed(r.detour.mean, 2), fixed(r.detour.stdev, 2), r.error});
    return t;
}

// ---- pipelines -------------------------------------------------------------------

PipelineComparison compare_pipelines(const Instance& inst, const CostParams& params, std::size_t k,
                                     const SearchConfig& search_cfg, const SimConfig& sim, std::size_t runs,
                                     std::uint64_t seed, unsigned threads) {
    PipelineComparison out;
    out.baseline = run_nonpredictive(inst, params, k, sim, runs, seed, threads);
    const auto tensor = FeasibilityTensor::build(inst, params.max_detour);
    out.ca_slots = locate(inst, tensor, params, cell_search(search_cfg, k, k, false)).best_hubs;
    const Deployment dep = deploy(inst, tensor, out.ca_slots);
    out.ca = replicate(inst, dep, params, sim, {{Stage2Policy::Ca, Stage3Policy::CaPriority}}, runs, seed, threads)
                 .front();

    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t d = 0; d < runs; ++d) {
        const double base = static_cast<double>(out.baseline.runs.runs[d].served);
        const double ca = static_cast<double>(out.ca.runs[d].served);
        if (ca >= base) ++out.days_ca_ahead;
        if (base > 0.0) {
            sum += 100.0 * (ca - base) / base;
            ++counted;
        }
    }
    out.mean_improvement_pct = counted > 0 ? sum / static_cast<double>(counted) : 0.0;
    return out;
}

}  // namespace crowdhub
