// crowdhub: command-line front end for instance generation, hub location,
// simulation and the experiment tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "crowdhub/ca.hpp"
#include "crowdhub/error.hpp"
#include "crowdhub/experiments.hpp"
#include "crowdhub/simopt.hpp"

using namespace crowdhub;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Global {
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out_dir = ".";
};

struct CostFlags {
    CostParams params;
    void add(CLI::App* app) {
        app->add_option("--tau", params.max_detour, "maximum detour in meters")->capture_default_str();
        app->add_option("--reward", params.reward, "reward per crowd-shipped parcel ($)")->capture_default_str();
        app->add_option("--hub-cost", params.hub_cost, "daily cost of an open hub ($)")->capture_default_str();
        app->add_option("--regular-cost", params.regular_cost, "cost of a regular delivery ($)")->capture_default_str();
    }
};

struct SearchFlags {
    SearchConfig cfg;
    void add(CLI::App* app) {
        app->add_option("--starts", cfg.n_starts, "independent search starts")->capture_default_str();
        app->add_option("--iters", cfg.n_iters, "iterations per start")->capture_default_str();
        app->add_option("--alpha", cfg.alpha, "weight of single-hub quality")->capture_default_str();
        app->add_option("--beta", cfg.beta, "weight of hub similarity")->capture_default_str();
        app->add_flag("--max-similarity", cfg.use_max_similarity, "use the maximum instead of the sum of similarities");
    }
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what) {
    std::vector<T> out;
    for (const auto& item : split(s, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(static_cast<T>(v));
        } catch (const std::logic_error&) {
            throw UsageError(std::string(what) + ": cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string(what) + ": empty list");
    return out;
}

// Hubs are given as region ids and mapped to candidate slots.
HubSet parse_hubs(const Instance& inst, const std::string& s) {
    HubSet slots;
    for (int region : parse_list<int>(s, "--hubs")) {
        const auto it = std::find(inst.hub_candidates.begin(), inst.hub_candidates.end(), region);
        if (it == inst.hub_candidates.end())
            throw UsageError("--hubs: region " + std::to_string(region) + " is not a hub candidate");
        slots.push_back(static_cast<HubSlot>(it - inst.hub_candidates.begin()));
    }
    std::sort(slots.begin(), slots.end());
    slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
    return slots;
}

std::string str(const HubSet& slots) {
    std::string out;
    for (HubSlot h : slots) out += (out.empty() ? "" : ";") + std::to_string(h);
    return out;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write " + path.string());
    out << text;
    if (!out) throw Error("io", "failed writing " + path.string());
}

// Output name inside --out-dir; sidecars replace the .csv suffix.
struct Outputs {
    fs::path csv;
    fs::path sidecar(const std::string& suffix) const {
        fs::path p = csv;
        return p.replace_extension().string() + suffix;
    }
};

Outputs outputs(const Global& g, const std::string& name) {
    const fs::path p(name);
    return {p.is_absolute() ? p : fs::path(g.out_dir) / p};
}

// Echo of every option of the subcommand, as given or defaulted.
json echo(const CLI::App* app) {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options()) {
        if (opt->get_name() == "--help" || opt->get_lnames().empty()) continue;
        const std::string key = opt->get_lnames().front();
        if (opt->count() > 0) {
            const auto& r = opt->results();
            j[key] = r.size() == 1 ? json(r.front()) : json(r);
        } else if (!opt->get_default_str().empty()) {
            j[key] = opt->get_default_str();
        } else {
            j[key] = nullptr;
        }
    }
    return j;
}

void write_meta(const Outputs& out, const CLI::App* app, const Global& g, json extra = json::object()) {
    json meta;
    meta["command"] = app->get_name();
    meta["git_hash"] = build_git_hash();
    meta["seed"] = g.seed;
    meta["threads"] = g.threads;
    meta["options"] = echo(app);
    for (auto& [k, v] : extra.items()) meta[k] = v;
    write_file(out.sidecar(".meta.json"), meta.dump(2) + "\n");
}

void write_timing(const Outputs& out, const Table& t) { write_file(out.sidecar(".timing.csv"), t.to_csv()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Instance load(const std::string& path) { return load_instance(path); }

void report(const std::string& what, const Outputs& out) { std::cout << what << " -> " << out.csv.string() << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hub location and parcel assignment for crowd-shipping"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads, 0 = all cores")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "directory for output files")->capture_default_str();

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
    SyntheticSpec spec;
    std::string area = "5500x3500", gen_out = "instance.json";
    gen->add_option("--regions", spec.n_regions, "number of regions")->capture_default_str();
    gen->add_option("--area", area, "width x height in meters")->capture_default_str();
    gen->add_option("--demand", spec.demand_total, "parcels per day")->capture_default_str();
    gen->add_option("--supply", spec.supply_total, "potential couriers per day")->capture_default_str();
    gen->add_option("--hotspots", spec.hotspots, "supply hotspots")->capture_default_str();
    gen->add_option("--candidates", spec.n_candidates, "hub candidates, 0 = every region")->capture_default_str();
    gen->add_option("--out", gen_out, "instance file")->capture_default_str();

    // estimate
    auto* est = app.add_subcommand("estimate", "CA estimate for a given hub set");
    std::string instance_path, hubs_arg, est_out = "estimate.csv";
    CostFlags est_cost;
    est->add_option("--instance", instance_path, "instance file")->required();
    est->add_option("--hubs", hubs_arg, "comma-separated hub region ids")->required();
    est->add_option("--out", est_out, "output CSV")->capture_default_str();
    est_cost.add(est);

    // locate
    auto* loc = app.add_subcommand("locate", "search for the hub set with the lowest CA cost");
    std::string loc_out = "locate.csv", trajectory_out;
    std::size_t loc_min = 1;
    CostFlags loc_cost;
    SearchFlags loc_search;
    loc->add_option("--instance", instance_path, "instance file")->required();
    loc->add_option("--q", loc_cost.params.max_hubs, "maximum number of hubs")->capture_default_str();
    loc->add_option("--min-hubs", loc_min, "minimum number of hubs")->capture_default_str();
    loc->add_option("--out", loc_out, "output CSV")->capture_default_str();
    loc->add_option("--trajectory", trajectory_out, "also write the search trajectory to this CSV");
    loc_cost.add(loc);
    loc_search.add(loc);

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate days for a given hub set");
    std::string sim_out = "simulate.csv", stage2_arg = "ca", stage3_arg = "static,batch,mindetour,ca";
    std::size_t sim_runs = 10;
    SimConfig sim_cfg;
    CostFlags sim_cost;
    sim->add_option("--instance", instance_path, "instance file")->required();
    sim->add_option("--hubs", hubs_arg, "comma-separated hub region ids")->required();
    sim->add_option("--stage2", stage2_arg, "parcel-hub policies: nearest,ca")->capture_default_str();
    sim->add_option("--stage3", stage3_arg, "matching policies: static,batch,mindetour,ca")->capture_default_str();
    sim->add_option("--runs", sim_runs, "simulated days")->capture_default_str();
    sim->add_option("--batch-size", sim_cfg.batch_size, "couriers per batch")->capture_default_str();
    sim->add_option("--gamma", sim_cfg.gamma, "exponent of the CA parcel-hub split")->capture_default_str();
    sim->add_option("--speed", sim_cfg.speed_kmh, "courier speed in km/h")->capture_default_str();
    sim->add_flag("--poisson-demand", sim_cfg.poisson_demand, "draw the parcel count from a Poisson law");
    sim->add_option("--out", sim_out, "output CSV")->capture_default_str();
    sim_cost.add(sim);

    // compare
    auto* cmp = app.add_subcommand("compare", "CA search against simulation-based search");
    std::string cmp_out = "compare.csv";
    std::size_t cmp_min = 0, cmp_sims = 2, cmp_eval = 10;
    CostFlags cmp_cost;
    SearchFlags cmp_search;
    cmp->add_option("--instance", instance_path, "instance file")->required();
    cmp->add_option("--q", cmp_cost.params.max_hubs, "maximum number of hubs")->capture_default_str();
    cmp->add_option("--min-hubs", cmp_min, "minimum number of hubs, 0 = same as --q")->capture_default_str();
    cmp->add_option("--sims", cmp_sims, "simulated days per evaluation in the search")->capture_default_str();
    cmp->add_option("--eval-runs", cmp_eval, "fresh days used to score both winners")->capture_default_str();
    cmp->add_option("--out", cmp_out, "output CSV")->capture_default_str();
    cmp_cost.add(cmp);
    cmp_search.add(cmp);

    // baseline
    auto* base = app.add_subcommand("baseline", "distance-only pipeline against the CA pipeline");
    std::string base_out = "baseline.csv";
    std::size_t base_k = 3, base_runs = 10;
    CostFlags base_cost;
    SearchFlags base_search;
    base->add_option("--instance", instance_path, "instance file")->required();
    base->add_option("--k", base_k, "number of hubs")->capture_default_str();
    base->add_option("--runs", base_runs, "simulated days")->capture_default_str();
    base->add_option("--out", base_out, "output CSV")->capture_default_str();
    base_cost.add(base);
    base_search.add(base);

    // grid
    auto* grid = app.add_subcommand("grid", "CA against static and dynamic benchmarks");
    std::string grid_out = "grid.csv", lambdas = "2110,4221,6331,8441", taus = "250,500,750,1000", counts = "1,3,5,7";
    GridConfig grid_cfg;
    CostFlags grid_cost;
    SearchFlags grid_search;
    grid->add_option("--instance", instance_path, "instance file")->required();
    grid->add_option("--lambdas", lambdas, "courier totals per day")->capture_default_str();
    grid->add_option("--taus", taus, "maximum detours in meters")->capture_default_str();
    grid->add_option("--hubs", counts, "hub counts")->capture_default_str();
    grid->add_option("--runs", grid_cfg.runs, "simulated days per cell")->capture_default_str();
    grid->add_option("--out", grid_out, "output CSV")->capture_default_str();
    grid_cost.add(grid);
    grid_search.add(grid);

    // decompose
    auto* dec = app.add_subcommand("decompose", "CA cost split against the number of hubs");
    std::string dec_out = "decompose.csv";
    std::size_t dec_max = 8;
    CostFlags dec_cost;
    SearchFlags dec_search;
    dec->add_option("--instance", instance_path, "instance file")->required();
    dec->add_option("--max-hubs", dec_max, "largest hub count")->capture_default_str();
    dec->add_option("--out", dec_out, "output CSV")->capture_default_str();
    dec_cost.add(dec);
    dec_search.add(dec);

    // policies
    auto* pol = app.add_subcommand("policies", "dynamic matching policies under endogenous supply");
    std::string pol_out = "policies.csv", pol_taus = "500,1000,1500,2000", pol_rewards = "3,5,7";
    PolicyGridConfig pol_cfg;
    CostFlags pol_cost;
    SearchFlags pol_search;
    pol_cost.params.max_hubs = 10;
    pol->add_option("--instance", instance_path, "instance file")->required();
    pol->add_option("--taus", pol_taus, "maximum detours in meters")->capture_default_str();
    pol->add_option("--rewards", pol_rewards, "rewards in $")->capture_default_str();
    pol->add_option("--q", pol_cost.params.max_hubs, "maximum number of hubs")->capture_default_str();
    pol->add_option("--base-lambda", pol_cfg.base_lambda, "supply at tau=500, reward=5; 0 = instance total")
        ->capture_default_str();
    pol->add_option("--runs", pol_cfg.runs, "simulated days per cell")->capture_default_str();
    pol->add_option("--out", pol_out, "output CSV")->capture_default_str();
    pol_cost.add(pol);
    pol_search.add(pol);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        json err{{"error", "usage"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }

    auto seeded = [&](SearchFlags& f) {
        f.cfg.seed = g.seed;
        f.cfg.threads = g.threads;
        return f.cfg;
    };

    try {
        if (gen->parsed()) {
            const auto dims = split(area, 'x');
            if (dims.size() != 2) throw UsageError("--area: expected WIDTHxHEIGHT");
            spec.width = parse_list<double>(dims[0], "--area").front();
            spec.height = parse_list<double>(dims[1], "--area").front();
            spec.seed = g.seed;
            const Outputs out = outputs(g, gen_out);
            const Instance inst = generate_synthetic(spec);
            write_file(out.csv, serialize_instance(inst));
            report("instance", out);
        } else if (est->parsed()) {
            const Instance inst = load(instance_path);
            est_cost.params.validate();
            const HubSet slots = parse_hubs(inst, hubs_arg);
            if (slots.empty()) throw UsageError("--hubs: at least one hub");
            const auto tensor = FeasibilityTensor::build(inst, est_cost.params.max_detour);
            const CaEstimate e = estimate(inst, tensor, OpenHubMask::of(tensor.n_hubs(), slots));
            const CaCost c = total_cost(inst, est_cost.params, e, slots.size());
            Table t{{"region", "demand", "served", "ratio"}, {}};
            for (std::size_t r = 0; r < inst.n_regions; ++r)
                t.rows.push_back({std::to_string(r), fixed(inst.demand[r], 4), fixed(e.z[r], 6),
                                  fixed(inst.demand[r] > 0 ? e.z[r] / inst.demand[r] : 0.0, 6)});
            t.rows.push_back({"total", fixed(inst.total_demand(), 4), fixed(e.total_served, 6),
                              fixed(inst.total_demand() > 0 ? e.total_served / inst.total_demand() : 0.0, 6)});
            const Outputs out = outputs(g, est_out);
            write_file(out.csv, t.to_csv());
            write_meta(out, est, g,
                       {{"iterations", e.iterations_used},
                        {"converged", e.converged},
                        {"cost", {{"fixed", c.fixed}, {"crowd", c.crowd}, {"regular", c.regular}, {"total", c.total}}}});
            report("estimate", out);
        } else if (loc->parsed()) {
            const Instance inst = load(instance_path);
            loc_cost.params.validate();
            SearchConfig s = seeded(loc_search);
            s.max_hubs = static_cast<std::size_t>(loc_cost.params.max_hubs);
            s.min_hubs = loc_min;
            const auto t0 = std::chrono::steady_clock::now();
            const auto tensor = FeasibilityTensor::build(inst, loc_cost.params.max_detour);
            const SearchResult r = locate(inst, tensor, loc_cost.params, s);
            const double secs = seconds_since(t0);
            const CaEstimate e = estimate(inst, tensor, OpenHubMask::of(tensor.n_hubs(), r.best_hubs));
            const CaCost c = total_cost(inst, loc_cost.params, e, r.best_hubs.size());
            Table t{{"hubs", "hub_slots", "hub_regions", "total_cost", "fixed_cost", "crowd_cost", "regular_cost",
                     "served", "served_pct", "evaluations", "best_start"},
                    {}};
            t.rows.push_back({std::to_string(r.best_hubs.size()), str(r.best_hubs), join_hubs(inst, r.best_hubs),
                              fixed(c.total, 4), fixed(c.fixed, 4), fixed(c.crowd, 4), fixed(c.regular, 4),
                              fixed(e.total_served, 4), fixed(100.0 * e.total_served / inst.total_demand(), 4),
                              std::to_string(r.evaluations), std::to_string(r.best_start)});
            const Outputs out = outputs(g, loc_out);
            write_file(out.csv, t.to_csv());
            write_timing(out, Table{{"seconds"}, {{fixed(secs, 3)}}});
            write_meta(out, loc, g);
            if (!trajectory_out.empty()) {
                Table tr{{"start", "iteration", "operator", "accepted", "cost", "current", "hub_slots"}, {}};
                for (const auto& st : r.trajectory)
                    tr.rows.push_back({std::to_string(st.start), std::to_string(st.iteration), operator_name(st.op),
                                       st.accepted ? "1" : "0", fixed(st.cost, 4), fixed(st.current, 4), str(st.hubs)});
                write_file(outputs(g, trajectory_out).csv, tr.to_csv());
            }
            report("locate", out);
        } else if (sim->parsed()) {
            const Instance inst = load(instance_path);
            sim_cost.params.validate();
            const HubSet slots = parse_hubs(inst, hubs_arg);
            const auto tensor = FeasibilityTensor::build(inst, sim_cost.params.max_detour);
            const Deployment dep = deploy(inst, tensor, slots);
            std::vector<std::pair<Stage2Policy, Stage3Policy>> policies;
            for (const auto& s2 : split(stage2_arg, ','))
                for (const auto& s3 : split(stage3_arg, ',')) policies.emplace_back(parse_stage2(s2), parse_stage3(s3));
            if (policies.empty()) throw UsageError("no policies selected");
            const auto res = replicate(inst, dep, sim_cost.params, sim_cfg, policies, sim_runs, g.seed, g.threads);
            Table t{{"policy", "run", "seed", "served", "unserved", "fixed_cost", "crowd_cost", "regular_cost",
                     "total_cost", "avg_detour", "joint_static_served"},
                    {}};
            Table timing{{"policy", "run", "seconds"}, {}};
            for (std::size_t k = 0; k < sim_runs; ++k) {
                const std::uint64_t seed = replication_seed(g.seed, k);
                const std::size_t bound = joint_static_served(sample_day(inst, sim_cfg, seed), dep);
                for (const auto& pr : res) {
                    const SimOutcome& o = pr.runs[k];
                    t.rows.push_back({o.policy, std::to_string(k), std::to_string(seed), std::to_string(o.served),
                                      std::to_string(o.unserved), fixed(o.cost.fixed, 4), fixed(o.cost.crowd, 4),
                                      fixed(o.cost.regular, 4), fixed(o.cost.total, 4), fixed(o.avg_detour, 4),
                                      std::to_string(bound)});
                    timing.rows.push_back({o.policy, std::to_string(k), fixed(o.runtime, 4)});
                }
            }
            const Outputs out = outputs(g, sim_out);
            write_file(out.csv, t.to_csv());
            write_timing(out, timing);
            write_meta(out, sim, g, {{"ca_served", dep.ca.total_served}});
            report("simulate", out);
        } else if (cmp->parsed()) {
            const Instance inst = load(instance_path);
            cmp_cost.params.validate();
            CompareConfig cfg;
            cfg.search = seeded(cmp_search);
            cfg.search.max_hubs = static_cast<std::size_t>(cmp_cost.params.max_hubs);
            cfg.search.min_hubs = cmp_min == 0 ? cfg.search.max_hubs : cmp_min;
            cfg.optimize.n_sims = cmp_sims;
            cfg.optimize.base_seed = g.seed;
            cfg.eval_runs = cmp_eval;
            cfg.eval_seed = g.seed;
            const CompareReport r = compare(inst, cmp_cost.params, cfg);
            Table t{{"method", "hub_regions", "search_objective", "evaluations", "eval_cost_mean", "eval_cost_sd",
                     "gap_pct"},
                    {}};
            t.rows.push_back({"ca", join_hubs(inst, r.ca_hubs), fixed(r.ca_search_cost, 4),
                              std::to_string(r.ca_evaluations), fixed(r.ca_eval.mean, 4), fixed(r.ca_eval.stdev, 4),
                              fixed(r.gap_percent(), 4)});
            t.rows.push_back({"simulation", join_hubs(inst, r.sim_hubs), fixed(r.sim_search_cost, 4),
                              std::to_string(r.sim_evaluations), fixed(r.sim_eval.mean, 4),
                              fixed(r.sim_eval.stdev, 4), fixed(0.0, 4)});
            const Outputs out = outputs(g, cmp_out);
            write_file(out.csv, t.to_csv());
            write_timing(out, Table{{"method", "seconds"},
                                    {{"ca", fixed(r.ca_seconds, 3)},
                                     {"simulation", fixed(r.sim_seconds, 3)},
                                     {"ratio", fixed(r.time_ratio(), 3)}}});
            json seeds = json::array();
            for (auto s : r.eval_seeds) seeds.push_back(s);
            write_meta(out, cmp, g, {{"eval_seeds", seeds}});
            report("compare", out);
        } else if (base->parsed()) {
            const Instance inst = load(instance_path);
            base_cost.params.validate();
            const auto r = compare_pipelines(inst, base_cost.params, base_k, seeded(base_search), SimConfig{},
                                             base_runs, g.seed, g.threads);
            Table t{{"pipeline", "hub_regions", "run", "served", "total_cost", "avg_detour"}, {}};
            auto rows = [&](const char* name, const HubSet& slots, const PolicyRuns& pr) {
                for (std::size_t k = 0; k < pr.runs.size(); ++k)
                    t.rows.push_back({name, join_hubs(inst, slots), std::to_string(k), std::to_string(pr.runs[k].served),
                                      fixed(pr.runs[k].cost.total, 4), fixed(pr.runs[k].avg_detour, 4)});
            };
            rows("nonpredictive", r.baseline.flp.hubs, r.baseline.runs);
            rows("ca", r.ca_slots, r.ca);
            const Outputs out = outputs(g, base_out);
            write_file(out.csv, t.to_csv());
            write_meta(out, base, g,
                       {{"flp_total_distance", r.baseline.flp.total_distance},
                        {"flp_exact", r.baseline.flp.exact},
                        {"mean_improvement_pct", r.mean_improvement_pct},
                        {"days_ca_ahead", r.days_ca_ahead}});
            report("baseline", out);
        } else if (grid->parsed()) {
            const Instance inst = load(instance_path);
            grid_cost.params.validate();
            grid_cfg.lambda_levels = parse_list<double>(lambdas, "--lambdas");
            grid_cfg.tau_levels = parse_list<double>(taus, "--taus");
            grid_cfg.hub_counts = parse_list<std::size_t>(counts, "--hubs");
            grid_cfg.search = seeded(grid_search);
            grid_cfg.seed = g.seed;
            grid_cfg.threads = g.threads;
            const auto rows = run_grid(inst, grid_cost.params, grid_cfg);
            const Outputs out = outputs(g, grid_out);
            write_file(out.csv, grid_table(inst, rows).to_csv());
            write_timing(out, grid_timing(rows));
            write_meta(out, grid, g);
            report("grid", out);
        } else if (dec->parsed()) {
            const Instance inst = load(instance_path);
            dec_cost.params.validate();
            const auto t0 = std::chrono::steady_clock::now();
            const auto rows = cost_decomposition(inst, dec_cost.params, dec_max, seeded(dec_search));
            const Outputs out = outputs(g, dec_out);
            write_file(out.csv, decomposition_table(inst, rows).to_csv());
            write_timing(out, Table{{"seconds"}, {{fixed(seconds_since(t0), 3)}}});
            write_meta(out, dec, g);
            report("decompose", out);
        } else if (pol->parsed()) {
            const Instance inst = load(instance_path);
            pol_cost.params.validate();
            pol_cfg.taus = parse_list<double>(pol_taus, "--taus");
            pol_cfg.rewards = parse_list<double>(pol_rewards, "--rewards");
            pol_cfg.search = seeded(pol_search);
            pol_cfg.search.max_hubs = static_cast<std::size_t>(pol_cost.params.max_hubs);
            pol_cfg.seed = g.seed;
            pol_cfg.threads = g.threads;
            const auto t0 = std::chrono::steady_clock::now();
            const auto rows = policy_table(inst, pol_cost.params, pol_cfg);
            const Outputs out = outputs(g, pol_out);
            write_file(out.csv, policy_rows_table(inst, rows).to_csv());
            write_timing(out, Table{{"seconds"}, {{fixed(seconds_since(t0), 3)}}});
            write_meta(out, pol, g);
            report("policies", out);
        }
    } catch (const Error& e) {
        std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
        return e.kind() == "usage" ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
