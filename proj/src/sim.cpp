#include "crowdhub/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "crowdhub/error.hpp"
#include "crowdhub/parallel.hpp"
#include "crowdhub/parcelhub.hpp"

namespace crowdhub {

std::string policy_name(Stage2Policy p) { return p == Stage2Policy::Nearest ? "nearest" : "ca"; }

std::string policy_name(Stage3Policy p) {
    switch (p) {
        case Stage3Policy::Static: return "static";
        case Stage3Policy::Batch: return "batch";
        case Stage3Policy::MinDetour: return "mindetour";
        case Stage3Policy::CaPriority: return "ca";
    }
    return "?";
}

Stage2Policy parse_stage2(const std::string& name) {
    if (name == "nearest") return Stage2Policy::Nearest;
    if (name == "ca") return Stage2Policy::Ca;
    throw UsageError("unknown stage2 policy '" + name + "' (expected nearest|ca)");
}

Stage3Policy parse_stage3(const std::string& name) {
    if (name == "static") return Stage3Policy::Static;
    if (name == "batch") return Stage3Policy::Batch;
    if (name == "mindetour") return Stage3Policy::MinDetour;
    if (name == "ca") return Stage3Policy::CaPriority;
    throw UsageError("unknown stage3 policy '" + name + "' (expected static|batch|mindetour|ca)");
}

void SimConfig::validate() const {
    if (!(horizon > 0.0)) throw ValidationError("horizon must be positive");
    if (!(speed_kmh > 0.0)) throw ValidationError("speed must be positive");
    if (batch_size < 1) throw ValidationError("batch size must be >= 1");
    if (!(gamma >= 0.0)) throw ValidationError("gamma must be non-negative");
}

Realization sample_realization(const Instance& inst, std::size_t n_parcels, std::size_t n_couriers, double horizon,
                               std::uint64_t seed) {
    Realization day;
    day.seed = seed;
    const std::size_t n = inst.n_regions;

    Rng demand_rng(derive_seed(seed, 1));
    const CategoricalSampler dest(inst.demand);
    if (n_parcels > 0 && dest.empty()) throw ValidationError("parcels requested but total demand is zero");
    day.parcels.resize(n_parcels);
    for (std::size_t p = 0; p < n_parcels; ++p)
        day.parcels[p] = {static_cast<ParcelId>(p), -1, static_cast<RegionId>(dest.draw(demand_rng))};

    Rng supply_rng(derive_seed(seed, 2));
    const CategoricalSampler od(inst.supply.values());
    if (n_couriers > 0 && od.empty()) throw ValidationError("couriers requested but total supply is zero");
    day.couriers.resize(n_couriers);
    for (auto& c : day.couriers) {
        const std::size_t k = od.draw(supply_rng);
        c.origin = static_cast<RegionId>(k / n);
        c.dest = static_cast<RegionId>(k % n);
        c.depart_time = supply_rng.uniform(0.0, horizon);
    }
    std::stable_sort(day.couriers.begin(), day.couriers.end(),
                     [](const Courier& a, const Courier& b) { return a.depart_time < b.depart_time; });
    for (std::size_t s = 0; s < n_couriers; ++s) day.couriers[s].id = static_cast<CourierId>(s);
    return day;
}

Realization sample_day(const Instance& inst, const SimConfig& cfg, std::uint64_t seed) {
    const double demand = inst.total_demand();
    std::size_t n_parcels = static_cast<std::size_t>(std::llround(demand));
    if (cfg.poisson_demand) {
        Rng count_rng(derive_seed(seed, 3));
        n_parcels = count_rng.poisson(demand);
    }
    const auto n_couriers = static_cast<std::size_t>(std::llround(inst.total_supply()));
    return sample_realization(inst, n_parcels, n_couriers, cfg.horizon, seed);
}

std::vector<int> realized_demand(const Realization& day, std::size_t n_regions) {
    std::vector<int> d(n_regions, 0);
    for (const Parcel& p : day.parcels) ++d[static_cast<std::size_t>(p.dest)];
    return d;
}

Deployment deploy(const Instance& inst, const FeasibilityTensor& tensor, const HubSet& slots, const CaOptions& opts) {
    Deployment dep;
    dep.slots = slots;
    std::sort(dep.slots.begin(), dep.slots.end());
    dep.hubs = hub_regions(inst, dep.slots);
    const OpenHubMask mask = OpenHubMask::of(tensor.n_hubs(), dep.slots);
    dep.ca = estimate(inst, tensor, mask, opts);
    dep.reach = aggregate(tensor, mask);
    dep.ratios = service_ratios(dep.ca.z, inst.demand);
    dep.z_per_hub = single_hub_z(inst, tensor, dep.slots, opts);
    return dep;
}

Deployment deploy_plain(const Instance& inst, const HubSet& slots) {
    Deployment dep;
    dep.slots = slots;
    std::sort(dep.slots.begin(), dep.slots.end());
    dep.hubs = hub_regions(inst, dep.slots);
    return dep;
}

void assign_parcel_hubs(Realization& day, const Instance& inst, const Deployment& dep, Stage2Policy stage2,
                        double gamma) {
    const auto demand = realized_demand(day, inst.n_regions);
    const HubAssignment a = stage2 == Stage2Policy::Nearest
                                ? assign_nearest(inst, dep.hubs, demand)
                                : assign_ca(inst, dep.hubs, demand, dep.z_per_hub, gamma);
    // Parcels of region r, in id order, fill hubs in hub order.
    std::vector<std::size_t> hub_cursor(inst.n_regions, 0);
    std::vector<int> left_at_hub(inst.n_regions, -1);
    for (Parcel& p : day.parcels) {
        const auto r = static_cast<std::size_t>(p.dest);
        if (left_at_hub[r] < 0) left_at_hub[r] = a(r, 0);
        while (left_at_hub[r] == 0) left_at_hub[r] = a(r, ++hub_cursor[r]);
        p.hub = a.hubs[hub_cursor[r]];
        --left_at_hub[r];
    }
}

std::size_t joint_static_served(const Realization& day, const Deployment& dep) {
    return match_joint_static(realized_demand(day, dep.reach.n()), day.couriers, dep.reach);
}

namespace {

struct Pending {
    double time;
    std::size_t seq;  // insertion order breaks time ties
    Event event;
    bool operator>(const Pending& o) const { return time != o.time ? time > o.time : seq > o.seq; }
};

}  // namespace

SimOutcome run(const Realization& realization, const Deployment& dep, Stage2Policy stage2, Stage3Policy stage3,
               const Instance& inst, const CostParams& params, const SimConfig& cfg) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();
    if (dep.hubs.empty()) throw ValidationError("at least one hub must be open");
    if (stage2 == Stage2Policy::Ca && dep.z_per_hub.size() != dep.hubs.size())
        throw ValidationError("CA stage 2 needs a deployment with CA estimates");
    if (stage3 == Stage3Policy::CaPriority && dep.ratios.size() != inst.n_regions)
        throw ValidationError("CA-priority matching needs a deployment with CA estimates");

    Realization day = realization;
    assign_parcel_hubs(day, inst, dep, stage2, cfg.gamma);
    const double tau = params.max_detour;
    const double speed = cfg.speed_kmh / 3.6;  // m/s
    const SquareMatrix& dist = inst.dist;

    SimOutcome out;
    out.policy = policy_name(stage2) + "/" + policy_name(stage3);
    out.per_region_served.assign(inst.n_regions, 0);

    ParcelPool pool(day.parcels, dep.hubs, inst.n_regions);
    std::vector<std::optional<ParcelId>> planned(day.couriers.size());
    if (stage3 == Stage3Policy::Static)
        for (const auto& m : match_static(day.parcels, day.couriers, dist, tau))
            planned[static_cast<std::size_t>(m.courier)] = m.parcel;

    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
    std::size_t seq = 0;
    auto schedule = [&](const Event& e) { queue.push({e.time, seq++, e}); };
    for (const Courier& c : day.couriers) schedule({c.depart_time, EventKind::CourierArrival, c.id, std::nullopt});

    double detour_sum = 0.0;
    while (!queue.empty()) {
        const Event e = queue.top().event;
        queue.pop();
        if (cfg.record_events) out.events.push_back(e);
        const Courier& c = day.couriers[static_cast<std::size_t>(e.courier)];
        switch (e.kind) {
            case EventKind::CourierArrival: {
                const auto s = static_cast<std::size_t>(c.id);
                std::optional<ParcelId> parcel;
                if (stage3 == Stage3Policy::Static) {
                    parcel = planned[s];
                    if (parcel) pool.reserve(*parcel);
                } else if (stage3 == Stage3Policy::Batch) {
                    // The first member of a batch triggers the matching for
                    // the whole batch; parcels are reserved right away.
                    if (s % cfg.batch_size == 0) {
                        const std::size_t end = std::min(s + cfg.batch_size, day.couriers.size());
                        const std::span<const Courier> batch(day.couriers.data() + s, end - s);
                        for (const auto& m : pool.batch(batch, dist, tau)) {
                            planned[static_cast<std::size_t>(m.courier)] = m.parcel;
                            pool.reserve(*m.parcel);
                        }
                    }
                    parcel = planned[s];
                } else {
                    const MatchDecision d = stage3 == Stage3Policy::MinDetour
                                                ? pool.min_detour(c, dist, tau)
                                                : pool.ca_priority(c, dist, tau, dep.ratios);
                    parcel = d.parcel;
                    if (parcel) pool.reserve(*parcel);
                }
                if (!parcel) break;  // the courier leaves without a parcel
                const Parcel& p = day.parcels[static_cast<std::size_t>(*parcel)];
                detour_sum += parcel_detour(p, c, dist);
                schedule({e.time + dist(static_cast<std::size_t>(c.origin), static_cast<std::size_t>(p.hub)) / speed,
                          EventKind::Pickup, c.id, parcel});
                break;
            }
            case EventKind::Pickup: {
                Parcel& p = day.parcels[static_cast<std::size_t>(*e.parcel)];
                p.state = ParcelState::PickedUp;
                schedule({e.time + dist(static_cast<std::size_t>(p.hub), static_cast<std::size_t>(p.dest)) / speed,
                          EventKind::Delivery, c.id, e.parcel});
                break;
            }
            case EventKind::Delivery: {
                Parcel& p = day.parcels[static_cast<std::size_t>(*e.parcel)];
                p.state = ParcelState::Delivered;
                ++out.served;
                ++out.per_region_served[static_cast<std::size_t>(p.dest)];
                break;
            }
        }
    }

    out.unserved = day.parcels.size() - out.served;
    out.avg_detour = out.served > 0 ? detour_sum / static_cast<double>(out.served) : 0.0;
    out.cost = cost_of(params, dep.slots.size(), static_cast<double>(out.served),
                       static_cast<double>(day.parcels.size()));
    out.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

Stats summarize(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stdev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

std::vector<PolicyRuns> replicate(const Instance& inst, const Deployment& dep, const CostParams& params,
                                  const SimConfig& cfg,
                                  const std::vector<std::pair<Stage2Policy, Stage3Policy>>& policies,
                                  std::size_t n_runs, std::uint64_t base_seed, unsigned threads) {
    if (n_runs < 1) throw ValidationError("runs must be >= 1");
    std::vector<PolicyRuns> out;
    for (const auto& [s2, s3] : policies) out.push_back({s2, s3, std::vector<SimOutcome>(n_runs), {}, {}, {}});
    parallel_for(n_runs, threads, [&](std::size_t k) {
        const Realization day = sample_day(inst, cfg, replication_seed(base_seed, k));
        for (auto& pr : out) pr.runs[k] = run(day, dep, pr.stage2, pr.stage3, inst, params, cfg);
    });
    for (auto& pr : out) {
        std::vector<double> served, cost, detour;
        for (const auto& r : pr.runs) {
            served.push_back(static_cast<double>(r.served));
            cost.push_back(r.cost.total);
            detour.push_back(r.avg_detour);
        }
        pr.served = summarize(served);
        pr.cost = summarize(cost);
        pr.detour = summarize(detour);
    }
    return out;
}

}  // namespace crowdhub
