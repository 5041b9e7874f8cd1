#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "crowdhub/error.hpp"
#include "crowdhub/parcelhub.hpp"
#include "crowdhub/sim.hpp"
#include "support.hpp"

using namespace crowdhub;

namespace {

Instance small_city(std::uint64_t seed = 5, double demand = 300, double supply = 400) {
    SyntheticSpec spec;
    spec.seed = seed;
    spec.n_regions = 14;
    spec.width = 2500;
    spec.height = 1600;
    spec.demand_total = demand;
    spec.supply_total = supply;
    spec.n_candidates = 6;
    return generate_synthetic(spec);
}

const std::vector<std::pair<Stage2Policy, Stage3Policy>> kAllPolicies{
    {Stage2Policy::Nearest, Stage3Policy::Static},    {Stage2Policy::Nearest, Stage3Policy::Batch},
    {Stage2Policy::Nearest, Stage3Policy::MinDetour}, {Stage2Policy::Nearest, Stage3Policy::CaPriority},
    {Stage2Policy::Ca, Stage3Policy::Static},         {Stage2Policy::Ca, Stage3Policy::MinDetour},
};

}  // namespace

TEST_CASE("policy names round-trip") {
    for (auto p : {Stage3Policy::Static, Stage3Policy::Batch, Stage3Policy::MinDetour, Stage3Policy::CaPriority})
        CHECK(parse_stage3(policy_name(p)) == p);
    for (auto p : {Stage2Policy::Nearest, Stage2Policy::Ca}) CHECK(parse_stage2(policy_name(p)) == p);
    CHECK_THROWS_AS(parse_stage3("greedy"), UsageError);
    CHECK_THROWS_AS(parse_stage2(""), UsageError);
}

TEST_CASE("realization sampling") {
    const Instance inst = small_city();
    SUBCASE("seeded and well formed") {
        const auto a = sample_realization(inst, 100, 200, 3600, 9);
        const auto b = sample_realization(inst, 100, 200, 3600, 9);
        const auto c = sample_realization(inst, 100, 200, 3600, 10);
        REQUIRE(a.parcels.size() == 100);
        REQUIRE(a.couriers.size() == 200);
        bool differs = false;
        for (std::size_t k = 0; k < 200; ++k) {
            CHECK(a.couriers[k].id == static_cast<CourierId>(k));
            CHECK(a.couriers[k].depart_time == b.couriers[k].depart_time);
            CHECK(a.couriers[k].origin == b.couriers[k].origin);
            CHECK(a.couriers[k].depart_time >= 0.0);
            CHECK(a.couriers[k].depart_time <= 3600.0);
            if (k > 0) CHECK(a.couriers[k - 1].depart_time <= a.couriers[k].depart_time);
            differs = differs || a.couriers[k].depart_time != c.couriers[k].depart_time;
        }
        for (std::size_t p = 0; p < 100; ++p) {
            CHECK(a.parcels[p].dest == b.parcels[p].dest);
            CHECK(a.parcels[p].id == static_cast<ParcelId>(p));
            CHECK(inst.demand[static_cast<std::size_t>(a.parcels[p].dest)] > 0.0);
        }
        CHECK(differs);
    }
    SUBCASE("concentrated demand") {
        Instance one = inst;
        std::fill(one.demand.begin(), one.demand.end(), 0.0);
        one.demand[3] = 50.0;
        for (const auto& p : sample_realization(one, 40, 0, 3600, 1).parcels) CHECK(p.dest == 3);
    }
    SUBCASE("OD frequencies follow supply") {
        const std::size_t draws = 10000;
        const auto day = sample_realization(inst, 0, draws, 86400, 2);
        const std::size_t n = inst.n_regions;
        std::vector<int> counts(n * n, 0);
        for (const auto& c : day.couriers) ++counts[static_cast<std::size_t>(c.origin) * n + c.dest];
        const double total = inst.total_supply();
        int outside = 0;
        for (std::size_t k = 0; k < n * n; ++k) {
            const double p = inst.supply.values()[k] / total;
            const double mean = p * draws, sd = std::sqrt(draws * p * (1 - p));
            if (p == 0.0) CHECK(counts[k] == 0);
            else outside += std::abs(counts[k] - mean) > 3 * sd;
        }
        // About 0.3% of cells may fall outside 3 sigma by chance.
        CHECK(outside <= 3);
    }
    SUBCASE("day counts and Poisson demand") {
        SimConfig cfg;
        const auto day = sample_day(inst, cfg, 4);
        CHECK(day.parcels.size() == 300);
        CHECK(day.couriers.size() == 400);
        cfg.poisson_demand = true;
        const auto noisy = sample_day(inst, cfg, 4);
        CHECK(noisy.couriers.size() == 400);
        CHECK(noisy.couriers[17].depart_time == day.couriers[17].depart_time);
        std::set<std::size_t> sizes;
        for (std::uint64_t s = 0; s < 10; ++s) sizes.insert(sample_day(inst, cfg, s).parcels.size());
        CHECK(sizes.size() > 1);
    }
}

TEST_CASE("stage-2 hub assignment of parcels follows the region counts") {
    const Instance inst = small_city();
    const auto tensor = FeasibilityTensor::build(inst, 500.0);
    const auto dep = deploy(inst, tensor, {0, 2, 5});
    auto day = sample_day(inst, SimConfig{}, 3);
    const auto demand = realized_demand(day, inst.n_regions);
    for (auto stage2 : {Stage2Policy::Nearest, Stage2Policy::Ca}) {
        assign_parcel_hubs(day, inst, dep, stage2, 1.0);
        const auto expected = stage2 == Stage2Policy::Nearest
                                  ? assign_nearest(inst, dep.hubs, demand)
                                  : assign_ca(inst, dep.hubs, demand, dep.z_per_hub, 1.0);
        for (std::size_t r = 0; r < inst.n_regions; ++r)
            for (std::size_t k = 0; k < dep.hubs.size(); ++k) {
                int count = 0;
                for (const auto& p : day.parcels) count += p.dest == static_cast<RegionId>(r) && p.hub == dep.hubs[k];
                CHECK(count == expected(r, k));
            }
    }
}

TEST_CASE("degenerate days") {
    Instance line = testing::line_instance({0, 100, 200, 300});
    line.demand = {0, 0, 1, 0};
    line.supply(0, 3) = 1.0;
    const auto tensor = FeasibilityTensor::build(line, 0.0);
    const auto dep = deploy(line, tensor, {1});
    const CostParams params;
    SUBCASE("no couriers") {
        const auto day = sample_realization(line, 3, 0, 100, 1);
        const auto out = run(day, dep, Stage2Policy::Nearest, Stage3Policy::MinDetour, line, params, SimConfig{});
        CHECK(out.served == 0);
        CHECK(out.unserved == 3);
        CHECK(out.cost.total == 250.0 + 7.5 * 3);
    }
    SUBCASE("one courier, one feasible parcel, every policy") {
        const auto day = sample_realization(line, 1, 1, 100, 1);
        for (auto s3 : {Stage3Policy::Static, Stage3Policy::Batch, Stage3Policy::MinDetour, Stage3Policy::CaPriority}) {
            const auto out = run(day, dep, Stage2Policy::Nearest, s3, line, params, SimConfig{});
            CHECK(out.served == 1);
            CHECK(out.unserved == 0);
            CHECK(out.avg_detour == 0.0);
            CHECK(out.cost.total == 250.0 + 5.0);
            CHECK(out.per_region_served[2] == 1);
        }
    }
}

TEST_CASE("event log invariants") {
    const Instance inst = small_city(6);
    const auto tensor = FeasibilityTensor::build(inst, 500.0);
    const auto dep = deploy(inst, tensor, {1, 3});
    SimConfig cfg;
    cfg.record_events = true;
    cfg.batch_size = 7;
    const CostParams params;
    const double speed = cfg.speed_kmh / 3.6;
    for (const auto& [s2, s3] : kAllPolicies) {
        auto day = sample_day(inst, cfg, 11);
        const auto out = run(day, dep, s2, s3, inst, params, cfg);
        assign_parcel_hubs(day, inst, dep, s2, cfg.gamma);

        std::set<int> delivered, served_by;
        std::vector<double> pickup_at(day.parcels.size(), -1.0);
        double last = 0.0;
        std::size_t arrivals = 0;
        for (const auto& e : out.events) {
            CHECK(e.time >= last);
            last = e.time;
            if (e.kind == EventKind::CourierArrival) {
                ++arrivals;
                CHECK(e.time == day.couriers[static_cast<std::size_t>(e.courier)].depart_time);
                continue;
            }
            REQUIRE(e.parcel.has_value());
            const Parcel& p = day.parcels[static_cast<std::size_t>(*e.parcel)];
            if (e.kind == EventKind::Pickup) {
                pickup_at[static_cast<std::size_t>(*e.parcel)] = e.time;
            } else {
                CHECK(delivered.insert(*e.parcel).second);
                CHECK(served_by.insert(e.courier).second);
                const double leg = inst.dist(static_cast<std::size_t>(p.hub), static_cast<std::size_t>(p.dest)) / speed;
                CHECK(e.time - pickup_at[static_cast<std::size_t>(*e.parcel)] == doctest::Approx(leg).epsilon(1e-12));
            }
        }
        CHECK(arrivals == day.couriers.size());
        CHECK(delivered.size() == out.served);
        CHECK(out.served + out.unserved == day.parcels.size());
        CHECK(out.cost.total == 250.0 * 2 + 5.0 * out.served + 7.5 * out.unserved);
        int per_region = 0;
        for (int v : out.per_region_served) per_region += v;
        CHECK(per_region == static_cast<int>(out.served));
    }
}

TEST_CASE("static policy serves exactly the offline optimum") {
    Instance inst = small_city(7, 10, 10);
    const auto tensor = FeasibilityTensor::build(inst, 500.0);
    const auto dep = deploy(inst, tensor, {0, 4});
    const CostParams params;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto day = sample_realization(inst, 10, 10, 86400, seed);
        const auto out = run(day, dep, Stage2Policy::Nearest, Stage3Policy::Static, inst, params, SimConfig{});
        assign_parcel_hubs(day, inst, dep, Stage2Policy::Nearest, 1.0);
        CHECK(out.served == match_static(day.parcels, day.couriers, inst.dist, 500.0).size());
    }
}

TEST_CASE("static dominates the dynamic policies on common random numbers") {
    const Instance inst = small_city(8);
    const auto tensor = FeasibilityTensor::build(inst, 500.0);
    const auto dep = deploy(inst, tensor, {1, 2, 4});
    SimConfig cfg;
    const auto res = replicate(inst, dep, CostParams{}, cfg,
                               {{Stage2Policy::Nearest, Stage3Policy::Static},
                                {Stage2Policy::Nearest, Stage3Policy::Batch},
                                {Stage2Policy::Nearest, Stage3Policy::MinDetour},
                                {Stage2Policy::Nearest, Stage3Policy::CaPriority}},
                               12, 99, 4);
    for (std::size_t k = 0; k < 12; ++k)
        for (std::size_t p = 1; p < 4; ++p) CHECK(res[0].runs[k].served >= res[p].runs[k].served);
    CHECK(res[0].served.mean > 0.0);
}

TEST_CASE("replication") {
    const Instance inst = small_city(9);
    const auto tensor = FeasibilityTensor::build(inst, 500.0);
    const auto dep = deploy(inst, tensor, {0, 3});
    const CostParams params;
    const SimConfig cfg;
    SUBCASE("single run equals a direct run") {
        const auto res = replicate(inst, dep, params, cfg, {{Stage2Policy::Nearest, Stage3Policy::MinDetour}}, 1, 5);
        const auto direct = run(sample_day(inst, cfg, replication_seed(5, 0)), dep, Stage2Policy::Nearest,
                                Stage3Policy::MinDetour, inst, params, cfg);
        CHECK(res[0].runs[0].served == direct.served);
        CHECK(res[0].served.mean == static_cast<double>(direct.served));
        CHECK(res[0].served.stdev == 0.0);
    }
    SUBCASE("thread count does not change results") {
        const auto a = replicate(inst, dep, params, cfg, kAllPolicies, 6, 17, 1);
        const auto b = replicate(inst, dep, params, cfg, kAllPolicies, 6, 17, 6);
        for (std::size_t p = 0; p < a.size(); ++p)
            for (std::size_t k = 0; k < 6; ++k) {
                CHECK(a[p].runs[k].served == b[p].runs[k].served);
                CHECK(a[p].runs[k].avg_detour == b[p].runs[k].avg_detour);
            }
    }
    SUBCASE("standard error shrinks with more runs") {
        // Means over 4-run groups vary about twice as much as over 16-run groups.
        const auto res = replicate(inst, dep, params, cfg, {{Stage2Policy::Nearest, Stage3Policy::MinDetour}}, 128, 3);
        auto spread = [&](std::size_t group) {
            std::vector<double> means;
            for (std::size_t g = 0; g + group <= 128; g += group) {
                double m = 0.0;
                for (std::size_t k = g; k < g + group; ++k) m += static_cast<double>(res[0].runs[k].served);
                means.push_back(m / static_cast<double>(group));
            }
            return summarize(means).stdev;
        };
        const double ratio = spread(4) / spread(16);
        CHECK(ratio > 1.2);
        CHECK(ratio < 3.5);
    }
    SUBCASE("summary statistics") {
        const auto s = summarize({1.0, 2.0, 3.0, 4.0});
        CHECK(s.mean == 2.5);
        CHECK(s.stdev == doctest::Approx(std::sqrt(5.0 / 3.0)));
        CHECK_THROWS_AS(replicate(inst, dep, params, cfg, kAllPolicies, 0, 1), ValidationError);
    }
}

TEST_CASE("joint static bounds every policy on the same day") {
    const Instance inst = small_city(10);
    const auto tensor = FeasibilityTensor::build(inst, 500.0);
    const auto dep = deploy(inst, tensor, {0, 2, 5});
    const SimConfig cfg;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Realization day = sample_day(inst, cfg, seed);
        const std::size_t bound = joint_static_served(day, dep);
        CHECK(bound <= day.parcels.size());
        for (auto s2 : {Stage2Policy::Nearest, Stage2Policy::Ca})
            for (auto s3 : {Stage3Policy::Static, Stage3Policy::Batch, Stage3Policy::MinDetour, Stage3Policy::CaPriority})
                CHECK(run(day, dep, s2, s3, inst, CostParams{}, cfg).served <= bound);
    }
}
