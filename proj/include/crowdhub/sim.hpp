#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crowdhub/ca.hpp"
#include "crowdhub/feasibility.hpp"
#include "crowdhub/instance.hpp"
#include "crowdhub/matching.hpp"
#include "crowdhub/rng.hpp"

namespace crowdhub {

enum class Stage2Policy { Nearest, Ca };
enum class Stage3Policy { Static, Batch, MinDetour, CaPriority };

std::string policy_name(Stage2Policy p);
std::string policy_name(Stage3Policy p);
// Accepts the CLI spellings: nearest|ca and static|batch|mindetour|ca.
// Throws UsageError otherwise.
Stage2Policy parse_stage2(const std::string& name);
Stage3Policy parse_stage3(const std::string& name);

struct SimConfig {
    double horizon = 86400.0;   // seconds in the simulated day
    double speed_kmh = 15.0;    // courier travel speed (cycling)
    std::size_t batch_size = 50;
    double gamma = 1.0;         // exponent of the CA-proportional stage 2
    bool poisson_demand = false;  // parcel count ~ Poisson(sum d) instead of round(sum d)
    bool record_events = false;

    void validate() const;
};

// One simulated day. Parcels carry only a destination until stage 2 sets
// their hub (hub = -1 before). Couriers are sorted by departure time and
// numbered in that order; parcel and courier ids equal their index.
struct Realization {
    std::vector<Parcel> parcels;
    std::vector<Courier> couriers;
    std::uint64_t seed = 0;
};

// Destinations iid proportional to demand, courier ODs iid proportional to
// supply, departures uniform on [0, horizon]. Demand and supply use separate
// streams of `seed`.
Realization sample_realization(const Instance& inst, std::size_t n_parcels, std::size_t n_couriers, double horizon,
                               std::uint64_t seed);
// Counts from the instance: round(sum d) parcels (or Poisson with
// cfg.poisson_demand) and round(sum lambda) couriers.
Realization sample_day(const Instance& inst, const SimConfig& cfg, std::uint64_t seed);

// Parcels per destination region.
std::vector<int> realized_demand(const Realization& day, std::size_t n_regions);

enum class EventKind { CourierArrival, Pickup, Delivery };

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::CourierArrival;
    CourierId courier = 0;
    std::optional<ParcelId> parcel;
};

struct SimOutcome {
    std::size_t served = 0;
    std::size_t unserved = 0;
    CaCost cost;
    double avg_detour = 0.0;  // meters, over served parcels
    std::vector<int> per_region_served;
    std::string policy;       // "<stage2>/<stage3>"
    double runtime = 0.0;     // seconds of wall-clock, not deterministic
    std::vector<Event> events;  // filled when record_events is set
};

// Everything about an open hub set that does not depend on the day.
struct Deployment {
    HubSet slots;
    std::vector<RegionId> hubs;                  // distinct regions, sorted
    CaEstimate ca;                               // full open set
    std::vector<double> ratios;                  // ca.z / demand, for CA priority
    std::vector<std::vector<double>> z_per_hub;  // single-hub estimates, for CA stage 2
    RegionBitsets reach;                         // feasibility with all these hubs open
};

Deployment deploy(const Instance& inst, const FeasibilityTensor& tensor, const HubSet& slots,
                  const CaOptions& opts = {});

// Slots and hub regions only, without any CA quantities: enough for nearest
// stage 2 with static, batch or minimal-detour stage 3.
Deployment deploy_plain(const Instance& inst, const HubSet& slots);

// Stage-2 hub of every parcel, in place.
void assign_parcel_hubs(Realization& day, const Instance& inst, const Deployment& dep, Stage2Policy stage2,
                        double gamma);

// Parcels the day could serve if stage 2 and stage 3 were solved together
// with the whole day known (each parcel free to use any open hub).
std::size_t joint_static_served(const Realization& day, const Deployment& dep);

// Event-driven simulation of one day under the given policies.
SimOutcome run(const Realization& day, const Deployment& dep, Stage2Policy stage2, Stage3Policy stage3,
               const Instance& inst, const CostParams& params, const SimConfig& cfg);

struct Stats {
    double mean = 0.0;
    double stdev = 0.0;  // sample standard deviation; 0 for one run
};
Stats summarize(const std::vector<double>& xs);

struct PolicyRuns {
    Stage2Policy stage2;
    Stage3Policy stage3;
    std::vector<SimOutcome> runs;  // one per seed, in seed order
    Stats served, cost, detour;
};

// Seed of replication k.
inline std::uint64_t replication_seed(std::uint64_t base, std::size_t k) { return derive_seed(base, k); }

// n_runs days; in each, every policy sees the same realization. Days run
// concurrently.
std::vector<PolicyRuns> replicate(const Instance& inst, const Deployment& dep, const CostParams& params,
                                  const SimConfig& cfg,
                                  const std::vector<std::pair<Stage2Policy, Stage3Policy>>& policies,
                                  std::size_t n_runs, std::uint64_t base_seed, unsigned threads = 0);

}  // namespace crowdhub
