#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crowdhub {

using RegionId = int;

// Dense row-major square matrix of doubles.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }

    SquareMatrix transposed() const;
    double sum() const;

    bool operator==(const SquareMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

// Problem data: regions double as points; distances in meters, demand in
// parcels/day, supply in couriers/day per origin-destination pair.
struct Instance {
    std::size_t n_regions = 0;
    SquareMatrix dist;
    std::vector<double> demand;
    SquareMatrix supply;
    std::vector<RegionId> hub_candidates;
    std::vector<Point> coords;  // optional, empty when unknown

    double total_demand() const;
    double total_supply() const { return supply.sum(); }

    // Throws ValidationError naming the offending field and index.
    void validate() const;

    // Copy whose supply matrix is rescaled to the given total.
    Instance with_total_supply(double total) const;

    bool operator==(const Instance&) const = default;
};

struct CostParams {
    double hub_cost = 250.0;     // f, $/day per open hub
    double reward = 5.0;         // p_cs, $/parcel paid to a courier
    double regular_cost = 7.5;   // p_reg, $/parcel by van
    double max_detour = 500.0;   // tau, meters
    int max_hubs = 5;            // Q

    // Throws ValidationError on negative values or Q < 1. Returns a warning
    // message when crowd-shipping cannot reduce cost (reward >= regular_cost).
    std::optional<std::string> validate() const;
};

// Endogenous courier supply as a function of detour tolerance and reward.
struct SupplyModel {
    double base_tau = 500.0;
    double base_reward = 5.0;
    double detour_elasticity = 0.10;  // fraction of base lost per 500 m beyond base_tau
    double reward_elasticity = 0.05;  // fraction of base gained per extra $

    void validate() const;
};

// Couriers/day at (tau, reward). Linear in both offsets, relative to the base
// point, rounded half-up and clamped at zero.
double scaled_supply(const SupplyModel& model, double tau, double reward, double base_lambda);

// Splits `units` integer units over non-negative weights by largest
// remainder; ties go to the lower index. All zeros when the weights sum to 0.
std::vector<long long> apportion(std::span<const double> weights, long long units);

struct SyntheticSpec {
    std::uint64_t seed = 1;
    std::size_t n_regions = 90;
    double width = 5500.0;
    double height = 3500.0;
    double demand_total = 4300.0;
    double supply_total = 4221.0;
    std::size_t hotspots = 3;
    std::size_t n_candidates = 0;  // 0 means every region is a candidate
};

Instance generate_synthetic(const SyntheticSpec& spec);

Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& inst);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);

}  // namespace crowdhub
