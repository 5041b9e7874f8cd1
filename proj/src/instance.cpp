#include "crowdhub/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "crowdhub/error.hpp"
#include "crowdhub/rng.hpp"

namespace crowdhub {

using nlohmann::json;

SquareMatrix SquareMatrix::transposed() const {
    SquareMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double SquareMatrix::sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
}

double Instance::total_demand() const {
    double s = 0.0;
    for (double d : demand) s += d;
    return s;
}

namespace {

std::string at(std::size_t i) { return "[" + std::to_string(i) + "]"; }
std::string at(std::size_t i, std::size_t j) { return "[" + std::to_string(i) + "][" + std::to_string(j) + "]"; }

void check_square(const SquareMatrix& m, std::size_t n, const char* name) {
    if (m.size() != n)
        throw ValidationError(std::string("dimension mismatch: ") + name + " is " + std::to_string(m.size()) +
                              "x" + std::to_string(m.size()) + ", expected " + std::to_string(n) + "x" +
                              std::to_string(n));
}

}  // namespace

void Instance::validate() const {
    if (n_regions == 0) throw ValidationError("regions: must be at least 1");
    check_square(dist, n_regions, "dist");
    check_square(supply, n_regions, "supply");
    if (demand.size() != n_regions)
        throw ValidationError("dimension mismatch: demand has length " + std::to_string(demand.size()) +
                              ", expected " + std::to_string(n_regions));
    if (!coords.empty() && coords.size() != n_regions)
        throw ValidationError("dimension mismatch: coords has length " + std::to_string(coords.size()) +
                              ", expected " + std::to_string(n_regions));
    for (std::size_t i = 0; i < n_regions; ++i) {
        for (std::size_t j = 0; j < n_regions; ++j) {
            const double t = dist(i, j);
            if (!std::isfinite(t) || t < 0.0)
                throw ValidationError("dist" + at(i, j) + ": negative or non-finite distance");
            const double l = supply(i, j);
            if (!std::isfinite(l) || l < 0.0)
                throw ValidationError("supply" + at(i, j) + ": negative or non-finite supply");
        }
        if (dist(i, i) != 0.0) throw ValidationError("dist" + at(i, i) + ": diagonal must be 0");
        if (!std::isfinite(demand[i]) || demand[i] < 0.0)
            throw ValidationError("demand" + at(i) + ": negative or non-finite demand");
    }
    if (hub_candidates.empty()) throw ValidationError("hub_candidates: must be non-empty");
    for (std::size_t k = 0; k < hub_candidates.size(); ++k) {
        const RegionId h = hub_candidates[k];
        if (h < 0 || static_cast<std::size_t>(h) >= n_regions)
            throw ValidationError("hub_candidates" + at(k) + ": region " + std::to_string(h) + " out of range");
    }
}

Instance Instance::with_total_supply(double total) const {
    Instance out = *this;
    const double current = supply.sum();
    if (current > 0.0) {
        const double scale = total / current;
        for (double& v : out.supply.values()) v *= scale;
    }
    return out;
}

std::optional<std::string> CostParams::validate() const {
    if (hub_cost < 0.0) throw ValidationError("hub_cost: must be >= 0");
    if (reward < 0.0) throw ValidationError("reward: must be >= 0");
    if (regular_cost < 0.0) throw ValidationError("regular_cost: must be >= 0");
    if (max_detour < 0.0) throw ValidationError("max_detour: must be >= 0");
    if (max_hubs < 1) throw ValidationError("max_hubs: must be >= 1");
    if (!(reward < regular_cost))
        return "reward >= regular_cost: crowd-shipping does not reduce cost";
    return std::nullopt;
}

void SupplyModel::validate() const {
    if (detour_elasticity < 0.0 || detour_elasticity >= 1.0)
        throw ValidationError("detour_elasticity: must be in [0,1)");
    if (reward_elasticity < 0.0 || reward_elasticity >= 1.0)
        throw ValidationError("reward_elasticity: must be in [0,1)");
}

double scaled_supply(const SupplyModel& model, double tau, double reward, double base_lambda) {
    if (tau < 0.0) throw ValidationError("tau: must be >= 0");
    if (reward < 0.0) throw ValidationError("reward: must be >= 0");
    model.validate();
    const double factor = 1.0 - model.detour_elasticity * (tau - model.base_tau) / 500.0 +
                          model.reward_elasticity * (reward - model.base_reward);
    const double value = std::floor(base_lambda * factor + 0.5);
    return value > 0.0 ? value : 0.0;
}

std::vector<long long> apportion(std::span<const double> weights, long long units) {
    std::vector<long long> out(weights.size(), 0);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0) || units <= 0) return out;
    std::vector<std::pair<double, std::size_t>> remainders;
    remainders.reserve(weights.size());
    long long assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(units) * weights[i] / total;
        const double whole = std::floor(exact);
        out[i] = static_cast<long long>(whole);
        assigned += out[i];
        remainders.emplace_back(exact - whole, i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < units && k < remainders.size(); ++k, ++assigned)
        ++out[remainders[k].second];
    return out;
}

Instance generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n_regions < 2) throw ValidationError("regions: must be at least 2");
    if (spec.demand_total < 0.0 || spec.supply_total < 0.0) throw ValidationError("totals: must be >= 0");
    if (spec.width <= 0.0 || spec.height <= 0.0) throw ValidationError("area: must be positive");
    if (spec.n_candidates > spec.n_regions) throw ValidationError("candidates: exceeds region count");

    Rng rng(spec.seed);
    const std::size_t n = spec.n_regions;
    Instance inst;
    inst.n_regions = n;
    inst.coords.resize(n);
    for (auto& p : inst.coords) {
        p.x = std::round(rng.uniform(0.0, spec.width));
        p.y = std::round(rng.uniform(0.0, spec.height));
    }
    inst.dist = SquareMatrix(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inst.dist(i, j) = std::abs(inst.coords[i].x - inst.coords[j].x) +
                              std::abs(inst.coords[i].y - inst.coords[j].y);

    // Supply hotspots sit near the middle of the area; demand grows with the
    // distance from the nearest hotspot.
    const double scale = 0.5 * (spec.width + spec.height);
    std::vector<std::size_t> hotspots;
    std::vector<char> taken(n, 0);
    for (std::size_t k = 0; k < std::min(spec.hotspots, n); ++k) {
        const Point target{spec.width * (0.5 + 0.15 * rng.gaussian()), spec.height * (0.5 + 0.15 * rng.gaussian())};
        std::size_t best = n;
        double best_d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            const double d = std::abs(inst.coords[i].x - target.x) + std::abs(inst.coords[i].y - target.y);
            if (best == n || d < best_d) {
                best = i;
                best_d = d;
            }
        }
        taken[best] = 1;
        hotspots.push_back(best);
    }

    std::vector<double> attract(n, 4.0);
    std::vector<double> nearest_hot(n, scale);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c : hotspots) {
            attract[i] += std::exp(-inst.dist(i, c) / (0.3 * scale));
            nearest_hot[i] = std::min(nearest_hot[i], inst.dist(i, c));
        }
    }

    std::vector<double> trip_weight(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) trip_weight[i * n + j] = attract[i] * attract[j] * std::exp(-inst.dist(i, j) / scale);
    const auto milli = apportion(trip_weight, std::llround(spec.supply_total * 1000.0));
    inst.supply = SquareMatrix(n);
    for (std::size_t k = 0; k < n * n; ++k) inst.supply.values()[k] = static_cast<double>(milli[k]) / 1000.0;

    std::vector<double> demand_weight(n);
    for (std::size_t r = 0; r < n; ++r)
        demand_weight[r] = (0.15 + nearest_hot[r] / (0.5 * scale)) * rng.uniform(0.5, 1.5);
    const auto parcels = apportion(demand_weight, std::llround(spec.demand_total));
    inst.demand.resize(n);
    for (std::size_t r = 0; r < n; ++r) inst.demand[r] = static_cast<double>(parcels[r]);

    if (spec.n_candidates == 0) {
        inst.hub_candidates.resize(n);
        std::iota(inst.hub_candidates.begin(), inst.hub_candidates.end(), 0);
    } else {
        std::vector<RegionId> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t k = 0; k < spec.n_candidates; ++k) {
            const std::size_t pick = k + rng.below(n - k);
            std::swap(pool[k], pool[pick]);
        }
        pool.resize(spec.n_candidates);
        std::sort(pool.begin(), pool.end());
        inst.hub_candidates = pool;
    }
    inst.validate();
    return inst;
}

namespace {

SquareMatrix parse_matrix(const json& j, const char* name, std::size_t n) {
    if (!j.is_array()) throw ParseError(std::string(name) + ": expected an array of rows");
    if (j.size() != n)
        throw ValidationError(std::string("dimension mismatch: ") + name + " has " + std::to_string(j.size()) +
                              " rows, expected " + std::to_string(n));
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = j[i];
        if (!row.is_array()) throw ParseError(std::string(name) + at(i) + ": expected an array");
        if (row.size() != n)
            throw ValidationError(std::string("dimension mismatch: ") + name + at(i) + " has length " +
                                  std::to_string(row.size()) + ", expected " + std::to_string(n));
        for (std::size_t k = 0; k < n; ++k) {
            if (!row[k].is_number()) throw ParseError(std::string(name) + at(i, k) + ": expected a number");
            m(i, k) = row[k].get<double>();
        }
    }
    return m;
}

}  // namespace

Instance parse_instance(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed instance document: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("instance document must be an object");
    for (const char* key : {"schema_version", "regions", "dist", "demand", "supply", "hub_candidates"})
        if (!j.contains(key)) throw ParseError(std::string("missing key: ") + key);
    if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != 1)
        throw ParseError("schema_version: unsupported (expected 1)");
    if (!j["regions"].is_number_integer() || j["regions"].get<long long>() < 1)
        throw ParseError("regions: expected a positive integer");

    Instance inst;
    inst.n_regions = j["regions"].get<std::size_t>();
    const std::size_t n = inst.n_regions;
    inst.dist = parse_matrix(j["dist"], "dist", n);
    inst.supply = parse_matrix(j["supply"], "supply", n);

    const json& demand = j["demand"];
    if (!demand.is_array()) throw ParseError("demand: expected an array");
    if (demand.size() != n)
        throw ValidationError("dimension mismatch: demand has length " + std::to_string(demand.size()) +
                              ", expected " + std::to_string(n));
    for (std::size_t r = 0; r < n; ++r) {
        if (!demand[r].is_number()) throw ParseError("demand" + at(r) + ": expected a number");
        inst.demand.push_back(demand[r].get<double>());
    }

    const json& cands = j["hub_candidates"];
    if (!cands.is_array()) throw ParseError("hub_candidates: expected an array");
    for (std::size_t k = 0; k < cands.size(); ++k) {
        if (!cands[k].is_number_integer()) throw ParseError("hub_candidates" + at(k) + ": expected an integer");
        inst.hub_candidates.push_back(cands[k].get<RegionId>());
    }

    if (j.contains("coords")) {
        const json& coords = j["coords"];
        if (!coords.is_array()) throw ParseError("coords: expected an array");
        for (std::size_t r = 0; r < coords.size(); ++r) {
            const json& p = coords[r];
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ParseError("coords" + at(r) + ": expected [x, y]");
            inst.coords.push_back({p[0].get<double>(), p[1].get<double>()});
        }
    }
    inst.validate();
    return inst;
}

std::string serialize_instance(const Instance& inst) {
    // One matrix row per line keeps golden files diffable.
    std::ostringstream out;
    const auto row_text = [](std::span<const double> row) { return json(std::vector<double>(row.begin(), row.end())).dump(); };
    out << "{\n";
    out << "  \"schema_version\": 1,\n";
    out << "  \"regions\": " << inst.n_regions << ",\n";
    if (!inst.coords.empty()) {
        out << "  \"coords\": [\n";
        for (std::size_t r = 0; r < inst.coords.size(); ++r)
            out << "    " << json(std::vector<double>{inst.coords[r].x, inst.coords[r].y}).dump()
                << (r + 1 < inst.coords.size() ? ",\n" : "\n");
        out << "  ],\n";
    }
    const auto write_matrix = [&](const char* name, const SquareMatrix& m) {
        out << "  \"" << name << "\": [\n";
        for (std::size_t i = 0; i < m.size(); ++i) out << "    " << row_text(m.row(i)) << (i + 1 < m.size() ? ",\n" : "\n");
        out << "  ],\n";
    };
    write_matrix("dist", inst.dist);
    out << "  \"demand\": " << row_text(inst.demand) << ",\n";
    write_matrix("supply", inst.supply);
    out << "  \"hub_candidates\": " << json(inst.hub_candidates).dump() << "\n";
    out << "}\n";
    return out.str();
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open instance file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write instance file: " + path.string());
    out << serialize_instance(inst);
}

}  // namespace crowdhub
