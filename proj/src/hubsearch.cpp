#include "crowdhub/hubsearch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <limits>
#include <mutex>
#include <unordered_map>

#include "crowdhub/error.hpp"
#include "crowdhub/parallel.hpp"

namespace crowdhub {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSimilarityFloor = 1e-6;

struct WeightedPair {
    std::size_t offset;  // (i * n + j) * words
    double lambda;
};

std::vector<WeightedPair> supplied_pairs(const Instance& inst, std::size_t words) {
    std::vector<WeightedPair> pairs;
    const std::size_t n = inst.n_regions;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (inst.supply(i, j) > 0.0) pairs.push_back({(i * n + j) * words, inst.supply(i, j)});
    return pairs;
}

double overlap(std::span<const Word> a, std::span<const Word> b, const std::vector<WeightedPair>& pairs,
               std::size_t words) {
    double total = 0.0;
    for (const auto& p : pairs) {
        int bits = 0;
        for (std::size_t w = 0; w < words; ++w) bits += std::popcount(a[p.offset + w] & b[p.offset + w]);
        total += p.lambda * bits;
    }
    return total;
}

double ratio(double shared, double fa, double fb) {
    if (!(fa > 0.0) || !(fb > 0.0)) return 0.0;
    return std::min(1.0, shared * shared / (fa * fb));
}

// Log of the O1 metric for hub h against the hubs in `others`.
double log_metric(HubSlot h, std::span<const HubSlot> others, const SearchSpace& space, const SearchConfig& cfg) {
    if (!space.has_flow[h]) return kNegInf;
    double denom = 1.0;
    if (!others.empty()) {
        denom = 0.0;
        for (HubSlot w : others)
            denom = cfg.use_max_similarity ? std::max(denom, space.sim(h, w)) : denom + space.sim(h, w);
        denom = std::max(denom, kSimilarityFloor);
    }
    return cfg.alpha * std::log(space.quality[h]) - cfg.beta * std::log(denom);
}

// Index drawn with probability proportional to exp(logs[k]). Entries at
// +inf win outright (uniformly among themselves); if every entry is -inf the
// draw is uniform.
std::size_t draw_log(std::span<const double> logs, Rng& rng) {
    std::vector<double> w(logs.size(), 0.0);
    double top = kNegInf;
    for (double l : logs) top = std::max(top, l);
    if (top == kNegInf) {
        std::fill(w.begin(), w.end(), 1.0);
    } else if (std::isinf(top)) {
        for (std::size_t k = 0; k < logs.size(); ++k) w[k] = logs[k] == top ? 1.0 : 0.0;
    } else {
        for (std::size_t k = 0; k < logs.size(); ++k) w[k] = std::exp(logs[k] - top);
    }
    return rng.weighted(w);
}

HubSet without(const HubSet& state, std::size_t index) {
    HubSet out = state;
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(index));
    return out;
}

HubSet repair(const HubSet& state, const SearchSpace& space, const SearchConfig& cfg, Rng& rng) {
    std::vector<HubSlot> pool;
    std::vector<double> logs;
    for (HubSlot h = 0; h < space.size(); ++h) {
        if (std::binary_search(state.begin(), state.end(), h)) continue;
        pool.push_back(h);
        logs.push_back(log_metric(h, state, space, cfg));
    }
    if (pool.empty()) return state;
    const HubSlot pick = pool[draw_log(logs, rng)];
    HubSet out = state;
    out.insert(std::lower_bound(out.begin(), out.end(), pick), pick);
    return out;
}

HubSet destroy(const HubSet& state, const SearchSpace& space, const SearchConfig& cfg, Rng& rng) {
    std::vector<double> logs(state.size());
    for (std::size_t k = 0; k < state.size(); ++k) logs[k] = -log_metric(state[k], without(state, k), space, cfg);
    return without(state, draw_log(logs, rng));
}

std::string key_of(const HubSet& hubs, std::size_t n) {
    std::string key((n + 7) / 8, '\0');
    for (HubSlot h : hubs) key[h / 8] = static_cast<char>(key[h / 8] | (1 << (h % 8)));
    return key;
}

// Evaluates each distinct hub set once, even when starts race for it.
class Memo {
public:
    Memo(std::size_t n, const Evaluator& evaluator) : n_(n), evaluator_(evaluator) {}

    double operator()(const HubSet& hubs) {
        const std::string key = key_of(hubs, n_);
        std::promise<double> promise;
        std::shared_future<double> result;
        {
            std::lock_guard lock(mutex_);
            auto [it, inserted] = table_.try_emplace(key);
            if (!inserted) {
                result = it->second;
            } else {
                it->second = promise.get_future().share();
            }
        }
        if (result.valid()) return result.get();
        try {
            const double cost = evaluator_(hubs);
            promise.set_value(cost);
            return cost;
        } catch (...) {
            promise.set_exception(std::current_exception());
            throw;
        }
    }

    std::size_t size() {
        std::lock_guard lock(mutex_);
        return table_.size();
    }

private:
    std::size_t n_;
    const Evaluator& evaluator_;
    std::mutex mutex_;
    std::unordered_map<std::string, std::shared_future<double>> table_;
};

}  // namespace

std::vector<double> hub_flows(const Instance& inst, const FeasibilityTensor& tensor) {
    const auto pairs = supplied_pairs(inst, tensor.words_per_row());
    std::vector<double> flows(tensor.n_hubs());
    for (HubSlot h = 0; h < tensor.n_hubs(); ++h)
        flows[h] = overlap(tensor.slice(h), tensor.slice(h), pairs, tensor.words_per_row());
    return flows;
}

double similarity(const Instance& inst, const FeasibilityTensor& tensor, HubSlot a, HubSlot b) {
    const auto pairs = supplied_pairs(inst, tensor.words_per_row());
    const std::size_t words = tensor.words_per_row();
    return ratio(overlap(tensor.slice(a), tensor.slice(b), pairs, words),
                 overlap(tensor.slice(a), tensor.slice(a), pairs, words),
                 overlap(tensor.slice(b), tensor.slice(b), pairs, words));
}

SimilarityMatrix similarity_matrix(const Instance& inst, const FeasibilityTensor& tensor, unsigned threads) {
    const std::size_t m = tensor.n_hubs(), words = tensor.words_per_row();
    const auto pairs = supplied_pairs(inst, words);
    const auto flows = hub_flows(inst, tensor);
    SimilarityMatrix s(m);
    parallel_for(m, threads, [&](std::size_t a) {
        for (std::size_t b = a; b < m; ++b) {
            const double shared = a == b ? flows[a] : overlap(tensor.slice(a), tensor.slice(b), pairs, words);
            s(a, b) = ratio(shared, flows[a], flows[b]);
        }
    });
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < a; ++b) s(a, b) = s(b, a);
    return s;
}

std::vector<double> quality_scores(std::span<const double> values) {
    double top = 0.0;
    for (double v : values) top = std::max(top, v);
    const double eps = top > 0.0 ? 1e-9 * top : 1.0;
    std::vector<double> q(values.size());
    for (std::size_t h = 0; h < values.size(); ++h) q[h] = (top - values[h]) + eps;
    return q;
}

SearchSpace make_search_space(const Instance& inst, const FeasibilityTensor& tensor, const CostParams& params,
                              const CaOptions& opts, unsigned threads) {
    SearchSpace space;
    space.values = single_hub_values(inst, tensor, params, opts);
    space.quality = quality_scores(space.values);
    const auto flows = hub_flows(inst, tensor);
    space.has_flow.resize(flows.size());
    for (std::size_t h = 0; h < flows.size(); ++h) space.has_flow[h] = flows[h] > 0.0;
    space.sim = similarity_matrix(inst, tensor, threads);
    return space;
}

void SearchConfig::validate(std::size_t n_candidates) const {
    if (n_starts < 1) throw ValidationError("starts must be >= 1");
    if (n_iters < 0) throw ValidationError("iters must be >= 0");
    if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ValidationError("alpha and beta must be >= 0");
    if (min_hubs < 1) throw ValidationError("min_hubs must be >= 1");
    if (max_hubs < min_hubs) throw ValidationError("max_hubs must be >= min_hubs");
    if (min_hubs > n_candidates) throw ValidationError("min_hubs exceeds the candidate count");
}

std::string operator_name(Operator op) {
    switch (op) {
        case Operator::Construct: return "construct";
        case Operator::Repair: return "repair";
        case Operator::Destroy: return "destroy";
        case Operator::Swap: return "swap";
    }
    return "?";
}

HubSet construct_initial(const SearchSpace& space, Rng& rng, std::size_t q) {
    if (q > space.size()) throw ValidationError("cannot open more hubs than candidates");
    std::vector<double> w = space.quality;
    HubSet out;
    for (std::size_t k = 0; k < q; ++k) {
        std::size_t pick = rng.weighted(w);
        if (pick == w.size()) {
            // Only zero-weight hubs remain: take them uniformly.
            std::vector<HubSlot> rest;
            for (HubSlot h = 0; h < w.size(); ++h)
                if (!std::binary_search(out.begin(), out.end(), h)) rest.push_back(h);
            pick = rest[rng.below(rest.size())];
        }
        out.insert(std::lower_bound(out.begin(), out.end(), pick), pick);
        w[pick] = 0.0;
    }
    return out;
}

HubSet op_repair(const HubSet& state, const SearchSpace& space, const SearchConfig& cfg, Rng& rng) {
    if (state.size() >= space.size()) throw ValidationError("repair needs a hub outside the solution");
    return repair(state, space, cfg, rng);
}

HubSet op_destroy(const HubSet& state, const SearchSpace& space, const SearchConfig& cfg, Rng& rng) {
    if (state.size() < 2) throw ValidationError("destroy needs at least two hubs");
    return destroy(state, space, cfg, rng);
}

HubSet op_swap(const HubSet& state, const SearchSpace& space, const SearchConfig& cfg, Rng& rng) {
    if (state.empty()) throw ValidationError("swap needs a non-empty solution");
    return repair(destroy(state, space, cfg, rng), space, cfg, rng);
}

SearchResult search(const SearchSpace& space, const SearchConfig& cfg, const Evaluator& evaluator) {
    cfg.validate(space.size());
    const std::size_t cap = std::min(cfg.max_hubs, space.size());
    const std::size_t initial = std::clamp(cfg.initial_hubs ? cfg.initial_hubs : cap, cfg.min_hubs, cap);
    Memo memo(space.size(), evaluator);

    struct StartOutcome {
        HubSet best;
        double cost = 0.0;
        std::vector<TrajectoryStep> steps;
    };
    std::vector<StartOutcome> starts(static_cast<std::size_t>(cfg.n_starts));

    const unsigned threads = cfg.threads ? cfg.threads : std::min<unsigned>(resolve_threads(0), cfg.n_starts);
    parallel_for(starts.size(), threads, [&](std::size_t s) {
        Rng rng(cfg.seed + s);
        StartOutcome& out = starts[s];
        HubSet current = construct_initial(space, rng, initial);
        double current_cost = memo(current);
        out.steps.push_back({static_cast<int>(s), 0, Operator::Construct, true, current_cost, current_cost, current});
        for (int it = 1; it <= cfg.n_iters; ++it) {
            const double u = rng.uniform();
            Operator op = u < 0.6 ? Operator::Swap : u < 0.8 ? Operator::Repair : Operator::Destroy;
            // An operator that would leave the allowed cardinality falls back to a swap.
            if (op == Operator::Repair && current.size() >= cap) op = Operator::Swap;
            if (op == Operator::Destroy && current.size() <= cfg.min_hubs) op = Operator::Swap;
            HubSet next = op == Operator::Swap     ? op_swap(current, space, cfg, rng)
                          : op == Operator::Repair ? op_repair(current, space, cfg, rng)
                                                   : op_destroy(current, space, cfg, rng);
            const double cost = memo(next);
            const bool accepted = cost < current_cost;
            if (accepted) {
                current = next;
                current_cost = cost;
            }
            out.steps.push_back({static_cast<int>(s), it, op, accepted, cost, current_cost, std::move(next)});
        }
        out.best = current;
        out.cost = current_cost;
    });

    SearchResult result;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        if (s == 0 || starts[s].cost < result.best_cost) {
            result.best_cost = starts[s].cost;
            result.best_hubs = starts[s].best;
            result.best_start = static_cast<int>(s);
        }
        for (auto& step : starts[s].steps) result.trajectory.push_back(std::move(step));
    }
    result.evaluations = memo.size();
    return result;
}

Evaluator ca_evaluator(const Instance& inst, const FeasibilityTensor& tensor, const CostParams& params,
                       const CaOptions& opts) {
    return [&inst, &tensor, params, opts](const HubSet& hubs) {
        const auto est = estimate(inst, tensor, OpenHubMask::of(tensor.n_hubs(), hubs), opts);
        return total_cost(inst, params, est, hubs.size()).total;
    };
}

Enumerated enumerate_best(std::size_t n_candidates, std::size_t min_hubs, std::size_t max_hubs,
                          const Evaluator& evaluator) {
    Enumerated best;
    bool found = false;
    for (std::size_t k = std::max<std::size_t>(min_hubs, 1); k <= std::min(max_hubs, n_candidates); ++k) {
        HubSet combo(k);
        for (std::size_t m = 0; m < k; ++m) combo[m] = m;
        while (true) {
            const double cost = evaluator(combo);
            ++best.evaluated;
            if (!found || cost < best.cost) {
                best.hubs = combo;
                best.cost = cost;
                found = true;
            }
            // Next combination in lexicographic order.
            std::size_t m = k;
            while (m > 0 && combo[m - 1] == n_candidates - k + m - 1) --m;
            if (m == 0) break;
            ++combo[m - 1];
            for (std::size_t t = m; t < k; ++t) combo[t] = combo[t - 1] + 1;
        }
    }
    if (!found) throw ValidationError("no hub set to enumerate");
    return best;
}

}  // namespace crowdhub
