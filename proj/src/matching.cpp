#include "crowdhub/matching.hpp"

#include <algorithm>
#include <limits>

#include "crowdhub/error.hpp"

namespace crowdhub {

std::vector<int> max_bipartite_matching(const BipartiteGraph& g) {
    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<int> match_left(g.n_left, -1), match_right(g.n_right, -1);

    // Greedy start: first free neighbour.
    for (std::size_t u = 0; u < g.n_left; ++u)
        for (int v : g.neighbours(u))
            if (match_right[v] < 0) {
                match_left[u] = v;
                match_right[v] = static_cast<int>(u);
                break;
            }

    std::vector<int> layer(g.n_left);
    std::vector<std::size_t> next_edge(g.n_left);
    std::vector<int> queue;
    std::vector<int> path_left, path_right;
    queue.reserve(g.n_left);

    while (true) {
        queue.clear();
        for (std::size_t u = 0; u < g.n_left; ++u) {
            if (match_left[u] < 0) {
                layer[u] = 0;
                queue.push_back(static_cast<int>(u));
            } else {
                layer[u] = kInf;
            }
        }
        bool reachable_free = false;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int u = queue[head];
            for (int v : g.neighbours(u)) {
                const int w = match_right[v];
                if (w < 0) {
                    reachable_free = true;
                } else if (layer[w] == kInf) {
                    layer[w] = layer[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if (!reachable_free) break;

        std::fill(next_edge.begin(), next_edge.end(), 0);
        for (std::size_t root = 0; root < g.n_left; ++root) {
            if (match_left[root] >= 0 || layer[root] != 0) continue;
            path_left.assign(1, static_cast<int>(root));
            path_right.clear();
            while (!path_left.empty()) {
                const int u = path_left.back();
                const auto adj = g.neighbours(u);
                bool advanced = false;
                while (next_edge[u] < adj.size()) {
                    const int v = adj[next_edge[u]++];
                    const int w = match_right[v];
                    if (w < 0) {
                        // Augment along the stack.
                        path_right.push_back(v);
                        for (std::size_t k = 0; k < path_left.size(); ++k) {
                            match_left[path_left[k]] = path_right[k];
                            match_right[path_right[k]] = path_left[k];
                        }
                        path_left.clear();
                        advanced = true;
                        break;
                    }
                    if (layer[w] == layer[u] + 1) {
                        path_right.push_back(v);
                        path_left.push_back(w);
                        advanced = true;
                        break;
                    }
                }
                if (!advanced) {
                    layer[u] = kInf;
                    path_left.pop_back();
                    if (!path_right.empty()) path_right.pop_back();
                }
            }
        }
    }
    return match_left;
}

namespace {

std::vector<MatchDecision> match_waiting(std::span<const Parcel> parcels, std::span<const Courier> couriers,
                                         const SquareMatrix& dist, double tau) {
    std::vector<std::size_t> order(couriers.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return couriers[a].id < couriers[b].id; });

    BipartiteGraph g;
    g.n_right = parcels.size();
    std::vector<int> row;
    for (std::size_t k : order) {
        row.clear();
        for (std::size_t p = 0; p < parcels.size(); ++p)
            if (parcels[p].state == ParcelState::Waiting && feasible(parcels[p], couriers[k], dist, tau))
                row.push_back(static_cast<int>(p));
        g.add_row(row);
    }
    const auto match = max_bipartite_matching(g);
    std::vector<MatchDecision> out;
    for (std::size_t u = 0; u < order.size(); ++u) {
        if (match[u] < 0) continue;
        const Courier& c = couriers[order[u]];
        const Parcel& p = parcels[static_cast<std::size_t>(match[u])];
        out.push_back({c.id, p.id, parcel_detour(p, c, dist)});
    }
    return out;
}

// Ranking key for the dynamic rules: lexicographic, smaller is better.
struct Rank {
    double ratio;
    double detour;
    ParcelId id;
    bool operator<(const Rank& o) const {
        if (ratio != o.ratio) return ratio < o.ratio;
        if (detour != o.detour) return detour < o.detour;
        return id < o.id;
    }
};

constexpr double kUnranked = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<MatchDecision> match_static(std::span<const Parcel> parcels, std::span<const Courier> couriers,
                                        const SquareMatrix& dist, double tau) {
    return match_waiting(parcels, couriers, dist, tau);
}

std::vector<MatchDecision> match_batch(std::span<const Parcel> waiting, std::span<const Courier> batch,
                                       const SquareMatrix& dist, double tau) {
    if (batch.empty()) throw ValidationError("batch must be non-empty");
    return match_waiting(waiting, batch, dist, tau);
}

std::vector<double> service_ratios(std::span<const double> ca_z, std::span<const double> demand) {
    if (ca_z.size() != demand.size()) throw ValidationError("ca_z and demand sizes differ");
    std::vector<double> ratio(demand.size());
    for (std::size_t r = 0; r < demand.size(); ++r) ratio[r] = demand[r] > 0.0 ? ca_z[r] / demand[r] : kUnranked;
    return ratio;
}

namespace {

MatchDecision pick(std::span<const Parcel> waiting, const Courier& courier, const SquareMatrix& dist, double tau,
                   std::span<const double> ratios) {
    MatchDecision best{courier.id, std::nullopt, 0.0};
    Rank best_rank{};
    for (const Parcel& p : waiting) {
        if (p.state != ParcelState::Waiting) continue;
        const double extra = parcel_detour(p, courier, dist);
        if (!(extra <= tau)) continue;
        const Rank rank{ratios.empty() ? 0.0 : ratios[static_cast<std::size_t>(p.dest)], extra, p.id};
        if (!best.parcel || rank < best_rank) {
            best = {courier.id, p.id, extra};
            best_rank = rank;
        }
    }
    return best;
}

}  // namespace

MatchDecision match_min_detour(std::span<const Parcel> waiting, const Courier& courier, const SquareMatrix& dist,
                               double tau) {
    return pick(waiting, courier, dist, tau, {});
}

MatchDecision match_ca_priority(std::span<const Parcel> waiting, const Courier& courier, const SquareMatrix& dist,
                                double tau, std::span<const double> ca_z, std::span<const double> demand) {
    const auto ratios = service_ratios(ca_z, demand);
    return pick(waiting, courier, dist, tau, ratios);
}

ParcelPool::ParcelPool(std::span<Parcel> parcels, std::span<const RegionId> open_hubs, std::size_t n_regions)
    : parcels_(parcels), group_of_(parcels.size(), 0) {
    std::vector<RegionId> hubs(open_hubs.begin(), open_hubs.end());
    std::sort(hubs.begin(), hubs.end());
    hubs.erase(std::unique(hubs.begin(), hubs.end()), hubs.end());
    std::vector<int> hub_index(n_regions, -1);
    for (std::size_t k = 0; k < hubs.size(); ++k) hub_index[static_cast<std::size_t>(hubs[k])] = static_cast<int>(k);

    std::vector<std::vector<ParcelId>> by_key(hubs.size() * n_regions);
    for (const Parcel& p : parcels) {
        if (p.id < 0 || static_cast<std::size_t>(p.id) >= parcels.size() ||
            &parcels_[static_cast<std::size_t>(p.id)] != &p)
            throw ValidationError("parcel ids must equal their index");
        if (p.state != ParcelState::Waiting) continue;
        const int k = hub_index.at(static_cast<std::size_t>(p.hub));
        if (k < 0) throw ValidationError("parcel " + std::to_string(p.id) + " stored at a closed hub");
        by_key[static_cast<std::size_t>(k) * n_regions + static_cast<std::size_t>(p.dest)].push_back(p.id);
    }
    for (std::size_t key = 0; key < by_key.size(); ++key) {
        if (by_key[key].empty()) continue;
        Group g{hubs[key / n_regions], static_cast<RegionId>(key % n_regions), std::move(by_key[key])};
        g.waiting = g.ids.size();
        waiting_ += g.waiting;
        for (ParcelId id : g.ids) group_of_[static_cast<std::size_t>(id)] = groups_.size();
        groups_.push_back(std::move(g));
    }
}

std::optional<ParcelId> ParcelPool::front(Group& g) {
    while (g.cursor < g.ids.size() && parcels_[static_cast<std::size_t>(g.ids[g.cursor])].state != ParcelState::Waiting)
        ++g.cursor;
    if (g.cursor == g.ids.size()) return std::nullopt;
    return g.ids[g.cursor];
}

void ParcelPool::reserve(ParcelId id) {
    Parcel& p = parcels_[static_cast<std::size_t>(id)];
    if (p.state != ParcelState::Waiting) throw ValidationError("parcel " + std::to_string(id) + " is not waiting");
    p.state = ParcelState::Reserved;
    --groups_[group_of_[static_cast<std::size_t>(id)]].waiting;
    --waiting_;
}

MatchDecision ParcelPool::min_detour(const Courier& courier, const SquareMatrix& dist, double tau) {
    return ca_priority(courier, dist, tau, {});
}

MatchDecision ParcelPool::ca_priority(const Courier& courier, const SquareMatrix& dist, double tau,
                                      std::span<const double> ratios) {
    MatchDecision best{courier.id, std::nullopt, 0.0};
    Rank best_rank{};
    for (Group& g : groups_) {
        if (g.waiting == 0) continue;
        const double extra = detour(courier.origin, courier.dest, g.hub, g.dest, dist);
        if (!(extra <= tau)) continue;
        const ParcelId id = *front(g);
        const Rank rank{ratios.empty() ? 0.0 : ratios[static_cast<std::size_t>(g.dest)], extra, id};
        if (!best.parcel || rank < best_rank) {
            best = {courier.id, id, extra};
            best_rank = rank;
        }
    }
    return best;
}

std::vector<MatchDecision> ParcelPool::batch(std::span<const Courier> batch, const SquareMatrix& dist, double tau) {
    if (batch.empty()) throw ValidationError("batch must be non-empty");
    std::vector<Parcel> candidates;
    for (Group& g : groups_) {
        if (g.waiting == 0) continue;
        front(g);
        std::size_t taken = 0;
        for (std::size_t k = g.cursor; k < g.ids.size() && taken < batch.size(); ++k) {
            const Parcel& p = parcels_[static_cast<std::size_t>(g.ids[k])];
            if (p.state != ParcelState::Waiting) continue;
            candidates.push_back(p);
            ++taken;
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Parcel& a, const Parcel& b) { return a.id < b.id; });
    return match_waiting(candidates, batch, dist, tau);
}

std::size_t match_joint_static(std::span<const int> parcels_per_region, std::span<const Courier> couriers,
                               const RegionBitsets& reach) {
    const std::size_t n = reach.n();
    if (parcels_per_region.size() != n) throw ValidationError("parcels_per_region size differs from region count");

    // Couriers with the same (origin, dest) are interchangeable: one node per
    // OD pair with capacity equal to its courier count.
    std::vector<int> od_count(n * n, 0);
    for (const Courier& c : couriers) ++od_count[static_cast<std::size_t>(c.origin) * n + static_cast<std::size_t>(c.dest)];
    std::vector<std::size_t> ods;
    for (std::size_t k = 0; k < od_count.size(); ++k)
        if (od_count[k] > 0) ods.push_back(k);

    // Dinic on source -> OD -> region -> sink.
    struct Edge {
        int to;
        long long cap;
    };
    const int source = 0, sink = 1;
    const int od_base = 2, region_base = od_base + static_cast<int>(ods.size());
    const int nodes = region_base + static_cast<int>(n);
    std::vector<Edge> edges;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
    auto add = [&](int from, int to, long long cap) {
        adj[static_cast<std::size_t>(from)].push_back(static_cast<int>(edges.size()));
        edges.push_back({to, cap});
        adj[static_cast<std::size_t>(to)].push_back(static_cast<int>(edges.size()));
        edges.push_back({from, 0});
    };
    for (std::size_t k = 0; k < ods.size(); ++k) {
        const int u = od_base + static_cast<int>(k);
        add(source, u, od_count[ods[k]]);
        const auto row = reach.row(ods[k] / n, ods[k] % n);
        for (std::size_t r = 0; r < n; ++r)
            if (parcels_per_region[r] > 0 && ((row[r / kernels::kWordBits] >> (r % kernels::kWordBits)) & 1))
                add(u, region_base + static_cast<int>(r), od_count[ods[k]]);
    }
    for (std::size_t r = 0; r < n; ++r)
        if (parcels_per_region[r] > 0) add(region_base + static_cast<int>(r), sink, parcels_per_region[r]);

    std::vector<int> level(static_cast<std::size_t>(nodes)), it(static_cast<std::size_t>(nodes));
    auto bfs = [&] {
        std::fill(level.begin(), level.end(), -1);
        std::vector<int> queue{source};
        level[source] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head)
            for (int e : adj[static_cast<std::size_t>(queue[head])])
                if (edges[static_cast<std::size_t>(e)].cap > 0 && level[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].to)] < 0) {
                    level[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].to)] = level[static_cast<std::size_t>(queue[head])] + 1;
                    queue.push_back(edges[static_cast<std::size_t>(e)].to);
                }
        return level[sink] >= 0;
    };
    // The graph has depth 3, so a recursive augmenting search is shallow.
    auto dfs = [&](auto&& self, int u, long long pushed) -> long long {
        if (u == sink) return pushed;
        auto& i = it[static_cast<std::size_t>(u)];
        for (; i < static_cast<int>(adj[static_cast<std::size_t>(u)].size()); ++i) {
            const int e = adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(i)];
            Edge& edge = edges[static_cast<std::size_t>(e)];
            if (edge.cap <= 0 || level[static_cast<std::size_t>(edge.to)] != level[static_cast<std::size_t>(u)] + 1) continue;
            const long long got = self(self, edge.to, std::min(pushed, edge.cap));
            if (got > 0) {
                edge.cap -= got;
                edges[static_cast<std::size_t>(e ^ 1)].cap += got;
                return got;
            }
        }
        return 0;
    };
    long long flow = 0;
    while (bfs()) {
        std::fill(it.begin(), it.end(), 0);
        while (const long long f = dfs(dfs, source, std::numeric_limits<long long>::max())) flow += f;
    }
    return static_cast<std::size_t>(flow);
}

}  // namespace crowdhub
