#pragma once

// Preferential-attachment temporal graphs with one planted high-weight
// community.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tempocom/graph.hpp"

namespace tempocom {

struct SynthConfig {
    std::size_t n = 1000;
    std::size_t m = 10;          // edges per arriving node
    Timestamp T = 1000;
    double mu = 5.0;             // Poisson mean of ordinary weights
    std::size_t planted_size = 20;
    Timestamp planted_length = 10;  // t_end - t
    Timestamp planted_start = -1;   // -1 -> random
    double contrast = 8.0;
    double planted_density = 0.0;  // chance of adding each missing internal pair to the topology
    std::uint64_t seed = 1;
    int max_retries = 32;
};

struct SynthResult {
    TemporalGraph graph;
    TemporalCommunity planted;  // phi at alpha = 0
    std::uint64_t seed_used = 0;
};

inline void validate(const SynthConfig& c) {
    if (c.m < 1) throw ArgumentError("attachment degree must be at least 1");
    if (c.n <= c.m + 1) throw ArgumentError("need more nodes than the seed clique");
    if (c.T < 1) throw ArgumentError("timeline must be positive");
    if (!(c.mu > 0.0)) throw ArgumentError("mean weight must be positive");
    if (!(c.contrast >= 1.0)) throw ArgumentError("contrast must be at least 1");
    if (c.planted_size < 2 || c.planted_size >= c.n) throw ArgumentError("planted size must lie in [2, n)");
    if (c.planted_length < 0 || c.planted_length > c.T - 1) throw ArgumentError("planted interval does not fit");
    if (c.planted_start >= 0 && c.planted_start + c.planted_length > c.T - 1) {
        throw ArgumentError("planted interval does not fit");
    }
    if (!(c.planted_density >= 0.0 && c.planted_density <= 1.0)) throw ArgumentError("planted density must lie in [0, 1]");
}

namespace detail {

/// Barabasi-Albert edge set on n nodes from an (m+1)-clique.
inline std::set<std::pair<NodeId, NodeId>> barabasi_albert(std::size_t n, std::size_t m, std::mt19937_64& rng) {
    std::set<std::pair<NodeId, NodeId>> edges;
    std::vector<NodeId> ends;  // every edge endpoint, for degree-proportional draws
    for (NodeId u = 0; u <= m; ++u) {
        for (NodeId v = u + 1; v <= m; ++v) {
            edges.insert({u, v});
            ends.push_back(u);
            ends.push_back(v);
        }
    }
    for (NodeId u = static_cast<NodeId>(m + 1); u < n; ++u) {
        std::vector<NodeId> targets;
        while (targets.size() < m) {
            const NodeId v = ends[std::uniform_int_distribution<std::size_t>(0, ends.size() - 1)(rng)];
            if (std::find(targets.begin(), targets.end(), v) == targets.end()) targets.push_back(v);
        }
        for (NodeId v : targets) {
            edges.insert({v, u});
            ends.push_back(v);
            ends.push_back(u);
        }
    }
    return edges;
}

/// Connected set grown from a random node, each step picking a frontier node
/// with probability proportional to 1 / degree.
inline std::vector<NodeId> grow_low_degree_set(const std::vector<std::vector<NodeId>>& adj, std::size_t size,
                                               std::mt19937_64& rng) {
    const std::size_t n = adj.size();
    std::vector<double> w(n);
    for (std::size_t u = 0; u < n; ++u) w[u] = adj[u].empty() ? 0.0 : 1.0 / static_cast<double>(adj[u].size());
    std::vector<char> in(n, 0), frontier(n, 0);
    std::vector<NodeId> out;
    std::discrete_distribution<std::size_t> first(w.begin(), w.end());
    NodeId next = static_cast<NodeId>(first(rng));
    while (true) {
        in[next] = 1;
        out.push_back(next);
        for (NodeId v : adj[next]) frontier[v] = !in[v];
        frontier[next] = 0;
        if (out.size() == size) break;
        std::vector<NodeId> cand;
        std::vector<double> cw;
        for (std::size_t u = 0; u < n; ++u) {
            if (frontier[u]) {
                cand.push_back(static_cast<NodeId>(u));
                cw.push_back(w[u]);
            }
        }
        if (cand.empty()) return {};
        std::discrete_distribution<std::size_t> pick(cw.begin(), cw.end());
        next = cand[pick(rng)];
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// `size` distinct nodes drawn without replacement with weight (m / degree)^2,
/// so nodes near the minimum degree m dominate.
inline std::vector<NodeId> sample_low_degree_set(const std::vector<std::vector<NodeId>>& adj, std::size_t m,
                                                 std::size_t size, std::mt19937_64& rng) {
    std::vector<double> w(adj.size());
    for (std::size_t u = 0; u < adj.size(); ++u) {
        const double r = static_cast<double>(m) / static_cast<double>(std::max<std::size_t>(adj[u].size(), 1));
        w[u] = r * r;
    }
    std::vector<NodeId> out;
    while (out.size() < size) {
        std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
        const auto u = pick(rng);
        out.push_back(static_cast<NodeId>(u));
        w[u] = 0.0;
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline bool connected_within(const std::set<std::pair<NodeId, NodeId>>& edges, std::span<const NodeId> nodes) {
    std::vector<NodeId> idx(nodes.begin(), nodes.end());
    UnionFind uf(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            if (edges.count({idx[i], idx[j]})) uf.unite(i, j);
        }
    }
    return uf.set_count() == 1;
}

inline double poisson_positive(std::mt19937_64& rng, double mean) {
    std::poisson_distribution<int> d(mean);
    for (;;) {
        const int x = d(rng);
        if (x > 0) return static_cast<double>(x);
    }
}

}  // namespace detail

/// Same topology at every timestamp with Poisson(mu) weights; planted internal
/// edges get Poisson(contrast * mu) inside the planted interval. Zero draws
/// are redrawn.
inline SynthResult generate(const SynthConfig& cfg) {
    validate(cfg);
    std::uint64_t seed = cfg.seed;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt, seed = seed * 6364136223846793005ULL + 1442695040888963407ULL) {
        std::mt19937_64 rng(seed);
        auto edges = detail::barabasi_albert(cfg.n, cfg.m, rng);
        std::vector<std::vector<NodeId>> adj(cfg.n);
        for (const auto& [u, v] : edges) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        // Without extra internal edges the set must be connected in the
        // attachment topology, so grow it; otherwise draw low-degree nodes
        // and wire them up.
        std::vector<NodeId> planted;
        if (cfg.planted_density == 0.0) {
            planted = detail::grow_low_degree_set(adj, cfg.planted_size, rng);
            if (planted.empty()) continue;
        } else {
            planted = detail::sample_low_degree_set(adj, cfg.m, cfg.planted_size, rng);
            std::bernoulli_distribution add(cfg.planted_density);
            for (std::size_t i = 0; i < planted.size(); ++i) {
                for (std::size_t j = i + 1; j < planted.size(); ++j) {
                    if (!edges.count({planted[i], planted[j]}) && add(rng)) edges.insert({planted[i], planted[j]});
                }
            }
            if (!detail::connected_within(edges, planted)) continue;
        }
        const Timestamp start = cfg.planted_start >= 0
                                    ? cfg.planted_start
                                    : std::uniform_int_distribution<Timestamp>(0, cfg.T - 1 - cfg.planted_length)(rng);
        const Interval iv{start, start + cfg.planted_length};
        std::vector<char> in(cfg.n, 0);
        for (NodeId u : planted) in[u] = 1;

        TemporalGraphBuilder b(cfg.n, cfg.T);
        for (Timestamp t = 0; t < cfg.T; ++t) {
            for (const auto& [u, v] : edges) {
                const bool hot = in[u] && in[v] && iv.contains(t);
                b.add(u, v, t, detail::poisson_positive(rng, hot ? cfg.contrast * cfg.mu : cfg.mu));
            }
        }
        SynthResult res{std::move(b).build(), {planted, iv, 0.0}, seed};
        res.planted.phi = conductance(res.graph, res.planted.nodes, iv, NormalizationConfig{0.0});
        return res;
    }
    throw ArgumentError("could not plant a connected community after retries");
}

}  // namespace tempocom
