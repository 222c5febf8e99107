#pragma once

// Random walk with restart around seed nodes and conductance sweeps over the
// resulting ranking.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "tempocom/graph.hpp"
#include "tempocom/tlsh.hpp"

namespace tempocom {

struct WalkParams {
    double restart = 0.15;
    double tol = 1e-9;
    std::size_t max_iterations = 10000;
};

/// Stationary distribution of the walk that follows edges with probability
/// 1 - restart and jumps to a uniform seed otherwise. Zero-volume nodes keep
/// their mass.
inline std::vector<double> rwr_scores(const AggregatedGraph& ag, std::span<const NodeId> seeds,
                                      const WalkParams& walk = {}) {
    if (seeds.empty()) throw ArgumentError("random walk needs at least one seed");
    if (!(walk.restart > 0.0 && walk.restart < 1.0)) throw ArgumentError("restart probability must lie in (0, 1)");
    const std::size_t n = ag.node_count();
    std::vector<double> s(n, 0.0);
    for (NodeId u : seeds) {
        if (u >= n) throw ArgumentError("seed out of range");
        s[u] = 1.0;
    }
    double seeded = 0.0;
    for (double v : s) seeded += v;
    for (double& v : s) v /= seeded;

    std::vector<double> x = s, next(n);
    for (std::size_t it = 1; it <= walk.max_iterations; ++it) {
        for (std::size_t v = 0; v < n; ++v) next[v] = walk.restart * s[v];
        for (std::size_t u = 0; u < n; ++u) {
            if (x[u] == 0.0) continue;
            const double vol = ag.volume(static_cast<NodeId>(u));
            const double mass = (1.0 - walk.restart) * x[u];
            if (vol <= 0.0) {
                next[u] += mass;
                continue;
            }
            for (const auto& nb : ag.neighbors(static_cast<NodeId>(u))) next[nb.node] += mass * nb.w / vol;
        }
        double change = 0.0;
        for (std::size_t v = 0; v < n; ++v) change += std::abs(next[v] - x[v]);
        x.swap(next);
        if (change < walk.tol) return x;
    }
    throw NumericalError("random walk with restart did not converge", walk.max_iterations);
}

struct SweepResult {
    TemporalCommunity community;
    std::size_t sweep_index = 0;  // prefix length chosen
    WalkParams walk;
};

/// The complement has the same conductance; report it instead when it has
/// the smaller volume and is itself connected.
inline TemporalCommunity smaller_side(const AggregatedGraph& ag, TemporalCommunity c) {
    const auto in = detail::membership(ag.node_count(), c.nodes);
    double vol_in = 0.0, vol_out = 0.0;
    std::vector<NodeId> rest;
    for (std::size_t u = 0; u < ag.node_count(); ++u) {
        (in[u] ? vol_in : vol_out) += ag.volume(static_cast<NodeId>(u));
        if (!in[u]) rest.push_back(static_cast<NodeId>(u));
    }
    if (vol_out < vol_in && is_connected_subset(ag, rest)) c.nodes = std::move(rest);
    return c;
}

/// Best connected prefix of `ranking`. Prefixes never cover all nodes.
inline SweepResult sweep(const AggregatedGraph& ag, std::span<const NodeId> ranking, const NormalizationConfig& cfg) {
    if (ranking.empty()) throw ArgumentError("empty ranking");
    const std::size_t n = ag.node_count();
    const std::size_t limit = std::min(ranking.size(), n - 1);
    if (limit == 0) throw ArgumentError("no proper prefix to sweep");
    (void)detail::membership(n, ranking);

    double total = 0.0;
    for (double v : ag.volumes()) total += v;
    const double et = eta(ag.interval(), cfg);

    std::vector<char> in(n, 0);
    UnionFind uf(n);
    std::size_t components = 0;
    double vol = 0.0, cut = 0.0;
    double best_phi = kInfinity;
    std::size_t best_len = 0;
    bool any_connected = false;
    for (std::size_t i = 0; i < limit; ++i) {
        const NodeId v = ranking[i];
        double inner = 0.0;
        ++components;
        for (const auto& nb : ag.neighbors(v)) {
            if (!in[nb.node]) continue;
            inner += nb.w;
            if (uf.unite(v, nb.node)) --components;
        }
        in[v] = 1;
        vol += ag.volume(v);
        cut += ag.volume(v) - 2.0 * inner;
        if (components != 1) continue;
        const double denom = std::min(vol, total - vol);
        const double phi = denom > 0.0 ? et * std::max(0.0, cut) / denom : kInfinity;
        if (!any_connected || phi < best_phi) {
            best_phi = phi;
            best_len = i + 1;
            any_connected = true;
        }
    }
    if (!any_connected) throw ArgumentError("no connected prefix in ranking");

    SweepResult res;
    res.sweep_index = best_len;
    res.community.nodes.assign(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(best_len));
    std::sort(res.community.nodes.begin(), res.community.nodes.end());
    res.community.interval = ag.interval();
    res.community = smaller_side(ag, std::move(res.community));
    res.community.phi = conductance(ag, res.community.nodes, cfg);
    return res;
}

/// Ranking for a set of seed entries: seeds by multiplicity, then RWR score,
/// then id; every other node with positive score by score / volume.
inline std::vector<NodeId> seed_ranking(const AggregatedGraph& ag, std::span<const BucketEntry> entries,
                                        const WalkParams& walk) {
    const std::size_t n = ag.node_count();
    std::vector<std::size_t> mult(n, 0);
    std::vector<NodeId> seeds;
    for (const auto& e : entries) {
        if (e.node >= n) throw ArgumentError("bucket node out of range");
        if (mult[e.node]++ == 0) seeds.push_back(e.node);
    }
    if (seeds.empty()) throw ArgumentError("empty bucket");
    std::sort(seeds.begin(), seeds.end());
    const auto score = rwr_scores(ag, seeds, walk);

    std::vector<NodeId> ranking = seeds;
    std::sort(ranking.begin(), ranking.end(), [&](NodeId a, NodeId b) {
        if (mult[a] != mult[b]) return mult[a] > mult[b];
        if (score[a] != score[b]) return score[a] > score[b];
        return a < b;
    });
    std::vector<std::pair<double, NodeId>> rest;
    for (std::size_t v = 0; v < n; ++v) {
        const double vol = ag.volume(static_cast<NodeId>(v));
        if (mult[v] == 0 && score[v] > 0.0 && vol > 0.0) rest.push_back({score[v] / vol, static_cast<NodeId>(v)});
    }
    std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (const auto& r : rest) ranking.push_back(r.second);
    return ranking;
}

/// Expands a bucket into a community on the bucket's timestamp span.
inline SweepResult refine_bucket(const TemporalGraph& g, const Bucket& bucket, const NormalizationConfig& cfg,
                                 const WalkParams& walk = {}) {
    if (bucket.entries.empty()) throw ArgumentError("empty bucket");
    const AggregatedGraph ag = aggregate(g, bucket.span());
    const auto ranking = seed_ranking(ag, bucket.entries, walk);
    SweepResult res = sweep(ag, ranking, cfg);
    res.walk = walk;
    return res;
}

}  // namespace tempocom
