#pragma once

// Exhaustive references for small instances: the exact optimum over all
// intervals and connected node sets, and sweeps from every (interval, node).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "tempocom/graph.hpp"
#include "tempocom/parallel.hpp"
#include "tempocom/refine.hpp"

namespace tempocom {

inline constexpr std::size_t kBruteForceMaxNodes = 16;
inline constexpr Timestamp kBruteForceMaxTimeline = 12;

namespace detail {

/// Dense view of one aggregated graph with bitmask adjacency.
struct DenseInterval {
    std::size_t n = 0;
    std::vector<double> w;  // n x n
    std::vector<double> vol;
    std::vector<std::uint32_t> adj;
    double total = 0.0;

    explicit DenseInterval(const AggregatedGraph& ag)
        : n(ag.node_count()), w(n * n, 0.0), vol(n, 0.0), adj(n, 0) {
        for (const auto& e : ag.edges()) {
            w[e.u * n + e.v] = w[e.v * n + e.u] = e.w;
            adj[e.u] |= 1u << e.v;
            adj[e.v] |= 1u << e.u;
        }
        for (std::size_t u = 0; u < n; ++u) {
            vol[u] = ag.volume(static_cast<NodeId>(u));
            total += vol[u];
        }
    }
};

inline std::vector<NodeId> mask_nodes(std::uint32_t mask) {
    std::vector<NodeId> out;
    for (; mask; mask &= mask - 1) out.push_back(static_cast<NodeId>(std::countr_zero(mask)));
    return out;
}

/// Calls f(mask, vol, cut) once for every connected node set, each set grown
/// from its smallest node by include/exclude branching on the frontier.
template <typename F>
void for_each_connected_subset(const DenseInterval& d, F&& f) {
    struct Rec {
        const DenseInterval& d;
        F& f;
        void operator()(std::uint32_t set, std::uint32_t ext, std::uint32_t banned, double vol, double cut) {
            f(set, vol, cut);
            while (ext) {
                const int v = std::countr_zero(ext);
                const std::uint32_t bit = 1u << v;
                ext &= ~bit;
                double inner = 0.0;
                for (std::uint32_t m = set & d.adj[v]; m; m &= m - 1) inner += d.w[v * d.n + std::countr_zero(m)];
                const std::uint32_t child_banned = banned | bit;
                (*this)(set | bit, (ext | d.adj[v]) & ~child_banned, child_banned, vol + d.vol[v],
                        cut + d.vol[v] - 2.0 * inner);
                banned = child_banned;
            }
        }
    } rec{d, f};
    for (std::size_t v = 0; v < d.n; ++v) {
        const std::uint32_t bit = 1u << v;
        const std::uint32_t banned = (bit << 1) - 1;  // nodes <= v
        rec(bit, d.adj[v] & ~banned, banned, d.vol[v], d.vol[v]);
    }
}

inline void check_brute_force_size(const TemporalGraph& g) {
    if (g.node_count() > kBruteForceMaxNodes || g.timeline_length() > kBruteForceMaxTimeline) {
        throw SizeLimitError("brute force limited to n <= 16 and T <= 12");
    }
    if (g.node_count() < 2) throw ArgumentError("brute force needs at least two nodes");
}

}  // namespace detail

/// Exact minimum temporal conductance over all intervals and connected proper
/// subsets. Ties go to (|C|, nodes, interval). phi is +inf with no nodes when
/// no candidate has positive volume on both sides.
inline TemporalCommunity brute_force_best(const TemporalGraph& g, const NormalizationConfig& cfg) {
    detail::check_brute_force_size(g);
    const Timestamp T = g.timeline_length();
    const std::uint32_t full = (1u << g.node_count()) - 1;
    TemporalCommunity best;
    for (Timestamp a = 0; a < T; ++a) {
        for (Timestamp b = a; b < T; ++b) {
            const AggregatedGraph ag = aggregate(g, {a, b});
            const detail::DenseInterval d(ag);
            const double et = eta(ag.interval(), cfg);
            std::uint32_t local_mask = 0;
            double local_phi = kInfinity;
            detail::for_each_connected_subset(d, [&](std::uint32_t set, double vol, double cut) {
                if (set == full) return;
                const double denom = std::min(vol, d.total - vol);
                if (!(denom > 0.0)) return;
                const double phi = et * std::max(0.0, cut) / denom;
                const double tie = 1e-12 * std::max(phi, local_phi == kInfinity ? phi : local_phi);
                bool take = local_mask == 0 || phi < local_phi - tie;
                if (!take && std::abs(phi - local_phi) <= tie) {
                    const int ps = std::popcount(set), ls = std::popcount(local_mask);
                    take = ps < ls || (ps == ls && detail::mask_nodes(set) < detail::mask_nodes(local_mask));
                }
                if (take) {
                    local_mask = set;
                    local_phi = phi;
                }
            });
            if (local_mask == 0) continue;
            TemporalCommunity cand{detail::mask_nodes(local_mask), {a, b}, 0.0};
            cand.phi = conductance(ag, cand.nodes, cfg);
            if (best.nodes.empty() || community_less(cand, best)) best = std::move(cand);
        }
    }
    return best;
}

/// Same optimum by filtering all 2^n subsets; used to cross-check the
/// connected-subset enumeration.
inline TemporalCommunity brute_force_naive(const TemporalGraph& g, const NormalizationConfig& cfg) {
    detail::check_brute_force_size(g);
    const Timestamp T = g.timeline_length();
    const std::uint32_t full = (1u << g.node_count()) - 1;
    TemporalCommunity best;
    for (Timestamp a = 0; a < T; ++a) {
        for (Timestamp b = a; b < T; ++b) {
            const AggregatedGraph ag = aggregate(g, {a, b});
            for (std::uint32_t set = 1; set < full; ++set) {
                const auto nodes = detail::mask_nodes(set);
                if (!is_connected_subset(ag, nodes)) continue;
                const double phi = conductance(ag, nodes, cfg);
                if (phi == kInfinity) continue;
                TemporalCommunity cand{nodes, {a, b}, phi};
                if (best.nodes.empty() || community_less(cand, best)) best = std::move(cand);
            }
        }
    }
    return best;
}

/// Rough operation count of exh_baseline.
inline double exh_work_estimate(const TemporalGraph& g) {
    const double T = g.timeline_length();
    const double n = static_cast<double>(g.node_count());
    return T * (T + 1) / 2.0 * n * (static_cast<double>(g.edge_count()) + n) * 50.0;
}

/// Sweeps from every single seed node on every interval; best by community_less.
inline TemporalCommunity exh_baseline(const TemporalGraph& g, const NormalizationConfig& cfg,
                                      const WalkParams& walk = {}, double work_limit = 2e9, unsigned threads = 1) {
    if (g.node_count() < 2) throw ArgumentError("baseline needs at least two nodes");
    if (exh_work_estimate(g) > work_limit) throw SizeLimitError("instance exceeds the exhaustive baseline work limit");
    const Timestamp T = g.timeline_length();
    std::vector<Interval> intervals;
    for (Timestamp a = 0; a < T; ++a) {
        for (Timestamp b = a; b < T; ++b) intervals.push_back({a, b});
    }
    std::vector<TemporalCommunity> best(intervals.size());
    parallel_for(intervals.size(), threads, [&](std::size_t i) {
        const AggregatedGraph ag = aggregate(g, intervals[i]);
        for (std::size_t v = 0; v < g.node_count(); ++v) {
            if (ag.volume(static_cast<NodeId>(v)) <= 0.0) continue;
            const BucketEntry seed{static_cast<NodeId>(v), intervals[i].start};
            const auto ranking = seed_ranking(ag, std::span(&seed, 1), walk);
            auto res = sweep(ag, ranking, cfg);
            if (best[i].nodes.empty() || community_less(res.community, best[i])) best[i] = std::move(res.community);
        }
    });
    TemporalCommunity out;
    for (auto& c : best) {
        if (c.nodes.empty()) continue;
        if (out.nodes.empty() || community_less(c, out)) out = std::move(c);
    }
    return out;
}

}  // namespace tempocom
