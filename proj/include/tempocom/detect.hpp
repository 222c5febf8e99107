#pragma once

// End-to-end search: precompute bounds, probe for an incumbent, prune
// intervals, hash the unpruned region and refine buckets in fill-factor order.

#include <algorithm>
#include <chrono>
#include <optional>
#include <vector>

#include "tempocom/graph.hpp"
#include "tempocom/pruning.hpp"
#include "tempocom/refine.hpp"
#include "tempocom/spectral.hpp"
#include "tempocom/tlsh.hpp"

namespace tempocom {

struct RunConfig {
    double alpha = 0.2;
    int scale_base = 2;
    double beta = 0.5;
    std::size_t rows = 4;
    std::size_t bands = 8;
    std::size_t topk = 10;
    std::size_t probes = 5;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    WalkParams walk;
    double lanczos_tol = 1e-8;
    std::size_t bucket_cap = 4096;
    std::size_t min_bucket_entries = 2;
    std::size_t batch_size = 64;
    std::size_t fallback_seeds = 64;
    bool use_groups = true;
};

inline void validate(const RunConfig& c) {
    if (!(c.alpha >= 0.0)) throw ArgumentError("alpha must be non-negative");
    if (c.scale_base < 2) throw ArgumentError("scale base must be at least 2");
    if (!(c.beta > 0.0 && c.beta < 1.0)) throw ArgumentError("beta must lie in (0, 1)");
    if (c.rows == 0 || c.bands == 0) throw ArgumentError("rows and bands must be positive");
    if (c.topk == 0) throw ArgumentError("top-k must be positive");
    if (!(c.walk.restart > 0.0 && c.walk.restart < 1.0)) throw ArgumentError("restart probability must lie in (0, 1)");
    if (!(c.walk.tol > 0.0)) throw ArgumentError("walk tolerance must be positive");
    if (!(c.lanczos_tol > 0.0)) throw ArgumentError("Lanczos tolerance must be positive");
    if (c.bucket_cap == 0 || c.batch_size == 0) throw ArgumentError("bucket cap and batch size must be positive");
    if (c.min_bucket_entries == 0) throw ArgumentError("minimum bucket size must be positive");
}

struct PhaseTimings {
    double precompute = 0.0;
    double estimate = 0.0;
    double prune = 0.0;
    double hash = 0.0;
    double refine = 0.0;
};

/// One guard decision for a bucket span.
struct GuardRecord {
    Interval interval;
    double bound = 0.0;      // conductance-scale composite bound
    double phi_star = 0.0;   // incumbent the decision used
    bool skipped = false;
};

struct ProbeResult {
    double phi_star = kInfinity;
    std::vector<TemporalCommunity> found;
    std::vector<Interval> probed;
    bool fallback = false;
};

struct DetectionState {
    double phi_star = kInfinity;
    std::vector<TemporalCommunity> communities;  // ascending by community_less
    std::vector<PruneVerdict> verdicts;          // indexed by interval_index
    RunConfig config;

    double initial_phi_star = kInfinity;
    std::vector<double> incumbent_history;
    std::vector<GuardRecord> guard_log;
    PhaseTimings timings;
    std::size_t eigensolves = 0;
    std::size_t hashed = 0;
    std::size_t buckets = 0;
    std::size_t buckets_refined = 0;
    std::size_t buckets_skipped = 0;

    std::size_t pruned_count() const {
        return static_cast<std::size_t>(
            std::count_if(verdicts.begin(), verdicts.end(), [](const PruneVerdict& v) { return v.pruned(); }));
    }
    double pruned_fraction() const {
        return verdicts.empty() ? 0.0 : static_cast<double>(pruned_count()) / static_cast<double>(verdicts.size());
    }
};

namespace detail {

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

/// Best single-seed sweep on the aggregate over the whole timeline. Seeds are
/// the `limit` lowest-volume nodes with positive volume.
inline std::optional<TemporalCommunity> global_singleton_sweep(const TemporalGraph& g, const NormalizationConfig& norm,
                                                               const WalkParams& walk, std::size_t limit) {
    if (g.node_count() < 2) return std::nullopt;
    const AggregatedGraph ag = aggregate(g, {0, g.timeline_length() - 1});
    std::vector<std::pair<double, NodeId>> seeds;
    for (std::size_t v = 0; v < ag.node_count(); ++v) {
        const double vol = ag.volume(static_cast<NodeId>(v));
        if (vol > 0.0) seeds.push_back({vol, static_cast<NodeId>(v)});
    }
    std::sort(seeds.begin(), seeds.end());
    if (seeds.size() > limit) seeds.resize(limit);
    std::optional<TemporalCommunity> best;
    for (const auto& [vol, v] : seeds) {
        const BucketEntry e{v, 0};
        auto res = sweep(ag, seed_ranking(ag, std::span(&e, 1), walk), norm);
        if (!best || community_less(res.community, *best)) best = std::move(res.community);
    }
    return best;
}

}  // namespace detail

/// Incumbent from the q precomputed blocks with the smallest eta * lambda / 2:
/// light hashing (r = 2, b = 2) on each, refining its best bucket. Falls back
/// to a global singleton sweep when no probe yields a finite conductance.
inline ProbeResult estimate_initial(const TemporalGraph& g, const BoundsTable& bt, const RunConfig& cfg) {
    const NormalizationConfig norm{cfg.alpha};
    ProbeResult out;

    std::vector<std::pair<double, Interval>> blocks;
    for (std::size_t lv = 0; lv < bt.level_count(); ++lv) {
        for (const auto& e : bt.level(lv)) {
            if (e.usable) blocks.push_back({eta(e.interval, norm) * e.eig.lower() / 2.0, e.interval});
        }
    }
    std::sort(blocks.begin(), blocks.end());
    blocks.erase(std::unique(blocks.begin(), blocks.end(),
                             [](const auto& a, const auto& b) { return a.second == b.second; }),
                 blocks.end());
    if (blocks.size() > cfg.probes) blocks.resize(cfg.probes);

    for (const auto& [bound, iv] : blocks) {
        out.probed.push_back(iv);
        HashParams hp;
        hp.rows = 2;
        hp.bands = 2;
        hp.seed = detail::hash_combine(cfg.seed, 0x70726f6265ULL + static_cast<std::uint64_t>(iv.start) * 131 +
                                                     static_cast<std::uint64_t>(iv.end));
        hp.scales = {std::max<Timestamp>(1, iv.length() / 2)};
        hp.window = iv;
        hp.bucket_cap = cfg.bucket_cap;
        const PruneVerdict only{iv, PruneStatus::Unpruned, 0.0};
        auto tables = hash_all(g, std::span(&only, 1), hp);
        std::vector<const Bucket*> cands;
        for (const auto& b : tables.buckets) {
            if (b.entries.size() >= cfg.min_bucket_entries) cands.push_back(&b);
        }
        std::sort(cands.begin(), cands.end(), [](const Bucket* a, const Bucket* b) { return bucket_order_less(*a, *b); });
        for (const Bucket* b : cands) {
            auto res = refine_bucket(g, *b, norm, cfg.walk);
            if (res.community.phi == kInfinity) continue;
            out.phi_star = std::min(out.phi_star, res.community.phi);
            out.found.push_back(std::move(res.community));
            break;
        }
    }
    if (out.phi_star == kInfinity) {
        out.fallback = true;
        if (auto c = detail::global_singleton_sweep(g, norm, cfg.walk, cfg.fallback_seeds); c && c->phi != kInfinity) {
            out.phi_star = c->phi;
            out.found.push_back(std::move(*c));
        }
    }
    return out;
}

/// Keeps the k best distinct communities.
inline std::vector<TemporalCommunity> rank_communities(std::vector<TemporalCommunity> all, std::size_t k) {
    std::sort(all.begin(), all.end(), community_less);
    all.erase(std::unique(all.begin(), all.end(),
                          [](const TemporalCommunity& a, const TemporalCommunity& b) {
                              return a.nodes == b.nodes && a.interval == b.interval;
                          }),
              all.end());
    if (all.size() > k) all.resize(k);
    return all;
}

inline DetectionState detect(const TemporalGraph& g, const RunConfig& cfg) {
    validate(cfg);
    if (g.node_count() < 2) throw ArgumentError("detection needs at least two nodes");
    const NormalizationConfig norm{cfg.alpha};
    const Timestamp T = g.timeline_length();
    DetectionState st;
    st.config = cfg;
    detail::Stopwatch clock;

    LanczosOptions lo;
    lo.tol = cfg.lanczos_tol;
    lo.seed = detail::hash_combine(cfg.seed, 0x6c616e637a6f73ULL);
    const BoundsTable bt = precompute(g, cfg.scale_base, lo, cfg.beta, cfg.threads);
    st.eigensolves = bt.eigensolve_count();
    st.timings.precompute = clock.lap();

    ProbeResult probe = estimate_initial(g, bt, cfg);
    std::vector<TemporalCommunity> found = std::move(probe.found);
    st.phi_star = st.initial_phi_star = probe.phi_star;
    st.incumbent_history.push_back(st.phi_star);
    st.timings.estimate = clock.lap();

    const auto groups = build_groups(T, cfg.beta);
    // an infinite incumbent prunes nothing
    st.verdicts = prune_all(bt, groups, st.phi_star == kInfinity ? 0.0 : st.phi_star, norm, cfg.threads, cfg.use_groups);
    for (const Interval& iv : probe.probed) {
        auto& v = st.verdicts[interval_index(iv, T)];
        if (!v.pruned()) v.status = PruneStatus::Probed;
    }
    st.timings.prune = clock.lap();

    HashParams hp;
    hp.rows = cfg.rows;
    hp.bands = cfg.bands;
    hp.seed = cfg.seed;
    hp.bucket_cap = cfg.bucket_cap;
    hp.threads = cfg.threads;
    HashTables tables = hash_all(g, st.verdicts, hp);
    st.hashed = tables.hashed;
    std::vector<Bucket> buckets;
    for (auto& b : tables.buckets) {
        if (b.entries.size() >= cfg.min_bucket_entries) buckets.push_back(std::move(b));
    }
    tables.buckets.clear();
    std::vector<double> fill(buckets.size());
    for (std::size_t i = 0; i < buckets.size(); ++i) fill[i] = fill_factor(buckets[i]);
    std::vector<std::size_t> order(buckets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (fill[a] != fill[b]) return fill[a] > fill[b];
        const auto& x = buckets[a];
        const auto& y = buckets[b];
        if (x.entries.size() != y.entries.size()) return x.entries.size() > y.entries.size();
        if (x.scale != y.scale) return x.scale < y.scale;
        return x.key < y.key;
    });
    st.buckets = buckets.size();
    st.timings.hash = clock.lap();

    // Fixed-size batches: the guard in a batch uses the incumbent from its
    // start, so results do not depend on the thread count.
    for (std::size_t lo_i = 0; lo_i < order.size(); lo_i += cfg.batch_size) {
        const std::size_t hi_i = std::min(order.size(), lo_i + cfg.batch_size);
        const double guard_phi = st.phi_star;
        std::vector<GuardRecord> guards(hi_i - lo_i);
        std::vector<std::optional<TemporalCommunity>> results(hi_i - lo_i);
        parallel_for(hi_i - lo_i, cfg.threads, [&](std::size_t j) {
            const Bucket& b = buckets[order[lo_i + j]];
            const Interval iv = b.span();
            GuardRecord& gr = guards[j];
            gr.interval = iv;
            gr.phi_star = guard_phi;
            gr.bound = composite_bound(bt, iv, norm) / 2.0;
            gr.skipped = guard_phi != kInfinity && prunable(gr.bound, guard_phi);
            if (gr.skipped) return;
            auto res = refine_bucket(g, b, norm, cfg.walk);
            if (res.community.phi != kInfinity) results[j] = std::move(res.community);
        });
        for (std::size_t j = 0; j < results.size(); ++j) {
            st.guard_log.push_back(guards[j]);
            if (guards[j].skipped) {
                ++st.buckets_skipped;
                continue;
            }
            ++st.buckets_refined;
            if (!results[j]) continue;
            if (results[j]->phi < st.phi_star) {
                st.phi_star = results[j]->phi;
                st.incumbent_history.push_back(st.phi_star);
            }
            found.push_back(std::move(*results[j]));
        }
        // keep memory bounded on large runs
        if (found.size() > 4 * cfg.topk + 256) found = rank_communities(std::move(found), cfg.topk);
    }
    st.communities = rank_communities(std::move(found), cfg.topk);
    if (!st.communities.empty()) st.phi_star = st.communities.front().phi;
    st.timings.refine = clock.lap();
    return st;
}

}  // namespace tempocom
