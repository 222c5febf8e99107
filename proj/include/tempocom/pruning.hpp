#pragma once

// Multi-scale lambda_2 precomputation, composite and group lower bounds, and
// interval pruning against an incumbent conductance.
//
// Bounds here are on lambda_2 scaled by eta (the "lambda scale"). Comparisons
// against a conductance phi* use half of that value, the same factor that
// relates lambda_2 to conductance for a single interval.

#include <algorithm>
#include <cmath>
#include <map>
#include <string_view>
#include <vector>

#include "tempocom/graph.hpp"
#include "tempocom/parallel.hpp"
#include "tempocom/spectral.hpp"

namespace tempocom {

/// Precomputed interval [start, end] with its eigenvalue.
struct BlockEntry {
    Interval interval;
    EigResult eig;
    bool usable = true;  // false when the eigensolver failed

    /// Value used inside bounds; zero for unusable entries.
    double lambda() const noexcept { return usable ? eig.lower() : 0.0; }
};

/// Pruning group: intervals [start, t*] for t* in [prefix_end, group_end].
struct PruningGroup {
    Timestamp start = 0;
    Timestamp prefix_end = 0;
    Timestamp group_end = 0;

    friend bool operator==(const PruningGroup&, const PruningGroup&) = default;
};

/// Span of the last member of the group whose prefix span is `prefix_span`.
/// Keeps prefix_span / end_span >= beta.
inline Timestamp ladder_end_span(Timestamp prefix_span, double beta) {
    if (prefix_span == 0) return 0;
    const auto end = static_cast<Timestamp>(std::ceil(static_cast<double>(prefix_span) / beta)) - 1;
    return std::max(prefix_span, end);
}

/// Prefix span of the ladder group that contains a member of span `span`.
inline Timestamp ladder_prefix_span(Timestamp span, double beta) {
    if (span == 0) return 0;
    Timestamp p = 1;
    for (;;) {
        const Timestamp end = ladder_end_span(p, beta);
        if (span <= end) return p;
        p = end + 1;
    }
}

/// Groups for every start: a singleton for [t, t], then prefixes of span
/// 1, ... growing by 1/beta. Each interval belongs to exactly one group.
inline std::vector<PruningGroup> build_groups(Timestamp timeline, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("beta must lie in (0, 1)");
    if (timeline < 1) throw ArgumentError("timeline length must be at least 1");
    std::vector<PruningGroup> groups;
    for (Timestamp t = 0; t < timeline; ++t) {
        groups.push_back({t, t, t});
        const Timestamp max_span = timeline - 1 - t;
        for (Timestamp p = 1; p <= max_span;) {
            const Timestamp end = std::min(ladder_end_span(p, beta), max_span);
            groups.push_back({t, t + p, t + end});
            p = end + 1;
        }
    }
    return groups;
}

class BoundsTable {
public:
    Timestamp timeline() const noexcept { return timeline_; }
    std::size_t node_count() const noexcept { return node_count_; }
    int scale_base() const noexcept { return base_; }
    double beta() const noexcept { return beta_; }
    std::size_t eigensolve_count() const noexcept { return solves_; }

    std::size_t level_count() const noexcept { return levels_.size(); }
    Timestamp level_length(std::size_t level) const noexcept { return lengths_[level]; }
    std::span<const BlockEntry> level(std::size_t level) const noexcept { return levels_[level]; }

    std::size_t entry_count() const noexcept {
        std::size_t c = 0;
        for (const auto& l : levels_) c += l.size();
        return c;
    }

    /// vol(u, a, b) from per-node prefix sums.
    double volume(NodeId u, Timestamp a, Timestamp b) const {
        return prefix_[static_cast<std::size_t>(b + 1) * node_count_ + u] -
               prefix_[static_cast<std::size_t>(a) * node_count_ + u];
    }

    /// Greedy decomposition of [a, b] into precomputed blocks, largest aligned
    /// usable block first at each cursor.
    std::vector<const BlockEntry*> decompose(Timestamp a, Timestamp b) const {
        require_interval({a, b}, timeline_);
        std::vector<const BlockEntry*> out;
        for (Timestamp c = a; c <= b;) {
            const BlockEntry* pick = nullptr;
            for (std::size_t lv = levels_.size(); lv-- > 0;) {
                const Timestamp len = lengths_[lv];
                if (c % len != 0) continue;
                const BlockEntry& e = levels_[lv][static_cast<std::size_t>(c / len)];
                if (e.interval.end > b) continue;
                if (!e.usable && lv > 0) continue;
                pick = &e;
                break;
            }
            out.push_back(pick);
            c = pick->interval.end + 1;
        }
        return out;
    }

    /// Sum over blocks of min_u vol(u, block) / vol(u, a, denom_end) * lambda(block).
    /// Nodes with zero denominator volume are skipped.
    double partition_sum(std::span<const BlockEntry* const> blocks, Timestamp a, Timestamp denom_end) const {
        std::vector<double> denom(node_count_);
        for (std::size_t u = 0; u < node_count_; ++u) denom[u] = volume(static_cast<NodeId>(u), a, denom_end);
        double sum = 0.0;
        for (const BlockEntry* blk : blocks) {
            const double lam = blk->lambda();
            if (lam <= 0.0) continue;
            const std::size_t lo = static_cast<std::size_t>(blk->interval.start) * node_count_;
            const std::size_t hi = static_cast<std::size_t>(blk->interval.end + 1) * node_count_;
            double m = kInfinity;
            for (std::size_t u = 0; u < node_count_; ++u) {
                if (denom[u] > 0.0) m = std::min(m, (prefix_[hi + u] - prefix_[lo + u]) / denom[u]);
            }
            if (m != kInfinity) sum += m * lam;
        }
        return sum;
    }

private:
    friend BoundsTable precompute(const TemporalGraph&, int, const LanczosOptions&, double, unsigned);

    Timestamp timeline_ = 0;
    std::size_t node_count_ = 0;
    int base_ = 2;
    double beta_ = 0.5;
    std::size_t solves_ = 0;
    std::vector<Timestamp> lengths_;
    std::vector<std::vector<BlockEntry>> levels_;
    std::vector<double> prefix_;  // (T + 1) x n, time-major
};

/// Eigenvalues for aligned blocks of length l^i, i = 0..ceil(log_l T). Each
/// distinct interval is solved once.
inline BoundsTable precompute(const TemporalGraph& g, int scale_base, const LanczosOptions& opts = {},
                              double beta = 0.5, unsigned threads = 1) {
    if (scale_base < 2) throw ArgumentError("scale base must be at least 2");
    if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("beta must lie in (0, 1)");
    BoundsTable bt;
    const Timestamp T = g.timeline_length();
    const std::size_t n = g.node_count();
    bt.timeline_ = T;
    bt.node_count_ = n;
    bt.base_ = scale_base;
    bt.beta_ = beta;

    for (long long len = 1;; len *= scale_base) {
        bt.lengths_.push_back(static_cast<Timestamp>(len));
        std::vector<BlockEntry> level;
        for (long long s = 0; s < T; s += len) {
            level.push_back({{static_cast<Timestamp>(s), static_cast<Timestamp>(std::min<long long>(s + len - 1, T - 1))}, {}, true});
        }
        bt.levels_.push_back(std::move(level));
        if (len >= T) break;
    }

    std::map<Interval, std::size_t> unique;
    std::vector<Interval> todo;
    for (const auto& level : bt.levels_) {
        for (const auto& e : level) {
            if (unique.emplace(e.interval, todo.size()).second) todo.push_back(e.interval);
        }
    }
    std::vector<EigResult> results(todo.size());
    std::vector<char> ok(todo.size(), 1);
    parallel_for(todo.size(), threads, [&](std::size_t i) {
        if (n < 2) {
            results[i] = {};
            return;
        }
        try {
            results[i] = lambda2(aggregate(g, todo[i]), opts);
        } catch (const NumericalError&) {
            ok[i] = 0;
        }
    });
    bt.solves_ = n < 2 ? 0 : todo.size();
    for (auto& level : bt.levels_) {
        for (auto& e : level) {
            const std::size_t idx = unique.at(e.interval);
            e.eig = results[idx];
            e.usable = ok[idx] != 0;
        }
    }

    std::vector<double> snap(static_cast<std::size_t>(T) * n, 0.0);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edge(e);
        for (const auto& s : g.series(e)) {
            snap[static_cast<std::size_t>(s.t) * n + u] += s.w;
            snap[static_cast<std::size_t>(s.t) * n + v] += s.w;
        }
    }
    bt.prefix_.assign(static_cast<std::size_t>(T + 1) * n, 0.0);
    for (Timestamp t = 0; t < T; ++t) {
        for (std::size_t u = 0; u < n; ++u) {
            bt.prefix_[static_cast<std::size_t>(t + 1) * n + u] =
                bt.prefix_[static_cast<std::size_t>(t) * n + u] + snap[static_cast<std::size_t>(t) * n + u];
        }
    }
    return bt;
}

inline BoundsTable precompute(const TemporalGraph& g, int scale_base, double tol, double beta = 0.5,
                              unsigned threads = 1) {
    LanczosOptions opts;
    opts.tol = tol;
    return precompute(g, scale_base, opts, beta, threads);
}

/// Lower bound on lambda_2 of the aggregated graph over `iv`: the larger of the
/// canonical-decomposition bound and the bound over the partition that keeps
/// the enclosing pruning group's prefix blocks intact.
inline double composite_lambda_bound(const BoundsTable& bt, const Interval& iv) {
    require_interval(iv, bt.timeline());
    const auto canonical = bt.decompose(iv.start, iv.end);
    double best = bt.partition_sum(canonical, iv.start, iv.end);

    const Timestamp prefix = ladder_prefix_span(iv.span(), bt.beta());
    if (prefix > 0 && prefix < iv.span()) {
        auto split = bt.decompose(iv.start, iv.start + prefix);
        const auto rest = bt.decompose(iv.start + prefix + 1, iv.end);
        split.insert(split.end(), rest.begin(), rest.end());
        if (split != canonical) best = std::max(best, bt.partition_sum(split, iv.start, iv.end));
    }
    return best;
}

/// eta(iv) * composite lambda bound.
inline double composite_bound(const BoundsTable& bt, const Interval& iv, const NormalizationConfig& cfg) {
    return eta(iv, cfg) * composite_lambda_bound(bt, iv);
}

/// eta(t, t'') * sum over prefix blocks of min_u vol(u, block) / vol(u, t, t'') * lambda.
/// Never exceeds composite_bound of any member [t, t*], t* in [t', t''].
inline double group_bound(const BoundsTable& bt, const PruningGroup& grp, const NormalizationConfig& cfg) {
    if (!(grp.start <= grp.prefix_end && grp.prefix_end <= grp.group_end)) {
        throw ArgumentError("malformed pruning group");
    }
    require_interval({grp.start, grp.group_end}, bt.timeline());
    const auto blocks = bt.decompose(grp.start, grp.prefix_end);
    return eta({grp.start, grp.group_end}, cfg) * bt.partition_sum(blocks, grp.start, grp.group_end);
}

enum class PruneStatus { GroupPruned, CompositePruned, Unpruned, Probed };

inline std::string_view to_string(PruneStatus s) {
    switch (s) {
        case PruneStatus::GroupPruned: return "group-pruned";
        case PruneStatus::CompositePruned: return "composite-pruned";
        case PruneStatus::Unpruned: return "unpruned";
        case PruneStatus::Probed: return "probed";
    }
    return "unknown";
}

struct PruneVerdict {
    Interval interval;
    PruneStatus status = PruneStatus::Unpruned;
    double bound_value = 0.0;  // conductance-scale lower bound (eta * lambda bound / 2)

    bool pruned() const noexcept {
        return status == PruneStatus::GroupPruned || status == PruneStatus::CompositePruned;
    }
};

/// Relative slack on pruning decisions: an interval whose bound merely ties
/// the incumbent is kept.
inline constexpr double kPruneSlack = 1e-9;

/// Whether a conductance-scale lower bound excludes an interval given phi*.
inline bool prunable(double bound_phi, double phi_star) {
    return phi_star > 0.0 && bound_phi > phi_star * (1.0 + kPruneSlack);
}

/// Position of [start, end] in start-major order over all T(T+1)/2 intervals.
inline std::size_t interval_index(const Interval& iv, Timestamp timeline) {
    const auto t = static_cast<std::size_t>(iv.start);
    const auto T = static_cast<std::size_t>(timeline);
    return t * T - (t * (t - 1)) / 2 + static_cast<std::size_t>(iv.end - iv.start);
}

inline std::size_t interval_count(Timestamp timeline) {
    const auto T = static_cast<std::size_t>(timeline);
    return T * (T + 1) / 2;
}

/// Group test first, then per-member composite tests for surviving groups.
/// With use_groups = false every interval is tested individually. Verdicts
/// are indexed by interval_index.
inline std::vector<PruneVerdict> prune_all(const BoundsTable& bt, std::span<const PruningGroup> groups,
                                           double phi_star, const NormalizationConfig& cfg,
                                           unsigned threads = 1, bool use_groups = true) {
    if (std::isnan(phi_star) || std::isinf(phi_star)) {
        throw ArgumentError("phi* must be a finite conductance from a concrete community");
    }
    const Timestamp T = bt.timeline();
    std::vector<PruneVerdict> verdicts(interval_count(T));
    parallel_for(groups.size(), threads, [&](std::size_t gi) {
        const PruningGroup& grp = groups[gi];
        bool group_pruned = false;
        double gb = 0.0;
        if (use_groups) {
            gb = group_bound(bt, grp, cfg) / 2.0;
            group_pruned = prunable(gb, phi_star);
        }
        for (Timestamp e = grp.prefix_end; e <= grp.group_end; ++e) {
            const Interval iv{grp.start, e};
            PruneVerdict& v = verdicts[interval_index(iv, T)];
            v.interval = iv;
            if (group_pruned) {
                v.status = PruneStatus::GroupPruned;
                v.bound_value = gb;
                continue;
            }
            v.bound_value = composite_bound(bt, iv, cfg) / 2.0;
            v.status = prunable(v.bound_value, phi_star) ? PruneStatus::CompositePruned : PruneStatus::Unpruned;
        }
    });
    return verdicts;
}

}  // namespace tempocom
