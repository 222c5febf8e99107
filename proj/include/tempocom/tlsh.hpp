#pragma once

// Locality-sensitive hashing of weighted temporal neighborhoods: consistent
// weighted sampling on the graph side, random pivots on the time side, and
// banded bucket tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "tempocom/graph.hpp"
#include "tempocom/parallel.hpp"
#include "tempocom/pruning.hpp"

namespace tempocom {

struct WeightedElement {
    NodeId key;
    double weight;

    friend bool operator==(const WeightedElement&, const WeightedElement&) = default;
};

/// Sorted by key, keys unique, weights > 0.
using WeightedSet = std::vector<WeightedElement>;

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(a ^ (mix64(b) + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

/// Uniform in (0, 1), never 0.
inline double to_unit(std::uint64_t x) noexcept {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

inline double weighted_jaccard(std::span<const WeightedElement> a, std::span<const WeightedElement> b) {
    if (a.empty() && b.empty()) throw ArgumentError("weighted Jaccard of two empty sets");
    double num = 0.0, den = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].key < b[j].key)) {
            den += a[i++].weight;
        } else if (i == a.size() || b[j].key < a[i].key) {
            den += b[j++].weight;
        } else {
            num += std::min(a[i].weight, b[j].weight);
            den += std::max(a[i].weight, b[j].weight);
            ++i, ++j;
        }
    }
    return den > 0.0 ? num / den : 0.0;
}

/// Snapshot neighborhood of u at t plus u itself weighted by vol(u, t).
/// Empty when u has no edges at t.
inline WeightedSet temporal_neighborhood(const TemporalGraph& g, NodeId u, Timestamp t) {
    WeightedSet out;
    double vol = 0.0;
    bool self_done = false;
    for (const auto& inc : g.incident(u)) {
        const double w = g.weight(inc.edge, t);
        if (w <= 0.0) continue;
        if (!self_done && inc.neighbor > u) {
            out.push_back({u, 0.0});
            self_done = true;
        }
        out.push_back({inc.neighbor, w});
        vol += w;
    }
    if (out.empty()) return out;
    if (!self_done) out.push_back({u, 0.0});
    for (auto& e : out) {
        if (e.key == u) e.weight = vol;
    }
    return out;
}

/// One consistent weighted sample: the chosen key and its quantized level.
struct CwsSample {
    NodeId key = 0;
    std::int64_t level = 0;

    friend bool operator==(const CwsSample&, const CwsSample&) = default;
};

/// Ioffe's improved consistent weighted sampling. Per (function, key) random
/// variables come from a counter-based generator, so a key's draws do not
/// depend on which other keys are present.
class WeightedMinHasher {
public:
    WeightedMinHasher(std::size_t functions, std::uint64_t seed) : r_(functions), seed_(seed) {
        if (functions == 0) throw ArgumentError("need at least one minhash function");
    }

    std::size_t functions() const noexcept { return r_; }
    std::uint64_t seed() const noexcept { return seed_; }

    CwsSample sample(std::span<const WeightedElement> set, std::size_t fn) const {
        if (set.empty()) throw ArgumentError("minhash of an empty set");
        CwsSample best;
        double best_log_a = kInfinity;
        for (const auto& e : set) {
            if (!(e.weight > 0.0)) continue;
            std::uint64_t h = detail::hash_combine(detail::hash_combine(seed_, fn), e.key);
            double u[5];
            for (double& x : u) x = detail::to_unit(h = detail::mix64(h));
            const double r = -std::log(u[0] * u[1]);  // Gamma(2, 1)
            const double c = -std::log(u[2] * u[3]);  // Gamma(2, 1)
            const double beta = u[4];
            const double t = std::floor(std::log(e.weight) / r + beta);
            // ln a = ln c - ln y - r, y = exp(r (t - beta))
            const double log_a = std::log(c) - r * (t - beta) - r;
            if (log_a < best_log_a || (log_a == best_log_a && e.key < best.key)) {
                best_log_a = log_a;
                best = {e.key, static_cast<std::int64_t>(t)};
            }
        }
        if (best_log_a == kInfinity) throw ArgumentError("minhash of a set without positive weights");
        return best;
    }

    /// r 64-bit components, each a hash of one (key, level) sample.
    std::vector<std::uint64_t> minhash(std::span<const WeightedElement> set) const {
        std::vector<std::uint64_t> out(r_);
        for (std::size_t f = 0; f < r_; ++f) {
            const CwsSample s = sample(set, f);
            out[f] = detail::hash_combine(detail::mix64(s.key), static_cast<std::uint64_t>(s.level));
        }
        return out;
    }

private:
    std::size_t r_;
    std::uint64_t seed_;
};

/// tau(t) = 1-based index of the first pivot >= t, k + 1 when t is beyond all.
class TemporalPivotHasher {
public:
    explicit TemporalPivotHasher(std::vector<double> pivots) : pivots_(std::move(pivots)) {
        std::sort(pivots_.begin(), pivots_.end());
    }

    template <typename Rng>
    static TemporalPivotHasher draw(std::size_t k, Timestamp timeline, Rng& rng) {
        std::uniform_real_distribution<double> unif(0.0, static_cast<double>(timeline));
        std::vector<double> p(k);
        for (double& x : p) x = unif(rng);
        return TemporalPivotHasher(std::move(p));
    }

    std::size_t k() const noexcept { return pivots_.size(); }
    std::span<const double> pivots() const noexcept { return pivots_; }

    std::uint32_t hash(double t) const {
        return static_cast<std::uint32_t>(std::lower_bound(pivots_.begin(), pivots_.end(), t) - pivots_.begin()) + 1;
    }

private:
    std::vector<double> pivots_;
};

/// Pivot count maximizing the chance that a period of span delta_star is
/// bracketed by exactly two pivots.
inline std::size_t optimal_pivots(Timestamp delta_star, Timestamp timeline) {
    if (delta_star < 1 || delta_star > timeline) throw ArgumentError("delta* must lie in [1, T]");
    return std::max<std::size_t>(2, static_cast<std::size_t>(2 * static_cast<long long>(timeline) / delta_star));
}

/// Whether the pivots isolate the period [a, a + span]: exactly one pivot in
/// [a - 1, a), exactly one in [a + span, a + span + 1), none in between.
inline bool perfect_partition(const TemporalPivotHasher& h, Timestamp a, Timestamp span) {
    std::size_t before = 0, inside = 0, after = 0;
    for (double p : h.pivots()) {
        if (p >= a - 1 && p < a) ++before;
        else if (p >= a && p < a + span) ++inside;
        else if (p >= a + span && p < a + span + 1) ++after;
    }
    return before == 1 && inside == 0 && after == 1;
}

/// Monte Carlo collision rate of banded composite signatures for a pair of
/// weighted sets with known weighted Jaccard, observed at timestamps Delta apart.
struct CollisionCell {
    double jaccard = 0.0;
    Timestamp delta = 0;
    Timestamp timeline = 1;
    std::size_t rows = 1;
    std::size_t pivots = 1;
    std::size_t bands = 1;
    std::size_t trials = 0;
    std::size_t hits = 0;

    double single_band() const {
        return std::pow(jaccard, static_cast<double>(rows)) *
               std::pow(1.0 - static_cast<double>(delta) / timeline, static_cast<double>(pivots));
    }
    double expected() const { return 1.0 - std::pow(1.0 - single_band(), static_cast<double>(bands)); }
    double empirical() const { return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0; }
    double sigma() const { return std::sqrt(expected() * (1.0 - expected()) / static_cast<double>(trials)); }
};

/// Pair {0: 1, 1: x}, {0: 1, 2: x} with x chosen so the weighted Jaccard is `jaccard`.
inline std::pair<WeightedSet, WeightedSet> jaccard_pair(double jaccard) {
    if (!(jaccard > 0.0 && jaccard <= 1.0)) throw ArgumentError("target Jaccard must lie in (0, 1]");
    if (jaccard == 1.0) return {{{0, 1.0}}, {{0, 1.0}}};
    const double x = (1.0 / jaccard - 1.0) / 2.0;
    return {{{0, 1.0}, {1, x}}, {{0, 1.0}, {2, x}}};
}

inline CollisionCell calibrate_collisions(double jaccard, Timestamp delta, Timestamp timeline, std::size_t rows,
                                          std::size_t pivots, std::size_t bands, std::size_t trials,
                                          std::uint64_t seed) {
    if (delta < 0 || delta > timeline) throw ArgumentError("delta must lie in [0, T]");
    CollisionCell cell{jaccard, delta, timeline, rows, pivots, bands, trials, 0};
    const auto [a, b] = jaccard_pair(jaccard);
    const double t0 = (static_cast<double>(timeline) - static_cast<double>(delta)) / 2.0;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < trials; ++i) {
        bool hit = false;
        for (std::size_t band = 0; band < bands; ++band) {
            const WeightedMinHasher mh(rows, rng());
            const auto tph = TemporalPivotHasher::draw(pivots, timeline, rng);
            if (hit) continue;  // keep the RNG stream independent of outcomes
            hit = mh.minhash(a) == mh.minhash(b) && tph.hash(t0) == tph.hash(t0 + delta);
        }
        cell.hits += hit;
    }
    return cell;
}

struct CompositeSignature {
    std::uint32_t band = 0;
    std::vector<std::uint64_t> graph;
    std::uint32_t time = 0;

    friend bool operator==(const CompositeSignature&, const CompositeSignature&) = default;
    friend auto operator<=>(const CompositeSignature&, const CompositeSignature&) = default;
};

/// Bits needed for a signature whose graph part holds r node ids (out of n)
/// and whose time part holds one of k + 1 pivot indices.
inline std::size_t packed_signature_bits(std::size_t k, std::size_t n, std::size_t r) {
    const long double bits = std::log2(static_cast<long double>(k + 1)) +
                             static_cast<long double>(r) * std::log2(static_cast<long double>(std::max<std::size_t>(n, 1)));
    return static_cast<std::size_t>(std::ceil(bits - 1e-12L));
}

/// Mixed-radix packing of (time index in [1, k+1], sampled node ids) into
/// little-endian bytes, ceil(bits / 8) of them. Band id is stored separately.
inline std::vector<std::uint8_t> pack_signature(std::uint32_t time, std::span<const NodeId> nodes, std::size_t k,
                                                std::size_t n) {
    if (time < 1 || time > k + 1) throw ArgumentError("pivot index out of range");
    std::vector<std::uint32_t> limbs{time - 1};
    auto mul_add = [&](std::uint64_t radix, std::uint64_t digit) {
        std::uint64_t carry = digit;
        for (auto& l : limbs) {
            const std::uint64_t v = static_cast<std::uint64_t>(l) * radix + carry;
            l = static_cast<std::uint32_t>(v);
            carry = v >> 32;
        }
        while (carry) {
            limbs.push_back(static_cast<std::uint32_t>(carry));
            carry >>= 32;
        }
    };
    for (NodeId v : nodes) {
        if (v >= n) throw ArgumentError("node id out of range");
        mul_add(n, v);
    }
    const std::size_t bytes = (packed_signature_bits(k, n, nodes.size()) + 7) / 8;
    std::vector<std::uint8_t> out(std::max<std::size_t>(bytes, 1), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::size_t limb = i / 4;
        if (limb < limbs.size()) out[i] = static_cast<std::uint8_t>(limbs[limb] >> (8 * (i % 4)));
    }
    return out;
}

struct BucketEntry {
    NodeId node;
    Timestamp t;

    friend bool operator==(const BucketEntry&, const BucketEntry&) = default;
    friend auto operator<=>(const BucketEntry&, const BucketEntry&) = default;
};

struct Bucket {
    std::uint32_t scale = 0;
    CompositeSignature key;
    std::vector<BucketEntry> entries;  // sorted by (node, t)

    Interval span() const {
        Timestamp lo = entries.front().t, hi = lo;
        for (const auto& e : entries) {
            lo = std::min(lo, e.t);
            hi = std::max(hi, e.t);
        }
        return {lo, hi};
    }
};

inline std::size_t distinct_nodes(std::span<const BucketEntry> entries) {
    std::vector<NodeId> v;
    for (const auto& e : entries) v.push_back(e.node);
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

inline std::size_t distinct_timestamps(std::span<const BucketEntry> entries) {
    std::vector<Timestamp> v;
    for (const auto& e : entries) v.push_back(e.t);
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

/// |entries| / (distinct nodes x distinct timestamps).
inline double fill_factor(const Bucket& b) {
    if (b.entries.empty()) throw ArgumentError("fill factor of an empty bucket");
    return static_cast<double>(b.entries.size()) /
           (static_cast<double>(distinct_nodes(b.entries)) * static_cast<double>(distinct_timestamps(b.entries)));
}

/// Processing order: fill factor desc, size desc, then (scale, key) asc.
inline bool bucket_order_less(const Bucket& a, const Bucket& b) {
    const double fa = fill_factor(a), fb = fill_factor(b);
    if (fa != fb) return fa > fb;
    if (a.entries.size() != b.entries.size()) return a.entries.size() > b.entries.size();
    if (a.scale != b.scale) return a.scale < b.scale;
    return a.key < b.key;
}

/// Splits at the timestamp median until every piece holds at most `cap`
/// entries. Pieces with a single timestamp are halved by node order.
inline std::vector<Bucket> split_bucket(Bucket b, std::size_t cap) {
    if (cap == 0) throw ArgumentError("bucket capacity must be positive");
    std::vector<Bucket> out;
    std::vector<Bucket> todo;
    todo.push_back(std::move(b));
    while (!todo.empty()) {
        Bucket cur = std::move(todo.back());
        todo.pop_back();
        if (cur.entries.size() <= cap) {
            out.push_back(std::move(cur));
            continue;
        }
        std::vector<Timestamp> ts;
        for (const auto& e : cur.entries) ts.push_back(e.t);
        std::nth_element(ts.begin(), ts.begin() + static_cast<std::ptrdiff_t>(ts.size() / 2), ts.end());
        const Timestamp median = ts[ts.size() / 2];
        Bucket lo{cur.scale, cur.key, {}}, hi{cur.scale, cur.key, {}};
        for (const auto& e : cur.entries) (e.t < median ? lo : hi).entries.push_back(e);
        if (lo.entries.empty()) {
            // everything at or after the median; try splitting just past it
            lo.entries.clear();
            hi.entries.clear();
            for (const auto& e : cur.entries) (e.t <= median ? lo : hi).entries.push_back(e);
        }
        if (hi.entries.empty()) {
            lo.entries.clear();
            hi.entries.clear();
            const std::size_t half = cur.entries.size() / 2;
            for (std::size_t i = 0; i < cur.entries.size(); ++i) (i < half ? lo : hi).entries.push_back(cur.entries[i]);
        }
        todo.push_back(std::move(hi));
        todo.push_back(std::move(lo));
    }
    std::sort(out.begin(), out.end(), [](const Bucket& x, const Bucket& y) { return x.entries < y.entries; });
    return out;
}

/// Geometric scale ladder {1, 2, 4, ..., <= T/2}; {1} for short timelines.
inline std::vector<Timestamp> geometric_scales(Timestamp timeline) {
    std::vector<Timestamp> s{1};
    while (static_cast<long long>(s.back()) * 2 <= timeline / 2) s.push_back(s.back() * 2);
    return s;
}

struct HashParams {
    std::vector<Timestamp> scales;  // empty -> geometric_scales(T)
    std::size_t rows = 4;
    std::size_t bands = 8;
    std::uint64_t seed = 1;
    std::size_t bucket_cap = 4096;
    unsigned threads = 1;
    std::optional<Interval> window;  // hash only timestamps inside
};

struct HashTables {
    std::vector<Timestamp> scales;
    std::vector<Bucket> buckets;  // sorted by (scale, key), entries sorted
    std::size_t hashed = 0;       // (u, t, scale, band) insertions
};

/// For every t, whether some unpruned interval intersects [t - s, t + s].
inline std::vector<char> hashable_timestamps(std::span<const PruneVerdict> verdicts, Timestamp timeline, Timestamp s) {
    std::vector<Timestamp> max_end(static_cast<std::size_t>(timeline), -1);
    for (const auto& v : verdicts) {
        if (v.pruned()) continue;
        auto& m = max_end[static_cast<std::size_t>(v.interval.start)];
        m = std::max(m, v.interval.end);
    }
    for (std::size_t i = 1; i < max_end.size(); ++i) max_end[i] = std::max(max_end[i], max_end[i - 1]);
    std::vector<char> out(static_cast<std::size_t>(timeline), 0);
    for (Timestamp t = 0; t < timeline; ++t) {
        const Timestamp hi = std::min(timeline - 1, t + s);
        const Timestamp lo = std::max(0, t - s);
        out[static_cast<std::size_t>(t)] = max_end[static_cast<std::size_t>(hi)] >= lo;
    }
    return out;
}

/// Builds bucket tables for all scales and bands. Minhash values are shared by
/// all scales of a band; pivots are drawn per (band, scale).
inline HashTables hash_all(const TemporalGraph& g, std::span<const PruneVerdict> verdicts, const HashParams& params) {
    if (params.rows == 0 || params.bands == 0) throw ArgumentError("rows and bands must be positive");
    const Timestamp T = g.timeline_length();
    const std::size_t n = g.node_count();
    HashTables out;
    out.scales = params.scales.empty() ? geometric_scales(T) : params.scales;
    for (Timestamp s : out.scales) {
        if (s < 1) throw ArgumentError("scales must be positive");
    }

    std::vector<std::vector<char>> active;
    std::vector<char> any(static_cast<std::size_t>(T), 0);
    for (Timestamp s : out.scales) {
        active.push_back(hashable_timestamps(verdicts, T, s));
        if (params.window) {
            for (Timestamp t = 0; t < T; ++t) {
                if (!params.window->contains(t)) active.back()[static_cast<std::size_t>(t)] = 0;
            }
        }
        for (std::size_t t = 0; t < any.size(); ++t) any[t] |= active.back()[t];
    }

    // neighborhoods are computed once and shared by all bands
    std::vector<WeightedSet> nbhd(n * static_cast<std::size_t>(T));
    for (Timestamp t = 0; t < T; ++t) {
        if (!any[static_cast<std::size_t>(t)]) continue;
        for (std::size_t u = 0; u < n; ++u) {
            nbhd[static_cast<std::size_t>(t) * n + u] = temporal_neighborhood(g, static_cast<NodeId>(u), t);
        }
    }

    std::vector<std::vector<Bucket>> per_band(params.bands);
    std::vector<std::size_t> counts(params.bands, 0);
    parallel_for(params.bands, params.threads, [&](std::size_t band) {
        const std::uint64_t band_seed = detail::hash_combine(params.seed, band);
        WeightedMinHasher mh(params.rows, band_seed);
        std::vector<std::vector<std::uint64_t>> sig(nbhd.size());
        for (std::size_t i = 0; i < nbhd.size(); ++i) {
            if (!nbhd[i].empty()) sig[i] = mh.minhash(nbhd[i]);
        }
        for (std::size_t si = 0; si < out.scales.size(); ++si) {
            const Timestamp s = out.scales[si];
            std::mt19937_64 rng(detail::hash_combine(band_seed, static_cast<std::uint64_t>(s)));
            const auto tph = TemporalPivotHasher::draw(optimal_pivots(std::min<Timestamp>(2 * s, T), T), T, rng);
            std::map<CompositeSignature, std::vector<BucketEntry>> table;
            for (Timestamp t = 0; t < T; ++t) {
                if (!active[si][static_cast<std::size_t>(t)]) continue;
                const std::uint32_t tau = tph.hash(static_cast<double>(t));
                for (std::size_t u = 0; u < n; ++u) {
                    const auto& gs = sig[static_cast<std::size_t>(t) * n + u];
                    if (gs.empty()) continue;
                    table[{static_cast<std::uint32_t>(band), gs, tau}].push_back({static_cast<NodeId>(u), t});
                    ++counts[band];
                }
            }
            for (auto& [key, entries] : table) {
                std::sort(entries.begin(), entries.end());
                for (auto& b : split_bucket({static_cast<std::uint32_t>(s), key, std::move(entries)}, params.bucket_cap)) {
                    per_band[band].push_back(std::move(b));
                }
            }
        }
    });

    for (std::size_t band = 0; band < params.bands; ++band) {
        out.hashed += counts[band];
        for (auto& b : per_band[band]) out.buckets.push_back(std::move(b));
    }
    std::stable_sort(out.buckets.begin(), out.buckets.end(), [](const Bucket& a, const Bucket& b) {
        if (a.scale != b.scale) return a.scale < b.scale;
        return a.key < b.key;
    });
    return out;
}

}  // namespace tempocom
