#pragma once

// Temporal graph data model, interval aggregation and temporal conductance.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tempocom/common.hpp"

namespace tempocom {

/// Closed timestamp range [start, end].
struct Interval {
    Timestamp start = 0;
    Timestamp end = 0;

    /// Number of timestamps covered.
    Timestamp length() const noexcept { return end - start + 1; }
    /// end - start; the duration used by the normalization.
    Timestamp span() const noexcept { return end - start; }

    bool valid_for(Timestamp timeline) const noexcept {
        return start >= 0 && start <= end && end < timeline;
    }
    bool contains(Timestamp t) const noexcept { return t >= start && t <= end; }
    bool intersects(const Interval& o) const noexcept { return start <= o.end && o.start <= end; }

    friend bool operator==(const Interval&, const Interval&) = default;
    friend auto operator<=>(const Interval&, const Interval&) = default;
};

inline void require_interval(const Interval& iv, Timestamp timeline) {
    if (!iv.valid_for(timeline)) {
        throw ArgumentError("interval [" + std::to_string(iv.start) + "," + std::to_string(iv.end) +
                            "] outside timeline of length " + std::to_string(timeline));
    }
}

struct NormalizationConfig {
    double alpha = 0.0;
};

/// Temporal normalization max(1, t'-t)^(-alpha). Single-timestamp intervals use
/// duration 1 so the factor stays finite.
inline double eta(const Interval& iv, const NormalizationConfig& cfg) {
    if (cfg.alpha < 0.0) throw ArgumentError("alpha must be non-negative");
    if (cfg.alpha == 0.0) return 1.0;
    const double duration = std::max<Timestamp>(1, iv.span());
    return std::pow(duration, -cfg.alpha);
}

/// Immutable undirected edge-weighted temporal graph. Edges are stored once as
/// (u < v); each edge carries a time-sorted list of strictly positive weights.
class TemporalGraph {
public:
    struct Edge {
        NodeId u;
        NodeId v;
    };
    struct Sample {
        Timestamp t;
        double w;
    };
    struct Incidence {
        NodeId neighbor;
        std::uint32_t edge;
    };

    TemporalGraph() = default;

    std::size_t node_count() const noexcept { return labels_.size(); }
    Timestamp timeline_length() const noexcept { return timeline_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(std::size_t e) const { return edges_[e]; }

    /// Nonzero weights of edge `e`, sorted by timestamp.
    std::span<const Sample> series(std::size_t e) const {
        return {samples_.data() + series_offsets_[e], samples_.data() + series_offsets_[e + 1]};
    }

    /// Edges incident to `u`, sorted by neighbor id.
    std::span<const Incidence> incident(NodeId u) const {
        return {incidence_.data() + incidence_offsets_[u],
                incidence_.data() + incidence_offsets_[u + 1]};
    }

    /// w(e, t); zero when absent.
    double weight(std::size_t e, Timestamp t) const {
        const auto s = series(e);
        auto it = std::lower_bound(s.begin(), s.end(), t,
                                   [](const Sample& x, Timestamp ts) { return x.t < ts; });
        return (it != s.end() && it->t == t) ? it->w : 0.0;
    }

    /// vol(u, t) for a single timestamp.
    double snapshot_volume(NodeId u, Timestamp t) const {
        double vol = 0.0;
        for (const auto& inc : incident(u)) vol += weight(inc.edge, t);
        return vol;
    }

    /// Edge index of {u, v}, or -1.
    long find_edge(NodeId u, NodeId v) const {
        if (u == v || u >= node_count() || v >= node_count()) return -1;
        const auto inc = incident(u);
        auto it = std::lower_bound(inc.begin(), inc.end(), v,
                                   [](const Incidence& x, NodeId id) { return x.neighbor < id; });
        return (it != inc.end() && it->neighbor == v) ? static_cast<long>(it->edge) : -1;
    }

    const std::string& label(NodeId u) const { return labels_[u]; }
    std::span<const std::string> labels() const noexcept { return labels_; }

    /// Dense id of an external label, or -1.
    long find_label(const std::string& label) const {
        auto it = label_index_.find(label);
        return it == label_index_.end() ? -1 : static_cast<long>(it->second);
    }

    double total_weight() const {
        double sum = 0.0;
        for (const auto& s : samples_) sum += s.w;
        return sum;
    }

private:
    friend class TemporalGraphBuilder;

    Timestamp timeline_ = 0;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> label_index_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> series_offsets_{0};
    std::vector<Sample> samples_;
    std::vector<std::size_t> incidence_offsets_;
    std::vector<Incidence> incidence_;
};

/// Accumulates (u, v, t, w) records and freezes them into a TemporalGraph.
/// Duplicate (u, v, t) records are summed in insertion order.
class TemporalGraphBuilder {
public:
    TemporalGraphBuilder(std::size_t node_count, Timestamp timeline)
        : node_count_(node_count), timeline_(timeline) {
        if (timeline < 1) throw ArgumentError("timeline length must be at least 1");
    }

    void set_labels(std::vector<std::string> labels) {
        if (labels.size() != node_count_) throw ArgumentError("label count differs from node count");
        labels_ = std::move(labels);
    }

    void add(NodeId u, NodeId v, Timestamp t, double w) {
        if (u >= node_count_ || v >= node_count_) throw ArgumentError("node id out of range");
        if (u == v) throw ArgumentError("self-loop on node " + std::to_string(u));
        if (t < 0 || t >= timeline_) throw ArgumentError("timestamp " + std::to_string(t) + " outside timeline");
        if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("weight must be positive and finite");
        if (u > v) std::swap(u, v);
        records_.push_back({u, v, t, w, records_.size()});
    }

    TemporalGraph build() && {
        TemporalGraph g;
        g.timeline_ = timeline_;
        if (labels_.empty()) {
            labels_.reserve(node_count_);
            for (std::size_t i = 0; i < node_count_; ++i) labels_.push_back(std::to_string(i));
        }
        g.labels_ = std::move(labels_);
        for (std::size_t i = 0; i < g.labels_.size(); ++i) {
            if (!g.label_index_.emplace(g.labels_[i], static_cast<NodeId>(i)).second) {
                throw ArgumentError("duplicate node label '" + g.labels_[i] + "'");
            }
        }

        std::sort(records_.begin(), records_.end(), [](const Record& a, const Record& b) {
            return std::tie(a.u, a.v, a.t, a.seq) < std::tie(b.u, b.v, b.t, b.seq);
        });
        for (std::size_t i = 0; i < records_.size();) {
            const Record& head = records_[i];
            if (g.edges_.empty() || g.edges_.back().u != head.u || g.edges_.back().v != head.v) {
                if (!g.edges_.empty()) g.series_offsets_.push_back(g.samples_.size());
                g.edges_.push_back({head.u, head.v});
            }
            double w = 0.0;
            std::size_t j = i;
            for (; j < records_.size() && records_[j].u == head.u && records_[j].v == head.v &&
                   records_[j].t == head.t;
                 ++j) {
                w += records_[j].w;
            }
            g.samples_.push_back({head.t, w});
            i = j;
        }
        if (!g.edges_.empty()) g.series_offsets_.push_back(g.samples_.size());

        std::vector<std::size_t> degree(node_count_, 0);
        for (const auto& e : g.edges_) {
            ++degree[e.u];
            ++degree[e.v];
        }
        g.incidence_offsets_.assign(node_count_ + 1, 0);
        for (std::size_t u = 0; u < node_count_; ++u) {
            g.incidence_offsets_[u + 1] = g.incidence_offsets_[u] + degree[u];
        }
        g.incidence_.resize(g.incidence_offsets_.back());
        std::vector<std::size_t> fill(g.incidence_offsets_.begin(), g.incidence_offsets_.end() - 1);
        for (std::uint32_t e = 0; e < g.edges_.size(); ++e) {
            const auto [u, v] = g.edges_[e];
            g.incidence_[fill[u]++] = {v, e};
            g.incidence_[fill[v]++] = {u, e};
        }
        for (std::size_t u = 0; u < node_count_; ++u) {
            std::sort(g.incidence_.begin() + static_cast<long>(g.incidence_offsets_[u]),
                      g.incidence_.begin() + static_cast<long>(g.incidence_offsets_[u + 1]),
                      [](const auto& a, const auto& b) { return a.neighbor < b.neighbor; });
        }
        return g;
    }

private:
    struct Record {
        NodeId u;
        NodeId v;
        Timestamp t;
        double w;
        std::size_t seq;
    };

    std::size_t node_count_;
    Timestamp timeline_;
    std::vector<std::string> labels_;
    std::vector<Record> records_;
};

/// Weighted static graph obtained by summing a temporal graph over an interval.
/// Rows list neighbors in ascending order; zero-weight edges are omitted.
class AggregatedGraph {
public:
    struct WeightedEdge {
        NodeId u;
        NodeId v;
        double w;
    };
    struct Neighbor {
        NodeId node;
        double w;
    };

    AggregatedGraph() = default;

    /// Builds from an explicit edge list (u != v, w > 0, each pair at most once).
    AggregatedGraph(std::size_t node_count, Interval interval, std::vector<WeightedEdge> edges)
        : interval_(interval), node_count_(node_count), edges_(std::move(edges)) {
        for (auto& e : edges_) {
            if (e.u == e.v || e.u >= node_count || e.v >= node_count || !(e.w > 0.0)) {
                throw ArgumentError("invalid aggregated edge");
            }
            if (e.u > e.v) std::swap(e.u, e.v);
        }
        std::sort(edges_.begin(), edges_.end(),
                  [](const auto& a, const auto& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
        for (std::size_t i = 1; i < edges_.size(); ++i) {
            if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v) {
                throw ArgumentError("duplicate aggregated edge");
            }
        }
        build_rows();
    }

    const Interval& interval() const noexcept { return interval_; }
    std::size_t node_count() const noexcept { return node_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::span<const WeightedEdge> edges() const noexcept { return edges_; }

    std::span<const Neighbor> neighbors(NodeId u) const {
        return {rows_.data() + offsets_[u], rows_.data() + offsets_[u + 1]};
    }

    /// vol(u, t, t'): row sum of the aggregated adjacency.
    double volume(NodeId u) const { return volumes_[u]; }
    std::span<const double> volumes() const noexcept { return volumes_; }

    double total_volume() const {
        double s = 0.0;
        for (double v : volumes_) s += v;
        return s;
    }

    /// Aggregated weight of {u, v}; zero when absent.
    double weight(NodeId u, NodeId v) const {
        const auto row = neighbors(u);
        auto it = std::lower_bound(row.begin(), row.end(), v,
                                   [](const Neighbor& n, NodeId id) { return n.node < id; });
        return (it != row.end() && it->node == v) ? it->w : 0.0;
    }

private:
    void build_rows() {
        std::vector<std::size_t> degree(node_count_, 0);
        for (const auto& e : edges_) {
            ++degree[e.u];
            ++degree[e.v];
        }
        offsets_.assign(node_count_ + 1, 0);
        for (std::size_t u = 0; u < node_count_; ++u) offsets_[u + 1] = offsets_[u] + degree[u];
        rows_.resize(offsets_.back());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (const auto& e : edges_) {
            rows_[fill[e.u]++] = {e.v, e.w};
            rows_[fill[e.v]++] = {e.u, e.w};
        }
        for (std::size_t u = 0; u < node_count_; ++u) {
            std::sort(rows_.begin() + static_cast<long>(offsets_[u]),
                      rows_.begin() + static_cast<long>(offsets_[u + 1]),
                      [](const auto& a, const auto& b) { return a.node < b.node; });
        }
        volumes_.assign(node_count_, 0.0);
        for (std::size_t u = 0; u < node_count_; ++u) {
            double vol = 0.0;
            for (const auto& nb : neighbors(static_cast<NodeId>(u))) vol += nb.w;
            volumes_[u] = vol;
        }
    }

    Interval interval_;
    std::size_t node_count_ = 0;
    std::vector<WeightedEdge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Neighbor> rows_;
    std::vector<double> volumes_;
};

/// Sums every edge's weights over `iv` (in timestamp order).
inline AggregatedGraph aggregate(const TemporalGraph& g, const Interval& iv) {
    require_interval(iv, g.timeline_length());
    std::vector<AggregatedGraph::WeightedEdge> edges;
    edges.reserve(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto s = g.series(e);
        auto it = std::lower_bound(s.begin(), s.end(), iv.start,
                                   [](const TemporalGraph::Sample& x, Timestamp t) { return x.t < t; });
        double w = 0.0;
        for (; it != s.end() && it->t <= iv.end; ++it) w += it->w;
        if (w > 0.0) edges.push_back({g.edge(e).u, g.edge(e).v, w});
    }
    return AggregatedGraph(g.node_count(), iv, std::move(edges));
}

namespace detail {

inline std::vector<char> membership(std::size_t n, std::span<const NodeId> nodes) {
    std::vector<char> in(n, 0);
    for (NodeId u : nodes) {
        if (u >= n) throw ArgumentError("node id out of range");
        if (in[u]) throw ArgumentError("duplicate node in set");
        in[u] = 1;
    }
    return in;
}

}  // namespace detail

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), sets_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --sets_;
        return true;
    }

    std::size_t set_count() const noexcept { return sets_; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
    std::size_t sets_;
};

/// Number of connected components; isolated nodes count as their own components.
inline std::size_t component_count(const AggregatedGraph& ag) {
    UnionFind uf(ag.node_count());
    for (const auto& e : ag.edges()) uf.unite(e.u, e.v);
    return uf.set_count();
}

/// Whether `nodes` induces a connected subgraph of `ag`.
inline bool is_connected_subset(const AggregatedGraph& ag, std::span<const NodeId> nodes) {
    if (nodes.empty()) return false;
    const auto in = detail::membership(ag.node_count(), nodes);
    std::vector<char> seen(ag.node_count(), 0);
    std::vector<NodeId> stack{nodes.front()};
    seen[nodes.front()] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        for (const auto& nb : ag.neighbors(u)) {
            if (in[nb.node] && !seen[nb.node]) {
                seen[nb.node] = 1;
                ++reached;
                stack.push_back(nb.node);
            }
        }
    }
    return reached == nodes.size();
}

/// Cut and volumes of a node set in an aggregated graph.
struct CutStats {
    double cut = 0.0;
    double volume_in = 0.0;
    double volume_out = 0.0;
};

inline CutStats cut_stats(const AggregatedGraph& ag, std::span<const NodeId> nodes) {
    const auto in = detail::membership(ag.node_count(), nodes);
    CutStats s;
    for (const auto& e : ag.edges()) {
        if (in[e.u] != in[e.v]) s.cut += e.w;
    }
    for (std::size_t u = 0; u < ag.node_count(); ++u) {
        (in[u] ? s.volume_in : s.volume_out) += ag.volume(static_cast<NodeId>(u));
    }
    return s;
}

/// Temporal conductance eta * cut / min(vol(C), vol(V \ C)) on the aggregated graph.
/// Returns +infinity when the smaller side has zero volume.
inline double conductance(const AggregatedGraph& ag, std::span<const NodeId> nodes,
                          const NormalizationConfig& cfg) {
    if (nodes.empty() || nodes.size() >= ag.node_count()) {
        throw ArgumentError("community must be a nonempty proper subset of the nodes");
    }
    const CutStats s = cut_stats(ag, nodes);
    const double denom = std::min(s.volume_in, s.volume_out);
    if (!(denom > 0.0)) return kInfinity;
    return eta(ag.interval(), cfg) * s.cut / denom;
}

inline double conductance(const TemporalGraph& g, std::span<const NodeId> nodes, const Interval& iv,
                          const NormalizationConfig& cfg) {
    return conductance(aggregate(g, iv), nodes, cfg);
}

/// (C, [t, t']) with its conductance.
struct TemporalCommunity {
    std::vector<NodeId> nodes;  // sorted ascending
    Interval interval;
    double phi = kInfinity;

    friend bool operator==(const TemporalCommunity&, const TemporalCommunity&) = default;
};

/// Deterministic total order: (phi, |C|, nodes lexicographic, start, end).
inline bool community_less(const TemporalCommunity& a, const TemporalCommunity& b) {
    if (a.phi != b.phi) return a.phi < b.phi;
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
    if (a.nodes != b.nodes) return a.nodes < b.nodes;
    return a.interval < b.interval;
}

}  // namespace tempocom
