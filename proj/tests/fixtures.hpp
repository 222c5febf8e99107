#pragma once

// Shared instance builders and dense reference computations for tests.

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "tempocom/graph.hpp"
#include "tempocom/synth.hpp"

namespace fixtures {

using namespace tempocom;

/// Random temporal graph: each pair is an edge with probability p_edge, each
/// (edge, t) carries a weight in [0.1, 10) with probability p_time.
inline TemporalGraph random_graph(std::size_t n, Timestamp T, double p_edge, double p_time, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution edge(p_edge), present(p_time);
    std::uniform_real_distribution<double> w(0.1, 10.0);
    TemporalGraphBuilder b(n, T);
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            if (!edge(rng)) continue;
            for (Timestamp t = 0; t < T; ++t) {
                if (present(rng)) b.add(u, v, t, w(rng));
            }
        }
    }
    return std::move(b).build();
}

/// Random instance with n in [lo_n, hi_n] and T in [1, hi_T].
inline TemporalGraph random_small_instance(std::uint64_t seed, std::size_t lo_n = 3, std::size_t hi_n = 10,
                                           Timestamp hi_T = 8) {
    std::mt19937_64 rng(seed * 7919 + 17);
    const auto n = std::uniform_int_distribution<std::size_t>(lo_n, hi_n)(rng);
    const auto T = std::uniform_int_distribution<Timestamp>(1, hi_T)(rng);
    const double p_edge = std::uniform_real_distribution<double>(0.3, 0.9)(rng);
    const double p_time = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
    return random_graph(n, T, p_edge, p_time, rng());
}

/// Desk-scale planted instance: 12 nodes, T = 8.
inline SynthResult desk_planted(std::uint64_t seed, std::size_t n = 12, Timestamp T = 8) {
    SynthConfig c;
    c.n = n;
    c.m = 2;
    c.T = T;
    c.mu = 5.0;
    c.planted_size = 4;
    c.planted_length = 3;
    c.contrast = 8.0;
    c.planted_density = 1.0;
    c.seed = seed;
    return generate(c);
}

/// 8 nodes, T = 6. {0,1,2,3} is a heavy clique over [1, 4] with three weak
/// links to the other half; outside [1, 4] those links are heavy instead.
inline TemporalGraph handcrafted_planted() {
    TemporalGraphBuilder b(8, 6);
    auto in_c = [](NodeId u) { return u < 4; };
    for (NodeId u = 0; u < 8; ++u) {
        for (NodeId v = u + 1; v < 8; ++v) {
            const bool inner = in_c(u) && in_c(v), cross = in_c(u) != in_c(v);
            if (cross && !((u == 0 && v == 4) || (u == 3 && v == 7) || (u == 1 && v == 5))) continue;
            for (Timestamp t = 0; t < 6; ++t) {
                const bool hot = t >= 1 && t <= 4;
                b.add(u, v, t, inner ? (hot ? 40.0 : 5.0) : cross ? (hot ? 1.0 : 20.0) : 5.0);
            }
        }
    }
    return std::move(b).build();
}

inline Eigen::MatrixXd dense_adjacency(const AggregatedGraph& ag) {
    const auto n = static_cast<Eigen::Index>(ag.node_count());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : ag.edges()) A(e.u, e.v) = A(e.v, e.u) = e.w;
    return A;
}

/// Dense aggregated adjacency by direct triple loop over (u, v, t).
inline Eigen::MatrixXd dense_aggregate(const TemporalGraph& g, const Interval& iv) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        for (Timestamp t = iv.start; t <= iv.end; ++t) {
            const double w = g.weight(e, t);
            A(ed.u, ed.v) += w;
            A(ed.v, ed.u) += w;
        }
    }
    return A;
}

/// eta * cut / min(vol) from a dense matrix; +inf on zero denominator.
inline double dense_conductance(const Eigen::MatrixXd& A, const std::vector<char>& in, double eta) {
    double cut = 0.0, vin = 0.0, vout = 0.0;
    for (Eigen::Index u = 0; u < A.rows(); ++u) {
        const double d = A.row(u).sum();
        (in[u] ? vin : vout) += d;
        for (Eigen::Index v = 0; v < A.cols(); ++v) {
            if (in[u] && !in[v]) cut += A(u, v);
        }
    }
    const double den = std::min(vin, vout);
    return den > 0.0 ? eta * cut / den : kInfinity;
}

/// Second-smallest eigenvalue of the normalized Laplacian by dense
/// decomposition; 0 when some node has zero degree.
inline double dense_lambda2(const Eigen::MatrixXd& A) {
    const Eigen::Index n = A.rows();
    Eigen::VectorXd d = A.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d(i) <= 0.0) return 0.0;
    }
    Eigen::VectorXd s = d.array().rsqrt();
    Eigen::MatrixXd N = Eigen::MatrixXd::Identity(n, n) - s.asDiagonal() * A * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(N, Eigen::EigenvaluesOnly);
    return std::max(0.0, es.eigenvalues()(1));
}

inline double jaccard(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    std::size_t i = 0, j = 0, inter = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) ++inter, ++i, ++j;
        else if (a[i] < b[j]) ++i;
        else ++j;
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
}

/// |intersection| / |union| of two intervals in timestamps.
inline double interval_overlap(const Interval& a, const Interval& b) {
    const Timestamp lo = std::max(a.start, b.start), hi = std::min(a.end, b.end);
    if (hi < lo) return 0.0;
    const Timestamp uni = std::max(a.end, b.end) - std::min(a.start, b.start) + 1;
    return static_cast<double>(hi - lo + 1) / static_cast<double>(uni);
}

}  // namespace fixtures
