#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "tempocom/graph.hpp"

using namespace tempocom;

namespace {

TemporalGraph four_cycle() {
    TemporalGraphBuilder b(4, 1);
    b.add(0, 1, 0, 1.0);
    b.add(1, 2, 0, 1.0);
    b.add(2, 3, 0, 1.0);
    b.add(3, 0, 0, 1.0);
    return std::move(b).build();
}

std::vector<NodeId> subset(std::uint32_t mask) {
    std::vector<NodeId> out;
    for (NodeId u = 0; u < 32; ++u) {
        if (mask >> u & 1u) out.push_back(u);
    }
    return out;
}

}  // namespace

TEST(Interval, LengthAndSpan) {
    const Interval iv{2, 4};
    EXPECT_EQ(iv.length(), 3);
    EXPECT_EQ(iv.span(), 2);
    EXPECT_TRUE(iv.valid_for(5));
    EXPECT_FALSE(iv.valid_for(4));
    EXPECT_FALSE((Interval{3, 2}.valid_for(10)));
}

TEST(Eta, ZeroAlphaIsOne) {
    for (Timestamp a = 0; a < 5; ++a) {
        for (Timestamp b = a; b < 5; ++b) EXPECT_EQ(eta({a, b}, {0.0}), 1.0);
    }
}

TEST(Eta, PowerLaw) {
    EXPECT_DOUBLE_EQ(eta({2, 4}, {1.0}), 0.5);
    EXPECT_DOUBLE_EQ(eta({3, 3}, {1.0}), 1.0);
    EXPECT_DOUBLE_EQ(eta({0, 9}, {0.5}), 1.0 / 3.0);
    EXPECT_THROW(eta({0, 1}, {-0.1}), ArgumentError);
}

TEST(Builder, MergesDuplicatesAndCanonicalizes) {
    TemporalGraphBuilder b(3, 2);
    b.add(1, 0, 0, 2.0);
    b.add(0, 1, 0, 3.0);
    b.add(2, 1, 1, 1.5);
    const auto g = std::move(b).build();
    ASSERT_EQ(g.edge_count(), 2u);
    EXPECT_EQ(g.edge(0).u, 0u);
    EXPECT_EQ(g.edge(0).v, 1u);
    EXPECT_DOUBLE_EQ(g.weight(0, 0), 5.0);
    EXPECT_EQ(g.weight(0, 1), 0.0);
    EXPECT_EQ(g.find_edge(2, 1), 1);
    EXPECT_EQ(g.find_edge(0, 2), -1);
}

TEST(Builder, RejectsBadRecords) {
    TemporalGraphBuilder b(3, 2);
    EXPECT_THROW(b.add(0, 0, 0, 1.0), ArgumentError);
    EXPECT_THROW(b.add(0, 1, 2, 1.0), ArgumentError);
    EXPECT_THROW(b.add(0, 1, -1, 1.0), ArgumentError);
    EXPECT_THROW(b.add(0, 1, 0, 0.0), ArgumentError);
    EXPECT_THROW(b.add(0, 1, 0, -1.0), ArgumentError);
    EXPECT_THROW(b.add(0, 3, 0, 1.0), ArgumentError);
    EXPECT_THROW(TemporalGraphBuilder(3, 0), ArgumentError);
}

TEST(Aggregate, SumsOverInterval) {
    TemporalGraphBuilder b(2, 4);
    b.add(0, 1, 1, 2.0);
    b.add(0, 1, 2, 3.0);
    const auto g = std::move(b).build();
    EXPECT_DOUBLE_EQ(aggregate(g, {1, 2}).weight(0, 1), 5.0);
    EXPECT_DOUBLE_EQ(aggregate(g, {1, 1}).weight(0, 1), 2.0);
    EXPECT_EQ(aggregate(g, {3, 3}).edge_count(), 0u);
    EXPECT_THROW(aggregate(g, {2, 4}), ArgumentError);
    EXPECT_THROW(aggregate(g, {2, 1}), ArgumentError);
}

TEST(Aggregate, SingleTimestampEqualsSnapshot) {
    const auto g = fixtures::random_graph(15, 6, 0.4, 0.7, 3);
    for (Timestamp t = 0; t < 6; ++t) {
        const auto ag = aggregate(g, {t, t});
        for (NodeId u = 0; u < 15; ++u) EXPECT_DOUBLE_EQ(ag.volume(u), g.snapshot_volume(u, t));
    }
}

TEST(Aggregate, VolumesMatchTripleLoop) {
    const auto g = fixtures::random_graph(20, 5, 0.3, 0.6, 11);
    const auto ag = aggregate(g, {0, 4});
    const auto A = fixtures::dense_aggregate(g, {0, 4});
    for (NodeId u = 0; u < 20; ++u) {
        EXPECT_NEAR(ag.volume(u), A.row(u).sum(), 1e-12 * std::max(1.0, A.row(u).sum()));
        double row = 0.0;
        for (const auto& nb : ag.neighbors(u)) row += nb.w;
        EXPECT_NEAR(ag.volume(u), row, 1e-12 * std::max(1.0, row));
        for (NodeId v = 0; v < 20; ++v) EXPECT_NEAR(ag.weight(u, v), A(u, v), 1e-12 * std::max(1.0, A(u, v)));
    }
}

TEST(Conductance, FourCycle) {
    const auto g = four_cycle();
    const std::vector<NodeId> c{0, 1};
    const auto s = cut_stats(aggregate(g, {0, 0}), c);
    EXPECT_DOUBLE_EQ(s.cut, 2.0);
    EXPECT_DOUBLE_EQ(s.volume_in, 4.0);
    EXPECT_DOUBLE_EQ(s.volume_out, 4.0);
    EXPECT_DOUBLE_EQ(conductance(g, c, {0, 0}, {0.0}), 0.5);
}

TEST(Conductance, EmptyOrFullSetRejected) {
    const auto g = four_cycle();
    EXPECT_THROW(conductance(g, std::vector<NodeId>{}, {0, 0}, {0.0}), ArgumentError);
    EXPECT_THROW(conductance(g, std::vector<NodeId>{0, 1, 2, 3}, {0, 0}, {0.0}), ArgumentError);
    EXPECT_THROW(conductance(g, std::vector<NodeId>{0, 0}, {0, 0}, {0.0}), ArgumentError);
}

TEST(Conductance, ZeroVolumeSideIsInfinite) {
    TemporalGraphBuilder b(3, 2);
    b.add(0, 1, 0, 1.0);
    const auto g = std::move(b).build();
    EXPECT_EQ(conductance(g, std::vector<NodeId>{2}, {0, 1}, {0.0}), kInfinity);
}

TEST(Conductance, ScaleInvariant) {
    const auto g = fixtures::random_graph(10, 3, 0.5, 0.8, 5);
    TemporalGraphBuilder b(10, 3);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        for (const auto& s : g.series(e)) b.add(g.edge(e).u, g.edge(e).v, s.t, 2.0 * s.w);
    }
    const auto g2 = std::move(b).build();
    for (std::uint32_t mask = 1; mask < (1u << 10) - 1; mask += 37) {
        const auto c = subset(mask);
        EXPECT_NEAR(conductance(g, c, {0, 2}, {0.3}), conductance(g2, c, {0, 2}, {0.3}), 1e-12);
    }
}

TEST(Conductance, ComplementSymmetric) {
    const auto g = fixtures::random_graph(9, 4, 0.5, 0.8, 8);
    for (std::uint32_t mask = 1; mask < (1u << 9) - 1; mask += 5) {
        const auto c = subset(mask);
        const auto rest = subset(((1u << 9) - 1) & ~mask);
        EXPECT_NEAR(conductance(g, c, {1, 3}, {0.5}), conductance(g, rest, {1, 3}, {0.5}), 1e-12);
    }
}

TEST(Conductance, MatchesDenseOracle) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto g = fixtures::random_graph(10, 3, 0.5, 0.7, seed);
        for (const Interval iv : {Interval{0, 2}, Interval{1, 1}, Interval{0, 1}}) {
            const auto A = fixtures::dense_aggregate(g, iv);
            const NormalizationConfig cfg{0.7};
            for (std::uint32_t mask = 1; mask < (1u << 10) - 1; mask += 13) {
                std::vector<char> in(10, 0);
                for (NodeId u : subset(mask)) in[u] = 1;
                const double want = fixtures::dense_conductance(A, in, eta(iv, cfg));
                const double got = conductance(g, subset(mask), iv, cfg);
                if (std::isinf(want)) EXPECT_TRUE(std::isinf(got));
                else EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, want));
            }
        }
    }
}

TEST(Conductance, StaticCaseAllSubsets) {
    const auto g = fixtures::random_graph(12, 1, 0.5, 1.0, 21);
    const auto A = fixtures::dense_aggregate(g, {0, 0});
    for (std::uint32_t mask = 1; mask < (1u << 12) - 1; ++mask) {
        std::vector<char> in(12, 0);
        for (NodeId u : subset(mask)) in[u] = 1;
        const double want = fixtures::dense_conductance(A, in, 1.0);
        const double got = conductance(g, subset(mask), {0, 0}, {0.0});
        if (std::isinf(want)) ASSERT_TRUE(std::isinf(got));
        else ASSERT_NEAR(got, want, 1e-12 * std::max(1.0, want));
    }
}

// A: short and sharp; B: long and slightly worse. Some alpha flips the order.
TEST(Conductance, NormalizationCanFlipOrder) {
    TemporalGraphBuilder b(4, 9);
    for (Timestamp t = 0; t < 9; ++t) {
        b.add(0, 1, t, 10.0);
        b.add(2, 3, t, 10.0);
        b.add(1, 2, t, t <= 1 ? 1.0 : 1.5);
    }
    const auto g = std::move(b).build();
    const std::vector<NodeId> c{0, 1};
    const Interval ia{0, 1}, ib{0, 8};
    const double a0 = conductance(g, c, ia, {0.0}), b0 = conductance(g, c, ib, {0.0});
    ASSERT_LT(a0, b0);
    const double alpha = 2.0 * std::log(b0 / a0) / std::log(static_cast<double>(ib.span()) / ia.span());
    EXPECT_LT(conductance(g, c, ib, {alpha}), conductance(g, c, ia, {alpha}));
}

TEST(Connectivity, SubsetAndComponents) {
    const auto g = four_cycle();
    const auto ag = aggregate(g, {0, 0});
    EXPECT_EQ(component_count(ag), 1u);
    EXPECT_TRUE(is_connected_subset(ag, std::vector<NodeId>{0, 1}));
    EXPECT_FALSE(is_connected_subset(ag, std::vector<NodeId>{0, 2}));
}

TEST(Community, OrderIsTotal) {
    TemporalCommunity a{{0, 1}, {0, 1}, 0.5}, b{{0, 2}, {0, 1}, 0.5}, c{{0, 1}, {0, 2}, 0.5};
    EXPECT_TRUE(community_less(a, b));
    EXPECT_TRUE(community_less(a, c));
    EXPECT_FALSE(community_less(a, a));
}
