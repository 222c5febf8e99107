#pragma once

// Temporal edge-list text format:
//
//   # comment
//   tgraph <n_nodes> <T>
//   <u> <v> <t> <w>
//   ...
//
// Node tokens are opaque strings mapped to dense ids in order of first
// appearance. Declared nodes that never appear in a record get the label
// "_<id>".

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <type_traits>
#include <unordered_map>
#include <string>
#include <vector>

#include "tempocom/graph.hpp"

namespace tempocom {

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string tok; in >> tok;) out.push_back(std::move(tok));
    return out;
}

template <typename T>
bool parse_number(const std::string& tok, T& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if constexpr (std::is_floating_point_v<T>) {
        // std::from_chars for double is unavailable on some toolchains.
        char* end = nullptr;
        out = std::strtod(first, &end);
        return end == last && !tok.empty();
    } else {
        auto [ptr, ec] = std::from_chars(first, last, out);
        return ec == std::errc() && ptr == last;
    }
}

}  // namespace detail

inline TemporalGraph parse_temporal_graph(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t declared_nodes = 0;
    Timestamp timeline = 0;
    std::vector<std::string> labels;
    std::unordered_map<std::string, NodeId> ids;
    struct Rec {
        NodeId u, v;
        Timestamp t;
        double w;
    };
    std::vector<Rec> recs;

    auto intern = [&](const std::string& tok) -> NodeId {
        auto [it, inserted] = ids.emplace(tok, static_cast<NodeId>(labels.size()));
        if (inserted) {
            if (labels.size() >= declared_nodes) {
                throw ParseError(line_no, "more distinct nodes than declared (" +
                                              std::to_string(declared_nodes) + ")");
            }
            labels.push_back(tok);
        }
        return it->second;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto tok = detail::split_ws(line);
        if (!have_header) {
            long long n = 0, t = 0;
            if (tok.size() != 3 || tok[0] != "tgraph" || !detail::parse_number(tok[1], n) ||
                !detail::parse_number(tok[2], t) || n < 0 || t < 1) {
                throw ParseError(line_no, "expected header 'tgraph <n_nodes> <T>'");
            }
            declared_nodes = static_cast<std::size_t>(n);
            timeline = static_cast<Timestamp>(t);
            have_header = true;
            continue;
        }
        if (tok.size() != 4) throw ParseError(line_no, "expected '<u> <v> <t> <w>'");
        long long t = 0;
        double w = 0.0;
        if (!detail::parse_number(tok[2], t)) throw ParseError(line_no, "bad timestamp '" + tok[2] + "'");
        if (!detail::parse_number(tok[3], w)) throw ParseError(line_no, "bad weight '" + tok[3] + "'");
        if (tok[0] == tok[1]) throw ParseError(line_no, "self-loop on node '" + tok[0] + "'");
        if (t < 0 || t >= timeline) {
            throw ParseError(line_no, "timestamp " + tok[2] + " outside [0," + std::to_string(timeline - 1) + "]");
        }
        if (!(w > 0.0) || !std::isfinite(w)) throw ParseError(line_no, "weight must be positive");
        const NodeId u = intern(tok[0]);
        const NodeId v = intern(tok[1]);
        recs.push_back({u, v, static_cast<Timestamp>(t), w});
    }
    if (!have_header) throw ParseError(std::max<std::size_t>(line_no, 1), "missing 'tgraph' header");

    for (std::size_t i = labels.size(); i < declared_nodes; ++i) {
        std::string name = "_" + std::to_string(i);
        if (ids.count(name)) throw ParseError(line_no, "placeholder label '" + name + "' collides with a node token");
        labels.push_back(std::move(name));
    }
    TemporalGraphBuilder builder(declared_nodes, timeline);
    builder.set_labels(std::move(labels));
    for (const auto& r : recs) builder.add(r.u, r.v, r.t, r.w);
    return std::move(builder).build();
}

inline TemporalGraph load_temporal_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    return parse_temporal_graph(in);
}

inline void write_temporal_graph(const TemporalGraph& g, std::ostream& out) {
    out << "tgraph " << g.node_count() << ' ' << g.timeline_length() << '\n';
    char buf[64];
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto& edge = g.edge(e);
        for (const auto& s : g.series(e)) {
            std::snprintf(buf, sizeof buf, "%.17g", s.w);
            out << g.label(edge.u) << ' ' << g.label(edge.v) << ' ' << s.t << ' ' << buf << '\n';
        }
    }
}

}  // namespace tempocom
