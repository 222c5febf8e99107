// tempocom command-line front end.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "tempocom/detect.hpp"
#include "tempocom/io.hpp"
#include "tempocom/oracle.hpp"
#include "tempocom/synth.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace tempocom;

namespace {

constexpr int kInputError = 2;
constexpr int kNumericalError = 3;

json community_json(const TemporalGraph& g, const TemporalCommunity& c) {
    json nodes = json::array();
    for (NodeId u : c.nodes) nodes.push_back(g.label(u));
    json j;
    j["nodes"] = nodes;
    j["t"] = c.interval.start;
    j["t_end"] = c.interval.end;
    if (c.phi == kInfinity) j["phi"] = nullptr;
    else j["phi"] = c.phi;
    return j;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_verdicts(std::ostream& out, std::span<const PruneVerdict> verdicts) {
    out << "start,length,status,bound\n";
    for (const auto& v : verdicts) {
        out << v.interval.start << ',' << v.interval.length() << ',' << to_string(v.status) << ','
            << fmt(v.bound_value) << '\n';
    }
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw ArgumentError("cannot write '" + p.string() + "'");
    return f;
}

struct DetectArgs {
    std::string input, out;
    RunConfig cfg;
};

int run_detect(const DetectArgs& a) {
    const TemporalGraph g = load_temporal_graph(a.input);
    const DetectionState st = detect(g, a.cfg);
    fs::create_directories(a.out);
    {
        auto f = open_out(fs::path(a.out) / "communities.jsonl");
        for (const auto& c : st.communities) f << community_json(g, c).dump() << '\n';
    }
    {
        auto f = open_out(fs::path(a.out) / "verdicts.csv");
        write_verdicts(f, st.verdicts);
    }
    json run;
    const RunConfig& c = st.config;
    run["config"] = {{"input", a.input},         {"alpha", c.alpha},     {"scale_base", c.scale_base},
                     {"beta", c.beta},           {"rows", c.rows},       {"bands", c.bands},
                     {"topk", c.topk},           {"probes", c.probes},   {"seed", c.seed},
                     {"threads", c.threads},     {"restart", c.walk.restart},
                     {"walk_tol", c.walk.tol},   {"lanczos_tol", c.lanczos_tol},
                     {"bucket_cap", c.bucket_cap}, {"min_bucket_entries", c.min_bucket_entries},
                     {"batch_size", c.batch_size}};
    run["timings"] = {{"precompute", st.timings.precompute}, {"estimate", st.timings.estimate},
                      {"prune", st.timings.prune},           {"hash", st.timings.hash},
                      {"refine", st.timings.refine}};
    run["stats"] = {{"nodes", g.node_count()},
                    {"timeline", g.timeline_length()},
                    {"edges", g.edge_count()},
                    {"eigensolves", st.eigensolves},
                    {"intervals", st.verdicts.size()},
                    {"pruned", st.pruned_count()},
                    {"pruned_fraction", st.pruned_fraction()},
                    {"hashed", st.hashed},
                    {"buckets", st.buckets},
                    {"buckets_refined", st.buckets_refined},
                    {"buckets_skipped", st.buckets_skipped}};
    run["initial_phi_star"] = st.initial_phi_star == kInfinity ? json(nullptr) : json(st.initial_phi_star);
    run["phi_star"] = st.phi_star == kInfinity ? json(nullptr) : json(st.phi_star);
    auto f = open_out(fs::path(a.out) / "run.json");
    f << run.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lowest temporal-conductance community search"};
    app.require_subcommand(1);

    DetectArgs det;
    auto* detect_cmd = app.add_subcommand("detect", "search for low-conductance temporal communities");
    detect_cmd->add_option("--input", det.input, "temporal edge list")->required();
    detect_cmd->add_option("--alpha", det.cfg.alpha, "temporal normalization exponent")->capture_default_str();
    detect_cmd->add_option("--scale-base", det.cfg.scale_base, "block length ratio between levels")->capture_default_str();
    detect_cmd->add_option("--beta", det.cfg.beta, "group ratio in (0,1)")->capture_default_str();
    detect_cmd->add_option("--rows", det.cfg.rows, "minhashes per band")->capture_default_str();
    detect_cmd->add_option("--bands", det.cfg.bands, "number of bands")->capture_default_str();
    detect_cmd->add_option("--topk", det.cfg.topk, "communities to report")->capture_default_str();
    detect_cmd->add_option("--probes", det.cfg.probes, "intervals probed for the initial estimate")->capture_default_str();
    detect_cmd->add_option("--seed", det.cfg.seed, "random seed")->capture_default_str();
    detect_cmd->add_option("--threads", det.cfg.threads, "worker threads")->capture_default_str();
    detect_cmd->add_option("--out", det.out, "output directory")->required();

    SynthConfig syn;
    std::string gen_out, gen_truth;
    auto* gen_cmd = app.add_subcommand("generate", "write a synthetic graph with a planted community");
    gen_cmd->add_option("--nodes", syn.n)->capture_default_str();
    gen_cmd->add_option("--m", syn.m, "edges per arriving node")->capture_default_str();
    gen_cmd->add_option("--T", syn.T, "timeline length")->capture_default_str();
    gen_cmd->add_option("--mu", syn.mu, "mean weight")->capture_default_str();
    gen_cmd->add_option("--size", syn.planted_size, "planted node count")->capture_default_str();
    gen_cmd->add_option("--length", syn.planted_length, "planted t_end - t")->capture_default_str();
    gen_cmd->add_option("--start", syn.planted_start, "planted start, -1 for random")->capture_default_str();
    gen_cmd->add_option("--contrast", syn.contrast)->capture_default_str();
    gen_cmd->add_option("--density", syn.planted_density, "extra internal edge probability")->capture_default_str();
    gen_cmd->add_option("--seed", syn.seed)->capture_default_str();
    gen_cmd->add_option("--out", gen_out, "edge list path")->required();
    gen_cmd->add_option("--truth", gen_truth, "ground truth path (default <out>.truth.json)");

    std::string pr_input, pr_out;
    double pr_alpha = RunConfig{}.alpha, pr_beta = 0.5;
    int pr_base = 2;
    unsigned pr_threads = 1;
    std::optional<double> pr_phi;
    bool pr_no_groups = false;
    auto* prune_cmd = app.add_subcommand("prune", "interval verdicts as CSV");
    prune_cmd->add_option("--input", pr_input)->required();
    prune_cmd->add_option("--alpha", pr_alpha)->capture_default_str();
    prune_cmd->add_option("--scale-base", pr_base)->capture_default_str();
    prune_cmd->add_option("--beta", pr_beta)->capture_default_str();
    prune_cmd->add_option("--phi", pr_phi, "incumbent conductance (default: probe estimate)");
    prune_cmd->add_flag("--no-groups", pr_no_groups, "test every interval individually");
    prune_cmd->add_option("--threads", pr_threads)->capture_default_str();
    prune_cmd->add_option("--out", pr_out, "CSV path (default stdout)");

    std::string bd_input;
    double bd_alpha = RunConfig{}.alpha;
    int bd_base = 2;
    auto* bounds_cmd = app.add_subcommand("bounds", "precomputed block eigenvalues as CSV");
    bounds_cmd->add_option("--input", bd_input)->required();
    bounds_cmd->add_option("--alpha", bd_alpha)->capture_default_str();
    bounds_cmd->add_option("--scale-base", bd_base)->capture_default_str();

    std::string or_input;
    double or_alpha = RunConfig{}.alpha;
    bool or_exh = false;
    auto* oracle_cmd = app.add_subcommand("oracle", "exact optimum on a small instance as one JSON line");
    oracle_cmd->add_option("--input", or_input)->required();
    oracle_cmd->add_option("--alpha", or_alpha)->capture_default_str();
    oracle_cmd->add_flag("--exh", or_exh, "sweep from every interval and node instead");

    std::size_t hc_trials = 10000, hc_bands = 1;
    Timestamp hc_T = 100;
    std::uint64_t hc_seed = 1;
    auto* hc_cmd = app.add_subcommand("hash-calibrate", "empirical vs expected signature collision rates as CSV");
    hc_cmd->add_option("--trials", hc_trials)->capture_default_str();
    hc_cmd->add_option("--T", hc_T)->capture_default_str();
    hc_cmd->add_option("--bands", hc_bands)->capture_default_str();
    hc_cmd->add_option("--seed", hc_seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kInputError;
    }

    try {
        if (*detect_cmd) return run_detect(det);

        if (*gen_cmd) {
            const auto res = generate(syn);
            {
                auto f = open_out(gen_out);
                write_temporal_graph(res.graph, f);
            }
            json truth = community_json(res.graph, res.planted);
            truth.erase("phi");
            auto f = open_out(gen_truth.empty() ? gen_out + ".truth.json" : gen_truth);
            f << truth.dump() << '\n';
            return 0;
        }

        if (*prune_cmd) {
            const TemporalGraph g = load_temporal_graph(pr_input);
            const BoundsTable bt = precompute(g, pr_base, LanczosOptions{}, pr_beta, pr_threads);
            double phi = 0.0;
            if (pr_phi) {
                phi = *pr_phi;
            } else {
                RunConfig rc;
                rc.alpha = pr_alpha;
                rc.beta = pr_beta;
                rc.scale_base = pr_base;
                const double est = estimate_initial(g, bt, rc).phi_star;
                phi = est == kInfinity ? 0.0 : est;
            }
            const auto v = prune_all(bt, build_groups(g.timeline_length(), pr_beta), phi, NormalizationConfig{pr_alpha},
                                     pr_threads, !pr_no_groups);
            if (pr_out.empty()) {
                write_verdicts(std::cout, v);
            } else {
                auto f = open_out(pr_out);
                write_verdicts(f, v);
            }
            return 0;
        }

        if (*bounds_cmd) {
            const TemporalGraph g = load_temporal_graph(bd_input);
            const BoundsTable bt = precompute(g, bd_base);
            const NormalizationConfig norm{bd_alpha};
            std::cout << "start,end,lambda2,bound\n";
            std::vector<Interval> seen;
            for (std::size_t lv = 0; lv < bt.level_count(); ++lv) {
                for (const auto& e : bt.level(lv)) {
                    if (std::find(seen.begin(), seen.end(), e.interval) != seen.end()) continue;
                    seen.push_back(e.interval);
                    std::cout << e.interval.start << ',' << e.interval.end << ',' << fmt(e.lambda()) << ','
                              << fmt(eta(e.interval, norm) * e.lambda() / 2.0) << '\n';
                }
            }
            return 0;
        }

        if (*oracle_cmd) {
            const TemporalGraph g = load_temporal_graph(or_input);
            const NormalizationConfig norm{or_alpha};
            const auto best = or_exh ? exh_baseline(g, norm) : brute_force_best(g, norm);
            std::cout << community_json(g, best).dump() << '\n';
            return 0;
        }

        if (*hc_cmd) {
            std::cout << "jaccard,delta,T,rows,pivots,bands,trials,empirical,expected,sigma\n";
            const double jws[] = {0.2, 0.4, 0.6, 0.8};
            const double fracs[] = {0.0, 0.02, 0.05, 0.1};
            const std::pair<std::size_t, std::size_t> rk[] = {{1, 5}, {2, 10}, {3, 2}};
            std::uint64_t cell_seed = hc_seed;
            for (double jw : jws) {
                for (double f : fracs) {
                    for (const auto& [r, k] : rk) {
                        const auto delta = static_cast<Timestamp>(std::lround(f * hc_T));
                        const auto c = calibrate_collisions(jw, delta, hc_T, r, k, hc_bands, hc_trials, cell_seed++);
                        std::cout << fmt(jw) << ',' << delta << ',' << hc_T << ',' << r << ',' << k << ',' << hc_bands
                                  << ',' << c.trials << ',' << fmt(c.empirical()) << ',' << fmt(c.expected()) << ','
                                  << fmt(c.sigma()) << '\n';
                    }
                }
            }
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const ArgumentError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const SizeLimitError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
    return 0;
}
