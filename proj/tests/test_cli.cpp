#include <gtest/gtest.h>
#include <json.hpp>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(TEMPOCOM_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("tempocom_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    std::string small_graph() {
        const auto g = path("g.txt");
        const auto r = run("generate --nodes 12 --m 2 --T 8 --size 4 --length 3 --density 1 --seed 3 --out " + g);
        EXPECT_EQ(r.code, 0);
        return g;
    }

    fs::path dir;
};

}  // namespace

TEST_F(Cli, GenerateWritesGraphAndTruth) {
    const auto g = small_graph();
    const auto text = slurp(g);
    EXPECT_EQ(text.rfind("tgraph 12 8\n", 0), 0u);
    const auto truth = nlohmann::json::parse(slurp(g + ".truth.json"));
    EXPECT_EQ(truth["nodes"].size(), 4u);
    EXPECT_EQ(truth["t_end"].get<int>() - truth["t"].get<int>(), 3);
    EXPECT_FALSE(truth.contains("phi"));
}

TEST_F(Cli, DetectOutputs) {
    const auto g = small_graph();
    const auto r = run("detect --input " + g + " --topk 3 --out " + path("out"));
    ASSERT_EQ(r.code, 0);
    const auto comm = lines(slurp(path("out/communities.jsonl")));
    ASSERT_FALSE(comm.empty());
    EXPECT_LE(comm.size(), 3u);
    double prev = 0.0;
    for (const auto& l : comm) {
        const auto j = nlohmann::json::parse(l);
        ASSERT_TRUE(j.contains("nodes"));
        ASSERT_TRUE(j["nodes"].is_array());
        EXPECT_TRUE(j["nodes"][0].is_string());
        EXPECT_LE(j["t"].get<int>(), j["t_end"].get<int>());
        EXPECT_GE(j["phi"].get<double>(), prev);
        prev = j["phi"].get<double>();
    }
    const auto verdicts = lines(slurp(path("out/verdicts.csv")));
    EXPECT_EQ(verdicts.front(), "start,length,status,bound");
    EXPECT_EQ(verdicts.size(), 1u + 36u);
    const auto runj = nlohmann::json::parse(slurp(path("out/run.json")));
    EXPECT_EQ(runj["config"]["topk"], 3);
    EXPECT_TRUE(runj["timings"].contains("prune"));
    EXPECT_EQ(runj["stats"]["intervals"], 36);
    EXPECT_DOUBLE_EQ(runj["phi_star"].get<double>(), nlohmann::json::parse(comm.front())["phi"].get<double>());
}

TEST_F(Cli, DetectDeterministicAcrossThreads) {
    const auto g = small_graph();
    ASSERT_EQ(run("detect --input " + g + " --threads 1 --out " + path("a")).code, 0);
    ASSERT_EQ(run("detect --input " + g + " --threads 3 --out " + path("b")).code, 0);
    EXPECT_EQ(slurp(path("a/communities.jsonl")), slurp(path("b/communities.jsonl")));
}

TEST_F(Cli, PruneCsv) {
    const auto g = small_graph();
    const auto r = run("prune --input " + g + " --phi 0.05");
    ASSERT_EQ(r.code, 0);
    const auto l = lines(r.out);
    EXPECT_EQ(l.front(), "start,length,status,bound");
    EXPECT_EQ(l.size(), 37u);
    const auto none = run("prune --input " + g + " --phi 0 --no-groups");
    const auto rows = lines(none.out);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NE(rows[i].find(",unpruned,"), std::string::npos) << rows[i];
}

TEST_F(Cli, BoundsCsv) {
    const auto g = small_graph();
    const auto r = run("bounds --input " + g);
    ASSERT_EQ(r.code, 0);
    const auto l = lines(r.out);
    EXPECT_EQ(l.front(), "start,end,lambda2,bound");
    EXPECT_EQ(l.size(), 1u + 15u);
}

TEST_F(Cli, OracleJson) {
    const auto g = small_graph();
    const auto bf = run("oracle --input " + g);
    ASSERT_EQ(bf.code, 0);
    const auto j = nlohmann::json::parse(bf.out);
    const auto exh = nlohmann::json::parse(run("oracle --exh --input " + g).out);
    EXPECT_GE(exh["phi"].get<double>(), j["phi"].get<double>() * (1.0 - 1e-12));
}

TEST_F(Cli, HashCalibrateGrid) {
    const auto r = run("hash-calibrate --trials 50 --T 100 --bands 1");
    ASSERT_EQ(r.code, 0);
    const auto l = lines(r.out);
    EXPECT_EQ(l.front(), "jaccard,delta,T,rows,pivots,bands,trials,empirical,expected,sigma");
    EXPECT_EQ(l.size(), 1u + 48u);
}

TEST_F(Cli, InputErrorsExitTwo) {
    {
        std::ofstream f(path("bad.txt"));
        f << "tgraph 2 2\na a 0 1\n";
    }
    EXPECT_EQ(run("detect --input " + path("bad.txt") + " --out " + path("o")).code, 2);
    EXPECT_EQ(run("detect --input " + path("missing.txt") + " --out " + path("o")).code, 2);
    EXPECT_EQ(run("detect --out " + path("o")).code, 2);
    EXPECT_EQ(run("bogus").code, 2);
    const auto big = path("big.txt");
    ASSERT_EQ(run("generate --nodes 40 --m 2 --T 20 --size 5 --out " + big).code, 0);
    EXPECT_EQ(run("oracle --input " + big).code, 2);
    const auto g = small_graph();
    EXPECT_EQ(run("detect --input " + g + " --beta 1.5 --out " + path("o")).code, 2);
}
