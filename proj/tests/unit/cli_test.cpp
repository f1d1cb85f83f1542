#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "synthetic.hpp"

namespace {

namespace fs = std::filesystem;

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("pors_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    CliRun run(const std::string& args) const {
        const auto out = dir_ / "stdout.txt";
        const auto err = dir_ / "stderr.txt";
        const std::string cmd = std::string("env -u PORS_DATA -u PORS_OUT_DIR '") + PORS_CLI_PATH + "' " + args +
                                " >'" + out.string() + "' 2>'" + err.string() + "'";
        const int status = std::system(cmd.c_str());
        CliRun r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    std::string data() const {
        const auto p = dir_ / "fraud.csv";
        if (!fs::exists(p)) {
            std::ofstream(p) << pors::testing::synthetic_fraud_csv(3, 1500);
        }
        return p.string();
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

TEST_F(Cli, HelpExitsZero) {
    const auto r = run("--help");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("stage1"), std::string::npos);
}

TEST_F(Cli, UnknownSubcommandExitsTwo) {
    const auto r = run("frobnicate");
    EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, MissingPoolNamesFlag) {
    const auto r = run("pors run --ssf hvc-ss");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--pool"), std::string::npos) << r.err;
}

TEST_F(Cli, RuntimeErrorIsOneJsonLine) {
    const auto r = run("stage1 --data /nonexistent/data.csv --label y --out " + path("pool.json"));
    EXPECT_EQ(r.code, 1);
    ASSERT_FALSE(r.err.empty());
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
    const auto j = nlohmann::json::parse(r.err);
    EXPECT_TRUE(j.contains("error"));
    EXPECT_FALSE(fs::exists(path("pool.json")));
}

TEST_F(Cli, UnknownSsfIsRuntimeError) {
    ASSERT_EQ(run("stage1 --data " + data() + " --label fraud --n-rules 20 --out " + path("pool.json")).code, 0);
    const auto r = run("pors run --pool " + path("pool.json") + " --ssf nope");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("unknown SSF method"), std::string::npos);
}

TEST_F(Cli, PrepWritesManifest) {
    const auto r = run("prep --data " + data() + " --label fraud --out-dir " + path("prep"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(path("prep/splits.txt")));
    const auto summary = nlohmann::json::parse(slurp(path("prep/summary.json")));
    EXPECT_EQ(summary["rows"], 1500);
}

TEST_F(Cli, PipelineIsThreadIndependent) {
    const std::string pool = path("pool.json");
    ASSERT_EQ(run("--seed 5 stage1 --data " + data() + " --label fraud --n-rules 40 --out " + pool).code, 0);
    const auto pool_json = nlohmann::json::parse(slurp(pool));
    EXPECT_EQ(pool_json["format"], "pors-rules/1");
    EXPECT_FALSE(pool_json["rules"].empty());

    const std::string common = "pors run --pool " + pool + " --ssf hvc-ss --k 5 --max-rounds 6";
    ASSERT_EQ(run("--seed 5 --threads 1 " + common + " --out " + path("t1.json") + " --front-out " + path("f1.json")).code, 0);
    ASSERT_EQ(run("--seed 5 --threads 4 " + common + " --out " + path("t4.json") + " --front-out " + path("f4.json")).code, 0);
    EXPECT_EQ(slurp(path("t1.json")), slurp(path("t4.json")));
    EXPECT_EQ(slurp(path("f1.json")), slurp(path("f4.json")));

    const auto sel = run("select --front " + path("f1.json") + " --min-precision 0.0");
    ASSERT_EQ(sel.code, 0) << sel.err;
    EXPECT_TRUE(nlohmann::json::accept(sel.out));
    EXPECT_EQ(run("select --front " + path("f1.json") + " --min-precision 0.5 --beta 0.1").code, 2);

    const auto greedy = run("--seed 5 baseline greedy --pool " + pool + " --beta 0.1 --beam 3");
    ASSERT_EQ(greedy.code, 0) << greedy.err;
    const auto nsga = run("--seed 5 baseline nsga2 --pool " + pool + " --generations 5 --population 10 --out " +
                          path("n.json"));
    ASSERT_EQ(nsga.code, 0) << nsga.err;
    EXPECT_EQ(nlohmann::json::parse(slurp(path("n.json")))["format"], "pors-front/1");
}

TEST_F(Cli, ExperimentRun) {
    nlohmann::json plan;
    plan["dataset"] = {{"name", "synthetic"}, {"path", data()}, {"label", "fraud"}};
    plan["stage1"] = {{"n_rules", 20}};
    plan["methods"] = {"pors:hvc-ss", "greedy"};
    plan["trials"] = 2;
    plan["k"] = {3};
    plan["max_rounds"] = 4;
    std::ofstream(path("plan.json")) << plan.dump();
    const auto r = run("experiment run --plan " + path("plan.json") + " --out-dir " + path("exp") + " --format both");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = slurp(path("exp/results.csv"));
    EXPECT_NE(csv.find("synthetic,pors:hvc-ss,3,2,"), std::string::npos) << csv;
    EXPECT_TRUE(fs::exists(path("exp/results.json")));
}

}  // namespace
