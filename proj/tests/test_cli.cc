#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const std::string kData = GCPOSE_TEST_DATA;
const std::string kRig = kData + "/rig.json";
const std::string kMatches = kData + "/four_matches.jsonl";
// Roll/pitch of both frames of the fixture, degrees.
const std::string kPrior =
    " --roll0-deg -2.9276027563524347 --pitch0-deg 2.9511543956613178"
    " --roll1-deg -2.6898188248922037 --pitch1-deg 2.7048683715533";

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("gcpose_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    CliResult run(const std::string &args) {
        const fs::path out = dir_ / "stdout", err = dir_ / "stderr";
        const std::string cmd =
            std::string(GCPOSE_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
        const int status = std::system(cmd.c_str());
        CliResult r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    std::string write(const std::string &name, const std::string &content) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << content;
        return p.string();
    }

    std::string first_lines(int n) {
        std::ifstream in(kMatches);
        std::string line, text;
        for (int i = 0; i < n && std::getline(in, line); ++i) {
            text += line + "\n";
        }
        return text;
    }

    fs::path dir_;
};

TEST_F(Cli, SolveFixture) {
    const CliResult r = run("solve --rig " + kRig + " --matches " + kMatches + kPrior);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("candidates ", 0), 0u);
    // One of the candidates is the true pose: zero yaw, translation (0.822, 0.415, -0.390).
    std::istringstream in(r.out);
    std::string key;
    bool found = false;
    while (in >> key) {
        if (key == "yaw_rad") {
            double yaw;
            in >> yaw;
            found |= std::abs(yaw) < 1e-9;
        }
    }
    EXPECT_TRUE(found) << r.out;
    EXPECT_NE(r.out.find("t 0.8221"), std::string::npos) << r.out;
}

TEST_F(Cli, SolveMalformedLine) {
    const std::string path = write("bad.jsonl", first_lines(2) + "{\"cam0\":0,\"cam1\":0,\"b0\":[0,0,1]\n" + first_lines(1));
    const CliResult r = run("solve --rig " + kRig + " --matches " + path);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(Cli, SolveNeedsFourMatches) {
    const CliResult r = run("solve --rig " + kRig + " --matches " + write("three.jsonl", first_lines(3)));
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("need 4"), std::string::npos) << r.err;
}

TEST_F(Cli, MissingFileAndBadFlags) {
    EXPECT_EQ(run("solve --rig " + kRig + " --matches " + (dir_ / "missing.jsonl").string()).code, 1);
    EXPECT_EQ(run("solve --rig " + kRig).code, 2);
    EXPECT_EQ(run("sweep-rotation --trials nope").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("sweep-rotation --config " + write("c.json", "{\"trials\": 3, \"bogus\": 1}")).code, 2);
}

TEST_F(Cli, RansacOnFixture) {
    const CliResult r = run("ransac --rig " + kRig + " --matches " + kMatches + kPrior + " --seed 3");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("inliers 4"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("mask 1111"), std::string::npos) << r.out;
}

TEST_F(Cli, SweepWritesCsvFiles) {
    const fs::path out = dir_ / "sweep";
    const CliResult r = run("sweep-pixel-noise --trials 7 --levels 0 1 2 --seed 5 --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string trials = slurp(out / "trials.csv");
    const std::string summary = slurp(out / "summary.csv");
    EXPECT_EQ(std::count(trials.begin(), trials.end(), '\n'), 1 + 3 * 7);
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 1 + 3);
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
    const std::string cfg = write("c.json", "{\"trials\": 4, \"levels\": [0, 3]}");
    const CliResult a = run("sweep-rotation --config " + cfg);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 1 + 2);
    const CliResult b = run("sweep-rotation --config " + cfg + " --levels 0 1 2");
    EXPECT_EQ(std::count(b.out.begin(), b.out.end(), '\n'), 1 + 3);
}

TEST_F(Cli, ReproducibleAcrossRunsAndThreads) {
    const std::string args = "ransac-outliers --trials 6 --ratios 0.5 0.7 --iterations 50 --seed 11";
    const CliResult a = run(args + " --threads 1");
    const CliResult b = run(args + " --threads 1");
    const CliResult c = run(args + " --threads 3");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
    EXPECT_NE(a.out, run("ransac-outliers --trials 6 --ratios 0.5 0.7 --iterations 50 --seed 12").out);
}

}  // namespace
