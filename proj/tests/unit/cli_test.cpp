#include "cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using udist::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("udist_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static inline int counter_ = 0;
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

const std::vector<std::string> kMixing{"witness", "--mode", "mixing", "--n", "100,10000,1000000", "--epsilon", "1/10",
                                       "--delta", "1/20", "--working", "3/10,36/100", "--target", "0.45,0.55",
                                       "--target", "0.45,0.55", "--target", "0.45,0.55"};

} // namespace

TEST(Cli, MixingWitnessVerifiesAndTamperingFails) {
    TempDir dir;
    auto args = kMixing;
    args.insert(args.end(), {"-o", dir.file("mix.json")});
    auto made = invoke(args);
    ASSERT_EQ(made.code, 0) << made.err;
    auto ok = invoke({"verify", dir.file("mix.json")});
    EXPECT_EQ(ok.code, 0);
    EXPECT_NE(ok.out.find("OK"), std::string::npos);

    auto cert = nlohmann::ordered_json::parse(slurp(dir.file("mix.json")));
    for (auto& c : cert["claims"]) {
        if (c["id"] == "containment_2") {
            c["values"]["image"] = "1/2";
        }
    }
    write(dir.file("bad.json"), cert.dump(2));
    auto bad = invoke({"verify", dir.file("bad.json")});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.out.find("containment_2"), std::string::npos);
}

TEST(Cli, EnvelopeTableForDiracAtOne) {
    auto r = invoke({"envelope", "--pi", "1:1", "--grid", "11"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "t,F,t_exact,F_exact");
    int rows = 0;
    while (std::getline(lines, line)) {
        auto parts = std::vector<std::string>{};
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            parts.push_back(cell);
        }
        ASSERT_EQ(parts.size(), 4u);
        EXPECT_EQ(parts[2], parts[3]);
        ++rows;
    }
    EXPECT_EQ(rows, 11);
}

TEST(Cli, EnvelopeDominationVerdict) {
    auto r = invoke({"envelope", "--pi", "1:1", "--mu", "3/5,2/5", "--lambda", "1/2,1/2"});
    auto j = nlohmann::json::parse(r.out);
    EXPECT_FALSE(j["dominated"].get<bool>());
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"envelope", "--pi", "1:1", "--bogus"}).code, 2);
    auto bad = invoke({"witness", "--mode", "avoid", "--alpha", "5/1x", "--epsilon", "1/5", "--prefix", "1", "--count", "5"});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("position"), std::string::npos);
    TempDir dir;
    write(dir.file("cfg.ini"), "precision=4\nnot_an_option=1\n");
    EXPECT_EQ(invoke({"--config", dir.file("cfg.ini"), "envelope", "--pi", "1:1"}).code, 2);
}

TEST(Cli, ConfigFileValuesYieldToFlags) {
    TempDir dir;
    write(dir.file("cfg.ini"), "precision=2\n");
    auto from_file = invoke({"--config", dir.file("cfg.ini"), "envelope", "--pi", "1:1", "--grid", "3"});
    EXPECT_NE(from_file.out.find("0.50,0.50"), std::string::npos) << from_file.out;
    auto flag_wins = invoke({"--config", dir.file("cfg.ini"), "--precision", "3", "envelope", "--pi", "1:1", "--grid", "3"});
    EXPECT_NE(flag_wins.out.find("0.500,0.500"), std::string::npos) << flag_wins.out;
}

TEST(Cli, OutputsAreDeterministic) {
    std::vector<std::string> sample{"--seed", "17", "subspace", "--spec", "", "--mode", "sample", "--blocks", "20"};
    TempDir dir;
    write(dir.file("spec.json"), R"({"b": {"rule": "linear", "slope": 1, "offset": 1}, "m": {"rule": "ratio", "num": 1, "den": 2}})");
    sample[4] = dir.file("spec.json");
    auto a = invoke(sample);
    auto b = invoke(sample);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(invoke(kMixing).out, invoke(kMixing).out);
}

TEST(Cli, EveryWitnessModeProducesAVerifiableCertificate) {
    TempDir dir;
    std::vector<std::vector<std::string>> runs{
        kMixing,
        {"witness", "--mode", "salat2", "--sequence", "pow:2", "--q", "2", "--target", "0,1/64"},
        {"witness", "--mode", "salat3", "--sequence", "powsq:5", "--e", "3,1", "--eta", "1/10", "--n0", "8"},
        {"witness", "--mode", "avoid", "--alpha", "1/3", "--epsilon", "1/4", "--prefix", "1", "--count", "100"},
        {"witness", "--mode", "zeroblock", "--base", "5/8", "--starts", "4,20"},
    };
    int i = 0;
    for (auto args : runs) {
        auto path = dir.file("c" + std::to_string(i++) + ".json");
        args.insert(args.end(), {"-o", path});
        auto made = invoke(args);
        ASSERT_EQ(made.code, 0) << args[2] << ": " << made.err;
        EXPECT_EQ(invoke({"verify", path}).code, 0) << args[2];
    }
}

TEST(Cli, DoublingAndScanModes) {
    auto orbit = invoke({"doubling", "--mode", "orbit", "--alpha", "1/3", "--count", "4"});
    ASSERT_EQ(orbit.code, 0) << orbit.err;
    EXPECT_NE(orbit.out.find("2/3"), std::string::npos);
    auto inv = invoke({"doubling", "--mode", "invariance", "--alpha", "1/17", "--count", "8", "--level", "3"});
    ASSERT_EQ(inv.code, 0) << inv.err;
    EXPECT_EQ(nlohmann::json::parse(inv.out)["defect"], "0/1");
    EXPECT_EQ(invoke({"doubling", "--mode", "fivesixth", "--alpha", "1/10", "--count", "8"}).code, 2);
    auto scan = invoke({"scan", "--x", "rotation:1/3", "--cells", "3", "--checkpoints", "3,6"});
    ASSERT_EQ(scan.code, 0) << scan.err;
    EXPECT_NE(scan.out.find("6,0.333333,0.333333,0.333333,1/3,1/3,1/3"), std::string::npos) << scan.out;
    auto mubar = invoke({"scan", "--x", "harmonic", "--checkpoints", "100,1000", "--singleton", "0", "--eta", "1/100"});
    ASSERT_EQ(mubar.code, 0) << mubar.err;
    EXPECT_EQ(nlohmann::json::parse(mubar.out)["surrogate"], "0/1");
}

TEST(Cli, SubspaceGreedyWritesTrace) {
    TempDir dir;
    write(dir.file("spec.json"), R"({"b": {"rule": "linear", "slope": 1, "offset": 1}, "m": {"rule": "ratio", "num": 1, "den": 2}})");
    write(dir.file("target.json"), R"({"mu": ["1/4", "1/4", "1/4", "1/4"], "pi": "1/2:1", "epsilon": "1/20"})");
    auto r = invoke({"subspace", "--spec", dir.file("spec.json"), "--mode", "greedy", "--target", dir.file("target.json"),
                     "--x", "rotation:1346269/2178309", "--cells", "4", "--trace", dir.file("trace.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["converged"].get<bool>());
    EXPECT_FALSE(slurp(dir.file("trace.csv")).empty());
}
