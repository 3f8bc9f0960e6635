#include "regime_pairs/config.hpp"
#include "regime_pairs/csv.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace rpairs;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {
nlohmann::json valid_config() {
    return nlohmann::json::parse(R"({
      "model": {"Q": [[-0.7, 0.7], [0.2, -0.2]], "theta": [0.1, 0.6], "mu": [0.2, 1.0]},
      "market": {"kappa": 1.0, "eta": 0.2, "sigma": 0.2, "rho": 0.9, "r": 0.01, "epsilon": 0.3},
      "grids": {"horizon": 2.0},
      "mc": {"n_paths": 10, "seed": 5},
      "experiment": {"strategy": "partial_info_optimal", "belief": [0.4, 0.6], "deltas": [0, 0.5]}
    })");
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("regime_pairs_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct EnvGuard {
    explicit EnvGuard(const char* value) {
        if (value) setenv("RPAIRS_SEED", value, 1);
        else unsetenv("RPAIRS_SEED");
    }
    ~EnvGuard() { unsetenv("RPAIRS_SEED"); }
};
}  // namespace

TEST(Config, ParsesAValidFile) {
    const auto cfg = parse_config(valid_config(), {true, true});
    ASSERT_TRUE(cfg.model);
    ASSERT_TRUE(cfg.market);
    EXPECT_EQ(cfg.model->states(), 2);
    EXPECT_NEAR(cfg.model->initial_dist()(0), 0.2 / 0.9, 1e-12);
    EXPECT_DOUBLE_EQ(cfg.market->epsilon(), 0.3);
    EXPECT_DOUBLE_EQ(cfg.grids.horizon, 2.0);
    EXPECT_EQ(cfg.grids.n_p, 201u);
    EXPECT_EQ(cfg.mc.n_paths, 10u);
    EXPECT_EQ(cfg.mc.seed, 5u);
    EXPECT_EQ(cfg.experiment.strategy, "partial_info_optimal");
    ASSERT_TRUE(cfg.experiment.belief);
    EXPECT_EQ(strategy_from(cfg.experiment).information(), InformationFlag::reads_belief);
}

TEST(Config, ReportsEveryProblemAtOnce) {
    auto j = valid_config();
    j["model"]["theta"] = {0.1, 0.6, 0.2};
    j["market"].erase("rho");
    j["market"]["eta"] = -1.0;
    j["grids"]["cfl"] = 1.5;
    j["experiment"]["strategy"] = "clairvoyant";
    j["experiment"]["deltas"] = {0.5};
    j["extra"] = 1;
    try {
        parse_config(j, {true, true});
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_GE(e.problems().size(), 7u) << msg;
        for (const char* needle : {"from theta", "rho", "eta", "cfl", "clairvoyant", "deltas", "extra"})
            EXPECT_NE(msg.find(needle), std::string::npos) << needle << " missing from\n" << msg;
    }
}

TEST(Config, RequiredSectionsAndRanges) {
    EXPECT_THROW(parse_config(nlohmann::json::object(), {true, false}), ConfigError);
    EXPECT_NO_THROW(parse_config(nlohmann::json::object()));
    auto j = valid_config();
    j["experiment"]["belief"] = {0.4, 0.4};
    EXPECT_THROW(parse_config(j), ConfigError);
    j = valid_config();
    j["experiment"]["regime"] = 2;
    EXPECT_THROW(parse_config(j), ConfigError);
    j = valid_config();
    j["experiment"]["t"] = 2.0;
    EXPECT_THROW(parse_config(j), ConfigError);
    j = valid_config();
    j["experiment"]["figures"] = {"fig5"};
    EXPECT_THROW(parse_config(j), ConfigError);
    EXPECT_THROW(parse_config(nlohmann::json::array()), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, ShippedConfigsParse) {
#ifdef REGIME_PAIRS_CONFIGS
    for (const auto& entry : fs::directory_iterator(REGIME_PAIRS_CONFIGS))
        EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
#else
    GTEST_SKIP() << "config directory not configured";
#endif
}

TEST(Config, SeedPrecedence) {
    {
        EnvGuard env(nullptr);
        EXPECT_EQ(resolve_seed(5, std::nullopt), 5u);
        EXPECT_EQ(resolve_seed(5, 9), 9u);
    }
    {
        EnvGuard env("123");
        EXPECT_EQ(resolve_seed(5, 9), 123u);
    }
    {
        EnvGuard env("12x");
        EXPECT_THROW(resolve_seed(5, 9), ConfigError);
    }
}

TEST(Csv, HeaderCarriesVersionAndParameters) {
    CsvTable t(to_json(fig1_params()), {"a", "b"});
    t.note("hello");
    t.row(std::vector<double>{1.0 / 3.0, 2.0});
    const std::string s = t.str();
    EXPECT_EQ(s.rfind(std::string("# regime_pairs ") + kVersion + "\n", 0), 0u);
    EXPECT_NE(s.find("\"epsilon\":0.3"), std::string::npos);
    EXPECT_NE(s.find("# hello\na,b\n0.333333333333,2\n"), std::string::npos) << s;
    EXPECT_THROW(t.row(std::vector<double>{1.0}), std::logic_error);
    EXPECT_EQ(fmt(std::nan("")), "nan");
    EXPECT_EQ(fmt(-INFINITY), "-inf");
}

TEST(Csv, ModelEchoRoundTrips) {
    const auto j = to_json(three_state_model());
    EXPECT_EQ(j["Q"].size(), 3u);
    EXPECT_DOUBLE_EQ(j["Q"][2][0].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(j["theta"][2].get<double>(), -0.2);
    nlohmann::json root{{"model", j}};
    const auto cfg = parse_config(root, {true, false});
    EXPECT_DOUBLE_EQ(cfg.model->initial_dist()(2), 0.5);
}

TEST(OutputBatch, PublishesAllFilesAndLeavesNoTemporaries) {
    const auto dir = scratch_dir("batch");
    OutputBatch b(dir / "nested");
    b.add("one.csv", "1\n");
    b.add("two.csv", "2\n");
    const auto files = b.commit();
    EXPECT_EQ(files.size(), 2u);
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir / "nested")) {
        EXPECT_NE(e.path().filename().string().front(), '.');
        ++n;
    }
    EXPECT_EQ(n, 2u);
    OutputBatch empty(dir / "never");
    EXPECT_TRUE(empty.commit().empty());
    EXPECT_FALSE(fs::exists(dir / "never"));
    fs::remove_all(dir);
}

TEST(Observations, ReadAndFilter) {
    const auto dir = scratch_dir("obs");
    const auto path = (dir / "obs.csv").string();
    {
        std::ofstream out(path);
        out << "# comment\nS, t ,R\n0.3,0,0\n0.31,0.01,0.004\n0.29,0.02,0.011\n";
    }
    const auto rows = read_observations(path);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_DOUBLE_EQ(rows[1].t, 0.01);
    EXPECT_DOUBLE_EQ(rows[2].R, 0.011);
    std::vector<ObservationIncrement> incs;
    std::vector<double> spread;
    observations_to_increments(rows, incs, spread);
    ASSERT_EQ(incs.size(), 2u);
    EXPECT_NEAR(incs[1].dS, -0.02, 1e-15);
    EXPECT_NEAR(incs[1].dt, 0.01, 1e-15);
    const auto m = fig1_model();
    const auto prm = fig1_params();
    const auto beliefs = filter_path(incs, spread, BeliefState::from_initial(m), m, prm);
    const std::vector<double> times{0.0, 0.01, 0.02};
    const std::string csv = filter_csv(times, beliefs, to_json(prm));
    EXPECT_NE(csv.find("t,p_1,p_2\n"), std::string::npos);

    {
        std::ofstream out(path);
        out << "t,R,S\n0,0,0.3\n0,0.1,0.3\n";
    }
    EXPECT_THROW(read_observations(path), std::runtime_error);
    {
        std::ofstream out(path);
        out << "t,S\n0,0.3\n";
    }
    EXPECT_THROW(read_observations(path), std::runtime_error);
    {
        std::ofstream out(path);
        out << "t,R,S\n0,abc,0.3\n";
    }
    EXPECT_THROW(read_observations(path), std::runtime_error);
    fs::remove_all(dir);
}
