#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace rpairs;
using namespace testing_support;

TEST(SimulateChain, SingleStateNeverJumps) {
    const auto m = RegimeModel::single_state(0.1, 0.0);
    const auto path = simulate_chain(m, 1e6, std::uint64_t{3});
    EXPECT_TRUE(path.jump_times.empty());
    EXPECT_EQ(path.state_at(5e5), 0);
}

TEST(SimulateChain, JumpTimesIncreaseAndStatesAlternate) {
    const auto m = RegimeModel::two_state(1.0, 2.0, 0.1, 0.6, 0, 0);
    const auto path = simulate_chain(m, 50.0, std::uint64_t{5});
    ASSERT_FALSE(path.jump_times.empty());
    EXPECT_TRUE(std::is_sorted(path.jump_times.begin(), path.jump_times.end()));
    EXPECT_GT(path.jump_times.front(), 0.0);
    EXPECT_LE(path.jump_times.back(), 50.0);
    int prev = path.initial_state;
    for (int s : path.states) {
        EXPECT_NE(s, prev);
        prev = s;
    }
}

TEST(SimulateChain, LongRunOccupationMatchesStationaryLaw) {
    const auto m = RegimeModel::two_state(1.0, 2.0, 0.1, 0.6, 0, 0);
    // occupation fraction per block of length 20, blocks independent enough at rates 1 and 2
    std::vector<double> frac;
    for (std::uint64_t b = 0; b < 2000; ++b) {
        const auto path = simulate_chain(m, 20.0, derive_seed(11, b));
        double t = 0.0, in0 = 0.0;
        int s = path.initial_state;
        for (std::size_t k = 0; k <= path.jump_times.size(); ++k) {
            const double next = k < path.jump_times.size() ? path.jump_times[k] : 20.0;
            if (s == 0) in0 += next - t;
            t = next;
            if (k < path.states.size()) s = path.states[k];
        }
        frac.push_back(in0 / 20.0);
    }
    const auto mo = moments(frac);
    EXPECT_NEAR(mo.mean, 2.0 / 3.0, 3.0 * mo.std_error);
}

TEST(SimulateChain, MeanHoldingTimeIsInverseRate) {
    const auto m = RegimeModel::two_state(0.7, 0.2, 0.1, 0.6, 0, 0);
    std::vector<double> first;
    Engine rng(17);
    for (int i = 0; i < 100000; ++i) {
        ChainSampler sampler(m, 0, rng);
        first.push_back(sampler.next_jump());
    }
    const auto mo = moments(first);
    EXPECT_NEAR(mo.mean, 1.0 / 0.7, 3.0 * mo.std_error);
}

TEST(SimulateChain, AbsorbingStateStops) {
    Eigen::MatrixXd q(2, 2);
    q << -1.0, 1.0, 0.0, 0.0;
    const RegimeModel m(q, Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0));
    const auto path = simulate_chain(m, 1e3, std::uint64_t{1});
    ASSERT_EQ(path.jump_times.size(), 1u);
    EXPECT_EQ(path.states[0], 1);
}

TEST(ExactOuStep, LimitsAndShape) {
    EXPECT_NEAR(exact_ou_step(0.4, 0.1, 1.0, 0.2, 1e-12, 0.0), 0.4, 1e-12);
    EXPECT_NEAR(exact_ou_step(0.4, 0.1, 50.0, 0.2, 10.0, 0.0), 0.1, 1e-9);
    EXPECT_THROW(exact_ou_step(0.4, 0.1, 1.0, 0.2, 0.0, 0.0), std::invalid_argument);
    // variance of the transition
    const double sd = exact_ou_step(0.0, 0.0, 1.0, 0.2, 0.5, 1.0);
    EXPECT_NEAR(sd * sd, 0.04 * (1 - std::exp(-1.0)) / 2.0, 1e-15);
}

TEST(ExactOuStep, AgreesWithFineEulerInDistribution) {
    // two-sample Kolmogorov-Smirnov statistic, exact step vs Euler at dt = 1e-4
    const double kappa = 1.0, eta = 0.2, theta = 0.1, s0 = 0.4, horizon = 0.5;
    const int n = 10000;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> exact(n), euler(n);
    for (int i = 0; i < n; ++i) exact[i] = exact_ou_step(s0, theta, kappa, eta, horizon, z(rng));
    const double dt = 1e-4;
    for (int i = 0; i < n; ++i) {
        double s = s0;
        for (int k = 0; k < 5000; ++k) s += kappa * (theta - s) * dt + eta * std::sqrt(dt) * z(rng);
        euler[i] = s;
    }
    std::sort(exact.begin(), exact.end());
    std::sort(euler.begin(), euler.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < exact.size() && j < euler.size()) {
        if (exact[i] <= euler[j]) ++i;
        else ++j;
        d = std::max(d, std::abs(static_cast<double>(i) - static_cast<double>(j)) / n);
    }
    // 1% critical value for two samples of 10^4
    EXPECT_LT(d, 1.63 * std::sqrt(2.0 / n));
}

namespace {
SimulationSetup basic_setup(const RegimeModel& m, const MarketParams& p, const StrategySpec& h) {
    SimulationSetup s;
    s.model = &m;
    s.params = &p;
    s.strategy = &h;
    s.s0 = 0.1;
    s.horizon = 1.0;
    s.dt = 1e-2;
    s.initial_regime = 0;
    return s;
}
}  // namespace

TEST(SimulatePaths, IdleStrategyEarnsRiskFreeRateExactly) {
    const auto m = fig1_model();
    const auto p = fig1_params();
    const auto idle = StrategySpec::constant(0.0);
    auto setup = basic_setup(m, p, idle);
    setup.z0 = 2.0;
    const auto set = simulate_paths(setup, 20, 1);
    for (const auto& b : set.paths) {
        EXPECT_NEAR(b.wealth.back(), 2.0 * std::exp(p.r() * 1.0), 1e-13);
        EXPECT_EQ(b.penalty_integral.back(), 0.0);
    }
}

TEST(SimulatePaths, SingleRegimeOuMoments) {
    const auto m = RegimeModel::single_state(0.1, 0.0);
    const MarketParams p({.kappa = 1.0, .eta = 0.2, .sigma = 0.2, .rho = 0.0, .r = 0.0, .epsilon = 0.0});
    const auto idle = StrategySpec::constant(0.0);
    auto setup = basic_setup(m, p, idle);
    setup.horizon = 2.0;
    setup.dt = 1e-3;
    std::vector<double> terminal(100000);
    parallel_for(terminal.size(), 0, [&](std::size_t i) {
        terminal[i] = simulate_path(setup, derive_seed(4, i), [](const GridState&) {}).spread;
    });
    const auto mo = moments(terminal);
    EXPECT_NEAR(mo.mean, 0.1, 3.0 * mo.std_error);
    const double var = 0.04 * (1 - std::exp(-4.0)) / 2.0;
    // standard error of the sample variance for a Gaussian: var sqrt(2/(n-1))
    EXPECT_NEAR(mo.variance, var, 3.0 * var * std::sqrt(2.0 / 99999.0) + 1e-5);
}

TEST(SimulatePaths, BundleLayoutAndPositivity) {
    const auto m = fig1_model();
    const auto p = fig1_params();
    const auto h = StrategySpec::full_info_optimal();
    const auto setup = basic_setup(m, p, h);
    const auto b = record_path(setup, 8);
    ASSERT_EQ(b.times.size(), 101u);
    EXPECT_DOUBLE_EQ(b.times.back(), 1.0);
    EXPECT_EQ(b.w_increments.front(), 0.0);
    EXPECT_TRUE(std::isnan(b.positions.back()));
    EXPECT_TRUE(b.beliefs.empty());
    for (double z : b.wealth) EXPECT_GT(z, 0.0);
    for (std::size_t k = 1; k < b.times.size(); ++k) EXPECT_GE(b.penalty_integral[k], b.penalty_integral[k - 1]);
    // wealth increments reproduce the log-space law from the stored increments
    for (std::size_t k = 0; k + 1 < b.times.size(); ++k) {
        const double h_k = b.positions[k];
        const double dt = 0.01;
        const double ds = b.spread[k + 1] - b.spread[k];
        const double excess = ds + p.drift_offset() * dt;
        const double expected = h_k * excess + p.r() * dt - 0.5 * p.penalized_variance() * h_k * h_k * dt;
        EXPECT_NEAR(std::log(b.wealth[k + 1] / b.wealth[k]), expected, 1e-12);
    }
}

TEST(SimulatePaths, SeedDeterminismAndThreadIndependence) {
    const auto m = fig1_model();
    const auto p = fig1_params();
    const auto h = StrategySpec::partial_info_optimal();
    auto setup = basic_setup(m, p, h);
    setup.initial_regime = -1;
    const auto a = simulate_paths(setup, 12, 42, 1);
    const auto b = simulate_paths(setup, 12, 42, 4);
    ASSERT_EQ(a.paths.size(), b.paths.size());
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        EXPECT_EQ(a.paths[i].spread, b.paths[i].spread);
        EXPECT_EQ(a.paths[i].wealth, b.paths[i].wealth);
        EXPECT_EQ(a.paths[i].chain, b.paths[i].chain);
        EXPECT_EQ(a.paths[i].beliefs, b.paths[i].beliefs);
    }
    const auto c = simulate_paths(setup, 12, 43, 1);
    EXPECT_NE(a.paths[0].spread, c.paths[0].spread);
}

TEST(SimulatePaths, ChainChangesOnlyAtGridPoints) {
    const auto m = RegimeModel::two_state(5.0, 5.0, 0.1, 0.6, 0, 0);
    const auto p = fig1_params();
    const auto idle = StrategySpec::constant(0.0);
    auto setup = basic_setup(m, p, idle);
    setup.horizon = 5.0;
    const auto b = record_path(setup, 3);
    int switches = 0;
    for (std::size_t k = 1; k < b.chain.size(); ++k) switches += b.chain[k] != b.chain[k - 1];
    EXPECT_GT(switches, 5);
}

TEST(SimulatePaths, ClipsLargePositionsAndCounts) {
    const auto m = fig1_model();
    const auto p = fig1_params();
    const auto big = StrategySpec::constant(50.0);
    auto setup = basic_setup(m, p, big);
    setup.h_max = 10.0;
    const auto b = record_path(setup, 1);
    EXPECT_EQ(b.clipped_steps, 100u);
    EXPECT_DOUBLE_EQ(b.positions.front(), 10.0);
}

TEST(SimulatePaths, RejectsNonDollarNeutralAndBadInputs) {
    const auto m = fig1_model();
    const auto p = fig1_params();
    const auto beta = StrategySpec::beta_neutral_optimal(1.0, 1.5);
    auto setup = basic_setup(m, p, beta);
    EXPECT_THROW(record_path(setup, 1), std::invalid_argument);
    const auto idle = StrategySpec::constant(0.0);
    setup = basic_setup(m, p, idle);
    setup.z0 = 0.0;
    EXPECT_THROW(record_path(setup, 1), std::invalid_argument);
    setup.z0 = 1.0;
    setup.dt = 0.0;
    EXPECT_THROW(record_path(setup, 1), std::invalid_argument);
    setup.dt = 0.01;
    EXPECT_THROW(simulate_paths(setup, 0, 1), std::invalid_argument);
}

TEST(SimulatePaths, PartialStrategyNeverSeesTheChain) {
    // a belief-reading strategy evaluated without a belief must refuse
    const auto m = fig1_model();
    const auto p = fig1_params();
    const auto h = StrategySpec::partial_info_optimal();
    EXPECT_THROW(h.evaluate(Observables{0.1, 0, {}}, m, p), std::logic_error);
}
