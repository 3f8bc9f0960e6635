#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace rpairs;
using namespace testing_support;

TEST(FullInfo, KnownValues) {
    const auto m = fig1_model();
    const auto prm = fig1_params();
    // kappa (theta - s) / eta^2 = 12.5, rho sigma / eta = 0.9
    EXPECT_NEAR(h_full(0.1, 1, m, prm), (12.5 + 0.9 - 0.5) / 1.3, 1e-12);
    EXPECT_NEAR(h_full(0.1, 1, m, prm), 9.9231, 1e-4);
    const MarketParams plain({.kappa = 1.0, .eta = 0.2, .sigma = 0.2, .rho = 0.0, .r = 0.0, .epsilon = 0.0});
    EXPECT_DOUBLE_EQ(h_full(0.6, 1, m, plain), -0.5);
}

TEST(FullInfo, RootAndSlope) {
    const auto m = fig1_model();
    const auto prm = fig1_params();
    const double eta2 = prm.eta() * prm.eta();
    const double root = m.theta(0) + (prm.rho() * prm.sigma() / prm.eta() - 0.5) * eta2 / prm.kappa();
    EXPECT_NEAR(h_full(root, 0, m, prm), 0.0, 1e-12);
    const double slope = h_full(0.5, 0, m, prm) - h_full(-0.5, 0, m, prm);
    EXPECT_NEAR(slope, -prm.kappa() / prm.penalized_variance(), 1e-10);
}

TEST(FullInfo, MaximizesTheInstantaneousCriterion) {
    // drift of log wealth minus penalty: h (kappa (theta - s) + b) - v h^2 / 2
    const auto m = fig1_model();
    const auto prm = fig1_params();
    for (double s : {-0.3, 0.1, 0.45, 0.9}) {
        for (int i = 0; i < 2; ++i) {
            auto crit = [&](double h) {
                return h * (prm.kappa() * (m.theta(i) - s) + prm.drift_offset()) -
                       0.5 * prm.penalized_variance() * h * h;
            };
            const double star = h_full(s, i, m, prm);
            for (double dh = -2.0; dh <= 2.0; dh += 0.01)
                EXPECT_LE(crit(star + dh), crit(star) + 1e-12);
        }
    }
}

TEST(FullInfo, PenaltyShrinksPositions) {
    const auto m = fig1_model();
    double prev = 1e300;
    for (double eps : {0.0, 0.3, 1.0, 10.0, 1e6}) {
        const MarketParams prm({.kappa = 1.0, .eta = 0.2, .sigma = 0.2, .rho = 0.9, .r = 0.01, .epsilon = eps});
        const double h = std::abs(h_full(0.7, 0, m, prm));
        EXPECT_LT(h, prev);
        prev = h;
    }
    EXPECT_LT(prev, 1e-4);
}

TEST(PartialInfo, VerticesAndMixture) {
    const auto m = fig1_model();
    const auto prm = fig1_params();
    for (double s : {-0.2, 0.3, 0.8}) {
        EXPECT_DOUBLE_EQ(h_partial(s, BeliefState::vertex(2, 0), m, prm), h_full(s, 0, m, prm));
        EXPECT_DOUBLE_EQ(h_partial(s, BeliefState::vertex(2, 1), m, prm), h_full(s, 1, m, prm));
        // linear in theta, so the half-half belief sits in the middle
        EXPECT_NEAR(h_partial(s, BeliefState::two_state(0.5), m, prm),
                    0.5 * (h_full(s, 0, m, prm) + h_full(s, 1, m, prm)), 1e-12);
    }
    const std::vector<double> half{0.5, 0.5};
    EXPECT_DOUBLE_EQ(m.theta_mean(half), 0.35);
}

TEST(BetaNeutral, EqualBetasReduceToDollarNeutral) {
    const auto m = fig1_model();
    const auto prm = fig1_params();
    for (double beta : {0.5, 1.0, 3.0})
        for (int i = 0; i < 2; ++i)
            EXPECT_NEAR(h_beta_neutral(0.25, i, m, prm, beta, beta), h_full(0.25, i, m, prm), 1e-12);
}

TEST(BetaNeutral, ClosedFormAndPenaltyScaling) {
    const auto m = fig1_model();
    const auto prm = fig1_params();
    const double b1 = 1.0, b2 = -1.0, s = 0.2;
    const double base = prm.sigma() * (b2 - b1) - b1 * prm.eta();
    const double num = m.mu(0) * b2 * (b2 - b1) +
                       b1 * b2 * (prm.kappa() * (m.theta(0) - s) - 0.02 + prm.rho() * prm.sigma() * prm.eta());
    EXPECT_NEAR(h_beta_neutral(s, 0, m, prm, b1, b2), num / (base * base) / 1.3, 1e-12);

    const MarketParams zero({.kappa = 1.0, .eta = 0.2, .sigma = 0.2, .rho = 0.9, .r = 0.01, .epsilon = 0.0});
    const MarketParams one({.kappa = 1.0, .eta = 0.2, .sigma = 0.2, .rho = 0.9, .r = 0.01, .epsilon = 1.0});
    EXPECT_NEAR(h_beta_neutral(s, 1, m, one, 1.0, 1.5), 0.5 * h_beta_neutral(s, 1, m, zero, 1.0, 1.5), 1e-12);
}

TEST(BetaNeutral, DegenerateBetasAreReported) {
    const auto m = fig1_model();
    const auto prm = fig1_params();
    // sigma (beta2 - beta1) = beta1 eta when beta2 = 2 beta1 and sigma = eta
    try {
        h_beta_neutral(0.2, 0, m, prm, 1.0, 2.0);
        FAIL() << "expected domain_error";
    } catch (const std::domain_error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("beta1 = 1"), std::string::npos) << msg;
        EXPECT_NE(msg.find("beta2 = 2"), std::string::npos) << msg;
    }
    EXPECT_THROW(StrategySpec::beta_neutral_optimal(0.0, 1.0), std::invalid_argument);
}

TEST(StrategySpec, InformationFlagsAndNames) {
    const auto full = StrategySpec::full_info_optimal();
    const auto part = StrategySpec::partial_info_optimal();
    const auto cst = StrategySpec::constant(0.4);
    const auto beta = StrategySpec::beta_neutral_optimal(1.0, 1.5);
    const auto pert = StrategySpec::perturbed(part, 0.1);
    EXPECT_EQ(full.information(), InformationFlag::reads_chain);
    EXPECT_EQ(part.information(), InformationFlag::reads_belief);
    EXPECT_EQ(cst.information(), InformationFlag::reads_neither);
    EXPECT_EQ(beta.information(), InformationFlag::reads_chain);
    EXPECT_EQ(pert.information(), InformationFlag::reads_belief);
    EXPECT_TRUE(full.dollar_neutral());
    EXPECT_FALSE(beta.dollar_neutral());
    EXPECT_FALSE(StrategySpec::perturbed(beta, 0.1).dollar_neutral());
    EXPECT_EQ(full.name(), "full_info_optimal");
    EXPECT_EQ(pert.name(), "perturbed(partial_info_optimal,0.1)");
    EXPECT_STREQ(to_string(InformationFlag::reads_neither), "reads_neither");
}

TEST(StrategySpec, EvaluateChecksWhatItReads) {
    const auto m = fig1_model();
    const auto prm = fig1_params();
    const std::vector<double> p{0.3, 0.7};
    const auto full = StrategySpec::full_info_optimal();
    const auto part = StrategySpec::partial_info_optimal();
    EXPECT_DOUBLE_EQ(full.evaluate({0.2, 1, {}}, m, prm), h_full(0.2, 1, m, prm));
    EXPECT_THROW(full.evaluate({0.2, -1, p}, m, prm), std::logic_error);
    EXPECT_THROW(full.evaluate({0.2, 2, {}}, m, prm), std::logic_error);
    EXPECT_DOUBLE_EQ(part.evaluate({0.2, -1, p}, m, prm), h_partial(0.2, p, m, prm));
    EXPECT_THROW(part.evaluate({0.2, 0, {}}, m, prm), std::logic_error);
    EXPECT_DOUBLE_EQ(StrategySpec::perturbed(full, -0.25).evaluate({0.2, 0, {}}, m, prm),
                     h_full(0.2, 0, m, prm) - 0.25);
    EXPECT_DOUBLE_EQ(StrategySpec::constant(0.4).evaluate({0.2, -1, {}}, m, prm), 0.4);
}
