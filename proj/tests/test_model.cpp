#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace rpairs;
using namespace testing_support;

TEST(RegimeModel, TwoStateDefaultsToStationaryLaw) {
    const auto m = RegimeModel::two_state(1.0, 2.0, 0.1, 0.6, 0.2, 1.0);
    EXPECT_EQ(m.states(), 2);
    EXPECT_DOUBLE_EQ(m.initial_dist()(0), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.rate(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(m.rate(1, 0), 2.0);
    EXPECT_DOUBLE_EQ(m.rate(0, 0), -1.0);
}

TEST(RegimeModel, RejectsBadGeneratorAndListsEveryProblem) {
    Eigen::MatrixXd q(2, 2);
    q << -1.0, 0.5, -0.2, 0.2;  // row 0 does not sum to zero, negative off-diagonal in row 1
    Eigen::Vector2d theta(0.1, 0.6), mu(0.0, 0.0), pi(0.7, 0.2);
    try {
        RegimeModel m(q, theta, mu, pi);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("negative"), std::string::npos) << msg;
        EXPECT_NE(msg.find("row 0"), std::string::npos) << msg;
        EXPECT_NE(msg.find("initial"), std::string::npos) << msg;
    }
}

TEST(RegimeModel, RejectsMismatchedSizes) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2, 2);
    Eigen::VectorXd theta(3), mu(2), pi(2);
    theta << 0, 0, 0;
    mu << 0, 0;
    pi << 0.5, 0.5;
    EXPECT_THROW(RegimeModel(q, theta, mu, pi), std::invalid_argument);
}

TEST(RegimeModel, BeliefWeightedMeans) {
    const auto m = three_state_model();
    const std::vector<double> p{0.2, 0.3, 0.5};
    EXPECT_NEAR(m.theta_mean(p), 0.2 * 0.1 + 0.3 * 0.6 + 0.5 * -0.2, 1e-15);
    EXPECT_NEAR(m.mu_mean(p), 0.2 * 0.2 + 0.3 * 1.0 + 0.5 * 0.5, 1e-15);
}

TEST(MarketParams, ValidatesAllFieldsAtOnce) {
    try {
        MarketParams p({.kappa = 0.0, .eta = -1.0, .sigma = 0.2, .rho = 1.0, .r = 0.0, .epsilon = -0.1});
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        for (const char* key : {"kappa", "eta", "rho", "epsilon"}) EXPECT_NE(msg.find(key), std::string::npos) << key;
        EXPECT_EQ(msg.find("sigma"), std::string::npos);
    }
}

TEST(MarketParams, DerivedConstants) {
    const auto p = fig1_params();
    EXPECT_NEAR(p.rho_bar(), std::sqrt(1.0 - 0.81), 1e-15);
    EXPECT_NEAR(p.drift_offset(), -0.02 + 0.9 * 0.2 * 0.2, 1e-15);
    EXPECT_NEAR(p.penalized_variance(), 0.04 * 1.3, 1e-15);
}

TEST(StationaryDistribution, TwoStateClosedForm) {
    const auto pi = stationary_distribution(RegimeModel::two_state(1.0, 2.0, 0.1, 0.6, 0, 0));
    EXPECT_NEAR(pi(0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(std::round(pi(0) * 100) / 100, 0.67, 1e-12);
}

TEST(StationaryDistribution, GeneralKSolvesBalance) {
    const auto m = three_state_model();
    const Eigen::VectorXd pi = stationary_distribution(m);
    EXPECT_NEAR(pi.sum(), 1.0, 1e-12);
    EXPECT_LT((m.generator().transpose() * pi).norm(), 1e-12);
    EXPECT_TRUE((pi.array() > 0).all());
}

TEST(StationaryDistribution, SingleStateAndDegenerate) {
    EXPECT_DOUBLE_EQ(stationary_distribution(RegimeModel::single_state(0.1, 0.0))(0), 1.0);
    EXPECT_THROW(stationary_distribution(RegimeModel::two_state(0.0, 0.0, 0.1, 0.6, 0, 0, 0.5)), std::domain_error);
}
