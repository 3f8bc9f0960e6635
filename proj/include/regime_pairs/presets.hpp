#ifndef REGIME_PAIRS_PRESETS_HPP
#define REGIME_PAIRS_PRESETS_HPP

// Parameter sets of the four reference experiments. Drifts mu only enter the
// filter; the full-information sets reuse the filtering experiment's values.

#include "regime_pairs/model.hpp"

#include <vector>

namespace rpairs::presets {

inline constexpr double kTheta1 = 0.1, kTheta2 = 0.6;
inline constexpr double kMu1 = 0.2, kMu2 = 1.0;

/// Value against time to maturity, three initial spreads.
struct Fig1 {
    static MarketParams market() { return MarketParams({1.0, 0.2, 0.2, 0.9, 0.01, 0.3}); }
    static RegimeModel model(double q12 = 0.7, double q21 = 0.2) {
        return RegimeModel::two_state(q12, q21, kTheta1, kTheta2, kMu1, kMu2);
    }
    static std::vector<double> spreads() { return {0.1, 0.3, 0.7}; }
    static constexpr double horizon = 5.0;
};

/// Markov-switching mixture against the averaged-data value.
struct Fig2 {
    static MarketParams market() { return MarketParams({1.0, 0.2, 0.2, 0.9, 0.01, 0.5}); }
    static RegimeModel model() { return RegimeModel::two_state(1.0, 2.0, kTheta1, kTheta2, kMu1, kMu2); }
    static constexpr double short_tau = 0.1;  ///< left panel
    static constexpr double s_fixed = 0.3;    ///< right panel
    static constexpr double s_min = -0.5, s_max = 1.0;
    static constexpr double horizon = 3.0;
};

/// Value against mean-reversion speed for two correlations.
struct Fig3 {
    static MarketParams market(double kappa, double rho) {
        return MarketParams({kappa, 0.9, 0.2, rho, 0.01, 0.3});
    }
    static RegimeModel model() { return RegimeModel::two_state(0.7, 0.2, kTheta1, kTheta2, kMu1, kMu2); }
    static constexpr double tau = 3.0;
    static constexpr double s = 0.3;
    static constexpr double kappa_min = 0.1, kappa_max = 5.0;
    static constexpr int kappa_points = 50;
};

/// Gains from filtering over belief and time to maturity.
struct Fig4 {
    static MarketParams market() { return MarketParams({1.0, 0.2, 0.2, 0.9, 0.01, 0.5}); }
    static RegimeModel model(double p0 = -1.0) {
        return RegimeModel::two_state(1.0, 2.0, kTheta1, kTheta2, kMu1, kMu2, p0);
    }
    static constexpr double s = 0.3;
    static constexpr double horizon = 3.0;
};

}  // namespace rpairs::presets

#endif  // REGIME_PAIRS_PRESETS_HPP
