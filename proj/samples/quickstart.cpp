// Solve the full- and partial-information values for a two-regime spread and
// check one of them against simulation.

#include "regime_pairs.hpp"

#include <cstdio>

int main() {
    using namespace rpairs;
    const auto model = RegimeModel::two_state(/*q12=*/1.0, /*q21=*/2.0, /*theta1=*/0.1, /*theta2=*/0.6,
                                              /*mu1=*/0.2, /*mu2=*/1.0);
    const MarketParams params({.kappa = 1.0, .eta = 0.2, .sigma = 0.2, .rho = 0.9, .r = 0.01, .epsilon = 0.5});
    const double horizon = 1.0, s = 0.3;

    const auto full = solve_cf_odes(model, params, horizon);
    const auto partial = solve_two_state_pde(model, params, horizon);
    const auto averaged = solve_averaged(model, params, horizon);

    std::printf("position in regime 0 at s = %.2f: %.4f\n", s, h_full(s, 0, model, params));
    std::printf("position at belief (0.5, 0.5):    %.4f\n", h_partial(s, BeliefState::two_state(0.5), model, params));
    std::printf("V full info, regime 0:  %.5f\n", value_full(0.0, 1.0, s, 0, full));
    std::printf("V full info, regime 1:  %.5f\n", value_full(0.0, 1.0, s, 1, full));
    std::printf("V filtered, p = 0.5:    %.5f\n", value_partial(0.0, 1.0, s, 0.5, partial));
    std::printf("V averaged data:        %.5f\n", value_averaged(0.0, 1.0, s, model, params, averaged));

    McSettings mc;
    mc.n_paths = 20000;
    const auto est = estimate_value_wealth(StrategySpec::partial_info_optimal(), model, params, 0.0, s,
                                           StartState{BeliefState::two_state(0.5)}, horizon, mc);
    std::printf("simulated, p = 0.5:     %.5f +- %.5f (%zu paths)\n", est.mean, est.std_error, est.n_paths);
}
