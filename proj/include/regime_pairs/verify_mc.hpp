#ifndef REGIME_PAIRS_VERIFY_MC_HPP
#define REGIME_PAIRS_VERIFY_MC_HPP

/**
 * @file verify_mc.hpp
 * @brief Monte Carlo oracles for the analytic value surfaces.
 *
 * - Wealth oracle: sample mean of log Z_T (z0 = 1) under a strategy.
 * - Feynman-Kac oracle: sample mean of
 *     int_t^T (kappa (theta(Y_u) - S_u) - eta^2/2 + rho sigma eta)^2 / (2 eta^2 (1+eps)) du
 *   along uncontrolled (Y, S) paths, trapezoidal in time.
 * - Suboptimality scan: the wealth oracle for base + delta with common random
 *   numbers across deltas.
 *
 * All strategies here are time-homogeneous, so a single simulation to the
 * longest horizon also yields estimates for shorter times to maturity.
 */

#include "regime_pairs/filtering.hpp"
#include "regime_pairs/model.hpp"
#include "regime_pairs/parallel.hpp"
#include "regime_pairs/regime_market.hpp"
#include "regime_pairs/strategy.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rpairs {

struct McSettings {
    double dt = 1e-3;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 20240601;
    unsigned threads = 0;  ///< 0: hardware concurrency
    double h_max = 1e4;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double horizon = 0.0;           ///< T - t
    std::size_t n_paths = 0;        ///< paths that entered the average
    std::size_t invalid_paths = 0;  ///< paths dropped for non-finite state
    std::size_t clipped_steps = 0;
    std::size_t total_steps = 0;
    bool unreliable = false;        ///< more than 1% of steps clipped
};

/// Starting information: a known regime (full information) or a belief.
using StartState = std::variant<int, BeliefState>;

namespace detail {

struct PathSamples {
    std::vector<std::vector<double>> values;  // [checkpoint][path]
    std::vector<char> valid;
    std::size_t clipped = 0;
    std::size_t steps = 0;
};

inline std::vector<std::size_t> checkpoint_steps(std::span<const double> horizons, double dt,
                                                 std::size_t& n_steps, double& horizon) {
    if (horizons.empty()) throw std::invalid_argument("no horizons requested");
    horizon = 0.0;
    for (double h : horizons) {
        if (!(h > 0.0)) throw std::invalid_argument("horizons must be > 0");
        horizon = std::max(horizon, h);
    }
    SimulationSetup probe;
    probe.dt = dt;
    probe.horizon = horizon;
    n_steps = probe.steps();
    const double step = horizon / static_cast<double>(n_steps);
    std::vector<std::size_t> idx;
    for (double h : horizons) {
        const double x = h / step;
        const auto k = static_cast<std::size_t>(std::llround(x));
        if (std::abs(x - static_cast<double>(k)) > 1e-6)
            throw std::invalid_argument("horizon " + std::to_string(h) + " is not on the dt grid");
        idx.push_back(k);
    }
    return idx;
}

inline std::vector<McEstimate> summarize(const PathSamples& samples, std::span<const double> horizons) {
    std::vector<McEstimate> out;
    for (std::size_t c = 0; c < horizons.size(); ++c) {
        const auto& v = samples.values[c];
        McEstimate e;
        e.horizon = horizons[c];
        double sum = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (samples.valid[i]) {
                sum += v[i];
                ++e.n_paths;
            }
        e.invalid_paths = v.size() - e.n_paths;
        if (e.n_paths == 0) throw std::runtime_error("every Monte Carlo path was invalid");
        e.mean = sum / static_cast<double>(e.n_paths);
        double ss = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (samples.valid[i]) ss += (v[i] - e.mean) * (v[i] - e.mean);
        const double var = e.n_paths > 1 ? ss / static_cast<double>(e.n_paths - 1) : 0.0;
        e.std_error = std::sqrt(var / static_cast<double>(e.n_paths));
        e.clipped_steps = samples.clipped;
        e.total_steps = samples.steps;
        e.unreliable = samples.steps > 0 &&
                       static_cast<double>(samples.clipped) > 0.01 * static_cast<double>(samples.steps);
        out.push_back(e);
    }
    return out;
}

inline SimulationSetup make_setup(const StrategySpec& strategy, const RegimeModel& model,
                                  const MarketParams& params, double s, const StartState& start,
                                  double horizon, const McSettings& mc) {
    const InformationFlag info = strategy.information();
    SimulationSetup setup;
    setup.model = &model;
    setup.params = &params;
    setup.strategy = &strategy;
    setup.s0 = s;
    setup.z0 = 1.0;
    setup.horizon = horizon;
    setup.dt = mc.dt;
    setup.h_max = mc.h_max;
    if (const int* regime = std::get_if<int>(&start)) {
        if (info == InformationFlag::reads_belief)
            throw std::invalid_argument(strategy.name() + " needs a belief as starting information");
        if (*regime < 0 || *regime >= model.states())
            throw std::invalid_argument("starting regime out of range");
        setup.initial_regime = *regime;
    } else {
        if (info == InformationFlag::reads_chain)
            throw std::invalid_argument(strategy.name() + " needs a known starting regime");
        setup.prior = std::get<BeliefState>(start);
        setup.initial_regime = -1;
    }
    return setup;
}

}  // namespace detail

/// Wealth oracle at several times to maturity from one simulation.
inline std::vector<McEstimate> estimate_value_wealth(const StrategySpec& strategy, const RegimeModel& model,
                                                     const MarketParams& params, double s,
                                                     const StartState& start,
                                                     std::span<const double> horizons,
                                                     const McSettings& mc) {
    std::size_t n_steps = 0;
    double horizon = 0.0;
    const auto marks = detail::checkpoint_steps(horizons, mc.dt, n_steps, horizon);
    const SimulationSetup setup = detail::make_setup(strategy, model, params, s, start, horizon, mc);

    detail::PathSamples samples;
    samples.values.assign(marks.size(), std::vector<double>(mc.n_paths, 0.0));
    samples.valid.assign(mc.n_paths, 1);
    std::vector<std::size_t> clipped(mc.n_paths, 0);
    parallel_for(mc.n_paths, mc.threads, [&](std::size_t i) {
        auto obs = [&](const GridState& g) {
            for (std::size_t c = 0; c < marks.size(); ++c)
                if (g.k == marks[c]) samples.values[c][i] = g.log_wealth;
        };
        const PathOutcome o = simulate_path(setup, derive_seed(mc.seed, i), obs);
        samples.valid[i] = o.valid ? 1 : 0;
        clipped[i] = o.clipped_steps;
    });
    for (auto c : clipped) samples.clipped += c;
    samples.steps = n_steps * mc.n_paths;
    return detail::summarize(samples, horizons);
}

/// Sample mean and standard error of log Z_T with z0 = 1 (r-term included).
inline McEstimate estimate_value_wealth(const StrategySpec& strategy, const RegimeModel& model,
                                        const MarketParams& params, double t, double s,
                                        const StartState& start, double horizon_T,
                                        const McSettings& mc) {
    const double tau = horizon_T - t;
    return estimate_value_wealth(strategy, model, params, s, start, std::span<const double>(&tau, 1), mc)
        .front();
}

/// Feynman-Kac oracle at several times to maturity. The mean excludes the
/// r (T - t) and log z terms.
inline std::vector<McEstimate> estimate_value_feynman_kac(const RegimeModel& model,
                                                          const MarketParams& params, double s,
                                                          int regime, std::span<const double> horizons,
                                                          const McSettings& mc) {
    std::size_t n_steps = 0;
    double horizon = 0.0;
    const auto marks = detail::checkpoint_steps(horizons, mc.dt, n_steps, horizon);
    const StrategySpec idle = StrategySpec::constant(0.0);
    const SimulationSetup setup = detail::make_setup(idle, model, params, s, StartState{regime}, horizon, mc);
    const double dt = horizon / static_cast<double>(n_steps);
    const double kappa = params.kappa(), offset = params.drift_offset();
    const double scale = 1.0 / (2.0 * params.penalized_variance());

    detail::PathSamples samples;
    samples.values.assign(marks.size(), std::vector<double>(mc.n_paths, 0.0));
    samples.valid.assign(mc.n_paths, 1);
    parallel_for(mc.n_paths, mc.threads, [&](std::size_t i) {
        double integral = 0.0, prev = 0.0;
        auto obs = [&](const GridState& g) {
            const double a = kappa * (model.theta(g.regime) - g.s) + offset;
            const double val = a * a * scale;
            if (g.k > 0) integral += 0.5 * (prev + val) * dt;
            prev = val;
            for (std::size_t c = 0; c < marks.size(); ++c)
                if (g.k == marks[c]) samples.values[c][i] = integral;
        };
        const PathOutcome o = simulate_path(setup, derive_seed(mc.seed, i), obs);
        samples.valid[i] = o.valid ? 1 : 0;
    });
    samples.steps = n_steps * mc.n_paths;
    return detail::summarize(samples, horizons);
}

inline McEstimate estimate_value_feynman_kac(const RegimeModel& model, const MarketParams& params,
                                             double t, double s, int regime, double horizon_T,
                                             const McSettings& mc) {
    const double tau = horizon_T - t;
    return estimate_value_feynman_kac(model, params, s, regime, std::span<const double>(&tau, 1), mc)
        .front();
}

struct ScanRow {
    double delta = 0.0;
    McEstimate estimate;
    double loss = 0.0;            ///< mean(delta = 0) - mean(delta), paired
    double loss_std_error = 0.0;  ///< standard error of the paired difference
};

/// Wealth oracle for base + delta over `deltas` with common random numbers.
/// `deltas` must contain 0.
inline std::vector<ScanRow> suboptimality_scan(const StrategySpec& base, std::span<const double> deltas,
                                               const RegimeModel& model, const MarketParams& params,
                                               double t, double s, const StartState& start,
                                               double horizon_T, const McSettings& mc) {
    std::size_t zero = deltas.size();
    for (std::size_t j = 0; j < deltas.size(); ++j)
        if (deltas[j] == 0.0) zero = j;
    if (zero == deltas.size()) throw std::invalid_argument("suboptimality_scan: deltas must include 0");
    const double tau = horizon_T - t;

    std::vector<StrategySpec> variants;
    for (double d : deltas) variants.push_back(StrategySpec::perturbed(base, d));

    std::size_t n_steps = 0;
    double horizon = 0.0;
    const auto marks = detail::checkpoint_steps(std::span<const double>(&tau, 1), mc.dt, n_steps, horizon);
    (void)marks;

    std::vector<std::vector<double>> values(deltas.size(), std::vector<double>(mc.n_paths, 0.0));
    std::vector<std::vector<char>> valid(deltas.size(), std::vector<char>(mc.n_paths, 1));
    std::vector<std::vector<std::size_t>> clipped(deltas.size(), std::vector<std::size_t>(mc.n_paths, 0));
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        const SimulationSetup setup = detail::make_setup(variants[j], model, params, s, start, tau, mc);
        parallel_for(mc.n_paths, mc.threads, [&](std::size_t i) {
            const PathOutcome o = simulate_path(setup, derive_seed(mc.seed, i), [](const GridState&) {});
            values[j][i] = o.log_wealth;
            valid[j][i] = o.valid ? 1 : 0;
            clipped[j][i] = o.clipped_steps;
        });
    }

    std::vector<ScanRow> rows;
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        detail::PathSamples samples;
        samples.values = {values[j]};
        samples.valid = valid[j];
        for (auto c : clipped[j]) samples.clipped += c;
        samples.steps = n_steps * mc.n_paths;
        ScanRow row;
        row.delta = deltas[j];
        row.estimate = detail::summarize(samples, std::span<const double>(&tau, 1)).front();

        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < mc.n_paths; ++i)
            if (valid[j][i] && valid[zero][i]) {
                sum += values[zero][i] - values[j][i];
                ++n;
            }
        if (n > 0) {
            row.loss = sum / static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t i = 0; i < mc.n_paths; ++i)
                if (valid[j][i] && valid[zero][i]) {
                    const double d = values[zero][i] - values[j][i] - row.loss;
                    ss += d * d;
                }
            row.loss_std_error = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace rpairs

#endif  // REGIME_PAIRS_VERIFY_MC_HPP
