#ifndef REGIME_PAIRS_FILTERING_HPP
#define REGIME_PAIRS_FILTERING_HPP

/**
 * @file filtering.hpp
 * @brief Innovations-form (Wonham / Kushner-Stratonovich) filter for the
 *        hidden regime given the observed log-return R and spread S.
 *
 * Observation model:
 *   (dR, dS)^T = A(Y, S) dt + Sigma dB,
 *   A = (mu(Y), kappa (theta(Y) - S))^T,
 *   Sigma = [[sigma, 0], [rho eta, sqrt(1 - rho^2) eta]].
 *
 * Innovations dI = Sigma^{-1} ((dR, dS)^T - A_hat dt) drive the belief
 *   dp^i = sum_j q^{ji} p^j dt + H^{(i,1)}(p) dI^1 + H^{(i,2)}(p) dI^2.
 */

#include "regime_pairs/model.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpairs {

/// Conditional law of the hidden chain, a point of the (K-1)-simplex.
class BeliefState {
public:
    static constexpr double kSumTolerance = 1e-10;

    explicit BeliefState(std::vector<double> p) : p_(std::move(p)) {
        if (p_.empty()) throw std::invalid_argument("belief must be non-empty");
        double total = 0.0;
        for (double v : p_) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("belief entries must be finite and >= 0");
            total += v;
        }
        if (std::abs(total - 1.0) > kSumTolerance)
            throw std::invalid_argument("belief entries must sum to 1 (got " +
                                        std::to_string(total) + ")");
    }

    static BeliefState vertex(int k, int i) {
        std::vector<double> p(static_cast<std::size_t>(k), 0.0);
        p.at(static_cast<std::size_t>(i)) = 1.0;
        return BeliefState(std::move(p));
    }

    static BeliefState from_initial(const RegimeModel& model) {
        const auto& pi = model.initial_dist();
        return BeliefState(std::vector<double>(pi.data(), pi.data() + pi.size()));
    }

    /// Two-state belief (p, 1 - p).
    static BeliefState two_state(double p) { return BeliefState({p, 1.0 - p}); }

    int size() const noexcept { return static_cast<int>(p_.size()); }
    double operator[](int i) const { return p_[static_cast<std::size_t>(i)]; }
    std::span<const double> values() const noexcept { return p_; }

private:
    std::vector<double> p_;
};

struct ObservationIncrement {
    double dR = 0.0;  ///< log-return increment of stock 1
    double dS = 0.0;  ///< spread increment
    double dt = 0.0;
};

/// Drift and diffusion loadings of the filter SDE at a belief p.
struct FilterCoefficients {
    std::vector<double> drift;  ///< sum_j q^{ji} p^j
    std::vector<double> h1;     ///< H^{(i,1)}
    std::vector<double> h2;     ///< H^{(i,2)}
};

inline FilterCoefficients filter_coefficients(std::span<const double> p,
                                              const RegimeModel& model,
                                              const MarketParams& params) {
    const int k = model.states();
    if (static_cast<int>(p.size()) != k)
        throw std::invalid_argument("belief size does not match model");
    const double mu_bar = model.mu_mean(p);
    const double theta_bar = model.theta_mean(p);
    const double s = params.sigma(), eta = params.eta(), rho = params.rho();
    const double denom2 = s * eta * params.rho_bar();
    FilterCoefficients out{std::vector<double>(k, 0.0), std::vector<double>(k),
                           std::vector<double>(k)};
    for (int i = 0; i < k; ++i) {
        double acc = 0.0;
        for (int j = 0; j < k; ++j) acc += model.rate(j, i) * p[j];
        out.drift[i] = acc;
        const double dmu = model.mu(i) - mu_bar;
        const double dtheta = model.theta(i) - theta_bar;
        out.h1[i] = p[i] * dmu / s;
        out.h2[i] = p[i] * (s * params.kappa() * dtheta - eta * rho * dmu) / denom2;
    }
    return out;
}

struct Innovation {
    double dI1 = 0.0;
    double dI2 = 0.0;
};

/// Innovations increment Sigma^{-1} [(dR, dS) - A_hat dt], with Sigma^{-1}
/// written out for the lower-triangular 2x2 case. `s` is the spread at the
/// start of the increment.
inline Innovation innovations(const ObservationIncrement& obs, double mu_bar,
                              double theta_bar, double s,
                              const MarketParams& params) {
    const double x1 = obs.dR - mu_bar * obs.dt;
    const double x2 = obs.dS - params.kappa() * (theta_bar - s) * obs.dt;
    const double di1 = x1 / params.sigma();
    const double di2 = (x2 - params.rho() * params.eta() * di1) /
                       (params.rho_bar() * params.eta());
    return {di1, di2};
}

/// Diagnostics of one Euler update before clamping.
struct FilterStepInfo {
    double raw_sum_error = 0.0;  ///< |sum_i p^i - 1| of the raw Euler update
    double clamped_mass = 0.0;   ///< total negative mass removed
};

/// Allocation-free filter for repeated in-place updates along a path.
class WonhamFilter {
public:
    WonhamFilter(const RegimeModel& model, const MarketParams& params)
        : model_(&model), params_(&params),
          scratch_(static_cast<std::size_t>(model.states())) {}

    FilterStepInfo update(std::span<double> p, const ObservationIncrement& obs,
                          double s) {
        const RegimeModel& m = *model_;
        const MarketParams& prm = *params_;
        const int k = m.states();
        const double mu_bar = m.mu_mean(p);
        const double theta_bar = m.theta_mean(p);
        const Innovation di = innovations(obs, mu_bar, theta_bar, s, prm);
        const double sg = prm.sigma(), eta = prm.eta(), rho = prm.rho();
        const double denom2 = sg * eta * prm.rho_bar();

        for (int i = 0; i < k; ++i) {
            double drift = 0.0;
            for (int j = 0; j < k; ++j) drift += m.rate(j, i) * p[j];
            const double dmu = m.mu(i) - mu_bar;
            const double dtheta = m.theta(i) - theta_bar;
            const double h1 = p[i] * dmu / sg;
            const double h2 = p[i] * (sg * prm.kappa() * dtheta - eta * rho * dmu) / denom2;
            scratch_[i] = p[i] + drift * obs.dt + h1 * di.dI1 + h2 * di.dI2;
        }

        FilterStepInfo info;
        double raw = 0.0, total = 0.0;
        for (int i = 0; i < k; ++i) {
            raw += scratch_[i];
            if (scratch_[i] < 0.0) {
                info.clamped_mass -= scratch_[i];
                scratch_[i] = 0.0;
            }
            total += scratch_[i];
        }
        info.raw_sum_error = std::abs(raw - 1.0);
        if (!(total > 0.0) || !std::isfinite(total))
            throw std::runtime_error("filter update left the simplex");
        for (int i = 0; i < k; ++i) p[i] = scratch_[i] / total;
        return info;
    }

private:
    const RegimeModel* model_;
    const MarketParams* params_;
    std::vector<double> scratch_;
};

inline BeliefState filter_step(const BeliefState& p, const ObservationIncrement& obs,
                               const RegimeModel& model, const MarketParams& params,
                               double s) {
    if (p.size() != model.states())
        throw std::invalid_argument("belief size does not match model");
    std::vector<double> next(p.values().begin(), p.values().end());
    WonhamFilter filter(model, params);
    filter.update(next, obs, s);
    return BeliefState(std::move(next));
}

/// Left fold of filter_step over a path. `spread` holds the spread level at
/// the start of each increment; a trailing terminal level is allowed.
inline std::vector<BeliefState> filter_path(std::span<const ObservationIncrement> observations,
                                            std::span<const double> spread,
                                            const BeliefState& p0,
                                            const RegimeModel& model,
                                            const MarketParams& params) {
    const auto n = observations.size();
    if (spread.size() < n || spread.size() > n + 1)
        throw std::invalid_argument("filter_path: spread has " + std::to_string(spread.size()) +
                                    " levels for " + std::to_string(n) + " increments");
    if (p0.size() != model.states())
        throw std::invalid_argument("belief size does not match model");
    std::vector<BeliefState> out;
    out.reserve(n + 1);
    out.push_back(p0);
    std::vector<double> p(p0.values().begin(), p0.values().end());
    WonhamFilter filter(model, params);
    for (std::size_t k = 0; k < n; ++k) {
        filter.update(p, observations[k], spread[k]);
        out.emplace_back(p);
    }
    return out;
}

/// Scalar loadings of the two-state filter for p = P(Y = state 0).
struct TwoStateLoadings {
    double nu1 = 0.0;
    double nu2 = 0.0;
    double q12 = 0.0;
    double q21 = 0.0;

    double drift(double p) const { return q21 - (q12 + q21) * p; }
    double diffusion(double p) const { return std::hypot(nu1, nu2) * p * (1.0 - p); }
};

inline TwoStateLoadings two_state_reduce(const RegimeModel& model, const MarketParams& params) {
    if (model.states() != 2)
        throw std::invalid_argument("two_state_reduce requires K = 2");
    const double dmu = model.mu(0) - model.mu(1);
    const double dtheta = model.theta(0) - model.theta(1);
    TwoStateLoadings out;
    out.nu1 = dmu / params.sigma();
    out.nu2 = (params.sigma() * params.kappa() * dtheta - params.eta() * params.rho() * dmu) /
              (params.sigma() * params.eta() * params.rho_bar());
    out.q12 = model.rate(0, 1);
    out.q21 = model.rate(1, 0);
    return out;
}

/// One Euler step of the scalar two-state filter, clamped to [0, 1].
inline double two_state_filter_step(double p, const ObservationIncrement& obs,
                                    const RegimeModel& model, const MarketParams& params,
                                    double s, const TwoStateLoadings& nu) {
    const double mu_bar = model.mu(1) + (model.mu(0) - model.mu(1)) * p;
    const double theta_bar = model.theta(1) + (model.theta(0) - model.theta(1)) * p;
    const Innovation di = innovations(obs, mu_bar, theta_bar, s, params);
    const double next = p + nu.drift(p) * obs.dt +
                        p * (1.0 - p) * (nu.nu1 * di.dI1 + nu.nu2 * di.dI2);
    return std::clamp(next, 0.0, 1.0);
}

}  // namespace rpairs

#endif  // REGIME_PAIRS_FILTERING_HPP
