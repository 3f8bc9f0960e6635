#ifndef REGIME_PAIRS_VALUE_FULL_HPP
#define REGIME_PAIRS_VALUE_FULL_HPP

/**
 * @file value_full.hpp
 * @brief Full-information value function
 *
 *   V(t, z, s, i) = log z + r (T - t) + d(t) s^2 + c(t, i) s + f(t, i).
 *
 * d has a closed form. c and f solve the linear backward systems
 *
 *   c_t - kappa c + 2 kappa theta_i d - (kappa^2 theta_i + kappa b) / (eta^2 (1+eps))
 *       + sum_j q^{ij} c_j = 0,
 *   f_t + eta^2 d + kappa theta_i c + (kappa theta_i + b)^2 / (2 eta^2 (1+eps))
 *       + sum_j q^{ij} f_j = 0,
 *
 * with b = -eta^2/2 + rho sigma eta and zero terminal data, integrated with
 * classic RK4 in time-to-maturity.
 */

#include "regime_pairs/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpairs {

namespace detail {
inline double real_part(double x) { return x; }
template <class T>
double real_part(const std::complex<T>& x) { return x.real(); }
}  // namespace detail

/// d(t) = kappa (1 - exp(-2 kappa (T - t))) / (4 eta^2 (1 + eps)).
/// Templated on the scalar so it can be evaluated at complex t.
template <class Scalar>
Scalar d_closed_form(Scalar t, double horizon, const MarketParams& params) {
    if (detail::real_part(t) > horizon)
        throw std::domain_error("d_closed_form: t = " + std::to_string(detail::real_part(t)) +
                                " exceeds horizon " + std::to_string(horizon));
    using std::exp;
    const double k = params.kappa();
    const double plateau = k / (4.0 * params.penalized_variance());
    return plateau * (Scalar(1.0) - exp(Scalar(-2.0 * k) * (Scalar(horizon) - t)));
}

/// Source terms of the c/f system for state i.
struct FullInfoForcing {
    double c_const;   ///< (kappa^2 theta_i + kappa b) / (eta^2 (1+eps))
    double c_d;       ///< 2 kappa theta_i
    double f_const;   ///< (kappa theta_i + b)^2 / (2 eta^2 (1+eps))
    double f_c;       ///< kappa theta_i
};

inline FullInfoForcing full_info_forcing(double theta_i, const MarketParams& params) {
    const double k = params.kappa();
    const double b = params.drift_offset();
    const double v = params.penalized_variance();
    const double lin = k * theta_i + b;
    return {k * lin / v, 2.0 * k * theta_i, lin * lin / (2.0 * v), k * theta_i};
}

/// Coefficient grids of the full-information value on t in [0, T].
class ValueSurfaceFull {
public:
    ValueSurfaceFull(RegimeModel model, MarketParams params, double horizon,
                     std::vector<double> times, std::vector<double> d, std::vector<double> c,
                     std::vector<double> f)
        : model_(std::move(model)), params_(params), horizon_(horizon),
          times_(std::move(times)), d_(std::move(d)), c_(std::move(c)), f_(std::move(f)) {}

    const RegimeModel& model() const noexcept { return model_; }
    const MarketParams& params() const noexcept { return params_; }
    double horizon() const noexcept { return horizon_; }
    int states() const noexcept { return model_.states(); }
    std::size_t size() const noexcept { return times_.size(); }
    const std::vector<double>& times() const noexcept { return times_; }
    double d(std::size_t n) const { return d_[n]; }
    double c(std::size_t n, int i) const { return c_[n * states() + i]; }
    double f(std::size_t n, int i) const { return f_[n * states() + i]; }

    struct Coefficients {
        double d, c, f;
    };

    /// Coefficients at arbitrary t: d exact, c and f linear in t.
    Coefficients at(double t, int i) const {
        if (t < times_.front() || t > times_.back())
            throw std::out_of_range("time " + std::to_string(t) + " outside surface grid [" +
                                    std::to_string(times_.front()) + ", " +
                                    std::to_string(times_.back()) + "]");
        if (i < 0 || i >= states()) throw std::out_of_range("regime index out of range");
        const double step = (times_.back() - times_.front()) / static_cast<double>(times_.size() - 1);
        auto n = static_cast<std::size_t>((t - times_.front()) / step);
        n = std::min(n, times_.size() - 2);
        const double w = (t - times_[n]) / (times_[n + 1] - times_[n]);
        return {d_closed_form(t, horizon_, params_), (1.0 - w) * c(n, i) + w * c(n + 1, i),
                (1.0 - w) * f(n, i) + w * f(n + 1, i)};
    }

private:
    RegimeModel model_;
    MarketParams params_;
    double horizon_;
    std::vector<double> times_;
    std::vector<double> d_, c_, f_;  // c_, f_ row-major [time][state]
};

/// Integrates the c/f system backward from T with RK4 on n_steps uniform steps.
/// c does not depend on f, so integrating the stacked system leaves the c
/// trajectory identical to solving it alone.
inline ValueSurfaceFull solve_cf_odes(const RegimeModel& model, const MarketParams& params,
                                      double horizon, std::size_t n_steps = 10000) {
    if (n_steps < 10) throw std::invalid_argument("solve_cf_odes: n_steps must be >= 10");
    if (!(horizon > 0.0)) throw std::invalid_argument("solve_cf_odes: horizon must be > 0");
    const int k = model.states();
    std::vector<FullInfoForcing> forcing;
    for (int i = 0; i < k; ++i) forcing.push_back(full_info_forcing(model.theta(i), params));
    const double kap = params.kappa();
    const double eta2 = params.eta() * params.eta();

    // Derivative in tau = T - t of the stacked state y = (c_0..c_{K-1}, f_0..f_{K-1}).
    auto rhs = [&](double tau, const std::vector<double>& y, std::vector<double>& dy) {
        const double dd = d_closed_form(horizon - tau, horizon, params);
        for (int i = 0; i < k; ++i) {
            double qc = 0.0, qf = 0.0;
            for (int j = 0; j < k; ++j) {
                qc += model.rate(i, j) * y[j];
                qf += model.rate(i, j) * y[k + j];
            }
            const auto& fc = forcing[i];
            dy[i] = -kap * y[i] + fc.c_d * dd - fc.c_const + qc;
            dy[k + i] = eta2 * dd + fc.f_c * y[i] + fc.f_const + qf;
        }
    };

    const std::size_t n = n_steps;
    const double h = horizon / static_cast<double>(n);
    std::vector<double> times(n + 1), d(n + 1), c((n + 1) * k), f((n + 1) * k);
    std::vector<double> y(2 * k, 0.0), k1(2 * k), k2(2 * k), k3(2 * k), k4(2 * k), tmp(2 * k);

    auto store = [&](std::size_t step) {
        // step counts from the terminal date backwards
        const std::size_t idx = n - step;
        times[idx] = horizon - static_cast<double>(step) * h;
        d[idx] = d_closed_form(times[idx], horizon, params);
        for (int i = 0; i < k; ++i) {
            c[idx * k + i] = y[i];
            f[idx * k + i] = y[k + i];
        }
    };
    store(0);
    times[n] = horizon;
    for (std::size_t step = 0; step < n; ++step) {
        const double tau = static_cast<double>(step) * h;
        rhs(tau, y, k1);
        for (int j = 0; j < 2 * k; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        rhs(tau + 0.5 * h, tmp, k2);
        for (int j = 0; j < 2 * k; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        rhs(tau + 0.5 * h, tmp, k3);
        for (int j = 0; j < 2 * k; ++j) tmp[j] = y[j] + h * k3[j];
        rhs(tau + h, tmp, k4);
        for (int j = 0; j < 2 * k; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        store(step + 1);
    }
    times[0] = 0.0;
    return ValueSurfaceFull(model, params, horizon, std::move(times), std::move(d), std::move(c),
                            std::move(f));
}

inline double value_full(double t, double z, double s, int regime, const ValueSurfaceFull& surface) {
    if (!(z > 0.0)) throw std::domain_error("value_full: z must be > 0");
    const auto co = surface.at(t, regime);
    return std::log(z) + surface.params().r() * (surface.horizon() - t) + co.d * s * s + co.c * s +
           co.f;
}

/// Long-run mean under the stationary law, pi theta_1 + (1 - pi) theta_2 for K = 2.
inline double averaged_theta(const RegimeModel& model) {
    const Eigen::VectorXd pi = stationary_distribution(model);
    return pi.dot(model.theta());
}

/// Single-regime model carrying the averaged long-run mean.
inline RegimeModel averaged_model(const RegimeModel& model) {
    if (model.states() != 2) throw std::invalid_argument("averaged data requires K = 2");
    const Eigen::VectorXd pi = stationary_distribution(model);
    return RegimeModel::single_state(averaged_theta(model), pi.dot(model.mu()));
}

inline ValueSurfaceFull solve_averaged(const RegimeModel& model, const MarketParams& params,
                                       double horizon, std::size_t n_steps = 10000) {
    return solve_cf_odes(averaged_model(model), params, horizon, n_steps);
}

/// Value of the trader who uses the averaged long-run mean. `surface_k1` must
/// come from solve_averaged on the same model.
inline double value_averaged(double t, double z, double s, const RegimeModel& model,
                             const MarketParams& params, const ValueSurfaceFull& surface_k1) {
    if (model.states() != 2) throw std::invalid_argument("value_averaged requires K = 2");
    if (surface_k1.states() != 1) throw std::invalid_argument("value_averaged needs a K = 1 surface");
    if (std::abs(surface_k1.model().theta(0) - averaged_theta(model)) > 1e-12)
        throw std::invalid_argument("surface was not built from the averaged model");
    const auto& a = surface_k1.params();
    if (a.kappa() != params.kappa() || a.eta() != params.eta() || a.rho() != params.rho() ||
        a.sigma() != params.sigma() || a.epsilon() != params.epsilon() || a.r() != params.r())
        throw std::invalid_argument("surface was built with different market parameters");
    return value_full(t, z, s, 0, surface_k1);
}

/// E^pi[V(t, z, s, Y)] under the stationary law of the chain.
inline double value_stationary_mixture(double t, double z, double s, const ValueSurfaceFull& surface) {
    const Eigen::VectorXd pi = stationary_distribution(surface.model());
    double acc = 0.0;
    for (int i = 0; i < surface.states(); ++i) acc += pi(i) * value_full(t, z, s, i, surface);
    return acc;
}

}  // namespace rpairs

#endif  // REGIME_PAIRS_VALUE_FULL_HPP
