#ifndef REGIME_PAIRS_VALUE_PARTIAL_HPP
#define REGIME_PAIRS_VALUE_PARTIAL_HPP

/**
 * @file value_partial.hpp
 * @brief Partial-information value function
 *
 *   V~(t, z, s, p) = log z + r (T - t) + d(t) s^2 + c~(t, p) s + f~(t, p),
 *
 * with p the filtered probability of regime 0. For K = 2 the coefficients
 * solve, in time-to-maturity tau,
 *
 *   c~_tau = a(p) c~_p + D(p)/2 c~_pp - kappa c~ + 2 kappa th(p) d - gamma(p)
 *   f~_tau = a(p) f~_p + D(p)/2 f~_pp + eta^2 d + kappa th(p) c~
 *            + (kappa th(p) + b)^2 / (2 eta^2 (1+eps)) + kappa (th_0 - th_1) p (1-p) c~_p
 *
 * where a(p) = q21 - (q12 + q21) p, D(p) = (nu1^2 + nu2^2) p^2 (1-p)^2,
 * th(p) = th_1 + (th_0 - th_1) p and gamma(p) = kappa (kappa th(p) + b) / (eta^2 (1+eps)).
 *
 * The explicit scheme upwinds a(p) c_p by the sign of a (forward difference
 * where a > 0, backward where a < 0) and uses central second differences. D
 * vanishes at p = 0 and p = 1, so boundary nodes need no extra condition.
 */

#include "regime_pairs/filtering.hpp"
#include "regime_pairs/model.hpp"
#include "regime_pairs/value_full.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpairs {

// ---------------------------------------------------------------------------
// General-K coefficients
// ---------------------------------------------------------------------------

struct GeneralPdeCoefficients {
    Eigen::MatrixXd alpha;  ///< alpha^{ij} = H^{(i,1)} H^{(j,1)} + H^{(i,2)} H^{(j,2)}
    Eigen::VectorXd beta;   ///< beta^i = rho H^{(i,1)} + sqrt(1 - rho^2) H^{(i,2)}
    double gamma = 0.0;     ///< kappa (kappa theta^T p + b) / (eta^2 (1+eps))
};

inline GeneralPdeCoefficients general_coeffs(std::span<const double> p, const RegimeModel& model,
                                             const MarketParams& params) {
    const FilterCoefficients h = filter_coefficients(p, model, params);
    const int k = model.states();
    GeneralPdeCoefficients out;
    out.alpha.resize(k, k);
    out.beta.resize(k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) out.alpha(i, j) = h.h1[i] * h.h1[j] + h.h2[i] * h.h2[j];
        out.beta(i) = params.rho() * h.h1[i] + params.rho_bar() * h.h2[i];
    }
    out.gamma = params.kappa() * (params.kappa() * model.theta_mean(p) + params.drift_offset()) /
                params.penalized_variance();
    return out;
}

inline GeneralPdeCoefficients general_coeffs(const BeliefState& p, const RegimeModel& model,
                                             const MarketParams& params) {
    return general_coeffs(p.values(), model, params);
}

struct PdeResidual {
    double c = 0.0;
    double f = 0.0;
};

/// Residuals of the general-K c/f system at (t, p) for candidate functions
/// c(t, p) and f(t, p) given on R^K (all derivatives by central differences in
/// the unconstrained coordinates p^1..p^K).
inline PdeResidual general_pde_residual(
    const std::function<double(double, std::span<const double>)>& c_fn,
    const std::function<double(double, std::span<const double>)>& f_fn, double t,
    std::span<const double> p, double horizon, const RegimeModel& model,
    const MarketParams& params, double ht = 1e-5, double hp = 1e-4) {
    const int k = model.states();
    const auto co = general_coeffs(p, model, params);
    std::vector<double> x(p.begin(), p.end());

    auto partial = [&](const auto& fn, int i) {
        const double x0 = x[i];
        x[i] = x0 + hp;
        const double up = fn(t, x);
        x[i] = x0 - hp;
        const double dn = fn(t, x);
        x[i] = x0;
        return (up - dn) / (2.0 * hp);
    };
    auto second = [&](const auto& fn, int i, int j) {
        if (i == j) {
            const double x0 = x[i];
            const double mid = fn(t, x);
            x[i] = x0 + hp;
            const double up = fn(t, x);
            x[i] = x0 - hp;
            const double dn = fn(t, x);
            x[i] = x0;
            return (up - 2.0 * mid + dn) / (hp * hp);
        }
        const double xi = x[i], xj = x[j];
        double acc = 0.0;
        for (int si : {1, -1})
            for (int sj : {1, -1}) {
                x[i] = xi + si * hp;
                x[j] = xj + sj * hp;
                acc += si * sj * fn(t, x);
            }
        x[i] = xi;
        x[j] = xj;
        return acc / (4.0 * hp * hp);
    };
    auto time_derivative = [&](const auto& fn) {
        const double lo = std::max(0.0, t - ht), hi = std::min(horizon, t + ht);
        return (fn(hi, x) - fn(lo, x)) / (hi - lo);
    };

    const double dd = d_closed_form(t, horizon, params);
    const double theta_bar = model.theta_mean(p);
    const double cv = c_fn(t, x);

    double diff_c = 0.0, diff_f = 0.0, drift_c = 0.0, drift_f = 0.0, cross = 0.0;
    for (int i = 0; i < k; ++i) {
        double flow = 0.0;
        for (int j = 0; j < k; ++j) flow += model.rate(j, i) * p[j];
        const double cp = partial(c_fn, i), fp = partial(f_fn, i);
        drift_c += cp * flow;
        drift_f += fp * flow;
        cross += cp * co.beta(i);
        for (int j = 0; j < k; ++j) {
            if (co.alpha(i, j) == 0.0) continue;
            diff_c += co.alpha(i, j) * second(c_fn, i, j);
            diff_f += co.alpha(i, j) * second(f_fn, i, j);
        }
    }
    const double lin = params.kappa() * theta_bar + params.drift_offset();
    PdeResidual r;
    r.c = time_derivative(c_fn) + 0.5 * diff_c + drift_c +
          params.kappa() * (2.0 * dd * theta_bar - cv) - co.gamma;
    r.f = time_derivative(f_fn) + 0.5 * diff_f + drift_f + params.eta() * cross +
          cv * params.kappa() * theta_bar + params.eta() * params.eta() * dd +
          lin * lin / (2.0 * params.penalized_variance());
    return r;
}

// ---------------------------------------------------------------------------
// Two-state explicit scheme
// ---------------------------------------------------------------------------

struct PdeGridSpec {
    std::size_t n_p = 201;             ///< belief nodes on [0, 1]
    double cfl = 0.9;                  ///< target CFL number (<= 0.9)
    std::size_t min_time_steps = 0;    ///< lower bound on N_t
    std::size_t max_stored_layers = 301;

    void validate() const {
        std::ostringstream err;
        if (n_p < 11) err << "n_p must be >= 11; ";
        if (!(cfl > 0.0 && cfl <= 0.9)) err << "cfl must lie in (0, 0.9]; ";
        if (max_stored_layers < 2) err << "max_stored_layers must be >= 2; ";
        if (!err.str().empty()) throw std::invalid_argument("invalid PdeGridSpec: " + err.str());
    }
};

/// Update weights of node k for c~: u_new = lower u_{k-1} + diag u_k + upper u_{k+1} + dtau * source.
/// The f~ equation has no -kappa f~ term, so its diagonal is diag + dtau * kappa.
struct StencilRow {
    double lower = 0.0;
    double diag = 0.0;
    double upper = 0.0;
};

/// Per-node rate |a|/dp + D/dp^2 + kappa; the CFL number is dtau times its maximum.
inline std::vector<double> stencil_rates(const RegimeModel& model, const MarketParams& params,
                                         std::size_t n_p) {
    const auto nu = two_state_reduce(model, params);
    const double nu2 = nu.nu1 * nu.nu1 + nu.nu2 * nu.nu2;
    const double dp = 1.0 / static_cast<double>(n_p - 1);
    std::vector<double> rates(n_p);
    for (std::size_t k = 0; k < n_p; ++k) {
        const double p = static_cast<double>(k) * dp;
        const double diff = nu2 * p * p * (1.0 - p) * (1.0 - p);
        rates[k] = std::abs(nu.drift(p)) / dp + diff / (dp * dp) + params.kappa();
    }
    return rates;
}

inline std::vector<StencilRow> assemble_stencil(const RegimeModel& model, const MarketParams& params,
                                                std::size_t n_p, double dtau) {
    const auto nu = two_state_reduce(model, params);
    const double nu2 = nu.nu1 * nu.nu1 + nu.nu2 * nu.nu2;
    const double dp = 1.0 / static_cast<double>(n_p - 1);
    std::vector<StencilRow> rows(n_p);
    for (std::size_t k = 0; k < n_p; ++k) {
        const double p = static_cast<double>(k) * dp;
        const double a = nu.drift(p);
        const double half_diff = 0.5 * nu2 * p * p * (1.0 - p) * (1.0 - p) / (dp * dp);
        StencilRow row;
        row.lower = dtau * half_diff;
        row.upper = dtau * half_diff;
        // a(0) = q21 >= 0 and a(1) = -q12 <= 0, so the upwind neighbour
        // always exists at the boundary nodes.
        if (a > 0.0)
            row.upper += dtau * a / dp;
        else
            row.lower -= dtau * a / dp;
        row.diag = 1.0 - row.lower - row.upper - dtau * params.kappa();
        rows[k] = row;
    }
    return rows;
}

/// Coefficient grids c~, f~ on stored layers (ascending t) x belief nodes.
class ValueSurfacePartial {
public:
    ValueSurfacePartial(RegimeModel model, MarketParams params, double horizon,
                        std::vector<double> times, std::size_t n_p, std::vector<double> c,
                        std::vector<double> f, std::size_t time_steps, double cfl_number)
        : model_(std::move(model)), params_(params), horizon_(horizon), times_(std::move(times)),
          n_p_(n_p), c_(std::move(c)), f_(std::move(f)), time_steps_(time_steps),
          cfl_number_(cfl_number) {}

    const RegimeModel& model() const noexcept { return model_; }
    const MarketParams& params() const noexcept { return params_; }
    double horizon() const noexcept { return horizon_; }
    const std::vector<double>& times() const noexcept { return times_; }
    std::size_t layers() const noexcept { return times_.size(); }
    std::size_t belief_nodes() const noexcept { return n_p_; }
    std::size_t time_steps() const noexcept { return time_steps_; }
    double cfl_number() const noexcept { return cfl_number_; }
    double belief(std::size_t k) const { return static_cast<double>(k) / static_cast<double>(n_p_ - 1); }
    double c(std::size_t n, std::size_t k) const { return c_[n * n_p_ + k]; }
    double f(std::size_t n, std::size_t k) const { return f_[n * n_p_ + k]; }

    struct Coefficients {
        double d, c, f;
    };

    /// Bilinear interpolation in (t, p); d is exact.
    Coefficients at(double t, double p) const {
        if (t < times_.front() || t > times_.back())
            throw std::out_of_range("time " + std::to_string(t) + " outside surface grid");
        if (!(p >= 0.0 && p <= 1.0)) throw std::out_of_range("belief " + std::to_string(p) + " outside [0, 1]");
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        std::size_t n = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
        n = std::min(n, times_.size() - 2);
        const double wt = (t - times_[n]) / (times_[n + 1] - times_[n]);
        const double x = p * static_cast<double>(n_p_ - 1);
        std::size_t k = std::min(static_cast<std::size_t>(x), n_p_ - 2);
        const double wp = x - static_cast<double>(k);
        auto blend = [&](const std::vector<double>& g) {
            const double lo = (1.0 - wp) * g[n * n_p_ + k] + wp * g[n * n_p_ + k + 1];
            const double hi = (1.0 - wp) * g[(n + 1) * n_p_ + k] + wp * g[(n + 1) * n_p_ + k + 1];
            return (1.0 - wt) * lo + wt * hi;
        };
        return {d_closed_form(t, horizon_, params_), blend(c_), blend(f_)};
    }

private:
    RegimeModel model_;
    MarketParams params_;
    double horizon_;
    std::vector<double> times_;
    std::size_t n_p_;
    std::vector<double> c_, f_;  // row-major [layer][node]
    std::size_t time_steps_;
    double cfl_number_;
};

/// Explicit upwind solve of the two-state c~/f~ system. The time step is set
/// by the CFL target; c~ is advanced first on each step and f~ uses that
/// layer's c~ and c~_p.
inline ValueSurfacePartial solve_two_state_pde(const RegimeModel& model, const MarketParams& params,
                                               double horizon, const PdeGridSpec& grid = {}) {
    if (model.states() != 2) throw std::invalid_argument("solve_two_state_pde requires K = 2");
    if (!(horizon > 0.0)) throw std::invalid_argument("solve_two_state_pde: horizon must be > 0");
    grid.validate();
    const std::size_t np = grid.n_p;
    const double dp = 1.0 / static_cast<double>(np - 1);

    const auto rates = stencil_rates(model, params, np);
    const double max_rate = *std::max_element(rates.begin(), rates.end());
    std::size_t nt = static_cast<std::size_t>(std::ceil(horizon * max_rate / grid.cfl));
    nt = std::max({nt, grid.min_time_steps, std::size_t{1}});
    const std::size_t stride = (nt + grid.max_stored_layers - 2) / (grid.max_stored_layers - 1);
    nt = ((nt + stride - 1) / stride) * stride;
    const double dtau = horizon / static_cast<double>(nt);
    const double cfl_number = dtau * max_rate;

    const auto rows = assemble_stencil(model, params, np, dtau);
    const double kap = params.kappa();
    const double eta2 = params.eta() * params.eta();
    const double b = params.drift_offset();
    const double v = params.penalized_variance();
    const double dtheta = model.theta(0) - model.theta(1);

    std::vector<double> theta_p(np), gamma(np), f_const(np), cross(np);
    for (std::size_t k = 0; k < np; ++k) {
        const double p = static_cast<double>(k) * dp;
        theta_p[k] = model.theta(1) + dtheta * p;
        const double lin = kap * theta_p[k] + b;
        gamma[k] = kap * lin / v;
        f_const[k] = lin * lin / (2.0 * v);
        cross[k] = kap * dtheta * p * (1.0 - p);
    }

    const std::size_t n_layers = nt / stride + 1;
    std::vector<double> times(n_layers), cs(n_layers * np), fs(n_layers * np);
    std::vector<double> c(np, 0.0), f(np, 0.0), cn(np), fn(np);

    auto store = [&](std::size_t step) {
        const std::size_t layer = n_layers - 1 - step / stride;
        times[layer] = horizon - static_cast<double>(step) * dtau;
        std::copy(c.begin(), c.end(), cs.begin() + static_cast<std::ptrdiff_t>(layer * np));
        std::copy(f.begin(), f.end(), fs.begin() + static_cast<std::ptrdiff_t>(layer * np));
    };
    store(0);

    for (std::size_t step = 0; step < nt; ++step) {
        const double tau = static_cast<double>(step) * dtau;
        const double dd = d_closed_form(horizon - tau, horizon, params);
        for (std::size_t k = 0; k < np; ++k) {
            const auto& row = rows[k];
            const double cl = k > 0 ? c[k - 1] : 0.0, cr = k + 1 < np ? c[k + 1] : 0.0;
            const double fl = k > 0 ? f[k - 1] : 0.0, fr = k + 1 < np ? f[k + 1] : 0.0;
            double cp = 0.0;
            if (k > 0 && k + 1 < np) cp = (cr - cl) / (2.0 * dp);
            cn[k] = row.lower * cl + row.diag * c[k] + row.upper * cr +
                    dtau * (2.0 * kap * theta_p[k] * dd - gamma[k]);
            fn[k] = row.lower * fl + (row.diag + dtau * kap) * f[k] + row.upper * fr +
                    dtau * (eta2 * dd + kap * theta_p[k] * c[k] + f_const[k] + cross[k] * cp);
            if (!std::isfinite(cn[k]) || !std::isfinite(fn[k])) {
                std::ostringstream msg;
                msg << "non-finite PDE node at tau = " << tau + dtau << ", p = " << static_cast<double>(k) * dp;
                throw std::runtime_error(msg.str());
            }
        }
        c.swap(cn);
        f.swap(fn);
        if ((step + 1) % stride == 0) store(step + 1);
    }
    times.front() = 0.0;
    return ValueSurfacePartial(model, params, horizon, std::move(times), np, std::move(cs),
                               std::move(fs), nt, cfl_number);
}

inline double value_partial(double t, double z, double s, double p, const ValueSurfacePartial& surface) {
    if (!(z > 0.0)) throw std::domain_error("value_partial: z must be > 0");
    const auto co = surface.at(t, p);
    return std::log(z) + surface.params().r() * (surface.horizon() - t) + co.d * s * s + co.c * s + co.f;
}

/// V~(t, 1, s, p) - V_bar(t, 1, s) at every belief node of the surface, with
/// V_bar from the averaged-data surface (solve_averaged).
inline std::vector<double> gains_from_filtering(const ValueSurfacePartial& surface,
                                                const ValueSurfaceFull& averaged, double s, double t) {
    if (std::abs(surface.horizon() - averaged.horizon()) > 1e-12)
        throw std::invalid_argument("gains_from_filtering: surfaces have different horizons");
    const double v_bar = value_averaged(t, 1.0, s, surface.model(), surface.params(), averaged);
    std::vector<double> out(surface.belief_nodes());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = value_partial(t, 1.0, s, surface.belief(k), surface) - v_bar;
    return out;
}

inline std::vector<double> gains_from_filtering(const ValueSurfacePartial& surface, const RegimeModel& model,
                                                const MarketParams& params, double s, double t) {
    const auto averaged = solve_averaged(model, params, surface.horizon());
    return gains_from_filtering(surface, averaged, s, t);
}

}  // namespace rpairs

#endif  // REGIME_PAIRS_VALUE_PARTIAL_HPP
