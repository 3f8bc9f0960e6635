#ifndef REGIME_PAIRS_ACCEPTANCE_HPP
#define REGIME_PAIRS_ACCEPTANCE_HPP

// The twelve end-to-end acceptance checks. Each returns a pass flag and a
// one-line summary of the numbers behind the verdict. Shared by the
// acceptance test binary and the `accept` subcommand.

#include "regime_pairs/filtering.hpp"
#include "regime_pairs/model.hpp"
#include "regime_pairs/presets.hpp"
#include "regime_pairs/regime_market.hpp"
#include "regime_pairs/strategy.hpp"
#include "regime_pairs/value_full.hpp"
#include "regime_pairs/value_partial.hpp"
#include "regime_pairs/verify_mc.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace rpairs::acceptance {

struct Options {
    std::size_t n_paths = 100000;
    unsigned threads = 0;
    std::uint64_t seed = 20240601;
    std::vector<int> only;  ///< empty: run all
};

struct Result {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

namespace detail {

inline std::string num(double x, int prec = 6) {
    std::ostringstream o;
    o.precision(prec);
    o << x;
    return o.str();
}

inline double round2(double x) { return std::round(x * 100.0) / 100.0; }

/// Max-norm differences of c, f and V(s_ref) between N_p = 101/201/401
/// surfaces sharing one time grid; compared on the coarsest nodes.
struct ConvergenceStudy {
    double c_coarse = 0.0, c_fine = 0.0;  ///< |101 - 201|, |201 - 401|
    double f_coarse = 0.0, f_fine = 0.0;
    double v_coarse = 0.0, v_fine = 0.0;
    std::size_t time_steps = 0;
};

inline ConvergenceStudy convergence_study(const RegimeModel& model, const MarketParams& params, double horizon,
                                          double s_ref) {
    const auto rates = stencil_rates(model, params, 401);
    const double max_rate = *std::max_element(rates.begin(), rates.end());
    const auto nt = static_cast<std::size_t>(std::ceil(horizon * max_rate / 0.9));
    std::vector<ValueSurfacePartial> s;
    for (std::size_t np : {101, 201, 401}) {
        PdeGridSpec g;
        g.n_p = np;
        g.min_time_steps = nt;
        s.push_back(solve_two_state_pde(model, params, horizon, g));
    }
    ConvergenceStudy out;
    out.time_steps = s[2].time_steps();
    for (std::size_t n = 0; n < s[0].layers(); ++n) {
        const double t = s[0].times()[n];
        const double d = d_closed_form(t, horizon, params);
        for (std::size_t k = 0; k < 101; ++k) {
            const double c0 = s[0].c(n, k), c1 = s[1].c(n, 2 * k), c2 = s[2].c(n, 4 * k);
            const double f0 = s[0].f(n, k), f1 = s[1].f(n, 2 * k), f2 = s[2].f(n, 4 * k);
            out.c_coarse = std::max(out.c_coarse, std::abs(c0 - c1));
            out.c_fine = std::max(out.c_fine, std::abs(c1 - c2));
            out.f_coarse = std::max(out.f_coarse, std::abs(f0 - f1));
            out.f_fine = std::max(out.f_fine, std::abs(f1 - f2));
            auto v = [&](double c, double f) { return d * s_ref * s_ref + c * s_ref + f; };
            out.v_coarse = std::max(out.v_coarse, std::abs(v(c0, f0) - v(c1, f1)));
            out.v_fine = std::max(out.v_fine, std::abs(v(c1, f1) - v(c2, f2)));
        }
    }
    return out;
}

}  // namespace detail

// 1 ------------------------------------------------------------------------
inline Result stationary_constants() {
    Result r{1, "stationary and averaged constants", false, "", 0.0};
    const auto model = presets::Fig2::model();
    const double pi = stationary_distribution(model)(0);
    const double theta_bar = averaged_theta(model);
    r.passed = detail::round2(pi) == 0.67 && detail::round2(theta_bar) == 0.27;
    r.detail = "pi = " + detail::num(pi) + " (0.67), theta_bar = " + detail::num(theta_bar) + " (0.27)";
    return r;
}

// 2 ------------------------------------------------------------------------
inline Result d_ode_residual(std::uint64_t seed) {
    Result r{2, "d(t) satisfies its ODE", false, "", 0.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        const MarketParams p({0.1 + 4.9 * u(rng), 0.1 + 0.9 * u(rng), 0.2, 0.0, 0.0, 2.0 * u(rng)});
        const double horizon = 0.1 + 4.9 * u(rng);
        const double forcing = p.kappa() * p.kappa() / (2.0 * p.penalized_variance());
        for (int k = 0; k < 1000; ++k) {
            const double t = horizon * u(rng);
            // complex-step derivative: exact to rounding, no cancellation
            const double h = 1e-30;
            const double dt = d_closed_form(std::complex<double>(t, h), horizon, p).imag() / h;
            const double d = d_closed_form(t, horizon, p);
            worst = std::max(worst, std::abs(dt - 2.0 * p.kappa() * d + forcing));
        }
    }
    r.passed = worst < 1e-10;
    r.detail = "max |residual| = " + detail::num(worst, 3) + " over 20 x 1000 points (< 1e-10)";
    return r;
}

// 3 ------------------------------------------------------------------------
inline Result ode_mc_agreement(const Options& opt) {
    Result r{3, "full-information ODE vs Monte Carlo", false, "", 0.0};
    const auto model = presets::Fig1::model();
    const auto params = presets::Fig1::market();
    const double horizon = 3.0;
    const auto surface = solve_cf_odes(model, params, horizon);
    const StrategySpec optimal = StrategySpec::full_info_optimal();
    McSettings mc;
    mc.n_paths = opt.n_paths;
    mc.threads = opt.threads;
    const std::vector<double> taus{1.0, 3.0};
    int checks = 0, passed = 0;
    double worst = 0.0;
    bool unreliable = false;
    for (double s : presets::Fig1::spreads())
        for (int i = 0; i < 2; ++i) {
            mc.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(10 * i) + static_cast<std::uint64_t>(s * 10), 3);
            const auto wealth = estimate_value_wealth(optimal, model, params, s, StartState{i}, taus, mc);
            mc.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(10 * i) + static_cast<std::uint64_t>(s * 10), 4);
            const auto fk = estimate_value_feynman_kac(model, params, s, i, taus, mc);
            for (std::size_t j = 0; j < taus.size(); ++j) {
                const double v = value_full(horizon - taus[j], 1.0, s, i, surface);
                const double zw = std::abs(v - wealth[j].mean) / wealth[j].std_error;
                const double zf = std::abs(v - params.r() * taus[j] - fk[j].mean) / fk[j].std_error;
                unreliable = unreliable || wealth[j].unreliable;
                worst = std::max({worst, zw, zf});
                checks += 2;
                passed += (zw <= 3.0) + (zf <= 3.0);
            }
        }
    r.passed = passed == checks && !unreliable;
    r.detail = std::to_string(passed) + "/" + std::to_string(checks) + " within 3 stderr, worst |diff|/stderr = " +
               detail::num(worst, 3) + ", " + std::to_string(opt.n_paths) + " paths";
    return r;
}

// 4 ------------------------------------------------------------------------
inline Result figure1_ordering() {
    Result r{4, "figure-1 orderings and crossing", false, "", 0.0};
    const auto params = presets::Fig1::market();
    const double horizon = presets::Fig1::horizon;
    bool dominance = true;
    std::vector<double> crossing;
    for (double q12 : {0.7, 2.0}) {
        const auto surface = solve_cf_odes(presets::Fig1::model(q12), params, horizon);
        double first_cross = -1.0;
        double prev_tau = 0.0, prev_gap = 0.0;
        for (std::size_t n = surface.size() - 1; n-- > 0;) {
            const double t = surface.times()[n];
            const double tau = horizon - t;
            if (q12 == 0.7) {
                dominance = dominance && value_full(t, 1, 0.1, 1, surface) > value_full(t, 1, 0.1, 0, surface);
                dominance = dominance && value_full(t, 1, 0.7, 0, surface) > value_full(t, 1, 0.7, 1, surface);
            }
            const double gap = value_full(t, 1, 0.3, 0, surface) - value_full(t, 1, 0.3, 1, surface);
            if (first_cross < 0.0 && n + 2 < surface.size() && (gap > 0.0) != (prev_gap > 0.0))
                first_cross = prev_tau + (tau - prev_tau) * prev_gap / (prev_gap - gap);
            prev_tau = tau;
            prev_gap = gap;
        }
        crossing.push_back(first_cross);
    }
    const bool crosses = crossing[0] > 0.0 && crossing[1] > 0.0;
    const bool moves_right = crosses && crossing[1] > crossing[0];
    r.passed = dominance && crosses && moves_right;
    r.detail = std::string("dominance at s=0.1/0.7 ") + (dominance ? "holds" : "fails") +
               "; s=0.3 crossing at T-t = " + detail::num(crossing[0], 4) + " (q12=0.7), " +
               detail::num(crossing[1], 4) + " (q12=2)";
    return r;
}

// 5 ------------------------------------------------------------------------
inline Result markov_vs_averaged() {
    Result r{5, "Markov mixture dominates averaged data", false, "", 0.0};
    const auto model = presets::Fig2::model();
    const auto params = presets::Fig2::market();
    const double horizon = presets::Fig2::horizon;
    const auto surface = solve_cf_odes(model, params, horizon);
    const auto averaged = solve_averaged(model, params, horizon);
    double min_gap = 1e300;
    std::size_t nodes = 0, violations = 0;
    for (std::size_t n = 0; n + 1 < surface.size(); ++n) {
        const double t = surface.times()[n];
        for (int j = 0; j <= 150; ++j) {
            const double s = presets::Fig2::s_min + (presets::Fig2::s_max - presets::Fig2::s_min) * j / 150.0;
            const double gap = value_stationary_mixture(t, 1, s, surface) - value_averaged(t, 1, s, model, params, averaged);
            min_gap = std::min(min_gap, gap);
            ++nodes;
            violations += !(gap > 0.0);
        }
    }
    r.passed = violations == 0;
    r.detail = std::to_string(nodes) + " nodes, " + std::to_string(violations) + " violations, min gap = " +
               detail::num(min_gap, 3);
    return r;
}

// 6 ------------------------------------------------------------------------
inline Result filter_properties(std::uint64_t seed) {
    Result r{6, "filter step properties", false, "", 0.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z(0.0, 1.0);
    std::exponential_distribution<double> e(1.0);

    auto random_model = [&](int k, bool degenerate) {
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j)
                if (i != j) q(i, j) = 3.0 * u(rng);
            q(i, i) = -q.row(i).sum();
        }
        Eigen::VectorXd theta(k), mu(k);
        for (int i = 0; i < k; ++i) {
            theta(i) = degenerate ? 0.25 : 2.0 * u(rng) - 1.0;
            mu(i) = degenerate ? 0.1 : 2.0 * u(rng) - 1.0;
        }
        return RegimeModel(q, theta, mu, Eigen::VectorXd::Constant(k, 1.0 / k));
    };
    auto random_params = [&] {
        return MarketParams({0.2 + 2.0 * u(rng), 0.05 + 0.5 * u(rng), 0.05 + 0.5 * u(rng), 1.8 * u(rng) - 0.9, 0.0, 0.0});
    };
    auto random_belief = [&](int k) {
        std::vector<double> p(k);
        double total = 0.0;
        for (auto& v : p) total += (v = e(rng));
        for (auto& v : p) v /= total;
        return BeliefState(p);
    };
    auto random_obs = [&](const RegimeModel& m, const MarketParams& prm, double s, double dt) {
        const int y = static_cast<int>(u(rng) * m.states());
        const double dw1 = std::sqrt(dt) * z(rng);
        const double dw = prm.rho() * dw1 + prm.rho_bar() * std::sqrt(dt) * z(rng);
        return ObservationIncrement{m.mu(y) * dt + prm.sigma() * dw1,
                                    prm.kappa() * (m.theta(y) - s) * dt + prm.eta() * dw, dt};
    };

    double simplex_err = 0.0;
    for (int call = 0; call < 100000; ++call) {
        const int k = 2 + call % 3;
        const auto m = random_model(k, false);
        const auto prm = random_params();
        const double s = z(rng), dt = std::pow(10.0, -4.0 + 2.0 * u(rng));
        const auto next = filter_step(random_belief(k), random_obs(m, prm, s, dt), m, prm, s);
        double total = 0.0;
        for (int i = 0; i < k; ++i) {
            if (next[i] < 0.0) simplex_err = std::max(simplex_err, -next[i]);
            total += next[i];
        }
        simplex_err = std::max(simplex_err, std::abs(total - 1.0));
    }

    double kolmogorov_err = 0.0;
    for (int call = 0; call < 10000; ++call) {
        const int k = 2 + call % 3;
        const auto m = random_model(k, true);
        const auto prm = random_params();
        const auto p = random_belief(k);
        const double s = z(rng), dt = 1e-3;
        const auto next = filter_step(p, random_obs(m, prm, s, dt), m, prm, s);
        for (int i = 0; i < k; ++i) {
            double expected = p[i];
            for (int j = 0; j < k; ++j) expected += m.rate(j, i) * p[j] * dt;
            kolmogorov_err = std::max(kolmogorov_err, std::abs(next[i] - expected));
        }
    }

    double reduced_err = 0.0;
    for (int call = 0; call < 10000; ++call) {
        const auto m = random_model(2, false);
        const auto prm = random_params();
        const auto nu = two_state_reduce(m, prm);
        const double p = u(rng), s = z(rng), dt = 1e-3;
        const auto obs = random_obs(m, prm, s, dt);
        const auto full = filter_step(BeliefState::two_state(p), obs, m, prm, s);
        reduced_err = std::max(reduced_err, std::abs(full[0] - two_state_filter_step(p, obs, m, prm, s, nu)));
    }

    r.passed = simplex_err <= 1e-10 && kolmogorov_err <= 1e-14 && reduced_err <= 1e-12;
    r.detail = "simplex err " + detail::num(simplex_err, 3) + " (1e-10), Kolmogorov err " +
               detail::num(kolmogorov_err, 3) + " (1e-14), reduced err " + detail::num(reduced_err, 3) + " (1e-12)";
    return r;
}

// 7 ------------------------------------------------------------------------
inline Result filter_mean_dynamics(const Options& opt) {
    Result r{7, "filter mean follows the chain law", false, "", 0.0};
    const auto model = presets::Fig4::model(0.9);
    const auto params = presets::Fig4::market();
    const StrategySpec idle = StrategySpec::constant(0.0);
    SimulationSetup setup;
    setup.model = &model;
    setup.params = &params;
    setup.strategy = &idle;
    setup.s0 = presets::Fig4::s;
    setup.horizon = 2.0;
    setup.dt = 1e-3;
    setup.track_belief = true;
    const std::size_t n_paths = std::max<std::size_t>(opt.n_paths / 10, 100);
    const int n_checks = 10;
    const std::size_t every = setup.steps() / n_checks;
    std::vector<double> samples(n_paths * n_checks, 0.0);
    parallel_for(n_paths, opt.threads, [&](std::size_t i) {
        simulate_path(setup, derive_seed(opt.seed, i, 7), [&](const GridState& g) {
            if (g.k > 0 && g.k % every == 0) samples[i * n_checks + g.k / every - 1] = g.belief[0];
        });
    });
    int ok = 0;
    double worst = 0.0;
    const double dt = setup.horizon / static_cast<double>(setup.steps());
    for (int c = 0; c < n_checks; ++c) {
        const double t = static_cast<double>((c + 1) * every) * dt;
        const Eigen::MatrixXd qt = model.generator().transpose() * t;
        const Eigen::VectorXd law = qt.exp() * model.initial_dist();
        double mean = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i) mean += samples[i * n_checks + c];
        mean /= static_cast<double>(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) ss += std::pow(samples[i * n_checks + c] - mean, 2);
        const double se = std::sqrt(ss / static_cast<double>(n_paths - 1) / static_cast<double>(n_paths));
        const double zscore = std::abs(mean - law(0)) / se;
        worst = std::max(worst, zscore);
        ok += zscore <= 3.0;
    }
    r.passed = ok == n_checks;
    r.detail = std::to_string(ok) + "/" + std::to_string(n_checks) + " checkpoints within 3 stderr, worst " +
               detail::num(worst, 3) + ", " + std::to_string(n_paths) + " paths";
    return r;
}

// 8 ------------------------------------------------------------------------
inline Result pde_mc_agreement(const Options& opt) {
    Result r{8, "partial-information PDE vs Monte Carlo", false, "", 0.0};
    const auto model = presets::Fig4::model();
    const auto params = presets::Fig4::market();
    const double horizon = 1.0, s = presets::Fig4::s;
    PdeGridSpec g201, g401;
    g401.n_p = 401;
    const auto surface = solve_two_state_pde(model, params, horizon, g201);
    const auto fine = solve_two_state_pde(model, params, horizon, g401);
    McSettings mc;
    mc.n_paths = opt.n_paths;
    mc.threads = opt.threads;
    const StrategySpec strategy = StrategySpec::partial_info_optimal();
    int ok = 0;
    std::ostringstream detail;
    for (double p0 : {0.1, 0.5, 0.9}) {
        mc.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(p0 * 10), 8);
        const auto est = estimate_value_wealth(strategy, model, params, 0.0, s, StartState{BeliefState::two_state(p0)},
                                               horizon, mc);
        const double v = value_partial(0.0, 1.0, s, p0, surface);
        const double allowance = 2.0 * std::abs(v - value_partial(0.0, 1.0, s, p0, fine));
        const double diff = std::abs(v - est.mean);
        const bool pass = diff <= 3.0 * est.std_error + allowance && !est.unreliable;
        ok += pass;
        detail << "p0=" << p0 << ": |diff| " << detail::num(diff, 3) << " vs 3se " << detail::num(3 * est.std_error, 3)
               << " + grid " << detail::num(allowance, 3) << "; ";
    }
    r.passed = ok == 3;
    r.detail = detail.str() + std::to_string(opt.n_paths) + " paths";
    return r;
}

// 9 ------------------------------------------------------------------------
inline Result gains_shape() {
    Result r{9, "gains-from-filtering shape", false, "", 0.0};
    const auto model = presets::Fig4::model();
    const auto params = presets::Fig4::market();
    const double horizon = presets::Fig4::horizon, s = presets::Fig4::s;
    const auto study = detail::convergence_study(model, params, horizon, s);
    const double allowance = 2.0 * study.v_fine;
    const auto surface = solve_two_state_pde(model, params, horizon);
    const auto averaged = solve_averaged(model, params, horizon);
    const std::size_t np = surface.belief_nodes();
    const auto node = [&](double p) { return static_cast<std::size_t>(std::llround(p * static_cast<double>(np - 1))); };
    double min_gain = 1e300, prev_max = -1e300;
    bool edges = true, monotone = true;
    for (std::size_t n = surface.layers(); n-- > 0;) {
        const double t = surface.times()[n];
        const auto g = gains_from_filtering(surface, averaged, s, t);
        min_gain = std::min(min_gain, *std::min_element(g.begin(), g.end()));
        if (horizon - t >= 0.5 - 1e-12)
            edges = edges && g[node(0.05)] > g[node(0.5)] && g[node(0.95)] > g[node(0.5)];
        const double mx = *std::max_element(g.begin(), g.end());
        monotone = monotone && mx >= prev_max - 1e-12;
        prev_max = mx;
    }
    const bool nonneg = min_gain >= -allowance;
    r.passed = nonneg && edges && monotone;
    r.detail = "min gain " + detail::num(min_gain, 3) + " (>= -" + detail::num(allowance, 3) + "), edges > centre " +
               (edges ? "yes" : "no") + ", max gain nondecreasing " + (monotone ? "yes" : "no") + ", max gain at T-t=3: " +
               detail::num(prev_max, 4);
    return r;
}

// 10 -----------------------------------------------------------------------
inline Result certainty_equivalence(std::uint64_t seed) {
    Result r{10, "certainty equivalence", false, "", 0.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto two = presets::Fig1::model();
    Eigen::MatrixXd q(3, 3);
    q << -1.0, 0.6, 0.4, 0.3, -0.5, 0.2, 1.0, 1.0, -2.0;
    Eigen::Vector3d theta(0.1, 0.6, -0.2), mu(0.2, 1.0, 0.5), pi(0.2, 0.3, 0.5);
    const RegimeModel three(q, theta, mu, pi);
    const auto params = presets::Fig1::market();
    double worst = 0.0;
    for (int draw = 0; draw < 1000; ++draw) {
        const RegimeModel& m = draw % 2 ? three : two;
        std::vector<double> p(m.states());
        double total = 0.0;
        for (auto& v : p) total += (v = -std::log(1.0 - u(rng)));
        for (auto& v : p) v /= total;
        const double s = 2.0 * u(rng) - 0.5;
        double mix = 0.0;
        for (int i = 0; i < m.states(); ++i) mix += p[i] * h_full(s, i, m, params);
        worst = std::max(worst, std::abs(h_partial(s, p, m, params) - mix));
    }
    r.passed = worst <= 1e-12;
    r.detail = "max |h_partial - sum p h_full| = " + detail::num(worst, 3) + " over 1000 draws (1e-12)";
    return r;
}

// 11 -----------------------------------------------------------------------
inline Result suboptimality(const Options& opt) {
    Result r{11, "suboptimality scan", false, "", 0.0};
    const auto model = presets::Fig1::model();
    const auto params = presets::Fig1::market();
    const double tau = 3.0, s = 0.3;
    const std::vector<double> deltas{0.0, -0.25, 0.25, -0.5, 0.5};
    McSettings mc;
    mc.n_paths = opt.n_paths;
    mc.threads = opt.threads;
    mc.seed = derive_seed(opt.seed, 0, 11);
    const auto rows = suboptimality_scan(StrategySpec::full_info_optimal(), deltas, model, params, 0.0, s,
                                         StartState{0}, tau, mc);
    bool max_at_zero = true;
    for (const auto& row : rows)
        if (row.delta != 0.0) max_at_zero = max_at_zero && row.estimate.mean < rows[0].estimate.mean;
    // symmetric pairs cancel the term linear in delta
    const double loss_small = 0.5 * (rows[1].loss + rows[2].loss);
    const double loss_large = 0.5 * (rows[3].loss + rows[4].loss);
    const double ratio = loss_large / loss_small;
    const double predicted = params.penalized_variance() * 0.25 * tau / 2.0;
    r.passed = max_at_zero && ratio >= 3.2 && ratio <= 4.8;
    r.detail = std::string("max at 0 ") + (max_at_zero ? "yes" : "no") + ", loss(0.5) = " + detail::num(loss_large, 4) +
               " (predicted " + detail::num(predicted, 4) + "), ratio = " + detail::num(ratio, 4) +
               ", one-sided ratio = " + detail::num(rows[4].loss / rows[2].loss, 4);
    return r;
}

// 12 -----------------------------------------------------------------------
inline Result self_convergence() {
    Result r{12, "PDE self-convergence in N_p", false, "", 0.0};
    const auto study = detail::convergence_study(presets::Fig4::model(), presets::Fig4::market(),
                                                 presets::Fig4::horizon, presets::Fig4::s);
    const bool c_ok = study.c_fine <= 2.0 * study.c_coarse;
    const bool f_ok = study.f_fine <= 2.0 * study.f_coarse;
    r.passed = c_ok && f_ok;
    r.detail = "c: |201-401| " + detail::num(study.c_fine, 3) + " vs |101-201| " + detail::num(study.c_coarse, 3) +
               "; f: " + detail::num(study.f_fine, 3) + " vs " + detail::num(study.f_coarse, 3) + "; N_t = " +
               std::to_string(study.time_steps);
    return r;
}

inline std::vector<Result> run(const Options& opt, const std::function<void(const Result&)>& on_result = {}) {
    using Clock = std::chrono::steady_clock;
    const std::vector<std::function<Result()>> all{
        [] { return stationary_constants(); },
        [&] { return d_ode_residual(derive_seed(opt.seed, 2)); },
        [&] { return ode_mc_agreement(opt); },
        [] { return figure1_ordering(); },
        [] { return markov_vs_averaged(); },
        [&] { return filter_properties(derive_seed(opt.seed, 6)); },
        [&] { return filter_mean_dynamics(opt); },
        [&] { return pde_mc_agreement(opt); },
        [] { return gains_shape(); },
        [&] { return certainty_equivalence(derive_seed(opt.seed, 10)); },
        [&] { return suboptimality(opt); },
        [] { return self_convergence(); },
    };
    std::vector<Result> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
        const auto start = Clock::now();
        Result res;
        try {
            res = all[i]();
        } catch (const std::exception& e) {
            res = Result{id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what(), 0.0};
        }
        res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (on_result) on_result(res);
        out.push_back(res);
    }
    return out;
}

inline std::string format(const Result& r) {
    std::ostringstream o;
    o << "[" << (r.passed ? "PASS" : "FAIL") << "] " << (r.id < 10 ? " " : "") << r.id << ". " << r.title << ": "
      << r.detail << " (" << detail::num(r.seconds, 3) << " s)";
    return o.str();
}

}  // namespace rpairs::acceptance

#endif  // REGIME_PAIRS_ACCEPTANCE_HPP
