#ifndef REGIME_PAIRS_REGIME_MARKET_HPP
#define REGIME_PAIRS_REGIME_MARKET_HPP

/**
 * @file regime_market.hpp
 * @brief Joint simulation of the hidden chain, the spread, the log-return of
 *        stock 1 and the risk-penalized wealth Z under a given strategy.
 *
 * Discretization on a uniform grid t_k = k dt:
 *  - the chain is simulated exactly (exponential holding times) and sampled
 *    at grid points; the state is held constant over [t_k, t_{k+1});
 *  - S follows Euler-Maruyama with drift kappa (theta(Y) - S);
 *  - log Z is updated with the Ito-corrected drift
 *        h (kappa (theta - S) - eta^2/2 + rho sigma eta) + r - (1 + eps) eta^2 h^2 / 2
 *    plus eta h dW, so Z stays positive.
 * W = rho W1 + sqrt(1 - rho^2) W2 with W1, W2 independent.
 */

#include "regime_pairs/filtering.hpp"
#include "regime_pairs/model.hpp"
#include "regime_pairs/parallel.hpp"
#include "regime_pairs/strategy.hpp"

#include <boost/random/normal_distribution.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace rpairs {

using Engine = std::mt19937_64;

/// Piecewise-constant chain path on [0, horizon].
struct ChainPath {
    int initial_state = 0;
    std::vector<double> jump_times;  ///< strictly increasing, in (0, horizon]
    std::vector<int> states;         ///< state entered at each jump

    int state_at(double t) const {
        int s = initial_state;
        for (std::size_t k = 0; k < jump_times.size() && jump_times[k] <= t; ++k) s = states[k];
        return s;
    }
};

inline int draw_state(const Eigen::VectorXd& dist, Engine& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    double acc = 0.0;
    const int k = static_cast<int>(dist.size());
    for (int i = 0; i < k; ++i) {
        acc += dist(i);
        if (x < acc) return i;
    }
    for (int i = k - 1; i >= 0; --i)
        if (dist(i) > 0.0) return i;
    return k - 1;
}

/// Exact jump-by-jump sampler for the chain.
class ChainSampler {
public:
    ChainSampler(const RegimeModel& model, int initial_state, Engine& rng)
        : model_(&model), rng_(&rng), state_(initial_state) {
        schedule(0.0);
    }

    int state() const noexcept { return state_; }
    double next_jump() const noexcept { return next_; }

    /// Advances through all jumps at times <= t; returns the state at t.
    int advance_to(double t) {
        while (next_ <= t) {
            state_ = next_state();
            schedule(next_);
        }
        return state_;
    }

    /// Performs the next jump and returns its time.
    double jump() {
        const double at = next_;
        state_ = next_state();
        schedule(at);
        return at;
    }

private:
    void schedule(double from) {
        const double rate = -model_->rate(state_, state_);
        if (rate <= 0.0) {
            next_ = std::numeric_limits<double>::infinity();
            return;
        }
        std::exponential_distribution<double> hold(rate);
        next_ = from + hold(*rng_);
    }

    int next_state() {
        const double rate = -model_->rate(state_, state_);
        std::uniform_real_distribution<double> u(0.0, rate);
        const double x = u(*rng_);
        double acc = 0.0;
        int last = state_;
        for (int j = 0; j < model_->states(); ++j) {
            if (j == state_) continue;
            const double q = model_->rate(state_, j);
            if (q <= 0.0) continue;
            last = j;
            acc += q;
            if (x < acc) return j;
        }
        return last;
    }

    const RegimeModel* model_;
    Engine* rng_;
    int state_;
    double next_ = 0.0;
};

inline ChainPath simulate_chain(const RegimeModel& model, double horizon, Engine& rng,
                                int initial_state = -1) {
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_chain: horizon must be > 0");
    ChainPath path;
    path.initial_state = initial_state >= 0 ? initial_state : draw_state(model.initial_dist(), rng);
    ChainSampler sampler(model, path.initial_state, rng);
    while (sampler.next_jump() <= horizon) {
        const double t = sampler.jump();
        path.jump_times.push_back(t);
        path.states.push_back(sampler.state());
    }
    return path;
}

inline ChainPath simulate_chain(const RegimeModel& model, double horizon, std::uint64_t seed) {
    Engine rng(seed);
    return simulate_chain(model, horizon, rng);
}

/// Exact OU transition over dt within a constant-regime segment.
inline double exact_ou_step(double s, double theta_seg, double kappa, double eta, double dt,
                            double normal_draw) {
    if (!(dt > 0.0)) throw std::invalid_argument("exact_ou_step: dt must be > 0");
    const double decay = std::exp(-kappa * dt);
    const double sd = eta * std::sqrt(-std::expm1(-2.0 * kappa * dt) / (2.0 * kappa));
    return theta_seg + (s - theta_seg) * decay + sd * normal_draw;
}

/// Everything a single path needs besides its seed.
struct SimulationSetup {
    const RegimeModel* model = nullptr;
    const MarketParams* params = nullptr;
    const StrategySpec* strategy = nullptr;
    double s0 = 0.0;
    double z0 = 1.0;
    double horizon = 1.0;
    double dt = 1e-3;
    /// Fixed starting regime; when negative Y0 is drawn from the prior.
    int initial_regime = -1;
    /// Prior for Y0 and initial belief of the filter; defaults to the model's
    /// initial distribution.
    std::optional<BeliefState> prior;
    /// Positions are clipped to |h| <= h_max.
    double h_max = 1e4;
    /// Run the filter even when the strategy does not read it.
    bool track_belief = false;

    std::size_t steps() const {
        if (!(dt > 0.0) || !(horizon > 0.0))
            throw std::invalid_argument("simulation needs dt > 0 and horizon > 0");
        return static_cast<std::size_t>(std::max(1.0, std::ceil(horizon / dt - 1e-9)));
    }
};

/// State at grid point k, handed to path observers.
struct GridState {
    std::size_t k = 0;
    double t = 0.0;
    int regime = 0;
    double s = 0.0;
    double log_return = 0.0;  ///< cumulative R
    double log_wealth = 0.0;  ///< log Z
    double penalty = 0.0;     ///< running int eta^2 h^2 du
    double h = 0.0;           ///< position chosen at t (NaN at the terminal point)
    double dw1 = 0.0;         ///< W1 increment over [t_{k-1}, t_k]
    double dw = 0.0;          ///< W increment over [t_{k-1}, t_k]
    std::span<const double> belief{};
};

struct PathOutcome {
    bool valid = true;
    std::size_t steps = 0;
    std::size_t clipped_steps = 0;
    double log_wealth = 0.0;
    double spread = 0.0;
    int regime = 0;
};

/// Simulates one path, calling observer(const GridState&) at every grid point.
template <class Observer>
PathOutcome simulate_path(const SimulationSetup& setup, std::uint64_t path_seed,
                          Observer&& observer) {
    const RegimeModel& model = *setup.model;
    const MarketParams& prm = *setup.params;
    const StrategySpec& strategy = *setup.strategy;
    if (!strategy.dollar_neutral())
        throw std::invalid_argument("simulator only supports dollar-neutral strategies, got " +
                                    strategy.name());
    if (!(setup.z0 > 0.0)) throw std::invalid_argument("z0 must be > 0");
    const InformationFlag info = strategy.information();
    const bool filtering = info == InformationFlag::reads_belief || setup.track_belief;

    Engine chain_rng(derive_seed(path_seed, 0, 1));
    Engine noise_rng(derive_seed(path_seed, 0, 2));
    boost::random::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> belief;
    if (setup.prior) {
        if (setup.prior->size() != model.states())
            throw std::invalid_argument("prior size does not match model");
        belief.assign(setup.prior->values().begin(), setup.prior->values().end());
    } else {
        belief.assign(model.initial_dist().data(),
                      model.initial_dist().data() + model.initial_dist().size());
    }
    int y0 = setup.initial_regime;
    if (y0 >= model.states()) throw std::invalid_argument("initial regime out of range");
    if (y0 < 0) {
        Eigen::VectorXd dist = Eigen::Map<const Eigen::VectorXd>(belief.data(), model.states());
        y0 = draw_state(dist, chain_rng);
    }
    ChainSampler chain(model, y0, chain_rng);
    WonhamFilter filter(model, prm);

    const std::size_t n = setup.steps();
    const double dt = setup.horizon / static_cast<double>(n);
    const double sqdt = std::sqrt(dt);
    const double kappa = prm.kappa(), eta = prm.eta(), rho = prm.rho(), rho_bar = prm.rho_bar();
    const double offset = prm.drift_offset();
    const double curvature = prm.penalized_variance();

    PathOutcome out;
    out.steps = n;
    GridState g;
    g.regime = y0;
    g.s = setup.s0;
    g.log_wealth = std::log(setup.z0);

    for (std::size_t k = 0;; ++k) {
        g.k = k;
        g.t = static_cast<double>(k) * dt;
        g.regime = chain.advance_to(g.t);
        if (filtering) g.belief = belief;
        if (k == n) {
            g.h = std::numeric_limits<double>::quiet_NaN();
            observer(static_cast<const GridState&>(g));
            break;
        }

        Observables obs{g.s, -1, {}};
        if (info == InformationFlag::reads_chain) obs.regime = g.regime;
        if (info == InformationFlag::reads_belief) obs.belief = belief;
        double h = strategy.evaluate(obs, model, prm);
        if (std::abs(h) > setup.h_max) {
            h = std::copysign(setup.h_max, h);
            ++out.clipped_steps;
        }
        g.h = h;
        observer(static_cast<const GridState&>(g));

        const double z1 = normal(noise_rng);
        const double z2 = normal(noise_rng);
        const double dw1 = sqdt * z1;
        const double dw = rho * dw1 + rho_bar * sqdt * z2;
        const double theta = model.theta(g.regime);
        const double spread_drift = kappa * (theta - g.s);
        const double ds = spread_drift * dt + eta * dw;
        const double dr = model.mu(g.regime) * dt + prm.sigma() * dw1;

        g.log_wealth += (h * (spread_drift + offset) + prm.r() - 0.5 * curvature * h * h) * dt +
                        eta * h * dw;
        g.penalty += eta * eta * h * h * dt;
        g.log_return += dr;
        if (filtering) filter.update(belief, ObservationIncrement{dr, ds, dt}, g.s);
        g.s += ds;
        g.dw1 = dw1;
        g.dw = dw;

        if (!std::isfinite(g.s) || !std::isfinite(g.log_wealth)) {
            out.valid = false;
            break;
        }
    }
    out.log_wealth = g.log_wealth;
    out.spread = g.s;
    out.regime = g.regime;
    return out;
}

/// One simulated trajectory on the grid.
struct PathBundle {
    std::vector<double> times;
    std::vector<int> chain;
    std::vector<double> spread;
    std::vector<double> logret;
    std::vector<double> w1_increments;  ///< W1 increment ending at each grid point (0 at t0)
    std::vector<double> w_increments;   ///< W increment ending at each grid point (0 at t0)
    std::vector<double> wealth;
    std::vector<double> penalty_integral;
    std::vector<double> positions;      ///< h at each grid point (NaN at terminal)
    std::vector<double> beliefs;        ///< row-major K per grid point, empty if not filtered
    bool valid = true;
    std::size_t clipped_steps = 0;
};

struct PathSet {
    std::vector<PathBundle> paths;
    std::size_t invalid_paths = 0;
    std::size_t clipped_steps = 0;
};

inline PathBundle record_path(const SimulationSetup& setup, std::uint64_t path_seed) {
    PathBundle b;
    const std::size_t n = setup.steps() + 1;
    b.times.reserve(n);
    auto rec = [&](const GridState& g) {
        b.times.push_back(g.t);
        b.chain.push_back(g.regime);
        b.spread.push_back(g.s);
        b.logret.push_back(g.log_return);
        b.w1_increments.push_back(g.dw1);
        b.w_increments.push_back(g.dw);
        b.wealth.push_back(std::exp(g.log_wealth));
        b.penalty_integral.push_back(g.penalty);
        b.positions.push_back(g.h);
        b.beliefs.insert(b.beliefs.end(), g.belief.begin(), g.belief.end());
    };
    const PathOutcome o = simulate_path(setup, path_seed, rec);
    b.valid = o.valid;
    b.clipped_steps = o.clipped_steps;
    return b;
}

/// Simulates n_paths full trajectories. Path i uses derive_seed(seed, i), so
/// output does not depend on the thread count.
inline PathSet simulate_paths(const SimulationSetup& setup, std::size_t n_paths,
                              std::uint64_t seed, unsigned threads = 1) {
    if (n_paths < 1) throw std::invalid_argument("simulate_paths: n_paths must be >= 1");
    std::vector<PathBundle> all(n_paths);
    parallel_for(n_paths, threads,
                 [&](std::size_t i) { all[i] = record_path(setup, derive_seed(seed, i)); });
    PathSet out;
    for (auto& p : all) {
        out.clipped_steps += p.clipped_steps;
        if (!p.valid) {
            ++out.invalid_paths;
            continue;
        }
        out.paths.push_back(std::move(p));
    }
    return out;
}

}  // namespace rpairs

#endif  // REGIME_PAIRS_REGIME_MARKET_HPP
