#ifndef REGIME_PAIRS_STRATEGY_HPP
#define REGIME_PAIRS_STRATEGY_HPP

/**
 * @file strategy.hpp
 * @brief Optimal and baseline fractions of wealth h held long in stock 1
 *        (and short in stock 2) for the risk-penalized log-utility trader.
 */

#include "regime_pairs/filtering.hpp"
#include "regime_pairs/model.hpp"

#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>

namespace rpairs {

/// Full-information optimum
///   h* = (kappa (theta_i - s) / eta^2 + rho sigma / eta - 1/2) / (1 + eps).
inline double h_full(double s, int regime, const RegimeModel& model,
                     const MarketParams& params) {
    const double eta = params.eta();
    return (params.kappa() * (model.theta(regime) - s) / (eta * eta) +
            params.rho() * params.sigma() / eta - 0.5) /
           (1.0 + params.epsilon());
}

/// Partial-information optimum: theta_i replaced by theta^T p.
inline double h_partial(double s, std::span<const double> p, const RegimeModel& model,
                        const MarketParams& params) {
    const double eta = params.eta();
    return (params.kappa() * (model.theta_mean(p) - s) / (eta * eta) +
            params.rho() * params.sigma() / eta - 0.5) /
           (1.0 + params.epsilon());
}

inline double h_partial(double s, const BeliefState& p, const RegimeModel& model,
                        const MarketParams& params) {
    return h_partial(s, p.values(), model, params);
}

/// Optimum under the beta-neutral constraint beta1 h1 + beta2 h2 = 0.
inline double h_beta_neutral(double s, int regime, const RegimeModel& model,
                             const MarketParams& params, double beta1, double beta2) {
    const double eta = params.eta(), sigma = params.sigma();
    const double base = sigma * (beta2 - beta1) - beta1 * eta;
    const double denom = base * base;
    if (denom == 0.0) {
        std::ostringstream msg;
        msg << "beta-neutral strategy undefined for beta1 = " << beta1
            << ", beta2 = " << beta2 << " (sigma (beta2 - beta1) - beta1 eta = 0)";
        throw std::domain_error(msg.str());
    }
    const double b12 = beta1 * beta2;
    const double num = model.mu(regime) * beta2 * (beta2 - beta1) +
                       b12 * params.kappa() * (model.theta(regime) - s) -
                       b12 * 0.5 * eta * eta + b12 * params.rho() * sigma * eta;
    return num / denom / (1.0 + params.epsilon());
}

/// Which part of the state a strategy is entitled to read.
enum class InformationFlag { reads_chain, reads_belief, reads_neither };

inline const char* to_string(InformationFlag f) {
    switch (f) {
        case InformationFlag::reads_chain: return "reads_chain";
        case InformationFlag::reads_belief: return "reads_belief";
        case InformationFlag::reads_neither: return "reads_neither";
    }
    return "?";
}

/// What a strategy sees at a decision time. Fields it is not entitled to are
/// left empty by the simulator.
struct Observables {
    double s = 0.0;
    int regime = -1;
    std::span<const double> belief{};
};

class StrategySpec {
public:
    struct FullInfo {};
    struct PartialInfo {};
    struct BetaNeutral {
        double beta1;
        double beta2;
    };
    struct Constant {
        double h;
    };
    struct Perturbed {
        std::shared_ptr<const StrategySpec> base;
        double delta;
    };
    using Kind = std::variant<FullInfo, PartialInfo, BetaNeutral, Constant, Perturbed>;

    static StrategySpec full_info_optimal() { return StrategySpec(FullInfo{}); }
    static StrategySpec partial_info_optimal() { return StrategySpec(PartialInfo{}); }
    static StrategySpec constant(double h) { return StrategySpec(Constant{h}); }

    static StrategySpec beta_neutral_optimal(double beta1, double beta2) {
        if (beta1 == 0.0 || beta2 == 0.0)
            throw std::invalid_argument("beta-neutral strategy needs nonzero betas");
        return StrategySpec(BetaNeutral{beta1, beta2});
    }

    static StrategySpec perturbed(const StrategySpec& base, double delta) {
        return StrategySpec(Perturbed{std::make_shared<const StrategySpec>(base), delta});
    }

    const Kind& kind() const noexcept { return kind_; }

    InformationFlag information() const {
        return std::visit(
            [](const auto& k) -> InformationFlag {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, FullInfo> || std::is_same_v<T, BetaNeutral>)
                    return InformationFlag::reads_chain;
                else if constexpr (std::is_same_v<T, PartialInfo>)
                    return InformationFlag::reads_belief;
                else if constexpr (std::is_same_v<T, Constant>)
                    return InformationFlag::reads_neither;
                else
                    return k.base->information();
            },
            kind_);
    }

    /// Whether the position keeps h1 = -h2 (the simulator's wealth law).
    bool dollar_neutral() const {
        if (std::holds_alternative<BetaNeutral>(kind_)) return false;
        if (const auto* p = std::get_if<Perturbed>(&kind_)) return p->base->dollar_neutral();
        return true;
    }

    std::string name() const {
        return std::visit(
            [](const auto& k) -> std::string {
                using T = std::decay_t<decltype(k)>;
                std::ostringstream os;
                if constexpr (std::is_same_v<T, FullInfo>)
                    os << "full_info_optimal";
                else if constexpr (std::is_same_v<T, PartialInfo>)
                    os << "partial_info_optimal";
                else if constexpr (std::is_same_v<T, BetaNeutral>)
                    os << "beta_neutral_optimal(" << k.beta1 << "," << k.beta2 << ")";
                else if constexpr (std::is_same_v<T, Constant>)
                    os << "constant(" << k.h << ")";
                else
                    os << "perturbed(" << k.base->name() << "," << k.delta << ")";
                return os.str();
            },
            kind_);
    }

    double evaluate(const Observables& obs, const RegimeModel& model,
                    const MarketParams& params) const {
        return std::visit(
            [&](const auto& k) -> double {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, FullInfo>) {
                    return h_full(obs.s, require_regime(obs, model), model, params);
                } else if constexpr (std::is_same_v<T, PartialInfo>) {
                    return h_partial(obs.s, require_belief(obs, model), model, params);
                } else if constexpr (std::is_same_v<T, BetaNeutral>) {
                    return h_beta_neutral(obs.s, require_regime(obs, model), model, params,
                                          k.beta1, k.beta2);
                } else if constexpr (std::is_same_v<T, Constant>) {
                    return k.h;
                } else {
                    return k.base->evaluate(obs, model, params) + k.delta;
                }
            },
            kind_);
    }

private:
    explicit StrategySpec(Kind k) : kind_(std::move(k)) {}

    static int require_regime(const Observables& obs, const RegimeModel& model) {
        if (obs.regime < 0 || obs.regime >= model.states())
            throw std::logic_error("strategy reads the chain but no regime was supplied");
        return obs.regime;
    }

    static std::span<const double> require_belief(const Observables& obs,
                                                  const RegimeModel& model) {
        if (static_cast<int>(obs.belief.size()) != model.states())
            throw std::logic_error("strategy reads the belief but no belief was supplied");
        return obs.belief;
    }

    Kind kind_;
};

}  // namespace rpairs

#endif  // REGIME_PAIRS_STRATEGY_HPP
