#ifndef REGIME_PAIRS_CONFIG_HPP
#define REGIME_PAIRS_CONFIG_HPP

// JSON run configuration. Problems are collected across all sections and
// reported together in one ConfigError.
//
//   {
//     "model":  {"Q": [[...]], "theta": [...], "mu": [...], "initial_dist": [...]},
//     "market": {"kappa": 1, "eta": 0.2, "sigma": 0.2, "rho": 0.9, "r": 0.01, "epsilon": 0.3},
//     "grids":  {"horizon": 3, "ode_steps": 10000, "n_p": 201, "cfl": 0.9, "s_ref": 0.3},
//     "mc":     {"dt": 0.001, "n_paths": 100000, "seed": 1, "threads": 0, "h_max": 1e4},
//     "experiment": {...}
//   }

#include "regime_pairs/filtering.hpp"
#include "regime_pairs/model.hpp"
#include "regime_pairs/strategy.hpp"
#include "regime_pairs/value_partial.hpp"
#include "regime_pairs/verify_mc.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpairs {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : std::runtime_error(format(problems)), problems_(std::move(problems)) {}
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string format(const std::vector<std::string>& problems) {
        std::string out = "invalid configuration (" + std::to_string(problems.size()) + " problem" +
                          (problems.size() == 1 ? "" : "s") + "):";
        for (const auto& p : problems) out += "\n  - " + p;
        return out;
    }
    std::vector<std::string> problems_;
};

struct GridSettings {
    double horizon = 3.0;
    std::size_t ode_steps = 10000;
    std::size_t n_p = 201;
    double cfl = 0.9;
    double s_ref = 0.3;  ///< spread at which partial surfaces and gains are reported
};

struct ExperimentSettings {
    std::vector<std::string> figures;     ///< subset of fig1..fig4
    std::string strategy = "full_info_optimal";
    double constant_h = 0.0;
    double beta1 = 1.0, beta2 = 1.0;
    double s0 = 0.3;
    double t = 0.0;
    int regime = 0;
    std::optional<std::vector<double>> belief;  ///< starting belief for partial-information runs
    std::vector<double> deltas;                  ///< suboptimality scan, empty to skip
    std::size_t sim_paths = 10;                  ///< paths dumped by `simulate`
};

struct RunConfig {
    std::optional<RegimeModel> model;
    std::optional<MarketParams> market;
    GridSettings grids;
    McSettings mc;
    ExperimentSettings experiment;
    nlohmann::json raw = nlohmann::json::object();
};

namespace detail {

class Collector {
public:
    void add(std::string msg) { problems_.push_back(std::move(msg)); }
    bool ok() const { return problems_.empty(); }
    std::vector<std::string>& problems() { return problems_; }

    template <class T>
    std::optional<T> get(const nlohmann::json& obj, const std::string& section, const char* key,
                         bool required) {
        if (!obj.contains(key)) {
            if (required) add(section + "." + key + ": missing");
            return std::nullopt;
        }
        try {
            return obj.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            add(section + "." + key + ": wrong type (" + obj.at(key).dump() + ")");
            return std::nullopt;
        }
    }

    template <class T>
    void read(const nlohmann::json& obj, const std::string& section, const char* key, T& into) {
        if (auto v = get<T>(obj, section, key, false)) into = *v;
    }

private:
    std::vector<std::string> problems_;
};

inline const nlohmann::json* section(const nlohmann::json& root, const char* name, Collector& c,
                                     bool required) {
    if (!root.contains(name)) {
        if (required) c.add(std::string(name) + ": missing section");
        return nullptr;
    }
    if (!root.at(name).is_object()) {
        c.add(std::string(name) + ": must be an object");
        return nullptr;
    }
    return &root.at(name);
}

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline void parse_model(const nlohmann::json& m, Collector& c, RunConfig& out) {
    const std::size_t before = c.problems().size();
    auto q = c.get<std::vector<std::vector<double>>>(m, "model", "Q", true);
    auto theta = c.get<std::vector<double>>(m, "model", "theta", true);
    auto mu = c.get<std::vector<double>>(m, "model", "mu", true);
    auto pi0 = c.get<std::vector<double>>(m, "model", "initial_dist", false);
    auto k = c.get<int>(m, "model", "K", false);
    if (!theta) return;

    // theta fixes K; every other present field is checked against it
    const std::size_t n = theta->size();
    const std::string expected = ", expected " + std::to_string(n) + " from theta";
    if (n == 0) c.add("model.theta: must be non-empty");
    if (k && *k != static_cast<int>(n)) c.add("model.K: " + std::to_string(*k) + " does not match theta length " + std::to_string(n));
    if (mu && mu->size() != n) c.add("model.mu: length " + std::to_string(mu->size()) + expected);
    if (q && q->size() != n) c.add("model.Q: " + std::to_string(q->size()) + " rows" + expected);
    if (q)
        for (std::size_t i = 0; i < q->size(); ++i)
            if ((*q)[i].size() != n) c.add("model.Q: row " + std::to_string(i) + " has wrong length");
    if (pi0 && pi0->size() != n) c.add("model.initial_dist: length " + std::to_string(pi0->size()) + expected);
    if (c.problems().size() != before) return;

    Eigen::MatrixXd gen(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) gen(i, j) = (*q)[i][j];
    try {
        Eigen::VectorXd init;
        if (pi0) {
            init = to_vector(*pi0);
        } else {
            // stationary law when no initial distribution is given
            RegimeModel probe(gen, to_vector(*theta), to_vector(*mu), Eigen::VectorXd::Constant(n, 1.0 / n));
            init = stationary_distribution(probe);
        }
        out.model.emplace(gen, to_vector(*theta), to_vector(*mu), init);
    } catch (const std::exception& e) {
        c.add(std::string("model: ") + e.what());
    }
}

inline void parse_market(const nlohmann::json& m, Collector& c, RunConfig& out) {
    const std::size_t before = c.problems().size();
    MarketFields f;
    // missing keys get harmless placeholders so the present ones are still range-checked
    f.kappa = f.eta = f.sigma = 1.0;
    f.rho = f.r = f.epsilon = 0.0;
    auto need = [&](const char* key, double& into) {
        if (auto v = c.get<double>(m, "market", key, true)) into = *v;
    };
    need("kappa", f.kappa);
    need("eta", f.eta);
    need("sigma", f.sigma);
    need("rho", f.rho);
    need("r", f.r);
    need("epsilon", f.epsilon);
    try {
        MarketParams checked(f);
        if (c.problems().size() == before) out.market.emplace(checked);
    } catch (const std::exception& e) {
        c.add(std::string("market: ") + e.what());
    }
}

}  // namespace detail

/// Sections a subcommand needs before it can run.
struct ConfigNeeds {
    bool model = false;
    bool market = false;
};

inline RunConfig parse_config(const nlohmann::json& root, ConfigNeeds needs = {}) {
    detail::Collector c;
    RunConfig out;
    if (!root.is_object()) throw ConfigError({"configuration root must be a JSON object"});
    out.raw = root;

    for (const auto& [key, value] : root.items()) {
        (void)value;
        if (key != "model" && key != "market" && key != "grids" && key != "mc" && key != "experiment")
            c.add("unknown section '" + key + "'");
    }

    if (const auto* m = detail::section(root, "model", c, needs.model)) detail::parse_model(*m, c, out);
    if (const auto* m = detail::section(root, "market", c, needs.market)) detail::parse_market(*m, c, out);

    if (const auto* g = detail::section(root, "grids", c, false)) {
        c.read(*g, "grids", "horizon", out.grids.horizon);
        c.read(*g, "grids", "ode_steps", out.grids.ode_steps);
        c.read(*g, "grids", "n_p", out.grids.n_p);
        c.read(*g, "grids", "cfl", out.grids.cfl);
        c.read(*g, "grids", "s_ref", out.grids.s_ref);
    }
    if (!(out.grids.horizon > 0.0)) c.add("grids.horizon: must be > 0");
    if (out.grids.ode_steps < 10) c.add("grids.ode_steps: must be >= 10");
    if (out.grids.n_p < 11) c.add("grids.n_p: must be >= 11");
    if (!(out.grids.cfl > 0.0 && out.grids.cfl <= 0.9)) c.add("grids.cfl: must lie in (0, 0.9]");

    if (const auto* m = detail::section(root, "mc", c, false)) {
        c.read(*m, "mc", "dt", out.mc.dt);
        c.read(*m, "mc", "n_paths", out.mc.n_paths);
        c.read(*m, "mc", "seed", out.mc.seed);
        c.read(*m, "mc", "threads", out.mc.threads);
        c.read(*m, "mc", "h_max", out.mc.h_max);
    }
    if (!(out.mc.dt > 0.0)) c.add("mc.dt: must be > 0");
    if (out.mc.n_paths < 1) c.add("mc.n_paths: must be >= 1");
    if (!(out.mc.h_max > 0.0)) c.add("mc.h_max: must be > 0");

    auto& ex = out.experiment;
    if (const auto* e = detail::section(root, "experiment", c, false)) {
        c.read(*e, "experiment", "figures", ex.figures);
        c.read(*e, "experiment", "strategy", ex.strategy);
        c.read(*e, "experiment", "constant_h", ex.constant_h);
        c.read(*e, "experiment", "beta1", ex.beta1);
        c.read(*e, "experiment", "beta2", ex.beta2);
        c.read(*e, "experiment", "s0", ex.s0);
        c.read(*e, "experiment", "t", ex.t);
        c.read(*e, "experiment", "regime", ex.regime);
        c.read(*e, "experiment", "deltas", ex.deltas);
        c.read(*e, "experiment", "sim_paths", ex.sim_paths);
        if (auto b = c.get<std::vector<double>>(*e, "experiment", "belief", false)) ex.belief = *b;
    }
    for (const auto& f : ex.figures)
        if (f != "fig1" && f != "fig2" && f != "fig3" && f != "fig4")
            c.add("experiment.figures: unknown figure '" + f + "'");
    static const char* kStrategies[] = {"full_info_optimal", "partial_info_optimal", "constant",
                                        "beta_neutral_optimal"};
    if (std::find(std::begin(kStrategies), std::end(kStrategies), ex.strategy) == std::end(kStrategies))
        c.add("experiment.strategy: unknown strategy '" + ex.strategy + "'");
    if (!(ex.t >= 0.0 && ex.t < out.grids.horizon)) c.add("experiment.t: must lie in [0, grids.horizon)");
    if (out.model) {
        if (ex.regime < 0 || ex.regime >= out.model->states())
            c.add("experiment.regime: out of range for K = " + std::to_string(out.model->states()));
        if (ex.belief) {
            if (static_cast<int>(ex.belief->size()) != out.model->states())
                c.add("experiment.belief: length does not match K");
            else
                try {
                    BeliefState check(*ex.belief);
                } catch (const std::exception& err) {
                    c.add(std::string("experiment.belief: ") + err.what());
                }
        }
    }
    if (!ex.deltas.empty() && std::find(ex.deltas.begin(), ex.deltas.end(), 0.0) == ex.deltas.end())
        c.add("experiment.deltas: must include 0");

    if (!c.ok()) throw ConfigError(std::move(c.problems()));
    return out;
}

inline RunConfig load_config(const std::string& path, ConfigNeeds needs = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
    nlohmann::json root;
    try {
        in >> root;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({"'" + path + "' is not valid JSON: " + e.what()});
    }
    return parse_config(root, needs);
}

/// Seed precedence: config < explicit flag < RPAIRS_SEED environment variable.
inline std::uint64_t resolve_seed(std::uint64_t from_config, std::optional<std::uint64_t> flag) {
    std::uint64_t seed = flag.value_or(from_config);
    if (const char* env = std::getenv("RPAIRS_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') seed = v;
        else throw ConfigError({std::string("RPAIRS_SEED is not an unsigned integer: '") + env + "'"});
    }
    return seed;
}

inline StrategySpec strategy_from(const ExperimentSettings& ex) {
    if (ex.strategy == "full_info_optimal") return StrategySpec::full_info_optimal();
    if (ex.strategy == "partial_info_optimal") return StrategySpec::partial_info_optimal();
    if (ex.strategy == "constant") return StrategySpec::constant(ex.constant_h);
    return StrategySpec::beta_neutral_optimal(ex.beta1, ex.beta2);
}

}  // namespace rpairs

#endif  // REGIME_PAIRS_CONFIG_HPP
