// Experiment runner: config -> solvers / simulators -> CSV tables.

#include "regime_pairs/acceptance.hpp"
#include "regime_pairs/config.hpp"
#include "regime_pairs/csv.hpp"
#include "regime_pairs.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace rpairs;

namespace {

struct Globals {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

RunConfig load(const Globals& g, ConfigNeeds needs) {
    RunConfig cfg = g.config_path.empty() ? parse_config(nlohmann::json::object(), needs)
                                          : load_config(g.config_path, needs);
    cfg.mc.seed = resolve_seed(cfg.mc.seed, g.seed);
    if (g.threads) cfg.mc.threads = *g.threads;
    return cfg;
}

/// Parameter echo for CSV headers: the effective configuration.
nlohmann::json echo(const RunConfig& cfg) {
    nlohmann::json j = cfg.raw;
    if (cfg.model) j["model"] = to_json(*cfg.model);
    if (cfg.market) j["market"] = to_json(*cfg.market);
    j["grids"] = {{"horizon", cfg.grids.horizon}, {"ode_steps", cfg.grids.ode_steps}, {"n_p", cfg.grids.n_p},
                  {"cfl", cfg.grids.cfl}, {"s_ref", cfg.grids.s_ref}};
    j["mc"] = {{"dt", cfg.mc.dt}, {"n_paths", cfg.mc.n_paths}, {"seed", cfg.mc.seed}, {"h_max", cfg.mc.h_max}};
    return j;
}

BeliefState start_belief(const RunConfig& cfg) {
    return cfg.experiment.belief ? BeliefState(*cfg.experiment.belief) : BeliefState::from_initial(*cfg.model);
}

void report(const std::vector<std::filesystem::path>& files) {
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

// --------------------------------------------------------------------------

int cmd_simulate(const Globals& g) {
    const RunConfig cfg = load(g, {true, true});
    const StrategySpec strategy = strategy_from(cfg.experiment);
    SimulationSetup setup;
    setup.model = &*cfg.model;
    setup.params = &*cfg.market;
    setup.strategy = &strategy;
    setup.s0 = cfg.experiment.s0;
    setup.horizon = cfg.grids.horizon;
    setup.dt = cfg.mc.dt;
    setup.h_max = cfg.mc.h_max;
    if (strategy.information() == InformationFlag::reads_belief) {
        setup.prior = start_belief(cfg);
    } else if (cfg.experiment.belief) {
        setup.prior = start_belief(cfg);
    } else {
        setup.initial_regime = cfg.experiment.regime;
    }
    const PathSet set = simulate_paths(setup, cfg.experiment.sim_paths, cfg.mc.seed, cfg.mc.threads);
    CsvTable table(echo(cfg), {"path", "t", "regime", "S", "R", "Z"});
    table.note("strategy " + strategy.name() + "; invalid paths " + std::to_string(set.invalid_paths) +
               "; clipped steps " + std::to_string(set.clipped_steps));
    for (std::size_t i = 0; i < set.paths.size(); ++i) append_path(table, set.paths[i], i);
    OutputBatch out(g.out_dir);
    out.add("paths.csv", table.str());
    report(out.commit());
    return 0;
}

int cmd_filter(const Globals& g, const std::string& observations) {
    const RunConfig cfg = load(g, {true, true});
    const auto rows = read_observations(observations);
    std::vector<ObservationIncrement> incs;
    std::vector<double> spread, times;
    observations_to_increments(rows, incs, spread);
    for (const auto& r : rows) times.push_back(r.t);
    const auto beliefs = filter_path(incs, spread, start_belief(cfg), *cfg.model, *cfg.market);
    nlohmann::json params = echo(cfg);
    params["observations"] = observations;
    OutputBatch out(g.out_dir);
    out.add("filter.csv", filter_csv(times, beliefs, params));
    report(out.commit());
    return 0;
}

int cmd_value_full(const Globals& g) {
    const RunConfig cfg = load(g, {true, true});
    const auto surface = solve_cf_odes(*cfg.model, *cfg.market, cfg.grids.horizon, cfg.grids.ode_steps);
    OutputBatch out(g.out_dir);
    out.add("value_full.csv", full_surface_csv(surface, echo(cfg)));
    report(out.commit());
    return 0;
}

int cmd_value_partial(const Globals& g) {
    const RunConfig cfg = load(g, {true, true});
    if (cfg.model->states() != 2) throw ConfigError({"value-partial: model must have K = 2"});
    PdeGridSpec grid;
    grid.n_p = cfg.grids.n_p;
    grid.cfl = cfg.grids.cfl;
    const auto surface = solve_two_state_pde(*cfg.model, *cfg.market, cfg.grids.horizon, grid);
    const auto averaged = solve_averaged(*cfg.model, *cfg.market, cfg.grids.horizon, cfg.grids.ode_steps);
    OutputBatch out(g.out_dir);
    out.add("value_partial.csv", partial_surface_csv(surface, cfg.grids.s_ref, echo(cfg)));
    out.add("gains.csv", gains_csv(surface, averaged, cfg.grids.s_ref, echo(cfg)));
    report(out.commit());
    return 0;
}

int cmd_mc_verify(const Globals& g) {
    const RunConfig cfg = load(g, {true, true});
    const auto& model = *cfg.model;
    const auto& params = *cfg.market;
    const auto& ex = cfg.experiment;
    const StrategySpec strategy = strategy_from(ex);
    const double horizon = cfg.grids.horizon;
    const double tau = horizon - ex.t;
    const bool partial = strategy.information() == InformationFlag::reads_belief;
    const StartState start = partial ? StartState{start_belief(cfg)} : StartState{ex.regime};
    const std::string start_label = partial ? "belief" : "regime " + std::to_string(ex.regime);

    std::optional<double> analytic;
    if (ex.strategy == "full_info_optimal") {
        analytic = value_full(ex.t, 1.0, ex.s0, ex.regime, solve_cf_odes(model, params, horizon, cfg.grids.ode_steps));
    } else if (ex.strategy == "partial_info_optimal" && model.states() == 2) {
        PdeGridSpec grid;
        grid.n_p = cfg.grids.n_p;
        grid.cfl = cfg.grids.cfl;
        analytic = value_partial(ex.t, 1.0, ex.s0, std::get<BeliefState>(start)[0],
                                 solve_two_state_pde(model, params, horizon, grid));
    }

    CsvTable table(echo(cfg), mc_columns());
    auto add = [&](const std::string& oracle, const McEstimate& e, double offset) {
        const double a = analytic ? *analytic : std::numeric_limits<double>::quiet_NaN();
        const double z = analytic && e.std_error > 0 ? (e.mean + offset - a) / e.std_error : std::numeric_limits<double>::quiet_NaN();
        table.row({oracle, strategy.name(), start_label, fmt(ex.s0), fmt(tau), fmt(e.mean + offset), fmt(e.std_error),
                   std::to_string(e.n_paths), std::to_string(e.invalid_paths), fmt(cfg.mc.dt),
                   std::to_string(e.clipped_steps), e.unreliable ? "1" : "0", fmt(a), fmt(z)});
    };
    add("wealth", estimate_value_wealth(strategy, model, params, ex.t, ex.s0, start, horizon, cfg.mc), 0.0);
    if (ex.strategy == "full_info_optimal") {
        // the stochastic representation holds for the optimal value only
        McSettings fk = cfg.mc;
        fk.seed = derive_seed(cfg.mc.seed, 1, 5);
        add("feynman_kac", estimate_value_feynman_kac(model, params, ex.t, ex.s0, ex.regime, horizon, fk),
            params.r() * tau);
    }
    OutputBatch out(g.out_dir);
    out.add("mc_verify.csv", table.str());

    if (!ex.deltas.empty()) {
        const auto rows = suboptimality_scan(strategy, ex.deltas, model, params, ex.t, ex.s0, start, horizon, cfg.mc);
        CsvTable scan(echo(cfg), {"delta", "mean", "stderr", "loss", "loss_stderr", "predicted_loss", "n_paths"});
        scan.note("common random numbers across deltas; loss = mean(0) - mean(delta)");
        for (const auto& r : rows)
            scan.row({fmt(r.delta), fmt(r.estimate.mean), fmt(r.estimate.std_error), fmt(r.loss), fmt(r.loss_std_error),
                      fmt(params.penalized_variance() * r.delta * r.delta * tau / 2.0), std::to_string(r.estimate.n_paths)});
        out.add("suboptimality.csv", scan.str());
    }
    report(out.commit());
    return 0;
}

// --------------------------------------------------------------------------

std::string figure1(std::size_t ode_steps) {
    const auto params = presets::Fig1::market();
    const auto model = presets::Fig1::model();
    const double horizon = presets::Fig1::horizon;
    const auto surface = solve_cf_odes(model, params, horizon, ode_steps);
    nlohmann::json echo{{"figure", "fig1"}, {"model", to_json(model)}, {"market", to_json(params)}, {"z", 1},
                        {"horizon", horizon}};
    CsvTable table(echo, {"s", "regime", "tau", "V"});
    table.note("regime is 0-based: 0 has theta = 0.1, 1 has theta = 0.6");
    const std::size_t stride = std::max<std::size_t>(1, (surface.size() - 1) / 200);
    for (double s : presets::Fig1::spreads())
        for (int i = 0; i < 2; ++i)
            for (std::size_t n = surface.size(); n-- > 0;)
                if ((surface.size() - 1 - n) % stride == 0) {
                    const double t = surface.times()[n];
                    table.row({s, static_cast<double>(i), horizon - t, value_full(t, 1.0, s, i, surface)});
                }
    return table.str();
}

std::string figure2(std::size_t ode_steps) {
    const auto params = presets::Fig2::market();
    const auto model = presets::Fig2::model();
    const double horizon = presets::Fig2::horizon;
    const auto surface = solve_cf_odes(model, params, horizon, ode_steps);
    const auto averaged = solve_averaged(model, params, horizon, ode_steps);
    nlohmann::json echo{{"figure", "fig2"}, {"model", to_json(model)}, {"market", to_json(params)}, {"z", 1},
                        {"pi", stationary_distribution(model)(0)}, {"theta_bar", averaged_theta(model)}};
    CsvTable table(echo, {"panel", "s", "tau", "markov_mixture", "averaged"});
    auto row = [&](const char* panel, double s, double tau) {
        const double t = horizon - tau;
        table.row({panel, fmt(s), fmt(tau), fmt(value_stationary_mixture(t, 1.0, s, surface)),
                   fmt(value_averaged(t, 1.0, s, model, params, averaged))});
    };
    for (int j = 0; j <= 150; ++j)
        row("spread", presets::Fig2::s_min + (presets::Fig2::s_max - presets::Fig2::s_min) * j / 150.0,
            presets::Fig2::short_tau);
    for (int j = 0; j <= 150; ++j) row("maturity", presets::Fig2::s_fixed, horizon * j / 150.0);
    return table.str();
}

std::string figure3(std::size_t ode_steps) {
    const auto model = presets::Fig3::model();
    const double tau = presets::Fig3::tau;
    nlohmann::json echo{{"figure", "fig3"}, {"model", to_json(model)}, {"market", to_json(presets::Fig3::market(1.0, 0.9))},
                        {"z", 1}, {"tau", tau}, {"s", presets::Fig3::s},
                        {"kappa_range", {presets::Fig3::kappa_min, presets::Fig3::kappa_max}},
                        {"kappa_points", presets::Fig3::kappa_points}};
    CsvTable table(echo, {"rho", "regime", "kappa", "V"});
    table.note("kappa range is a chosen sweep; market.kappa and market.rho in params are placeholders");
    for (double rho : {0.1, 0.9})
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < presets::Fig3::kappa_points; ++j) {
                const double kappa = presets::Fig3::kappa_min +
                                     (presets::Fig3::kappa_max - presets::Fig3::kappa_min) * j / (presets::Fig3::kappa_points - 1);
                const auto params = presets::Fig3::market(kappa, rho);
                const auto surface = solve_cf_odes(model, params, tau, ode_steps);
                table.row({rho, static_cast<double>(i), kappa, value_full(0.0, 1.0, presets::Fig3::s, i, surface)});
            }
    return table.str();
}

std::string figure4(std::size_t n_p) {
    const auto params = presets::Fig4::market();
    const auto model = presets::Fig4::model();
    PdeGridSpec grid;
    grid.n_p = n_p;
    const auto surface = solve_two_state_pde(model, params, presets::Fig4::horizon, grid);
    const auto averaged = solve_averaged(model, params, presets::Fig4::horizon);
    nlohmann::json echo{{"figure", "fig4"}, {"model", to_json(model)}, {"market", to_json(params)}, {"z", 1},
                        {"s", presets::Fig4::s}, {"n_p", n_p}, {"horizon", presets::Fig4::horizon}};
    return gains_csv(surface, averaged, presets::Fig4::s, echo);
}

int cmd_figures(const Globals& g, const std::vector<std::string>& requested) {
    const RunConfig cfg = load(g, {});
    std::vector<std::string> figures = requested;
    if (figures.empty()) figures = g.config_path.empty() ? std::vector<std::string>{"fig1", "fig2", "fig3", "fig4"}
                                                         : cfg.experiment.figures;
    OutputBatch out(g.out_dir);
    for (const auto& f : figures) {
        if (f == "fig1") out.add("fig1.csv", figure1(cfg.grids.ode_steps));
        else if (f == "fig2") out.add("fig2.csv", figure2(cfg.grids.ode_steps));
        else if (f == "fig3") out.add("fig3.csv", figure3(cfg.grids.ode_steps));
        else if (f == "fig4") out.add("fig4.csv", figure4(cfg.grids.n_p));
        else throw ConfigError({"unknown figure '" + f + "'"});
    }
    if (figures.empty()) std::cout << "no figures requested\n";
    report(out.commit());
    return 0;
}

int cmd_accept(const Globals& g, std::size_t n_paths, const std::vector<int>& only) {
    const RunConfig cfg = load(g, {});
    acceptance::Options opt;
    opt.n_paths = n_paths;
    opt.threads = cfg.mc.threads;
    opt.seed = cfg.mc.seed;
    opt.only = only;
    int failed = 0;
    acceptance::run(opt, [&](const acceptance::Result& r) {
        failed += !r.passed;
        std::cout << acceptance::format(r) << std::endl;
    });
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << '\n';
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regime-switching pairs trading: values, filters and Monte Carlo checks"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    auto* config_opt = app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    (void)config_opt;
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "random seed (RPAIRS_SEED overrides)");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads, 0 = all cores");
    app.fallthrough();

    auto* simulate = app.add_subcommand("simulate", "dump simulated paths (t, regime, S, R, Z)");
    auto* filter = app.add_subcommand("filter", "filter an observation CSV with columns t, R, S");
    std::string observations;
    filter->add_option("--observations", observations, "observation CSV")->required()->check(CLI::ExistingFile);
    auto* value_full_cmd = app.add_subcommand("value-full", "full-information value surface");
    auto* value_partial_cmd = app.add_subcommand("value-partial", "two-state partial-information surface and gains");
    auto* mc_verify = app.add_subcommand("mc-verify", "Monte Carlo oracle tables");
    auto* figures = app.add_subcommand("figures", "emit fig1.csv ... fig4.csv");
    std::vector<std::string> figure_list;
    figures->add_option("--figure", figure_list, "figure to emit (repeatable); default from config");
    auto* accept = app.add_subcommand("accept", "run the acceptance suite");
    std::size_t accept_paths = 100000;
    std::vector<int> accept_only;
    accept->add_option("--paths", accept_paths, "Monte Carlo paths per estimate")->capture_default_str();
    accept->add_option("--only", accept_only, "criterion numbers to run");

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count()) g.seed = seed;
    if (threads_opt->count()) g.threads = threads;

    try {
        if (*simulate) return cmd_simulate(g);
        if (*filter) return cmd_filter(g, observations);
        if (*value_full_cmd) return cmd_value_full(g);
        if (*value_partial_cmd) return cmd_value_partial(g);
        if (*mc_verify) return cmd_mc_verify(g);
        if (*figures) return cmd_figures(g, figure_list);
        if (*accept) return cmd_accept(g, accept_paths, accept_only);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
