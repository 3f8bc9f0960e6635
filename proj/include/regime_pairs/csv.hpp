#ifndef REGIME_PAIRS_CSV_HPP
#define REGIME_PAIRS_CSV_HPP

// CSV emitters and readers. Every emitted table starts with '#' lines holding
// the artifact version and the full parameter set, so a file is
// self-describing. Numbers use %.12g, which keeps output byte-stable.

#include "regime_pairs/regime_market.hpp"
#include "regime_pairs/value_full.hpp"
#include "regime_pairs/value_partial.hpp"
#include "regime_pairs/verify_mc.hpp"
#include "regime_pairs/version.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpairs {

inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline nlohmann::json to_json(const RegimeModel& m) {
    nlohmann::json q = nlohmann::json::array();
    for (int i = 0; i < m.states(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.states(); ++j) row.push_back(m.rate(i, j));
        q.push_back(row);
    }
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    return {{"Q", q}, {"theta", vec(m.theta())}, {"mu", vec(m.mu())}, {"initial_dist", vec(m.initial_dist())}};
}

inline nlohmann::json to_json(const MarketParams& p) {
    return {{"kappa", p.kappa()}, {"eta", p.eta()}, {"sigma", p.sigma()},
            {"rho", p.rho()},     {"r", p.r()},     {"epsilon", p.epsilon()}};
}

/// Table under construction: metadata comments, a header row, data rows.
class CsvTable {
public:
    CsvTable(const nlohmann::json& params, std::vector<std::string> columns) : columns_(std::move(columns)) {
        out_ << "# regime_pairs " << kVersion << '\n';
        out_ << "# params: " << params.dump() << '\n';
    }

    CsvTable& note(const std::string& line) {
        out_ << "# " << line << '\n';
        return *this;
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size())
            throw std::logic_error("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                                   std::to_string(columns_.size()));
        flush_header();
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    void row(const std::vector<double>& cells) {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (double x : cells) s.push_back(fmt(x));
        row(s);
    }

    std::string str() {
        flush_header();
        return out_.str();
    }

private:
    void flush_header() {
        if (header_done_) return;
        for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
        out_ << '\n';
        header_done_ = true;
    }

    std::vector<std::string> columns_;
    std::ostringstream out_;
    bool header_done_ = false;
};

/// Files staged in memory and published together: each goes to a hidden
/// temporary first and all are renamed only after every write succeeded.
class OutputBatch {
public:
    explicit OutputBatch(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }
    std::size_t size() const noexcept { return files_.size(); }

    std::vector<std::filesystem::path> commit() {
        namespace fs = std::filesystem;
        std::vector<fs::path> published;
        if (files_.empty()) return published;
        fs::create_directories(dir_);
        std::vector<std::pair<fs::path, fs::path>> staged;
        try {
            for (const auto& [name, content] : files_) {
                const fs::path target = dir_ / name;
                const fs::path tmp = dir_ / ("." + name + ".tmp");
                staged.emplace_back(tmp, target);
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                out << content;
                out.close();
                if (!out) throw std::runtime_error("failed writing " + tmp.string());
            }
            for (const auto& [tmp, target] : staged) {
                fs::rename(tmp, target);
                published.push_back(target);
            }
        } catch (...) {
            std::error_code ec;
            for (const auto& [tmp, target] : staged) fs::remove(tmp, ec);
            throw;
        }
        files_.clear();
        return published;
    }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

// ---------------------------------------------------------------------------
// Emitters
// ---------------------------------------------------------------------------

/// One row per grid point: t, regime (0-based), S, R, Z.
inline void append_path(CsvTable& table, const PathBundle& b, std::size_t path_index) {
    for (std::size_t k = 0; k < b.times.size(); ++k)
        table.row({std::to_string(path_index), fmt(b.times[k]), std::to_string(b.chain[k]), fmt(b.spread[k]),
                   fmt(b.logret[k]), fmt(b.wealth[k])});
}

inline std::string full_surface_csv(const ValueSurfaceFull& s, const nlohmann::json& params) {
    std::vector<std::string> cols{"t", "d"};
    for (int i = 0; i < s.states(); ++i) cols.push_back("c_" + std::to_string(i + 1));
    for (int i = 0; i < s.states(); ++i) cols.push_back("f_" + std::to_string(i + 1));
    CsvTable table(params, cols);
    for (std::size_t n = 0; n < s.size(); ++n) {
        std::vector<double> r{s.times()[n], s.d(n)};
        for (int i = 0; i < s.states(); ++i) r.push_back(s.c(n, i));
        for (int i = 0; i < s.states(); ++i) r.push_back(s.f(n, i));
        table.row(r);
    }
    return table.str();
}

/// Partial-information surface with the value at the reference spread (z = 1).
inline std::string partial_surface_csv(const ValueSurfacePartial& s, double s_ref, const nlohmann::json& params) {
    CsvTable table(params, {"t", "p", "c", "f", "V"});
    table.note("V at s = " + fmt(s_ref) + ", z = 1; N_t = " + std::to_string(s.time_steps()) +
               ", CFL = " + fmt(s.cfl_number()));
    for (std::size_t n = 0; n < s.layers(); ++n) {
        const double t = s.times()[n];
        const double d = d_closed_form(t, s.horizon(), s.params());
        for (std::size_t k = 0; k < s.belief_nodes(); ++k) {
            const double v = s.params().r() * (s.horizon() - t) + d * s_ref * s_ref + s.c(n, k) * s_ref + s.f(n, k);
            table.row({t, s.belief(k), s.c(n, k), s.f(n, k), v});
        }
    }
    return table.str();
}

inline std::string gains_csv(const ValueSurfacePartial& s, const ValueSurfaceFull& averaged, double s_ref,
                             const nlohmann::json& params) {
    CsvTable table(params, {"t", "tau", "p", "gain"});
    table.note("gain = filtered value - averaged-data value at s = " + fmt(s_ref) + ", z = 1");
    for (std::size_t n = 0; n < s.layers(); ++n) {
        const double t = s.times()[n];
        const auto g = gains_from_filtering(s, averaged, s_ref, t);
        for (std::size_t k = 0; k < g.size(); ++k) table.row({t, s.horizon() - t, s.belief(k), g[k]});
    }
    return table.str();
}

inline std::string filter_csv(std::span<const double> times, const std::vector<BeliefState>& beliefs,
                              const nlohmann::json& params) {
    if (times.size() != beliefs.size()) throw std::invalid_argument("filter_csv: length mismatch");
    std::vector<std::string> cols{"t"};
    const int k = beliefs.empty() ? 0 : beliefs.front().size();
    for (int i = 0; i < k; ++i) cols.push_back("p_" + std::to_string(i + 1));
    CsvTable table(params, cols);
    for (std::size_t n = 0; n < times.size(); ++n) {
        std::vector<double> r{times[n]};
        for (int i = 0; i < k; ++i) r.push_back(beliefs[n][i]);
        table.row(r);
    }
    return table.str();
}

inline std::vector<std::string> mc_columns() {
    return {"oracle", "strategy", "start", "s", "tau", "mean", "stderr", "n_paths", "invalid_paths",
            "dt", "clipped_steps", "unreliable", "analytic", "diff_over_stderr"};
}

// ---------------------------------------------------------------------------
// Readers
// ---------------------------------------------------------------------------

struct ObservationRow {
    double t, R, S;
};

/// Reads (t, R, S) rows; '#' lines are skipped, the first other line must be
/// the header naming those three columns in any order.
inline std::vector<ObservationRow> read_observations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open observation file '" + path + "'");
    std::string line;
    int it = -1, ir = -1, is = -1;
    std::vector<ObservationRow> rows;
    std::size_t lineno = 0;
    auto split = [](const std::string& l) {
        std::vector<std::string> out;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto a = cell.find_first_not_of(" \t\r");
            const auto b = cell.find_last_not_of(" \t\r");
            out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
        }
        return out;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        if (it < 0) {
            for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
                if (cells[i] == "t") it = i;
                if (cells[i] == "R") ir = i;
                if (cells[i] == "S") is = i;
            }
            if (it < 0 || ir < 0 || is < 0)
                throw std::runtime_error(path + ": header must contain columns t, R, S");
            continue;
        }
        const int need = std::max({it, ir, is});
        if (static_cast<int>(cells.size()) <= need)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": too few columns");
        try {
            rows.push_back({std::stod(cells[it]), std::stod(cells[ir]), std::stod(cells[is])});
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not a number");
        }
    }
    if (it < 0) throw std::runtime_error(path + ": no header line");
    for (std::size_t k = 1; k < rows.size(); ++k)
        if (!(rows[k].t > rows[k - 1].t))
            throw std::runtime_error(path + ": times must be strictly increasing");
    return rows;
}

/// Observation increments and the spread levels they start from.
inline void observations_to_increments(const std::vector<ObservationRow>& rows,
                                       std::vector<ObservationIncrement>& incs, std::vector<double>& spread) {
    incs.clear();
    spread.clear();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        spread.push_back(rows[k].S);
        if (k + 1 < rows.size())
            incs.push_back({rows[k + 1].R - rows[k].R, rows[k + 1].S - rows[k].S, rows[k + 1].t - rows[k].t});
    }
}

}  // namespace rpairs

#endif  // REGIME_PAIRS_CSV_HPP
