#pragma once

// The five CLI commands as library functions: each takes a parsed config and
// returns a report table plus an exit code (0 ok, 1 check failed). Config and
// numerical problems propagate as exceptions; see exit_code_for().

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "asympt.hpp"
#include "config.hpp"
#include "renewal.hpp"
#include "report.hpp"
#include "simulate.hpp"

namespace ruin2d {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitNumerical = 3 };

struct CommandOutput {
    Table table;
    int exit_code = kExitOk;
};

namespace detail {

inline double grid_x(const RiskModel& m) { return m.x2(); }

/// E N_T: exact when the interarrival law allows it, else simulated.
inline double renewal_mean_for(const RiskModel& m, double T, const RunBlock& run) {
    const RenewalSpec spec(m.interarrival());
    if (has_exact_renewal_mean(spec)) return renewal_mean(spec, T, ExactMethod{}).value;
    return renewal_mean(spec, T, SimulateMethod{std::max<std::uint64_t>(run.renewal_paths, 2), run.seed, run.workers})
        .value;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace detail

/// Column lookup used by tests and the acceptance suite.
inline std::size_t column_index(const Table& t, const std::string& name) {
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == name) return i;
    throw std::out_of_range("no column '" + name + "'");
}

inline double number_at(const Table& t, std::size_t row, const std::string& name) {
    const Cell& c = t.rows.at(row).at(column_index(t, name));
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return static_cast<double>(std::get<std::int64_t>(c));
}

inline std::string text_at(const Table& t, std::size_t row, const std::string& name) {
    return render(t.rows.at(row).at(column_index(t, name)));
}

// ---------------------------------------------------------------- dist-check

enum class SubexpVerdict { subexponential, non_subexponential, inconclusive };

inline const char* verdict_name(SubexpVerdict v) {
    switch (v) {
        case SubexpVerdict::subexponential: return "subexponential";
        case SubexpVerdict::non_subexponential: return "non-subexponential";
        default: return "inconclusive";
    }
}

/// Classify from the ratio path: divergence (subexp ratio above 10) flags a
/// light tail; a final point within 10% of (2, 1) whose distance from (2, 1)
/// did not grow along the grid counts as a subexponential trend.
inline SubexpVerdict classify_trend(const std::vector<double>& subexp, const std::vector<double>& sstar) {
    for (double r : subexp)
        if (r > 10.0) return SubexpVerdict::non_subexponential;
    const double gap_first = std::abs(subexp.front() - 2.0) / 2.0;
    const double gap_last = std::abs(subexp.back() - 2.0) / 2.0;
    if (gap_last <= 0.1 && std::abs(sstar.back() - 1.0) <= 0.1 && gap_last <= gap_first + 1e-12)
        return SubexpVerdict::subexponential;
    return SubexpVerdict::inconclusive;
}

inline CommandOutput cmd_dist_check(const ExperimentConfig& cfg) {
    std::vector<ClaimDistribution> fams = cfg.dist_check.families;
    if (fams.empty()) {
        if (!cfg.claim) throw ConfigError("model.claim", "dist-check needs model.claim or dist_check.families");
        fams.push_back(*cfg.claim);
    }
    auto grid = cfg.dist_check.x_grid;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!(grid[i] > 0.0) || (i && !(grid[i] > grid[i - 1])))
            throw ConfigError("dist_check.x_grid", "must be positive and increasing");

    CommandOutput out;
    out.table.command = "dist-check";
    out.table.columns = {"family", "x", "subexp_ratio", "sstar_ratio", "declared", "verdict"};
    for (std::size_t f = 0; f < fams.size(); ++f) {
        const auto& d = fams[f];
        const std::string path = cfg.dist_check.families.empty() ? "model.claim"
                                                                  : "dist_check.families[" + std::to_string(f) + "]";
        std::vector<double> se, ss;
        for (double x : grid) {
            se.push_back(detail::at_path(path, [&] { return subexp_ratio(d, x); }));
            ss.push_back(detail::at_path(path, [&] { return sstar_ratio(d, x); }));
        }
        const auto verdict = classify_trend(se, ss);
        const bool declared = d.heavy_tailed();
        for (std::size_t i = 0; i < grid.size(); ++i)
            out.table.add({d.describe(), grid[i], se[i], ss[i],
                           std::string(declared ? "subexponential" : "light"), std::string(verdict_name(verdict))});
        out.table.summary.push_back(d.describe() + ": " + verdict_name(verdict) + " (subexp_ratio " +
                                    detail::fmt(se.front()) + " -> " + detail::fmt(se.back()) + ", sstar_ratio " +
                                    detail::fmt(ss.front()) + " -> " + detail::fmt(ss.back()) + ")");
        if (declared && verdict != SubexpVerdict::subexponential) out.exit_code = kExitCheckFailed;
    }
    return out;
}

// ------------------------------------------------------------------- approx

inline CommandOutput cmd_approx(const ExperimentConfig& cfg) {
    const auto models = cfg.require_model().models();
    CommandOutput out;
    out.table.command = "approx";
    out.table.columns = {"x", "x1", "x2", "T", "n_mean", "H_T", "U_T", "H", "U", "abs_error", "method"};
    for (const auto& m : models) {
        const double T = cfg.run.horizon.horizon(detail::grid_x(m));
        const auto fin = approx_finite(m, T, detail::renewal_mean_for(m, T, cfg.run));
        const auto inf = approx_infinite(m);
        const double err = std::max({fin.H_T.abs_error, fin.U_T.abs_error, inf.H.abs_error, inf.U.abs_error});
        const bool closed = fin.H_T.method == Method::closed_form && fin.U_T.method == Method::closed_form &&
                            inf.H.method == Method::closed_form && inf.U.method == Method::closed_form;
        out.table.add({detail::grid_x(m), m.x1(), m.x2(), T, fin.n_mean, fin.H_T.value, fin.U_T.value, inf.H.value,
                       inf.U.value, err, std::string(method_name(closed ? Method::closed_form : Method::quadrature))});
    }
    return out;
}

// ------------------------------------------------------------------ compare

inline CommandOutput cmd_compare(const ExperimentConfig& cfg, std::vector<TraceRow>* trace = nullptr) {
    const auto models = cfg.require_model().models();
    CommandOutput out;
    auto& t = out.table;
    t.command = "compare";
    t.columns = {"x",        "x1",     "x2",          "T",           "n_paths",    "psi_min_hat", "se_min",
                 "H_T",      "ratio_min", "ratio_min_ci95", "psi_max_hat", "se_max", "U_T",  "ratio_max",
                 "ratio_max_ci95", "ruined_min", "ruined_max", "total_events"};
    EstimateOptions opt;
    opt.workers = cfg.run.workers;
    opt.max_total_events = cfg.run.max_total_events;
    std::vector<double> gap_min, gap_max;
    for (const auto& m : models) {
        const double T = cfg.run.horizon.horizon(detail::grid_x(m));
        const auto est = estimate_ruin(m, T, cfg.run.n_paths, cfg.run.seed, opt);
        const auto fin = approx_finite(m, T, detail::renewal_mean_for(m, T, cfg.run));
        const double h = fin.H_T.value, u = fin.U_T.value;
        const double rmin = est.psi_min_hat / h, rmax = est.psi_max_hat / u;
        t.add({detail::grid_x(m), m.x1(), m.x2(), T, static_cast<std::int64_t>(est.n_paths), est.psi_min_hat,
               est.se_min, h, rmin, 1.96 * est.se_min / h, est.psi_max_hat, est.se_max, u, rmax,
               1.96 * est.se_max / u, static_cast<std::int64_t>(est.ruined_min),
               static_cast<std::int64_t>(est.ruined_max), static_cast<std::int64_t>(est.total_events)});
        gap_min.push_back(std::abs(rmin - 1.0));
        gap_max.push_back(std::abs(rmax - 1.0));
        if (trace && trace->empty() && cfg.output.trace) *trace = trace_paths(m, T, cfg.run.seed, cfg.output.trace_paths);
    }
    const auto trend = [&](const char* name, const std::vector<double>& g) {
        if (g.size() < 2) return std::string(name) + " |ratio-1|: " + detail::fmt(g.front()) + " (single grid point)";
        return std::string(name) + " |ratio-1|: " + detail::fmt(g.front()) + " at x=" + detail::fmt(number_at(t, 0, "x")) +
               " -> " + detail::fmt(g.back()) + " at x=" + detail::fmt(number_at(t, t.rows.size() - 1, "x")) +
               (g.back() <= g.front() ? " (approaching 1)" : " (not approaching 1)");
    };
    t.summary.push_back(trend("min", gap_min));
    t.summary.push_back(trend("max", gap_max));
    return out;
}

// ----------------------------------------------------------------- limitlaw

struct LimitLawDistances {
    double x;
    double sup_min_quad_y, sup_min_limit_y, sup_max_quad_y, sup_max_limit_y;
    double sup_min_quad_yv, sup_min_limit_yv, sup_max_quad_yv, sup_max_limit_yv;
    double sup_min_open_y, sup_max_open_y;
};

/// Sup-distances per grid point, computed from a limitlaw table.
inline std::vector<LimitLawDistances> limitlaw_distances(const Table& t) {
    std::vector<LimitLawDistances> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double x = number_at(t, r, "x");
        if (out.empty() || out.back().x != x) out.push_back({x, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
        auto& d = out.back();
        const bool v0 = number_at(t, r, "v") == 0.0;
        const auto upd = [&](double& y_only, double& yv, const char* emp, const char* ref) {
            const double gap = std::abs(number_at(t, r, emp) - number_at(t, r, ref));
            yv = std::max(yv, gap);
            if (v0) y_only = std::max(y_only, gap);
        };
        upd(d.sup_min_quad_y, d.sup_min_quad_yv, "emp_min", "quad_min");
        upd(d.sup_min_limit_y, d.sup_min_limit_yv, "emp_min", "limit_min");
        upd(d.sup_max_quad_y, d.sup_max_quad_yv, "emp_max", "quad_max");
        upd(d.sup_max_limit_y, d.sup_max_limit_yv, "emp_max", "limit_max");
        double unused = 0.0;
        upd(d.sup_min_open_y, unused, "emp_min", "open_min");
        upd(d.sup_max_open_y, unused, "emp_max", "open_max");
    }
    return out;
}

/// Empirical conditional survival of (tau/(E tau e), overshoot/e) versus the
/// finite-x ratios H^{y,v}/H, U^{y,v}/U and the limits Gbar(m y + v). Times are
/// converted to the claim-count scale by E tau. The quad_* columns truncate the
/// integrals at E N_T to match the finite simulation horizon; open_* do not.
inline CommandOutput cmd_limitlaw(const ExperimentConfig& cfg) {
    const auto& mb = cfg.require_model();
    const LimitLaw law = detail::at_path("model.claim", [&] { return limit_law(mb.claim); });
    const auto models = mb.models();
    const auto& lb = cfg.limitlaw;
    for (double y : lb.y_grid)
        if (!(y >= 0.0)) throw ConfigError("limitlaw.y_grid", "values must be >= 0");
    for (double v : lb.v_grid)
        if (!(v >= 0.0)) throw ConfigError("limitlaw.v_grid", "values must be >= 0");
    std::vector<double> v_grid = lb.v_grid;
    if (std::find(v_grid.begin(), v_grid.end(), 0.0) == v_grid.end()) v_grid.insert(v_grid.begin(), 0.0);

    CommandOutput out;
    auto& t = out.table;
    t.command = "limitlaw";
    t.columns = {"x",        "e",        "T",        "y",         "v",        "n_min",    "emp_min", "quad_min",
                 "open_min", "limit_min", "n_max",   "emp_max",   "quad_max", "open_max", "limit_max"};
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& m : models) {
        const double x = detail::grid_x(m);
        const double T = cfg.run.horizon.horizon(x);
        const double e = law.e(x);
        const double en = detail::renewal_mean_for(m, T, cfg.run);
        const double scale = m.mean_interarrival() * e;

        ConditionalOptions copt;
        copt.workers = cfg.run.workers;
        copt.batch = lb.batch;
        const auto cs = conditional_ruin_sample(m, T, lb.n_target, cfg.run.seed, copt);

        const auto base_cut = approx_shifted(m, 0.0, 0.0, e, en);
        const auto base_open = approx_shifted(m, 0.0, 0.0, e, inf);
        const double n_min = static_cast<double>(cs.samples.size());
        std::uint64_t n_max_count = 0;
        for (const auto& s : cs.samples) n_max_count += s.tau_max ? 1 : 0;
        const double n_max = static_cast<double>(n_max_count);

        for (double v : v_grid)
            for (double y : lb.y_grid) {
                double hit_min = 0.0, hit_max = 0.0;
                for (const auto& s : cs.samples) {
                    if (s.tau_min / scale >= y && s.overshoot_min / e >= v) hit_min += 1.0;
                    if (s.tau_max && *s.tau_max / scale >= y && *s.overshoot_max / e >= v) hit_max += 1.0;
                }
                const auto cut = approx_shifted(m, y, v, e, en);
                const auto open = approx_shifted(m, y, v, e, inf);
                t.add({x, e, T, y, v, static_cast<std::int64_t>(n_min), hit_min / n_min,
                       cut.H_yv.value / base_cut.H_yv.value, open.H_yv.value / base_open.H_yv.value,
                       law.g_bar(m.m1() * y + v), static_cast<std::int64_t>(n_max),
                       n_max > 0 ? hit_max / n_max : std::numeric_limits<double>::quiet_NaN(),
                       cut.U_yv.value / base_cut.U_yv.value, open.U_yv.value / base_open.U_yv.value,
                       law.g_bar(m.m2() * y + v)});
            }
        t.summary.push_back("x=" + detail::fmt(x) + ": " + std::to_string(cs.samples.size()) + " min-ruined and " +
                            std::to_string(n_max_count) + " max-ruined paths out of " + std::to_string(cs.attempts) +
                            " (" + law.name() + ", e(x)=" + detail::fmt(e) + ")");
    }
    for (const auto& d : limitlaw_distances(t))
        t.summary.push_back("x=" + detail::fmt(d.x) + " sup-distance over y (v=0): min vs quadrature " +
                            detail::fmt(d.sup_min_quad_y) + ", vs limit " + detail::fmt(d.sup_min_limit_y) +
                            "; max vs quadrature " + detail::fmt(d.sup_max_quad_y) + ", vs limit " +
                            detail::fmt(d.sup_max_limit_y) + "; over (y,v): min " + detail::fmt(d.sup_min_quad_yv) +
                            "/" + detail::fmt(d.sup_min_limit_yv) + ", max " + detail::fmt(d.sup_max_quad_yv) + "/" +
                            detail::fmt(d.sup_max_limit_yv));
    return out;
}

// -------------------------------------------------------------------- lemma

inline std::vector<LemmaPoint> lemma_sweep_points(const LemmaBlock& b) {
    Stream rng(b.sweep_seed, 0);
    std::vector<LemmaPoint> pts;
    for (std::uint64_t i = 0; i < b.configs; ++i) {
        const double x = b.x_min * std::exp(rng.uniform() * std::log(b.x_max / b.x_min));
        const double T = b.T_min + (b.T_max - b.T_min) * rng.uniform();
        const double slope = b.slope_min + (b.slope_max - b.slope_min) * rng.uniform();
        pts.push_back({x, T, slope});
    }
    pts.insert(pts.end(), b.extra.begin(), b.extra.end());
    return pts;
}

inline CommandOutput cmd_lemma(const ExperimentConfig& cfg) {
    if (!cfg.claim) throw ConfigError("model.claim", "lemma needs a claim law");
    if (!cfg.interarrival) throw ConfigError("model.interarrival", "lemma needs an interarrival law");
    const RenewalSpec spec(*cfg.interarrival);
    CommandOutput out;
    auto& t = out.table;
    t.command = "lemma";
    t.columns = {"index", "x", "T", "slope", "n_paths", "lhs", "se", "rhs", "ratio", "renewal_mean", "holds"};
    const auto pts = lemma_sweep_points(cfg.lemma);
    std::size_t violations = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        const std::string path = i < cfg.lemma.configs ? "lemma" : "lemma.extra[" + std::to_string(i - cfg.lemma.configs) + "]";
        const auto r = detail::at_path(path, [&] {
            return lemma_upper_check(spec, *cfg.claim, p.x, p.T, p.slope, cfg.lemma.n_paths, cfg.run.seed + i,
                                     cfg.run.workers);
        });
        if (!r.holds()) ++violations;
        t.add({static_cast<std::int64_t>(i), p.x, p.T, p.slope, static_cast<std::int64_t>(cfg.lemma.n_paths), r.lhs,
               r.se, r.rhs, r.ratio(), r.renewal_mean, std::string(r.holds() ? "yes" : "no")});
    }
    t.summary.push_back(std::to_string(pts.size()) + " configurations, " + std::to_string(violations) +
                        " violations of lhs <= rhs + 3 se");
    if (violations) out.exit_code = kExitCheckFailed;
    return out;
}

// ------------------------------------------------------------------ helpers

inline std::string command_names() { return "dist-check, approx, compare, limitlaw, lemma"; }

inline CommandOutput run_command(const std::string& name, const ExperimentConfig& cfg,
                                 std::vector<TraceRow>* trace = nullptr) {
    if (name == "dist-check") return cmd_dist_check(cfg);
    if (name == "approx") return cmd_approx(cfg);
    if (name == "compare") return cmd_compare(cfg, trace);
    if (name == "limitlaw") return cmd_limitlaw(cfg);
    if (name == "lemma") return cmd_lemma(cfg);
    throw ConfigError("command", "unknown command '" + name + "' (" + command_names() + ")");
}

/// Map an in-flight exception to the documented exit code.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const UnsupportedMethodError*>(&e))
        return kExitConfig;
    return kExitNumerical;
}

inline Table trace_table(const std::vector<TraceRow>& rows) {
    Table t;
    t.command = "trace";
    t.columns = {"path_id", "event_time", "surplus", "b1", "b2", "event_kind"};
    for (const auto& r : rows)
        t.add({static_cast<std::int64_t>(r.path_id), r.event_time, r.surplus, r.b1, r.b2,
               std::string(trace_kind_name(r.kind))});
    return t;
}

}  // namespace ruin2d
