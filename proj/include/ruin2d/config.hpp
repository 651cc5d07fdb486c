#pragma once

// Experiment configuration: a JSON document with `model`, `run`, `output`
// and optional per-command blocks. Every validation failure is reported as a
// ConfigError naming the offending field path (e.g. "model.claim.family").

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dist.hpp"
#include "error.hpp"
#include "model.hpp"

namespace ruin2d {

using nlohmann::json;

struct HorizonRule {
    enum class Kind { fixed, proportional } kind = Kind::proportional;
    double value = 1.0;  // T for fixed, c for T = c * x

    double horizon(double x) const { return kind == Kind::fixed ? value : value * x; }
};

struct CapitalPoint {
    double x1;
    double x2;
};

struct ModelBlock {
    ClaimDistribution claim = ClaimDistribution::lomax(2, 1);
    ClaimDistribution interarrival = ClaimDistribution::exponential(1);
    double p1 = 0.0;
    double p2 = 0.0;
    std::optional<double> a;
    std::vector<double> x_grid;
    std::vector<CapitalPoint> capitals;
    bool degenerate = false;

    /// One model per grid point; x2 is the reported "x".
    std::vector<RiskModel> models() const {
        std::vector<RiskModel> out;
        if (a)
            for (double x : x_grid) out.push_back(RiskModel::split(claim, interarrival, p1, p2, *a, x, degenerate));
        else
            for (const auto& c : capitals)
                out.push_back(RiskModel::create(claim, interarrival, p1, p2, c.x1, c.x2, degenerate));
        return out;
    }
};

struct RunBlock {
    HorizonRule horizon;
    std::uint64_t n_paths = 100'000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::uint64_t max_total_events = 0;
    std::uint64_t renewal_paths = 100'000;
};

struct OutputBlock {
    std::string format = "csv";
    std::string path = "-";
    bool trace = false;
    std::string trace_path;
    std::uint64_t trace_paths = 10;
};

struct DistCheckBlock {
    std::vector<ClaimDistribution> families;
    std::vector<double> x_grid{10.0, 100.0, 1000.0, 10000.0};
};

struct LimitLawBlock {
    std::uint64_t n_target = 20'000;
    std::vector<double> y_grid;
    std::vector<double> v_grid{0.0, 0.5, 1.0};
    std::uint64_t batch = 65'536;
};

struct LemmaPoint {
    double x, T, slope;
};

struct LemmaBlock {
    std::uint64_t configs = 50;
    std::uint64_t n_paths = 2000;
    std::uint64_t sweep_seed = 2718;
    double x_min = 1.0, x_max = 1000.0;
    double T_min = 1.0, T_max = 200.0;
    double slope_min = 0.1, slope_max = 5.0;
    std::vector<LemmaPoint> extra;
};

struct ExperimentConfig {
    std::optional<ModelBlock> model;
    // Set whenever the corresponding model sub-block parses (dist-check and
    // lemma need only these, not a full risk model).
    std::optional<ClaimDistribution> claim;
    std::optional<ClaimDistribution> interarrival;
    RunBlock run;
    OutputBlock output;
    DistCheckBlock dist_check;
    LimitLawBlock limitlaw;
    LemmaBlock lemma;

    const ModelBlock& require_model() const {
        if (!model) throw ConfigError("model", "block is required for this command");
        return *model;
    }
};

namespace detail {

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline const json& field(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(join(path, key), "missing required field");
    return obj.at(key);
}

inline void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number, got " + std::string(j.type_name()));
    return j.get<double>();
}

inline std::uint64_t as_count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
        throw ConfigError(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

inline bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
    return j.get<bool>();
}

inline std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

inline std::vector<double> as_grid(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(join(path, key), "unknown field");
    }
}

/// Run a constructor and re-label its DomainError with the field path.
template <class F>
auto at_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace detail

/// `{family, params}` record. Families and parameter keys:
///   lomax {alpha, beta}, lognormal {mu, sigma}, weibull {shape, scale},
///   exponential {rate}, deterministic {value}.
inline ClaimDistribution parse_distribution(const json& j, const std::string& path) {
    using namespace detail;
    require_object(j, path);
    reject_unknown(j, path, {"family", "params"});
    const std::string fam = as_string(field(j, path, "family"), join(path, "family"));
    const json& params = field(j, path, "params");
    const std::string ppath = join(path, "params");
    require_object(params, ppath);
    const auto num = [&](const char* key) { return as_number(field(params, ppath, key), join(ppath, key)); };
    const auto keys = [&](std::initializer_list<const char*> k) { reject_unknown(params, ppath, k); };
    return at_path(path, [&] {
        if (fam == "lomax") {
            keys({"alpha", "beta"});
            return ClaimDistribution::lomax(num("alpha"), num("beta"));
        }
        if (fam == "lognormal") {
            keys({"mu", "sigma"});
            return ClaimDistribution::lognormal(num("mu"), num("sigma"));
        }
        if (fam == "weibull") {
            keys({"shape", "scale"});
            return ClaimDistribution::weibull(num("shape"), num("scale"));
        }
        if (fam == "exponential") {
            keys({"rate"});
            return ClaimDistribution::exponential(num("rate"));
        }
        if (fam == "deterministic") {
            keys({"value"});
            return ClaimDistribution::deterministic(num("value"));
        }
        throw ConfigError(join(path, "family"),
                          "unknown family '" + fam + "' (lomax, lognormal, weibull, exponential, deterministic)");
    });
}

inline ModelBlock parse_model(const json& j) {
    using namespace detail;
    const std::string path = "model";
    require_object(j, path);
    reject_unknown(j, path, {"claim", "interarrival", "p1", "p2", "a", "x_grid", "capitals", "degenerate"});
    ModelBlock m;
    m.claim = parse_distribution(field(j, path, "claim"), "model.claim");
    m.interarrival = parse_distribution(field(j, path, "interarrival"), "model.interarrival");
    m.p1 = as_number(field(j, path, "p1"), "model.p1");
    m.p2 = as_number(field(j, path, "p2"), "model.p2");
    if (j.contains("degenerate")) m.degenerate = as_bool(j["degenerate"], "model.degenerate");

    const bool split = j.contains("a") || j.contains("x_grid");
    if (split && j.contains("capitals"))
        throw ConfigError("model.capitals", "give either (a, x_grid) or capitals, not both");
    if (split) {
        m.a = as_number(field(j, path, "a"), "model.a");
        m.x_grid = as_grid(field(j, path, "x_grid"), "model.x_grid");
    } else {
        const json& caps = field(j, path, "capitals");
        if (!caps.is_array() || caps.empty()) throw ConfigError("model.capitals", "expected a non-empty array");
        for (std::size_t i = 0; i < caps.size(); ++i) {
            const std::string cp = "model.capitals[" + std::to_string(i) + "]";
            require_object(caps[i], cp);
            reject_unknown(caps[i], cp, {"x1", "x2"});
            m.capitals.push_back({as_number(field(caps[i], cp, "x1"), cp + ".x1"),
                                  as_number(field(caps[i], cp, "x2"), cp + ".x2")});
        }
    }
    // Validate every grid point against the model invariants now.
    const std::size_t n = m.a ? m.x_grid.size() : m.capitals.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::string gp = m.a ? "model.x_grid[" + std::to_string(i) + "]" : "model.capitals[" + std::to_string(i) + "]";
        at_path(gp, [&] {
            return m.a ? RiskModel::split(m.claim, m.interarrival, m.p1, m.p2, *m.a, m.x_grid[i], m.degenerate)
                       : RiskModel::create(m.claim, m.interarrival, m.p1, m.p2, m.capitals[i].x1, m.capitals[i].x2,
                                           m.degenerate);
        });
    }
    return m;
}

inline RunBlock parse_run(const json& j) {
    using namespace detail;
    require_object(j, "run");
    reject_unknown(j, "run", {"horizon", "n_paths", "seed", "workers", "max_total_events", "renewal_paths"});
    RunBlock r;
    if (j.contains("horizon")) {
        const json& h = j["horizon"];
        require_object(h, "run.horizon");
        reject_unknown(h, "run.horizon", {"rule", "T", "c"});
        const std::string rule = as_string(field(h, "run.horizon", "rule"), "run.horizon.rule");
        if (rule == "fixed") {
            r.horizon = {HorizonRule::Kind::fixed, as_number(field(h, "run.horizon", "T"), "run.horizon.T")};
            if (!(r.horizon.value > 0.0)) throw ConfigError("run.horizon.T", "must be > 0");
        } else if (rule == "proportional") {
            r.horizon = {HorizonRule::Kind::proportional, as_number(field(h, "run.horizon", "c"), "run.horizon.c")};
            if (!(r.horizon.value > 0.0)) throw ConfigError("run.horizon.c", "must be > 0");
        } else {
            throw ConfigError("run.horizon.rule", "expected 'fixed' or 'proportional', got '" + rule + "'");
        }
    }
    if (j.contains("n_paths")) r.n_paths = as_count(j["n_paths"], "run.n_paths");
    if (j.contains("seed")) r.seed = as_count(j["seed"], "run.seed");
    if (j.contains("workers")) r.workers = static_cast<unsigned>(as_count(j["workers"], "run.workers"));
    if (j.contains("max_total_events")) r.max_total_events = as_count(j["max_total_events"], "run.max_total_events");
    if (j.contains("renewal_paths")) r.renewal_paths = as_count(j["renewal_paths"], "run.renewal_paths");
    if (r.workers == 0) throw ConfigError("run.workers", "must be >= 1");
    return r;
}

inline OutputBlock parse_output(const json& j) {
    using namespace detail;
    require_object(j, "output");
    reject_unknown(j, "output", {"format", "path", "trace", "trace_path", "trace_paths"});
    OutputBlock o;
    if (j.contains("format")) o.format = as_string(j["format"], "output.format");
    if (o.format != "csv" && o.format != "json")
        throw ConfigError("output.format", "expected 'csv' or 'json', got '" + o.format + "'");
    if (j.contains("path")) o.path = as_string(j["path"], "output.path");
    if (j.contains("trace")) o.trace = as_bool(j["trace"], "output.trace");
    if (j.contains("trace_path")) o.trace_path = as_string(j["trace_path"], "output.trace_path");
    if (j.contains("trace_paths")) o.trace_paths = as_count(j["trace_paths"], "output.trace_paths");
    return o;
}

inline ExperimentConfig parse_config(const json& root) {
    using namespace detail;
    require_object(root, "");
    reject_unknown(root, "", {"model", "run", "output", "dist_check", "limitlaw", "lemma"});
    ExperimentConfig cfg;
    if (root.contains("model")) {
        const json& m = root["model"];
        require_object(m, "model");
        if (m.contains("p1") || m.contains("p2")) {
            cfg.model = parse_model(m);
            cfg.claim = cfg.model->claim;
            cfg.interarrival = cfg.model->interarrival;
        } else {
            reject_unknown(m, "model", {"claim", "interarrival"});
            if (m.contains("claim")) cfg.claim = parse_distribution(m["claim"], "model.claim");
            if (m.contains("interarrival"))
                cfg.interarrival = parse_distribution(m["interarrival"], "model.interarrival");
        }
    }
    if (root.contains("run")) cfg.run = parse_run(root["run"]);
    if (root.contains("output")) cfg.output = parse_output(root["output"]);

    if (root.contains("dist_check")) {
        const json& d = root["dist_check"];
        require_object(d, "dist_check");
        reject_unknown(d, "dist_check", {"families", "x_grid"});
        if (d.contains("families")) {
            const json& f = d["families"];
            if (!f.is_array() || f.empty()) throw ConfigError("dist_check.families", "expected a non-empty array");
            for (std::size_t i = 0; i < f.size(); ++i)
                cfg.dist_check.families.push_back(
                    parse_distribution(f[i], "dist_check.families[" + std::to_string(i) + "]"));
        }
        if (d.contains("x_grid")) cfg.dist_check.x_grid = as_grid(d["x_grid"], "dist_check.x_grid");
    }
    if (root.contains("limitlaw")) {
        const json& l = root["limitlaw"];
        require_object(l, "limitlaw");
        reject_unknown(l, "limitlaw", {"n_target", "y_grid", "v_grid", "batch"});
        if (l.contains("n_target")) cfg.limitlaw.n_target = as_count(l["n_target"], "limitlaw.n_target");
        if (l.contains("y_grid")) cfg.limitlaw.y_grid = as_grid(l["y_grid"], "limitlaw.y_grid");
        if (l.contains("v_grid")) cfg.limitlaw.v_grid = as_grid(l["v_grid"], "limitlaw.v_grid");
        if (l.contains("batch")) cfg.limitlaw.batch = as_count(l["batch"], "limitlaw.batch");
        if (cfg.limitlaw.n_target == 0) throw ConfigError("limitlaw.n_target", "must be >= 1");
        if (cfg.limitlaw.batch == 0) throw ConfigError("limitlaw.batch", "must be >= 1");
    }
    if (cfg.limitlaw.y_grid.empty())
        for (int k = 0; k <= 20; ++k) cfg.limitlaw.y_grid.push_back(0.1 * k);

    if (root.contains("lemma")) {
        const json& l = root["lemma"];
        auto& b = cfg.lemma;
        require_object(l, "lemma");
        reject_unknown(l, "lemma", {"configs", "n_paths", "sweep_seed", "x_range", "T_range", "slope_range", "extra"});
        if (l.contains("configs")) b.configs = as_count(l["configs"], "lemma.configs");
        if (l.contains("n_paths")) b.n_paths = as_count(l["n_paths"], "lemma.n_paths");
        if (l.contains("sweep_seed")) b.sweep_seed = as_count(l["sweep_seed"], "lemma.sweep_seed");
        const auto range = [&](const char* key, double& lo, double& hi, bool positive) {
            if (!l.contains(key)) return;
            const std::string p = std::string("lemma.") + key;
            const auto g = as_grid(l[key], p);
            if (g.size() != 2 || !(g[0] <= g[1]) || (positive ? !(g[0] > 0.0) : !(g[0] >= 0.0)))
                throw ConfigError(p, positive ? "expected [lo, hi] with 0 < lo <= hi" : "expected [lo, hi] with 0 <= lo <= hi");
            lo = g[0];
            hi = g[1];
        };
        range("x_range", b.x_min, b.x_max, true);
        range("T_range", b.T_min, b.T_max, true);
        range("slope_range", b.slope_min, b.slope_max, false);
        if (l.contains("extra")) {
            const json& e = l["extra"];
            if (!e.is_array()) throw ConfigError("lemma.extra", "expected an array");
            for (std::size_t i = 0; i < e.size(); ++i) {
                const std::string p = "lemma.extra[" + std::to_string(i) + "]";
                require_object(e[i], p);
                reject_unknown(e[i], p, {"x", "T", "slope"});
                b.extra.push_back({as_number(field(e[i], p, "x"), p + ".x"), as_number(field(e[i], p, "T"), p + ".T"),
                                   as_number(field(e[i], p, "slope"), p + ".slope")});
            }
        }
        if (b.n_paths < 1000) throw ConfigError("lemma.n_paths", "must be >= 1000");
    }
    return cfg;
}

/// Parse JSON text; syntax errors carry line and column.
inline ExperimentConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<syntax>", e.what());
    }
    return parse_config(root);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// RUIN2D_OUT and RUIN2D_WORKERS override the output path and worker count.
inline void apply_environment(ExperimentConfig& cfg) {
    if (const char* out = std::getenv("RUIN2D_OUT"); out && *out) cfg.output.path = out;
    if (const char* w = std::getenv("RUIN2D_WORKERS"); w && *w) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(w, &end, 10);
        if (*end != '\0' || v == 0) throw ConfigError("RUIN2D_WORKERS", "expected a positive integer");
        cfg.run.workers = static_cast<unsigned>(v);
    }
}

}  // namespace ruin2d
