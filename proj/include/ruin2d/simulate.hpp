#pragma once

// Event-driven simulation of the aggregate claim process S_t against the two
// premium lines, and crude Monte Carlo estimators of the ruin probabilities
//   psi_min(T) = P{ S_t > min(b1(t), b2(t)) for some t <= T }
//   psi_max(T) = P{ S_t > max(b1(t), b2(t)) for some t <= T }.
// Premiums accrue continuously and claims are the only jumps, so both
// envelopes can only be crossed at claim epochs.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ruin2d/dist.hpp"
#include "ruin2d/error.hpp"
#include "ruin2d/model.hpp"
#include "ruin2d/parallel.hpp"
#include "ruin2d/rng.hpp"

namespace ruin2d {

struct Event {
    double interarrival;
    double claim;
};

/// Draws (interarrival, claim) pairs from a path's own stream, interarrival first.
class RandomEventSource {
public:
    RandomEventSource(const ClaimDistribution& claim, const ClaimDistribution& interarrival, Stream stream)
        : claim_(&claim), interarrival_(&interarrival), stream_(stream) {}

    Event next() {
        const double tau = sample(*interarrival_, stream_);
        const double sigma = sample(*claim_, stream_);
        return {tau, sigma};
    }

private:
    const ClaimDistribution* claim_;
    const ClaimDistribution* interarrival_;
    Stream stream_;
};

/// Replays fixed arrival epochs and claim sizes; no arrivals after the script ends.
class ScriptedEventSource {
public:
    /// `arrivals` holds (absolute arrival time, claim size) in increasing time order.
    explicit ScriptedEventSource(std::vector<std::pair<double, double>> arrivals) : arrivals_(std::move(arrivals)) {}

    Event next() {
        if (next_ >= arrivals_.size()) return {std::numeric_limits<double>::infinity(), 0.0};
        const auto [time, claim] = arrivals_[next_++];
        const double gap = time - last_;
        last_ = time;
        return {gap, claim};
    }

private:
    std::vector<std::pair<double, double>> arrivals_;
    std::size_t next_ = 0;
    double last_ = 0.0;
};

struct PathOutcome {
    std::optional<double> tau_min;
    std::optional<double> tau_max;
    /// S at the ruin epoch minus the crossed envelope; strictly positive.
    std::optional<double> overshoot_min;
    std::optional<double> overshoot_max;
    std::uint64_t claims_count = 0;
    /// 1-based index of the claim that caused each ruin.
    std::optional<std::uint64_t> ruin_claim_index_min;
    std::optional<std::uint64_t> ruin_claim_index_max;
};

enum class TraceKind { claim, ruin_min, ruin_max };

inline const char* trace_kind_name(TraceKind k) {
    switch (k) {
        case TraceKind::claim: return "claim";
        case TraceKind::ruin_min: return "ruin_min";
        case TraceKind::ruin_max: return "ruin_max";
    }
    return "?";
}

/// One trace row; `surplus` is the aggregate claim amount S at the event.
struct TraceRow {
    std::uint64_t path_id;
    double event_time;
    double surplus;
    double b1;
    double b2;
    TraceKind kind;
};

inline constexpr std::uint64_t kDefaultEventCap = 10'000'000;

/// Simulate one path up to `horizon` (arrivals at exactly `horizon` count).
/// Stops early once both envelopes have been crossed.
template <class Source>
PathOutcome simulate_path(const RiskModel& model, double horizon, Source& source,
                          std::vector<TraceRow>* trace = nullptr, std::uint64_t path_id = 0,
                          std::uint64_t event_cap = kDefaultEventCap) {
    if (!(horizon > 0.0)) throw DomainError("simulate_path: horizon must be > 0");
    PathOutcome out;
    double t = 0.0;
    double s = 0.0;
    for (;;) {
        const Event ev = source.next();
        t += ev.interarrival;
        if (!(t <= horizon)) break;
        s += ev.claim;
        ++out.claims_count;
        if (out.claims_count > event_cap)
            throw PartialResultError("simulate_path: per-path event cap exceeded", 0);

        const double b1 = model.b1(t);
        const double b2 = model.b2(t);
        const double lo = std::min(b1, b2);
        const double hi = std::max(b1, b2);
        if (trace) trace->push_back({path_id, t, s, b1, b2, TraceKind::claim});
        if (!out.tau_min && s > lo) {
            out.tau_min = t;
            out.overshoot_min = s - lo;
            out.ruin_claim_index_min = out.claims_count;
            if (trace) trace->push_back({path_id, t, s, b1, b2, TraceKind::ruin_min});
        }
        if (s > hi) {
            out.tau_max = t;
            out.overshoot_max = s - hi;
            out.ruin_claim_index_max = out.claims_count;
            if (trace) trace->push_back({path_id, t, s, b1, b2, TraceKind::ruin_max});
            break;
        }
    }
    return out;
}

/// Convenience overload: path `path_id` of a run seeded with `seed`.
inline PathOutcome simulate_path(const RiskModel& model, double horizon, std::uint64_t seed, std::uint64_t path_id,
                                 std::vector<TraceRow>* trace = nullptr) {
    RandomEventSource src(model.claim(), model.interarrival(), Stream(seed, path_id));
    return simulate_path(model, horizon, src, trace, path_id);
}

/// First crossing time of the single line x + p t, or nullopt.
template <class Source>
std::optional<double> simulate_one_line(double x, double p, double horizon, Source& source,
                                        std::uint64_t event_cap = kDefaultEventCap) {
    double t = 0.0;
    double s = 0.0;
    std::uint64_t n = 0;
    for (;;) {
        const Event ev = source.next();
        t += ev.interarrival;
        if (!(t <= horizon)) return std::nullopt;
        s += ev.claim;
        if (++n > event_cap) throw PartialResultError("simulate_one_line: per-path event cap exceeded", 0);
        if (s > x + p * t) return t;
    }
}

struct RuinEstimate {
    double psi_min_hat = 0.0;
    double psi_max_hat = 0.0;
    double se_min = 0.0;
    double se_max = 0.0;
    std::uint64_t n_paths = 0;
    std::uint64_t ruined_min = 0;
    std::uint64_t ruined_max = 0;
    std::uint64_t total_events = 0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    double wall_time = 0.0;
};

struct EstimateOptions {
    unsigned workers = 1;
    /// 0 means unlimited.
    std::uint64_t max_total_events = 0;
    std::uint64_t event_cap_per_path = kDefaultEventCap;
    std::uint64_t chunk = 4096;
};

/// Binomial standard error sqrt(p(1-p)/n).
inline double binomial_se(double p, std::uint64_t n) {
    return n == 0 ? 0.0 : std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

namespace detail {

struct ChunkCounts {
    std::uint64_t min = 0;
    std::uint64_t max = 0;
    std::uint64_t events = 0;
};

template <class PathFn>
RuinEstimate run_estimator(std::uint64_t n_paths, double horizon, std::uint64_t seed, const EstimateOptions& opt,
                           PathFn&& path_fn) {
    if (n_paths < 1000) throw DomainError("estimate_ruin: n_paths must be >= 1000");
    if (!(horizon > 0.0)) throw DomainError("estimate_ruin: horizon must be > 0");
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t n_chunks = (n_paths + opt.chunk - 1) / opt.chunk;
    std::vector<ChunkCounts> counts(n_chunks);
    std::atomic<std::uint64_t> events{0};
    std::atomic<std::uint64_t> completed{0};

    for_each_chunk(n_paths, opt.chunk, opt.workers, [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
        ChunkCounts local;
        for (std::uint64_t i = begin; i < end; ++i) path_fn(i, local);
        counts[c] = local;
        const std::uint64_t total = events.fetch_add(local.events) + local.events;
        if (opt.max_total_events != 0 && total > opt.max_total_events)
            throw PartialResultError("estimate_ruin: total event cap exceeded", completed.load());
        completed.fetch_add(end - begin);
    });

    RuinEstimate est;
    for (const auto& c : counts) {
        est.ruined_min += c.min;
        est.ruined_max += c.max;
        est.total_events += c.events;
    }
    est.n_paths = n_paths;
    est.horizon = horizon;
    est.seed = seed;
    est.psi_min_hat = static_cast<double>(est.ruined_min) / static_cast<double>(n_paths);
    est.psi_max_hat = static_cast<double>(est.ruined_max) / static_cast<double>(n_paths);
    est.se_min = binomial_se(est.psi_min_hat, n_paths);
    est.se_max = binomial_se(est.psi_max_hat, n_paths);
    est.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return est;
}

}  // namespace detail

/// Crude Monte Carlo estimate of (psi_min, psi_max) on [0, horizon].
/// Path i always uses Stream(seed, i): the result is identical for any worker count.
inline RuinEstimate estimate_ruin(const RiskModel& model, double horizon, std::uint64_t n_paths, std::uint64_t seed,
                                  const EstimateOptions& opt = {}) {
    return detail::run_estimator(n_paths, horizon, seed, opt, [&](std::uint64_t i, detail::ChunkCounts& local) {
        RandomEventSource src(model.claim(), model.interarrival(), Stream(seed, i));
        const PathOutcome out = simulate_path(model, horizon, src, nullptr, i, opt.event_cap_per_path);
        local.min += out.tau_min.has_value();
        local.max += out.tau_max.has_value();
        local.events += out.claims_count;
    });
}

/// Ruin probability against the single line x + p t, on the same streams as estimate_ruin.
/// The result is reported in psi_min_hat (psi_max_hat duplicates it).
inline RuinEstimate estimate_one_line_ruin(const ClaimDistribution& claim, const ClaimDistribution& interarrival,
                                           double x, double p, double horizon, std::uint64_t n_paths,
                                           std::uint64_t seed, const EstimateOptions& opt = {}) {
    auto est = detail::run_estimator(n_paths, horizon, seed, opt, [&](std::uint64_t i, detail::ChunkCounts& local) {
        RandomEventSource src(claim, interarrival, Stream(seed, i));
        const bool ruined = simulate_one_line(x, p, horizon, src, opt.event_cap_per_path).has_value();
        local.min += ruined;
        local.max += ruined;
    });
    return est;
}

/// Trace rows for paths 0..n_paths-1 of a run seeded with `seed`.
inline std::vector<TraceRow> trace_paths(const RiskModel& model, double horizon, std::uint64_t seed,
                                         std::uint64_t n_paths) {
    std::vector<TraceRow> rows;
    for (std::uint64_t i = 0; i < n_paths; ++i) simulate_path(model, horizon, seed, i, &rows);
    return rows;
}

struct RuinSample {
    std::uint64_t path_id;
    double tau_min;
    double overshoot_min;
    std::optional<double> tau_max;
    std::optional<double> overshoot_max;
};

struct ConditionalSample {
    /// Paths ruined in the min sense, in path-index order.
    std::vector<RuinSample> samples;
    std::uint64_t attempts = 0;
    std::uint64_t ruined_min = 0;
    std::uint64_t ruined_max = 0;

    double psi_min_hat() const { return attempts ? static_cast<double>(ruined_min) / attempts : 0.0; }
    double psi_max_hat() const { return attempts ? static_cast<double>(ruined_max) / attempts : 0.0; }
};

struct ConditionalOptions {
    unsigned workers = 1;
    /// Paths per batch; the stopping decision is taken only at batch boundaries.
    std::uint64_t batch = 1 << 16;
    /// If this many paths yield fewer than n_target/10 ruins, give up.
    std::uint64_t guard_paths = 100'000'000;
    std::uint64_t max_paths = 1'000'000'000;
    /// Also require n_target paths ruined in the max sense.
    bool target_max_too = false;
};

/// Simulate paths in batches until at least n_target paths are ruined (min sense).
inline ConditionalSample conditional_ruin_sample(const RiskModel& model, double horizon, std::uint64_t n_target,
                                                 std::uint64_t seed, const ConditionalOptions& opt = {}) {
    if (!(horizon > 0.0)) throw DomainError("conditional_ruin_sample: horizon must be > 0");
    if (n_target == 0) throw DomainError("conditional_ruin_sample: n_target must be > 0");
    ConditionalSample result;
    const std::uint64_t chunk = std::max<std::uint64_t>(1, std::min<std::uint64_t>(opt.batch, 4096));

    const auto done = [&] {
        return result.ruined_min >= n_target && (!opt.target_max_too || result.ruined_max >= n_target);
    };
    while (!done()) {
        if (result.attempts >= opt.guard_paths && result.ruined_min < n_target / 10)
            throw TooRareError("conditional_ruin_sample: ruin too rare (" + std::to_string(result.ruined_min) +
                                   " ruins in " + std::to_string(result.attempts) +
                                   " paths); use a smaller capital x",
                               result.attempts, result.ruined_min);
        if (result.attempts >= opt.max_paths)
            throw PartialResultError("conditional_ruin_sample: path cap reached before n_target ruins",
                                     result.attempts);

        const std::uint64_t base = result.attempts;
        const std::uint64_t n = opt.batch;
        const std::uint64_t n_chunks = (n + chunk - 1) / chunk;
        std::vector<std::vector<RuinSample>> per_chunk(n_chunks);
        std::vector<std::uint64_t> max_counts(n_chunks, 0);
        for_each_chunk(n, chunk, opt.workers, [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
            for (std::uint64_t j = begin; j < end; ++j) {
                const std::uint64_t id = base + j;
                RandomEventSource src(model.claim(), model.interarrival(), Stream(seed, id));
                const PathOutcome out = simulate_path(model, horizon, src, nullptr, id);
                if (out.tau_max) ++max_counts[c];
                if (out.tau_min)
                    per_chunk[c].push_back({id, *out.tau_min, *out.overshoot_min, out.tau_max, out.overshoot_max});
            }
        });
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
            result.ruined_min += per_chunk[c].size();
            result.ruined_max += max_counts[c];
            result.samples.insert(result.samples.end(), per_chunk[c].begin(), per_chunk[c].end());
        }
        result.attempts += n;
    }
    return result;
}

}  // namespace ruin2d
