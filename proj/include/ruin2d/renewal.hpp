#pragma once

// Renewal-process utilities: the renewal function E N_T and a Monte Carlo
// check of the Jensen-type bound
//   E int_0^{N_T} tail(x + z(t)) dt <= int_0^{E N_T} tail(x + z(t)) dt
// for linear z(t) = slope * t.

#include <cmath>
#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "ruin2d/dist.hpp"
#include "ruin2d/error.hpp"
#include "ruin2d/parallel.hpp"
#include "ruin2d/rng.hpp"

namespace ruin2d {

struct RenewalSpec {
    ClaimDistribution interarrival;

    explicit RenewalSpec(ClaimDistribution tau) : interarrival(std::move(tau)) {
        const double m = mean(interarrival);
        if (!(std::isfinite(m) && m > 0.0)) throw DomainError("renewal: mean interarrival must be finite and > 0");
    }

    double mean_interarrival() const { return mean(interarrival); }
};

struct ExactMethod {};

struct SimulateMethod {
    std::uint64_t n_paths;
    std::uint64_t seed;
    unsigned workers = 1;
};

using RenewalMethod = std::variant<ExactMethod, SimulateMethod>;

struct RenewalMean {
    double value;
    /// Zero for the exact method.
    double se;
};

/// N_T = max{n : t_n <= T}: arrivals exactly at T count.
inline std::uint64_t count_arrivals(const ClaimDistribution& interarrival, double T, Stream& rng,
                                    std::uint64_t event_cap = 10'000'000) {
    double t = 0.0;
    std::uint64_t n = 0;
    for (;;) {
        t += sample(interarrival, rng);
        if (!(t <= T)) return n;
        if (++n > event_cap) throw PartialResultError("count_arrivals: event cap exceeded", 0);
    }
}

inline bool has_exact_renewal_mean(const RenewalSpec& spec) {
    const Family f = spec.interarrival.family();
    return f == Family::exponential || f == Family::deterministic;
}

/// Counts of N_T over paths 0..n-1 of Stream(seed, .); index = N_T.
inline std::vector<std::uint64_t> renewal_count_histogram(const RenewalSpec& spec, double T, std::uint64_t n_paths,
                                                          std::uint64_t seed, unsigned workers = 1) {
    constexpr std::uint64_t chunk = 4096;
    const std::uint64_t n_chunks = (n_paths + chunk - 1) / chunk;
    std::vector<std::vector<std::uint64_t>> parts(n_chunks);
    for_each_chunk(n_paths, chunk, workers, [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
        auto& h = parts[c];
        for (std::uint64_t i = begin; i < end; ++i) {
            Stream rng(seed, i);
            const std::uint64_t k = count_arrivals(spec.interarrival, T, rng);
            if (h.size() <= k) h.resize(k + 1, 0);
            ++h[k];
        }
    });
    std::vector<std::uint64_t> hist;
    for (const auto& h : parts) {
        if (hist.size() < h.size()) hist.resize(h.size(), 0);
        for (std::size_t k = 0; k < h.size(); ++k) hist[k] += h[k];
    }
    return hist;
}

/// E N_T, exactly (Exponential: rate*T, Deterministic: floor(T/tau)) or by simulation.
inline RenewalMean renewal_mean(const RenewalSpec& spec, double T, const RenewalMethod& method) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("renewal_mean: T must be finite and >= 0");
    if (std::holds_alternative<ExactMethod>(method)) {
        if (const auto* e = spec.interarrival.get_if<Exponential>()) return {e->rate * T, 0.0};
        if (const auto* d = spec.interarrival.get_if<Deterministic>()) return {std::floor(T / d->value), 0.0};
        throw UnsupportedMethodError("renewal_mean: exact method unavailable for " + spec.interarrival.describe());
    }
    const auto& sim = std::get<SimulateMethod>(method);
    if (sim.n_paths < 2) throw DomainError("renewal_mean: simulate needs at least 2 paths");
    const auto hist = renewal_count_histogram(spec, T, sim.n_paths, sim.seed, sim.workers);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t k = 0; k < hist.size(); ++k) {
        const double w = static_cast<double>(hist[k]);
        sum += w * k;
        sum2 += w * k * static_cast<double>(k);
    }
    const double n = static_cast<double>(sim.n_paths);
    const double m = sum / n;
    const double var = std::max(sum2 / n - m * m, 0.0) * n / (n - 1.0);
    return {m, std::sqrt(var / n)};
}

struct LemmaCheck {
    double lhs;
    double se;
    double rhs;
    /// E N_T used for the right-hand side.
    double renewal_mean;

    bool holds() const { return lhs <= rhs + 3.0 * se; }
    double ratio() const { return lhs / rhs; }
};

/// lhs = E int_0^{N_T} tail(x + slope t) dt by Monte Carlo over N_T;
/// rhs = int_0^{E N_T} tail(x + slope t) dt by line integration.
/// E N_T is exact where available, otherwise simulated on 10n independent paths.
inline LemmaCheck lemma_upper_check(const RenewalSpec& spec, const ClaimDistribution& d, double x, double T,
                                    double slope, std::uint64_t n_paths, std::uint64_t seed, unsigned workers = 1) {
    if (!(x >= 0.0)) throw DomainError("lemma_upper_check: x must be >= 0");
    if (!(T > 0.0)) throw DomainError("lemma_upper_check: T must be > 0");
    if (!(slope >= 0.0)) throw DomainError("lemma_upper_check: slope must be >= 0");
    if (n_paths < 1000) throw DomainError("lemma_upper_check: n must be >= 1000");

    // N_T is integer-valued: evaluate the integral once per distinct count.
    const auto hist = renewal_count_histogram(spec, T, n_paths, seed, workers);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t k = 0; k < hist.size(); ++k) {
        if (hist[k] == 0) continue;
        const double g = line_integral(d, x, slope, static_cast<double>(k)).value;
        const double w = static_cast<double>(hist[k]);
        sum += w * g;
        sum2 += w * g * g;
    }
    const double n = static_cast<double>(n_paths);
    const double lhs = sum / n;
    const double var = std::max(sum2 / n - lhs * lhs, 0.0) * n / (n - 1.0);

    const double en = has_exact_renewal_mean(spec)
                          ? renewal_mean(spec, T, ExactMethod{}).value
                          : renewal_mean(spec, T, SimulateMethod{10 * n_paths, seed ^ 0x9E3779B97F4A7C15ull, workers}).value;
    const double rhs = line_integral(d, x, slope, en).value;
    return {lhs, std::sqrt(var / n), rhs, en};
}

}  // namespace ruin2d
