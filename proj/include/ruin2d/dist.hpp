#pragma once

// Heavy-tailed claim laws (and light-tailed controls) with exact tails,
// integrated tails, samplers and numerical subexponentiality diagnostics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include "ruin2d/error.hpp"
#include "ruin2d/quadrature.hpp"
#include "ruin2d/rng.hpp"

namespace ruin2d {

/// Lomax (Pareto type II): tail (1 + x/beta)^(-alpha) on (0, inf).
struct Lomax {
    double alpha;
    double beta;
};

struct Lognormal {
    double mu;
    double sigma;
};

/// Weibull with tail exp(-(x/scale)^shape); only shape in (0,1) is heavy-tailed.
struct Weibull {
    double shape;
    double scale;
};

struct Exponential {
    double rate;
};

/// Point mass at `value`; usable for deterministic interarrival spacing.
struct Deterministic {
    double value;
};

enum class Family { lomax, lognormal, weibull, exponential, deterministic };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::lomax: return "lomax";
        case Family::lognormal: return "lognormal";
        case Family::weibull: return "weibull";
        case Family::exponential: return "exponential";
        case Family::deterministic: return "deterministic";
    }
    return "?";
}

/// Immutable, validated distribution on the positive half-line.
class ClaimDistribution {
public:
    using Params = std::variant<Lomax, Lognormal, Weibull, Exponential, Deterministic>;

    static ClaimDistribution lomax(double alpha, double beta) { return ClaimDistribution(Lomax{alpha, beta}); }
    static ClaimDistribution lognormal(double mu, double sigma) { return ClaimDistribution(Lognormal{mu, sigma}); }
    static ClaimDistribution weibull(double shape, double scale) { return ClaimDistribution(Weibull{shape, scale}); }
    static ClaimDistribution exponential(double rate) { return ClaimDistribution(Exponential{rate}); }
    static ClaimDistribution deterministic(double value) { return ClaimDistribution(Deterministic{value}); }

    explicit ClaimDistribution(Params p) : params_(p) { validate(); }

    const Params& params() const noexcept { return params_; }
    Family family() const noexcept { return static_cast<Family>(params_.index()); }

    template <class T>
    const T* get_if() const noexcept { return std::get_if<T>(&params_); }

    /// True for the subexponential families (Lomax, Lognormal, Weibull with shape < 1).
    bool heavy_tailed() const noexcept {
        return family() == Family::lomax || family() == Family::lognormal || family() == Family::weibull;
    }

    std::string describe() const {
        std::ostringstream os;
        os.precision(12);
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Lomax>) os << "lomax(alpha=" << p.alpha << ", beta=" << p.beta << ")";
                if constexpr (std::is_same_v<T, Lognormal>) os << "lognormal(mu=" << p.mu << ", sigma=" << p.sigma << ")";
                if constexpr (std::is_same_v<T, Weibull>) os << "weibull(shape=" << p.shape << ", scale=" << p.scale << ")";
                if constexpr (std::is_same_v<T, Exponential>) os << "exponential(rate=" << p.rate << ")";
                if constexpr (std::is_same_v<T, Deterministic>) os << "deterministic(value=" << p.value << ")";
            },
            params_);
        return os.str();
    }

private:
    void validate() const {
        const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Lomax>) {
                    if (!(std::isfinite(p.alpha) && p.alpha > 1.0))
                        throw DomainError("lomax: alpha must be > 1 so that the mean is finite");
                    if (!positive(p.beta)) throw DomainError("lomax: beta must be > 0");
                } else if constexpr (std::is_same_v<T, Lognormal>) {
                    if (!std::isfinite(p.mu)) throw DomainError("lognormal: mu must be finite");
                    if (!positive(p.sigma)) throw DomainError("lognormal: sigma must be > 0");
                } else if constexpr (std::is_same_v<T, Weibull>) {
                    if (!(std::isfinite(p.shape) && p.shape > 0.0 && p.shape < 1.0))
                        throw DomainError("weibull: shape must lie in (0,1); shape >= 1 is not subexponential");
                    if (!positive(p.scale)) throw DomainError("weibull: scale must be > 0");
                } else if constexpr (std::is_same_v<T, Exponential>) {
                    if (!positive(p.rate)) throw DomainError("exponential: rate must be > 0");
                } else {
                    if (!positive(p.value)) throw DomainError("deterministic: value must be > 0");
                }
            },
            params_);
    }

    Params params_;
};

namespace detail {

inline void require_nonneg(double x, const char* op) {
    if (!(x >= 0.0)) throw DomainError(std::string(op) + ": argument must be >= 0");
}

// log of the standard normal upper tail, finite far beyond the underflow of erfc.
inline double log_normal_tail(double z) {
    const double direct = 0.5 * std::erfc(z / std::numbers::sqrt2);
    if (direct > 1e-300) return std::log(direct);
    const double z2 = z * z;
    const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) + 105.0 / (z2 * z2 * z2 * z2);
    return -0.5 * z2 - std::log(z * std::sqrt(2.0 * std::numbers::pi)) + std::log(series);
}

}  // namespace detail

/// Natural log of the tail; -inf where the tail vanishes.
inline double log_tail(const ClaimDistribution& d, double x) {
    detail::require_nonneg(x, "log_tail");
    return std::visit(
        [x](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Lomax>) return -p.alpha * std::log1p(x / p.beta);
            if constexpr (std::is_same_v<T, Lognormal>) {
                if (x == 0.0) return 0.0;
                return detail::log_normal_tail((std::log(x) - p.mu) / p.sigma);
            }
            if constexpr (std::is_same_v<T, Weibull>) return -std::pow(x / p.scale, p.shape);
            if constexpr (std::is_same_v<T, Exponential>) return -p.rate * x;
            if constexpr (std::is_same_v<T, Deterministic>)
                return x < p.value ? 0.0 : -std::numeric_limits<double>::infinity();
        },
        d.params());
}

/// Tail probability P(X > x).
inline double tail(const ClaimDistribution& d, double x) {
    detail::require_nonneg(x, "tail");
    if (const auto* p = d.get_if<Lognormal>()) {
        if (x == 0.0) return 1.0;
        return 0.5 * std::erfc((std::log(x) - p->mu) / (p->sigma * std::numbers::sqrt2));
    }
    return std::exp(log_tail(d, x));
}

inline double cdf(const ClaimDistribution& d, double x) {
    detail::require_nonneg(x, "cdf");
    if (const auto* p = d.get_if<Lognormal>()) {
        if (x == 0.0) return 0.0;
        return 0.5 * std::erfc(-(std::log(x) - p->mu) / (p->sigma * std::numbers::sqrt2));
    }
    if (d.family() == Family::deterministic) return 1.0 - tail(d, x);
    return -std::expm1(log_tail(d, x));
}

/// Log density; throws for the point mass.
inline double log_pdf(const ClaimDistribution& d, double x) {
    detail::require_nonneg(x, "log_pdf");
    return std::visit(
        [x](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Lomax>)
                return std::log(p.alpha / p.beta) - (p.alpha + 1.0) * std::log1p(x / p.beta);
            if constexpr (std::is_same_v<T, Lognormal>) {
                if (x == 0.0) return -std::numeric_limits<double>::infinity();
                const double z = (std::log(x) - p.mu) / p.sigma;
                return -0.5 * z * z - std::log(x * p.sigma * std::sqrt(2.0 * std::numbers::pi));
            }
            if constexpr (std::is_same_v<T, Weibull>) {
                if (x == 0.0) return std::numeric_limits<double>::infinity();
                const double r = x / p.scale;
                return std::log(p.shape / p.scale) + (p.shape - 1.0) * std::log(r) - std::pow(r, p.shape);
            }
            if constexpr (std::is_same_v<T, Exponential>) return std::log(p.rate) - p.rate * x;
            if constexpr (std::is_same_v<T, Deterministic>)
                throw DomainError("deterministic distribution has no density");
        },
        d.params());
}

inline double pdf(const ClaimDistribution& d, double x) { return std::exp(log_pdf(d, x)); }

inline double mean(const ClaimDistribution& d) {
    return std::visit(
        [](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Lomax>) return p.beta / (p.alpha - 1.0);
            if constexpr (std::is_same_v<T, Lognormal>) return std::exp(p.mu + 0.5 * p.sigma * p.sigma);
            if constexpr (std::is_same_v<T, Weibull>) return p.scale * std::tgamma(1.0 + 1.0 / p.shape);
            if constexpr (std::is_same_v<T, Exponential>) return 1.0 / p.rate;
            if constexpr (std::is_same_v<T, Deterministic>) return p.value;
        },
        d.params());
}

/// Inverse CDF F^{-1}(u) for u in (0,1).
inline double quantile(const ClaimDistribution& d, double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0,1)");
    const double log_survival = std::log1p(-u);
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Lomax>) return p.beta * std::expm1(-log_survival / p.alpha);
            if constexpr (std::is_same_v<T, Lognormal>) {
                // Invert the normal CDF by Newton on the erfc form; only used off the hot path.
                double z = 0.0;
                for (int i = 0; i < 100; ++i) {
                    const double c = 0.5 * std::erfc(-z / std::numbers::sqrt2);
                    const double dens = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
                    const double step = (c - u) / std::max(dens, 1e-300);
                    z -= std::clamp(step, -2.0, 2.0);
                    if (std::abs(step) < 1e-14) break;
                }
                return std::exp(p.mu + p.sigma * z);
            }
            if constexpr (std::is_same_v<T, Weibull>) return p.scale * std::pow(-log_survival, 1.0 / p.shape);
            if constexpr (std::is_same_v<T, Exponential>) return -log_survival / p.rate;
            if constexpr (std::is_same_v<T, Deterministic>) return p.value;
        },
        d.params());
}

/// One draw; strictly positive. Tail-inversion is used so no 1-u cancellation occurs.
inline double sample(const ClaimDistribution& d, Stream& rng) {
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Lomax>) return p.beta * std::expm1(-std::log(rng.uniform()) / p.alpha);
            if constexpr (std::is_same_v<T, Lognormal>)
                return std::max(std::exp(p.mu + p.sigma * rng.normal()), std::numeric_limits<double>::denorm_min());
            if constexpr (std::is_same_v<T, Weibull>) return p.scale * std::pow(-std::log(rng.uniform()), 1.0 / p.shape);
            if constexpr (std::is_same_v<T, Exponential>) return -std::log(rng.uniform()) / p.rate;
            if constexpr (std::is_same_v<T, Deterministic>) return p.value;
        },
        d.params());
}

/// Uncapped tail integral I(x) = int_x^inf tail(t) dt, with its natural log.
struct TailIntegral {
    double value;
    double log_value;
    double abs_error;
    bool closed_form;
};

/// Mean excess E[X - x | X > x] = I(x) / tail(x), evaluated in log space.
inline double mean_excess(const ClaimDistribution& d, double x, double* abs_error = nullptr) {
    detail::require_nonneg(x, "mean_excess");
    if (abs_error) *abs_error = 0.0;
    if (const auto* p = d.get_if<Lomax>()) return (p->beta + x) / (p->alpha - 1.0);
    if (const auto* p = d.get_if<Exponential>()) return 1.0 / p->rate;
    if (const auto* p = d.get_if<Deterministic>()) {
        if (x >= p->value) throw NumericalError("mean_excess: tail vanishes", "x beyond point mass");
        return p->value - x;
    }

    const double lt_x = log_tail(d, x);
    if (!std::isfinite(lt_x)) throw NumericalError("mean_excess: log tail underflow", "x=" + std::to_string(x));
    // Decay length for the map [0,1) -> [0,inf): reciprocal hazard at a representative point.
    const double x_ref = std::max(x, mean(d));
    double scale = std::exp(log_tail(d, x_ref) - log_pdf(d, x_ref));
    if (!std::isfinite(scale) || scale <= 0.0) scale = mean(d);
    scale = std::clamp(scale, 1e-8, 1e12);

    const auto integrand = [&](double u) { return std::exp(log_tail(d, x + u) - lt_x); };
    const auto r = quad::integrate_to_infinity(integrand, 0.0, scale, {.abs_tol = 0.0, .rel_tol = 1e-12});
    quad::require(r, "mean_excess: quadrature did not converge");
    if (abs_error) *abs_error = r.abs_error;
    return r.value;
}

inline TailIntegral tail_integral(const ClaimDistribution& d, double x) {
    detail::require_nonneg(x, "tail_integral");
    if (const auto* p = d.get_if<Lomax>()) {
        const double lv = std::log(p->beta / (p->alpha - 1.0)) + (1.0 - p->alpha) * std::log1p(x / p->beta);
        return {std::exp(lv), lv, 0.0, true};
    }
    if (const auto* p = d.get_if<Exponential>()) {
        const double lv = -p->rate * x - std::log(p->rate);
        return {std::exp(lv), lv, 0.0, true};
    }
    if (const auto* p = d.get_if<Deterministic>()) {
        const double v = std::max(p->value - x, 0.0);
        return {v, std::log(v), 0.0, true};
    }
    double err = 0.0;
    const double me = mean_excess(d, x, &err);
    const double lt = log_tail(d, x);
    const double lv = lt + std::log(me);
    return {std::exp(lv), lv, std::exp(lt) * err, false};
}

/// Integrated tail min(1, int_x^inf tail(t) dt).
inline double integrated_tail(const ClaimDistribution& d, double x) {
    return std::min(1.0, tail_integral(d, x).value);
}

enum class Method { closed_form, quadrature };

inline const char* method_name(Method m) { return m == Method::closed_form ? "closed_form" : "quadrature"; }

/// A deterministic numerical value with an error bound and the route that produced it.
struct ApproxResult {
    double value = 0.0;
    double abs_error = 0.0;
    Method method = Method::closed_form;
};

/// int_0^len tail(start + slope*t) dt for slope >= 0 and len in [0, inf].
/// Differences of tail integrals are used unless they would cancel (or hit the
/// capped region of the integrated tail); then the integrand is integrated directly.
inline ApproxResult line_integral(const ClaimDistribution& d, double start, double slope, double len) {
    detail::require_nonneg(start, "line_integral");
    if (!(slope >= 0.0)) throw DomainError("line_integral: slope must be >= 0");
    if (!(len >= 0.0)) throw DomainError("line_integral: length must be >= 0");
    if (len == 0.0) return {0.0, 0.0, Method::closed_form};
    if (slope == 0.0) {
        if (std::isinf(len)) throw DomainError("line_integral: infinite length with zero slope diverges");
        return {tail(d, start) * len, 0.0, Method::closed_form};
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const TailIntegral i0 = tail_integral(d, start);
    if (i0.value < 1.0) {
        if (std::isinf(len))
            return {i0.value / slope, (i0.abs_error + 4.0 * eps * i0.value) / slope,
                    i0.closed_form ? Method::closed_form : Method::quadrature};
        const TailIntegral i1 = tail_integral(d, start + slope * len);
        if (i1.value <= 0.5 * i0.value) {
            const double v = (i0.value - i1.value) / slope;
            const double err = (i0.abs_error + i1.abs_error + 4.0 * eps * (i0.value + i1.value)) / slope;
            return {v, err, (i0.closed_form && i1.closed_form) ? Method::closed_form : Method::quadrature};
        }
    }
    const auto f = [&](double t) { return tail(d, start + slope * t); };
    const quad::Options opt{.abs_tol = 0.0, .rel_tol = 1e-12};
    quad::Result r;
    if (std::isinf(len)) {
        const double scale = std::max(1.0, mean_excess(d, start)) / slope;
        r = quad::integrate_to_infinity(f, 0.0, scale, opt);
    } else {
        r = quad::integrate(f, 0.0, len, opt);
    }
    quad::require(r, "line_integral: quadrature did not converge");
    return {r.value, r.abs_error, Method::quadrature};
}

/// Strong-subexponential diagnostic int_0^x F(x-y)F(y)dy / (2 m_F tail(x)); tends to 1 on S*.
inline double sstar_ratio(const ClaimDistribution& d, double x) {
    if (!(x > 0.0)) throw DomainError("sstar_ratio: x must be > 0");
    const double lt_x = log_tail(d, x);
    if (!std::isfinite(lt_x)) throw NumericalError("sstar_ratio: log tail underflow", "x=" + std::to_string(x));
    const double half = 0.5 * x;
    // Integrand symmetric about x/2: integrate [0, x/2] and double.
    const auto integrand = [&](double y) { return std::exp(log_tail(d, x - y) - lt_x + log_tail(d, y)); };
    const auto r = quad::integrate(integrand, 0.0, half, {.abs_tol = 0.0, .rel_tol = 1e-10});
    quad::require(r, "sstar_ratio: quadrature did not converge");
    return 2.0 * r.value / (2.0 * mean(d));
}

/// Subexponential diagnostic tail_{F*F}(x) / tail(x); tends to 2 on S.
inline double subexp_ratio(const ClaimDistribution& d, double x) {
    if (!(x > 0.0)) throw DomainError("subexp_ratio: x must be > 0");
    if (d.family() == Family::deterministic) throw DomainError("subexp_ratio: needs a density");
    const double lt_x = log_tail(d, x);
    if (!std::isfinite(lt_x)) throw NumericalError("subexp_ratio: log tail underflow", "x=" + std::to_string(x));
    const double half = 0.5 * x;
    const auto integrand = [&](double y) { return std::exp(log_tail(d, x - y) + log_pdf(d, y) - lt_x); };
    // y = half*w^2 on the lower piece removes integrable density singularities at 0.
    const auto lower = [&](double w) { return integrand(half * w * w) * 2.0 * half * w; };
    const quad::Options opt{.abs_tol = 0.0, .rel_tol = 1e-10};
    const auto r1 = quad::integrate(lower, 0.0, 1.0, opt);
    const auto r2 = quad::integrate(integrand, half, x, opt);
    quad::require(r1, "subexp_ratio: quadrature did not converge");
    quad::require(r2, "subexp_ratio: quadrature did not converge");
    return 1.0 + r1.value + r2.value;
}

}  // namespace ruin2d
