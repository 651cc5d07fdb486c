#pragma once

// First-order approximants for the two-line ruin probabilities.
//
// All integrals run on the claim-count scale: t counts expected claims, the
// envelope lines are x1 + m1 t and x2 + m2 t with drift margins m_i, and the
// finite-horizon upper limit is E N_T (not T).
//
//   H_T = int_0^{E N_T} tail(min{x1 + m1 t, x2 + m2 t}) dt      (psi_min)
//   U_T = int_0^{E N_T} tail(max{x1 + m1 t, x2 + m2 t}) dt      (psi_max)
//   H, U                    same with upper limit infinity
//   H^{y,v}, U^{y,v}        lower limit y e(x), argument shifted by v e(x)
//
// Each integral is evaluated piecewise: the envelopes are linear on either
// side of the crossing t* = (x2 - x1)/(m1 - m2), and each linear piece is a
// difference of tail integrals. A direct quadrature route over the raw
// integrand is kept alongside for cross-checking.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ruin2d/dist.hpp"
#include "ruin2d/error.hpp"
#include "ruin2d/model.hpp"
#include "ruin2d/quadrature.hpp"
#include "ruin2d/renewal.hpp"

namespace ruin2d {

struct DriftMargins {
    double m1;
    double m2;
};

inline DriftMargins drift_margins(const RiskModel& model) { return {model.m1(), model.m2()}; }

/// Count-scale time where a*x + m1 t meets x + m2 t.
inline double crossing_time(double a, double x, double m1, double m2) {
    if (!(m1 > m2)) throw DomainError("crossing_time: requires m1 > m2");
    if (!(a > 0.0 && a <= 1.0)) throw DomainError("crossing_time: a must lie in (0,1]");
    if (!(x > 0.0)) throw DomainError("crossing_time: x must be > 0");
    return (1.0 - a) * x / (m1 - m2);
}

enum class Envelope { min, max };

/// Geometry of the two envelope lines on the count scale.
struct EnvelopeLines {
    double x1, x2, m1, m2;

    static EnvelopeLines of(const RiskModel& m) { return {m.x1(), m.x2(), m.m1(), m.m2()}; }

    /// Crossing point; -inf when the lines never cross for t >= 0 (x2 <= x1).
    double crossing() const {
        return x2 > x1 ? (x2 - x1) / (m1 - m2) : -std::numeric_limits<double>::infinity();
    }

    double at(Envelope e, double t) const {
        const double l1 = x1 + m1 * t;
        const double l2 = x2 + m2 * t;
        return e == Envelope::min ? std::min(l1, l2) : std::max(l1, l2);
    }
};

namespace detail {

inline void add_into(ApproxResult& acc, const ApproxResult& piece) {
    acc.value += piece.value;
    acc.abs_error += piece.abs_error;
    if (piece.method == Method::quadrature) acc.method = Method::quadrature;
}

}  // namespace detail

/// int_lower^upper tail(envelope(t) + shift) dt via piecewise tail-integral differences.
inline ApproxResult envelope_integral(const ClaimDistribution& d, const EnvelopeLines& g, Envelope env,
                                      double lower, double upper, double shift = 0.0) {
    if (!(lower >= 0.0) || !(upper >= lower)) throw DomainError("envelope_integral: need 0 <= lower <= upper");
    if (!(shift >= 0.0)) throw DomainError("envelope_integral: shift must be >= 0");
    ApproxResult acc{0.0, 0.0, Method::closed_form};
    if (upper == lower) return acc;
    const double tc = g.crossing();
    // Before the crossing, min follows line 1 and max follows line 2; after it, the reverse.
    const bool first_is_line1 = (env == Envelope::min);
    const auto piece = [&](bool line1, double t0, double t1) {
        if (!(t1 > t0)) return;
        const double x0 = line1 ? g.x1 : g.x2;
        const double slope = line1 ? g.m1 : g.m2;
        const double len = std::isinf(t1) ? t1 : t1 - t0;
        detail::add_into(acc, line_integral(d, x0 + slope * t0 + shift, slope, len));
    };
    if (tc > lower) {
        piece(first_is_line1, lower, std::min(upper, tc));
        piece(!first_is_line1, tc, upper);
    } else {
        piece(!first_is_line1, lower, upper);
    }
    return acc;
}

/// Same integral by adaptive quadrature of the raw integrand (independent of tail integrals).
inline ApproxResult envelope_integral_quadrature(const ClaimDistribution& d, const EnvelopeLines& g, Envelope env,
                                                 double lower, double upper, double shift = 0.0) {
    if (!(lower >= 0.0) || !(upper >= lower)) throw DomainError("envelope_integral: need 0 <= lower <= upper");
    ApproxResult acc{0.0, 0.0, Method::quadrature};
    if (upper == lower) return acc;
    const auto f = [&](double t) { return tail(d, g.at(env, t) + shift); };
    const quad::Options opt{.abs_tol = 0.0, .rel_tol = 1e-12};
    const double tc = g.crossing();
    std::vector<double> cuts{lower};
    if (tc > lower && tc < upper) cuts.push_back(tc);
    const bool infinite = std::isinf(upper);
    if (!infinite) cuts.push_back(upper);
    if (cuts.size() >= 2) {
        const auto r = quad::require(quad::integrate_pieces(f, cuts, opt), "envelope quadrature did not converge");
        acc.value += r.value;
        acc.abs_error += r.abs_error;
    }
    if (infinite) {
        const double from = cuts.back();
        const double slope = std::min(g.m1, g.m2);
        const double scale = std::max(1.0, g.at(env, from) + shift) / slope;
        const auto r = quad::integrate_to_infinity(f, from, scale, opt);
        quad::require(r, "envelope quadrature did not converge");
        acc.value += r.value;
        acc.abs_error += r.abs_error;
    }
    return acc;
}

namespace detail {

inline bool any_capped(const ClaimDistribution& d, std::initializer_list<double> args) {
    for (double u : args)
        if (tail_integral(d, u).value >= 1.0) return true;
    return false;
}

}  // namespace detail

struct FiniteApprox {
    ApproxResult H_T;
    ApproxResult U_T;
    /// Upper limit used: E N_T.
    double n_mean;
};

/// H_T and U_T. `n_mean` overrides E N_T; otherwise the exact renewal mean is required.
inline FiniteApprox approx_finite(const RiskModel& model, double T, std::optional<double> n_mean = std::nullopt) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("approx_finite: T must be finite and > 0");
    const double en = n_mean ? *n_mean : renewal_mean(RenewalSpec(model.interarrival()), T, ExactMethod{}).value;
    if (!(en >= 0.0)) throw DomainError("approx_finite: E N_T must be >= 0");
    const auto g = EnvelopeLines::of(model);
    return {envelope_integral(model.claim(), g, Envelope::min, 0.0, en),
            envelope_integral(model.claim(), g, Envelope::max, 0.0, en), en};
}

/// Long-run horizon T / E[interarrival] in place of E N_T.
inline FiniteApprox approx_finite_long_run(const RiskModel& model, double T) {
    return approx_finite(model, T, T / model.mean_interarrival());
}

struct InfiniteApprox {
    ApproxResult H;
    ApproxResult U;
};

/// H and U. With P = x1 + m1 t* the common value of both lines at the crossing:
///   H = I(x1)/m1 + (1/m2 - 1/m1) I(P),   U = (I(x2) - I(P))/m2 + I(P)/m1,
/// where I is the integrated tail. Falls back to raw quadrature if any
/// argument lies in the capped region of the integrated tail.
inline InfiniteApprox approx_infinite(const RiskModel& model) {
    const auto g = EnvelopeLines::of(model);
    const double inf = std::numeric_limits<double>::infinity();
    const double tc = g.crossing();
    const double p = tc > 0.0 ? g.x1 + g.m1 * tc : g.x2;
    if (detail::any_capped(model.claim(), {g.x1, g.x2, p}))
        return {envelope_integral_quadrature(model.claim(), g, Envelope::min, 0.0, inf),
                envelope_integral_quadrature(model.claim(), g, Envelope::max, 0.0, inf)};
    return {envelope_integral(model.claim(), g, Envelope::min, 0.0, inf),
            envelope_integral(model.claim(), g, Envelope::max, 0.0, inf)};
}

/// Ḡ and the scaling e(x) of a max-domain of attraction of the integrated tail.
class LimitLaw {
public:
    enum class Kind { frechet, gumbel };

    /// Lomax(alpha_L) -> Fréchet with index alpha_L - 1; Lognormal, Weibull -> Gumbel.
    static LimitLaw of(const ClaimDistribution& d) {
        if (const auto* p = d.get_if<Lomax>()) return LimitLaw(Kind::frechet, p->alpha - 1.0, d);
        if (d.family() == Family::lognormal || d.family() == Family::weibull) return LimitLaw(Kind::gumbel, 0.0, d);
        throw DomainError("limit_law: " + d.describe() +
                          " is not heavy-tailed; no Fréchet or Gumbel limit for its integrated tail");
    }

    Kind kind() const noexcept { return kind_; }
    const char* name() const noexcept { return kind_ == Kind::frechet ? "frechet" : "gumbel"; }
    /// Fréchet index (0 for Gumbel).
    double alpha() const noexcept { return alpha_; }

    double g_bar(double y) const {
        if (!(y >= 0.0)) throw DomainError("limit_law: G_bar needs y >= 0");
        return kind_ == Kind::frechet ? std::pow(1.0 + y / alpha_, -alpha_) : std::exp(-y);
    }

    /// Fréchet: x / alpha. Gumbel: the mean excess I(x) / tail(x).
    double e(double x) const {
        if (!(x > 0.0)) throw DomainError("limit_law: e(x) needs x > 0");
        return kind_ == Kind::frechet ? x / alpha_ : mean_excess(dist_, x);
    }

private:
    LimitLaw(Kind k, double alpha, ClaimDistribution d) : kind_(k), alpha_(alpha), dist_(std::move(d)) {}

    Kind kind_;
    double alpha_;
    ClaimDistribution dist_;
};

inline LimitLaw limit_law(const ClaimDistribution& d) { return LimitLaw::of(d); }

struct ShiftedApprox {
    ApproxResult H_yv;
    ApproxResult U_yv;
};

/// H^{y,v} and U^{y,v} for the model's capitals, given the scale e = e(x).
/// `upper` truncates the integrals at a count-scale horizon (default: none).
/// The piecewise value is always cross-checked against raw quadrature.
inline ShiftedApprox approx_shifted(const RiskModel& model, double y, double v, double e,
                                    double upper = std::numeric_limits<double>::infinity()) {
    if (!(y >= 0.0) || !(v >= 0.0)) throw DomainError("approx_shifted: y and v must be >= 0");
    if (!(e > 0.0) || !std::isfinite(y * e)) throw DomainError("approx_shifted: y*e(x) must be finite");
    const auto g = EnvelopeLines::of(model);
    const double lower = std::min(y * e, upper);
    const double shift = v * e;
    ShiftedApprox out;
    for (Envelope env : {Envelope::min, Envelope::max}) {
        const auto quad_value = envelope_integral_quadrature(model.claim(), g, env, lower, upper, shift);
        ApproxResult r = quad_value;
        const double tc = g.crossing();
        const double p = tc > lower ? g.x1 + g.m1 * tc + shift : g.at(env, lower) + shift;
        if (!detail::any_capped(model.claim(), {g.at(env, lower) + shift, p})) {
            r = envelope_integral(model.claim(), g, env, lower, upper, shift);
            const double gap = std::abs(r.value - quad_value.value);
            if (gap > 1e-6 * std::max(r.value, 1e-300) + r.abs_error + quad_value.abs_error)
                throw NumericalError("approx_shifted: piecewise and quadrature routes disagree",
                                     "piecewise=" + std::to_string(r.value) +
                                         " quadrature=" + std::to_string(quad_value.value));
        }
        (env == Envelope::min ? out.H_yv : out.U_yv) = r;
    }
    return out;
}

/// Rescale a split model to capital x and evaluate with e = law.e(x).
inline ShiftedApprox approx_shifted(const RiskModel& model, double y, double v, double x, const LimitLaw& law) {
    return approx_shifted(model.at_capital(x), y, v, law.e(x));
}

/// Three-term expression for H^{y,v} in the case y e <= t*:
///   I(x1 + (m1 y + v) e)/m1 + (1/m2 - 1/m1) I(x1 + m1 t* + v e) + I(x2 + m2 t* + v e)/m2.
/// Kept for auditing; it exceeds the true value by I(P + v e)/m2 (see tests).
inline double shifted_three_term(const RiskModel& model, double y, double v, double e) {
    const auto g = EnvelopeLines::of(model);
    const double tc = g.crossing();
    if (!(tc > 0.0) || y * e > tc) throw DomainError("shifted_three_term: needs x1 < x2 and y*e(x) <= crossing");
    const auto I = [&](double u) { return tail_integral(model.claim(), u).value; };
    return I(g.x1 + (g.m1 * y + v) * e) / g.m1 + (1.0 / g.m2 - 1.0 / g.m1) * I(g.x1 + g.m1 * tc + v * e) +
           I(g.x2 + g.m2 * tc + v * e) / g.m2;
}

/// Two-term expression obtained by integrating each linear piece (same case as above):
///   I(x1 + (m1 y + v) e)/m1 + (1/m2 - 1/m1) I(P + v e),  P = x1 + m1 t* = x2 + m2 t*.
inline double shifted_two_term(const RiskModel& model, double y, double v, double e) {
    const auto g = EnvelopeLines::of(model);
    const double tc = g.crossing();
    if (!(tc > 0.0) || y * e > tc) throw DomainError("shifted_two_term: needs x1 < x2 and y*e(x) <= crossing");
    const auto I = [&](double u) { return tail_integral(model.claim(), u).value; };
    return I(g.x1 + (g.m1 * y + v) * e) / g.m1 + (1.0 / g.m2 - 1.0 / g.m1) * I(g.x1 + g.m1 * tc + v * e);
}

struct ConditionRow {
    double x;
    double e;
    double H_yv, H, ratio_min, target_min;
    double U_yv, U, ratio_max, target_max;
};

/// Ratios H^{y,v}/H and U^{y,v}/U along x_grid with the targets Ḡ(m1 y + v), Ḡ(m2 y + v).
/// `horizon_scale` > 0 truncates every integral at count-scale horizon_scale * x.
inline std::vector<ConditionRow> condition_check(const RiskModel& model, double y, double v,
                                                 const std::vector<double>& x_grid,
                                                 double horizon_scale = 0.0) {
    const LimitLaw law = limit_law(model.claim());
    std::vector<ConditionRow> rows;
    double prev = 0.0;
    for (double x : x_grid) {
        if (!(x > prev)) throw DomainError("condition_check: x_grid must be increasing and positive");
        prev = x;
        const RiskModel mx = model.at_capital(x);
        const double e = law.e(x);
        const double upper = horizon_scale > 0.0 ? horizon_scale * x : std::numeric_limits<double>::infinity();
        const auto shifted = approx_shifted(mx, y, v, e, upper);
        const auto base = approx_shifted(mx, 0.0, 0.0, e, upper);
        rows.push_back({x, e, shifted.H_yv.value, base.H_yv.value, shifted.H_yv.value / base.H_yv.value,
                        law.g_bar(mx.m1() * y + v), shifted.U_yv.value, base.U_yv.value,
                        shifted.U_yv.value / base.U_yv.value, law.g_bar(mx.m2() * y + v)});
    }
    return rows;
}

}  // namespace ruin2d
