#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature with a hard cap on
// integrand evaluations. Deterministic: the same integrand and options
// always produce the same subdivision.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "ruin2d/error.hpp"

namespace ruin2d::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t max_evals = 1'000'000;
};

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
    bool converged = false;

    std::string diagnostics() const {
        std::ostringstream os;
        os << "value=" << value << " abs_error=" << abs_error << " evals=" << evaluations
           << " intervals=" << intervals;
        return os.str();
    }
};

namespace detail {

// Kronrod abscissae on [-1,1]; odd indices are the 7-point Gauss nodes.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[15];
    fv[7] = f(center);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }
    double kronrod = fv[7] * kWgk[7];
    double gauss = fv[7] * kWg[3];
    double resabs = std::abs(fv[7]) * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double sum = fv[j] + fv[14 - j];
        kronrod += kWgk[j] * sum;
        resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    const double mean = 0.5 * kronrod;
    double resasc = kWgk[7] * std::abs(fv[7] - mean);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

    const double scale = std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    resasc *= scale;
    resabs *= scale;
    // QUADPACK error scaling.
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon()))
        err = std::max(err, roundoff);
    return {a, b, kronrod * half, err};
}

}  // namespace detail

/// Integrate f over the finite interval [a, b].
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    Result res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::priority_queue<detail::Panel> heap;
    heap.push(detail::gk15(f, a, b));
    res.evaluations = 15;
    double total = heap.top().value;
    double error = heap.top().error;
    const auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };

    while (error > tolerance() && res.evaluations + 30 <= opt.max_evals) {
        const detail::Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted at machine precision
        heap.pop();
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        res.evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed accumulated rounding from the incremental updates.
    total = 0.0;
    error = 0.0;
    res.intervals = heap.size();
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    res.value = sign * total;
    res.abs_error = error;
    res.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    return res;
}

/// Integrate f over [a, inf) through t = a + scale * s / (1 - s).
/// `scale` should be of the order of the integrand's decay length.
template <class F>
Result integrate_to_infinity(F&& f, double a, double scale, const Options& opt = {}) {
    auto mapped = [&](double s) {
        const double one_minus = 1.0 - s;
        const double t = a + scale * s / one_minus;
        if (!std::isfinite(t)) return 0.0;
        const double v = f(t);
        return v == 0.0 ? 0.0 : v * scale / (one_minus * one_minus);
    };
    return integrate(mapped, 0.0, 1.0, opt);
}

/// Integrate over [a, b] split at the given interior breakpoints.
template <class F>
Result integrate_pieces(F&& f, std::vector<double> points, const Options& opt = {}) {
    std::sort(points.begin(), points.end());
    Result res;
    res.converged = true;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const auto piece = integrate(f, points[i], points[i + 1], opt);
        res.value += piece.value;
        res.abs_error += piece.abs_error;
        res.evaluations += piece.evaluations;
        res.intervals += piece.intervals;
        res.converged = res.converged && piece.converged;
    }
    return res;
}

/// Throw NumericalError with diagnostics when the result missed its tolerance.
inline const Result& require(const Result& r, const char* what) {
    if (!r.converged || !std::isfinite(r.value)) throw NumericalError(what, r.diagnostics());
    return r;
}

}  // namespace ruin2d::quad
