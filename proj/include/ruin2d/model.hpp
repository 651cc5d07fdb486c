#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "ruin2d/dist.hpp"
#include "ruin2d/error.hpp"

namespace ruin2d {

/// Two premium lines b_i(t) = x_i + p_i t facing one aggregate claim process.
///
/// Invariants: p1 > p2 > rho = E[claim]/E[interarrival], hence the drift
/// margins m_i = p_i E[interarrival] - E[claim] satisfy m1 > m2 > 0.
/// x1 < x2 unless the model was built in degenerate mode (x2 <= x1, where the
/// lines never cross and each ruin time reduces to a one-line problem).
class RiskModel {
public:
    static RiskModel create(ClaimDistribution claim, ClaimDistribution interarrival, double p1, double p2, double x1,
                            double x2, bool allow_degenerate = false) {
        return RiskModel(std::move(claim), std::move(interarrival), p1, p2, x1, x2, std::nullopt, allow_degenerate);
    }

    /// Capitals x1 = a*x, x2 = x. a >= 1 requires degenerate mode.
    static RiskModel split(ClaimDistribution claim, ClaimDistribution interarrival, double p1, double p2, double a,
                           double x, bool allow_degenerate = false) {
        if (!(std::isfinite(a) && a > 0.0)) throw DomainError("risk model: split ratio a must be > 0");
        return RiskModel(std::move(claim), std::move(interarrival), p1, p2, a * x, x, a, allow_degenerate);
    }

    /// Same model rescaled to capital x (x1 = a*x, x2 = x); needs a split ratio.
    RiskModel at_capital(double x) const {
        if (!split_ratio_) throw DomainError("risk model: at_capital needs a split ratio a");
        return split(claim_, interarrival_, p1_, p2_, *split_ratio_, x, degenerate());
    }

    const ClaimDistribution& claim() const noexcept { return claim_; }
    const ClaimDistribution& interarrival() const noexcept { return interarrival_; }
    double p1() const noexcept { return p1_; }
    double p2() const noexcept { return p2_; }
    double x1() const noexcept { return x1_; }
    double x2() const noexcept { return x2_; }
    std::optional<double> split_ratio() const noexcept { return split_ratio_; }
    bool degenerate() const noexcept { return x2_ <= x1_; }

    double mean_claim() const noexcept { return mean_claim_; }
    double mean_interarrival() const noexcept { return mean_interarrival_; }
    double rho() const noexcept { return mean_claim_ / mean_interarrival_; }
    double m1() const noexcept { return p1_ * mean_interarrival_ - mean_claim_; }
    double m2() const noexcept { return p2_ * mean_interarrival_ - mean_claim_; }

    double b1(double t) const noexcept { return x1_ + p1_ * t; }
    double b2(double t) const noexcept { return x2_ + p2_ * t; }

private:
    RiskModel(ClaimDistribution claim, ClaimDistribution interarrival, double p1, double p2, double x1, double x2,
              std::optional<double> a, bool allow_degenerate)
        : claim_(std::move(claim)),
          interarrival_(std::move(interarrival)),
          p1_(p1),
          p2_(p2),
          x1_(x1),
          x2_(x2),
          split_ratio_(a),
          mean_claim_(mean(claim_)),
          mean_interarrival_(mean(interarrival_)) {
        if (!(std::isfinite(p1) && std::isfinite(p2) && p1 > p2))
            throw DomainError("risk model: premium rates must satisfy p1 > p2");
        if (!(p2 > rho()))
            throw DomainError("risk model: net profit condition p2 > rho = E[claim]/E[interarrival] violated (rho=" +
                              std::to_string(rho()) + ")");
        if (!(std::isfinite(x1) && std::isfinite(x2) && x1 >= 0.0 && x2 >= 0.0))
            throw DomainError("risk model: capitals must be finite and >= 0");
        if (x2 <= x1 && !allow_degenerate)
            throw DomainError("risk model: x1 < x2 required (construct in degenerate mode for x2 <= x1)");
    }

    ClaimDistribution claim_;
    ClaimDistribution interarrival_;
    double p1_, p2_, x1_, x2_;
    std::optional<double> split_ratio_;
    double mean_claim_;
    double mean_interarrival_;
};

}  // namespace ruin2d
