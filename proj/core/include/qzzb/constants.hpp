#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qzzb {

// Margolus-Levitin / Mandelstam-Tamm speed-limit constants entering the
// closed-form bounds.  lambda is the slope of the tangent line that keeps
// cos(x) >= 1 - lambda*x for all x >= 0; its literature value is 0.7246.
// c_ml and c_mt are always derived from lambda and pi, never stored.
struct SpeedLimitConstants {
    double lambda = 0.7246;

    SpeedLimitConstants() = default;
    explicit SpeedLimitConstants(double lam) : lambda(lam) {
        if (!(lam > 0.0)) throw std::invalid_argument("SpeedLimitConstants: lambda must be > 0");
    }

    double c_ml() const { return 1.0 / (80.0 * lambda * lambda); }
    double c_mt() const {
        const double pi = std::numbers::pi;
        return pi * pi / 16.0 - 0.5;
    }

    // The closed forms hold for W >> threshold; ">>" is operationalised as a
    // factor >= 10.  Flags are advisory, values are always computed.
    static constexpr double validity_factor = 10.0;

    double ml_min_width(double effective_mean) const {
        return validity_factor / (2.0 * lambda * effective_mean);
    }
    double mt_min_width(double stddev) const {
        return validity_factor * std::numbers::pi / (2.0 * stddev);
    }
};

} // namespace qzzb
