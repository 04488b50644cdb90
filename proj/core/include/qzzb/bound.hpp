#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qzzb/constants.hpp"
#include "qzzb/fock.hpp"

namespace qzzb {

// Independent uniform prior window per parameter.
struct PriorWindow {
    std::vector<double> means;
    std::vector<double> widths;

    PriorWindow(std::vector<double> means_, std::vector<double> widths_);
    std::size_t dim() const { return widths.size(); }
};

enum class QuadratureRule { trapezoid, simpson };

struct QuadratureConfig {
    std::size_t intervals = 4096;       // number of grid intervals on [0, W]
    QuadratureRule rule = QuadratureRule::simpson;
    bool valley_fill = true;
    bool refine = false;                // double the grid until converged
    double refine_rel_tol = 1e-8;
    std::size_t max_intervals = std::size_t{1} << 20;

    void validate() const;
};

struct ClosedBound {
    double value = 0.0;
    bool valid = false;
};

// Per-mode and total bound values.  total_combined = max(total_ml, total_mt);
// modes with zero effective mean or variance carry an infinite sentinel that
// poisons the corresponding total.
struct BoundReport {
    std::vector<double> per_mode_ml;
    std::vector<double> per_mode_mt;
    std::vector<double> per_mode_integral;   // filled only by integral routes
    double total_ml = 0.0;
    double total_mt = 0.0;
    double total_combined = 0.0;
    std::optional<double> total_integral;
    std::vector<bool> ml_valid;
    std::vector<bool> mt_valid;
    std::optional<QuadratureConfig> quadrature;  // recorded when integrals present
    std::vector<std::string> warnings;
};

// Suffix maximum on an ascending grid: output[k] = max_{j >= k} samples[j].
// Output is non-increasing and pointwise >= input.
std::vector<double> valley_fill(const std::vector<double>& samples);

// Overlap of two shifted uniform windows: max(0, 1 - tau/width).
double uniform_overlap(double tau, double width);

// (1 - sqrt(1 - F^2)) / 2, the minimum error probability for discriminating
// two equally likely pure states with overlap F.
double pe_equally_likely(double fidelity);

// Numerically integrates (tau/2)(1 - tau/W) V[1 - sqrt(1 - F^2(tau))] over
// [0, W], V being the suffix maximum on the grid when cfg.valley_fill is set.
// Result is in [0, W^2/12 + quadrature tolerance].
double qzzb_mode_bound(const std::function<double(double)>& fidelity, double width,
                       const QuadratureConfig& cfg = {});

// Same bound assembled through the binary-hypothesis route: the prior sum
// [P(z) + P(z + tau)] is integrated numerically over z together with the
// general-prior error factor (1 - sqrt(1 - 4 P0 P1 F^2))/2.  Uniform windows
// only; equals qzzb_mode_bound up to quadrature rounding.
double zzb_variant2_mode_bound(const std::function<double(double)>& fidelity, double width,
                               const QuadratureConfig& cfg = {});

// Closed-form single-mode bounds.  value = c / stat, valid when the window is
// at least 10x the surrogate's decay scale.  A vanishing stat returns an
// infinite sentinel with valid = false.
ClosedBound ml_closed(const GeneratorStats& stats, double width, const SpeedLimitConstants& k);
ClosedBound mt_closed(const GeneratorStats& stats, double width, const SpeedLimitConstants& k);

// Sum of per-mode closed bounds with the max of the two totals.
BoundReport combined_bound(const std::vector<GeneratorStats>& per_mode_stats,
                           const PriorWindow& prior, const SpeedLimitConstants& k);

// Per-mode integral bounds from spectra, plus the closed forms side by side.
BoundReport qzzb_vector_bound(const std::vector<EnergySpectrum>& spectra,
                              const PriorWindow& prior, const QuadratureConfig& cfg = {},
                              const SpeedLimitConstants& k = {});

} // namespace qzzb
