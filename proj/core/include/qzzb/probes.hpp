#pragma once

#include <cstdint>
#include <vector>

#include "qzzb/bound.hpp"
#include "qzzb/constants.hpp"
#include "qzzb/fock.hpp"
#include "qzzb/linalg.hpp"

namespace qzzb {

// N-photon superposition over d+1 modes: beta on |N,0,...,0> and alpha on each
// ket with the N photons in one of the d parameter modes.
struct OptimalProbeSpec {
    std::int64_t d = 0;
    std::int64_t n_total = 0;
    double alpha = 0.0;  // 1/sqrt(d + sqrt(d))
    double beta = 0.0;   // beta^2 = 1 - d alpha^2

    static OptimalProbeSpec make(std::int64_t d, std::int64_t n_total);
};

enum class CoeffSign { minus, plus };

// Cyclic (d+1)-mode squeezed vacuum: expansion coefficients of exp(-+ r A~)
// and exp(+ r A) over the shift-matrix powers, and the induced Bogoliubov
// pair (R, K) with R R^T - K K^T = I.
struct SqueezedSpec {
    std::int64_t d = 0;
    std::int64_t modes = 0;  // d + 1
    double r = 0.0;
    std::vector<double> coeffs_minus;
    std::vector<double> coeffs_plus;
    MatD R;
    MatD K;

    static SqueezedSpec make(std::int64_t d, double r);
};

struct ModePhotonStats {
    double mean = 0.0;
    double variance = 0.0;
};

struct PairBounds {
    double ml = 0.0;
    double mt = 0.0;
};

struct NoonBounds {
    double ml = 0.0;
    double mt = 0.0;
    std::int64_t n_per_probe = 0;
    bool exact_split = true;  // false when n_total was floored to a multiple of d
};

struct SqueezedComparison {
    BoundReport se;
    BoundReport ie;
    double se_r = 0.0;  // squeezing strengths after photon-budget matching
    double ie_r = 0.0;
};

FockState optimal_probe(std::int64_t d, std::int64_t n_total);

// Two-mode (|n,0> + |0,n>)/sqrt(2).
FockState noon_state(std::int64_t n);

// Closed forms for the optimal probe, equal to the generic spectrum pipeline.
PairBounds se_bounds_optimal(std::int64_t d, std::int64_t n_total, const SpeedLimitConstants& k);

// d NOON probes with n_total/d photons each.
NoonBounds ie_bounds_noon(std::int64_t d, std::int64_t n_total, const SpeedLimitConstants& k);

// Ratio of the individual-estimation MT bound to the simultaneous-estimation
// ML bound, 20 lambda^2 (pi^2 - 8) d^2/(d + sqrt(d))^2; independent of N.
double advantage_ratio(std::int64_t d, std::int64_t n_total, const SpeedLimitConstants& k);

// Large-d limit of advantage_ratio.
double advantage_ratio_limit(const SpeedLimitConstants& k);

// DFT coefficients c_m of exp(-+ r A~) (minus) or exp(+ r A) (plus) over the
// cyclic-shift powers; imaginary residue below 1e-10 is checked and dropped.
std::vector<double> squeezed_coeffs(std::int64_t modes, double r, CoeffSign sign);

struct BogoliubovPair {
    MatD R;
    MatD K;
};
BogoliubovPair bogoliubov(std::int64_t modes, double r);

// Per-mode photon mean/variance of the cyclic multimode squeezed vacuum;
// identical across modes.  The mean is cross-checked against sum_i K_ki^2.
std::vector<ModePhotonStats> squeezed_mode_stats(std::int64_t modes, double r);

// Squeezing strength with modes * mean(modes, r) = n_total, by bisection on
// r in [0, 20].
double match_photon_budget(std::int64_t modes, double n_total);

// Simultaneous estimation with one (d+1)-mode squeezed vacuum of budget
// n_total versus d two-mode squeezed vacua of budget n_total/d each.
// Priors default to 100x the larger per-mode validity threshold.
SqueezedComparison se_ie_squeezed_comparison(std::int64_t d, double n_total,
                                             const SpeedLimitConstants& k);

// Uniform prior with widths = factor * max(ML, MT validity threshold), one
// entry per mode.
PriorWindow auto_prior(const std::vector<GeneratorStats>& stats, const SpeedLimitConstants& k,
                       double factor = 100.0);

} // namespace qzzb
