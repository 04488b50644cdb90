#pragma once

#include <cstdint>
#include <vector>

#include "qzzb/bound.hpp"
#include "qzzb/constants.hpp"
#include "qzzb/fock.hpp"

namespace qzzb {

// Loss channel with transmissivity eta and purification parameter
// sigma = delta + 1.  n_max is the photon number of the probe component the
// Kraus spectrum is built on.
struct PhotonLossChannel {
    double eta = 1.0;
    double sigma = 1.0;
    std::int64_t n_max = 0;

    PhotonLossChannel(double eta_, double sigma_, std::int64_t n_max_);
};

struct PhaseDiffusionChannel {
    double beta = 0.0;   // diffusion strength, > 0
    double kappa = 0.0;  // variational coupling to the environment quadrature

    PhaseDiffusionChannel(double beta_, double kappa_);
};

// Effective-generator statistics after a variational purification choice.
struct NoisyModeStats {
    double effective_mean = 0.0;
    double variance = 0.0;
    double sigma_or_kappa = 0.0;
};

struct GridSearch {
    double lo = 0.0;
    double hi = 4.0;
    std::size_t points = 100001;  // endpoints included; sigma = 1, 2 on-grid
};

// Grid-minimised ML/MT statistics.  The MT value is the closed-form optimum
// (grid-verified); the ML value is the grid minimum itself, with the two
// printed candidate purifications evaluated alongside.
struct PhotonLossOptimum {
    NoisyModeStats ml;
    NoisyModeStats mt;
    double ml_closed_target = 0.0;  // eta * <n>
    double ml_at_sigma1 = 0.0;
    double ml_at_sigma2 = 0.0;
    double mt_grid_variance = 0.0;  // grid minimum used for verification
};

struct PhaseDiffusionOptimum {
    NoisyModeStats ml;
    NoisyModeStats mt;
    double ml_closed_target = 0.0;  // min(<n>, 1/(2 sqrt(2 pi) beta))
    double mt_grid_variance = 0.0;
};

// Per-mode inputs for the vector bounds.
struct LossyModeInput {
    double mean_n = 0.0;
    double var_n = 0.0;
    std::int64_t n_max = 0;
};

struct DiffusedModeInput {
    double mean_n = 0.0;
    double var_n = 0.0;
};

// Kraus-sum spectrum of the loss channel acting on the {(alpha^2, N),
// (1 - alpha^2, 0)} probe family: binomial weights at energies N - sigma*l
// plus the (1 - alpha^2) mass at zero.
EnergySpectrum photon_loss_spectrum(double alpha_sq, std::int64_t n, double eta, double sigma);

NoisyModeStats photon_loss_stats(double mean_n, double var_n, std::int64_t n, double eta,
                                 double sigma);
NoisyModeStats photon_loss_stats(const PhotonLossChannel& channel, double mean_n,
                                 double var_n);

PhotonLossOptimum photon_loss_optimize(double mean_n, double var_n, std::int64_t n, double eta,
                                       const GridSearch& grid = {});

BoundReport photon_loss_vector_bound(const std::vector<LossyModeInput>& modes,
                                     const std::vector<double>& etas, const PriorWindow& prior,
                                     const SpeedLimitConstants& k);

NoisyModeStats phase_diffusion_stats(double mean_n, double var_n, double beta, double kappa);
NoisyModeStats phase_diffusion_stats(const PhaseDiffusionChannel& channel, double mean_n,
                                     double var_n);

PhaseDiffusionOptimum phase_diffusion_optimize(double mean_n, double var_n, double beta,
                                               const GridSearch& grid = {0.0, 1.0, 100001});

BoundReport phase_diffusion_vector_bound(const std::vector<DiffusedModeInput>& modes,
                                         const std::vector<double>& betas,
                                         const PriorWindow& prior, const SpeedLimitConstants& k);

} // namespace qzzb
