#include "qzzb/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qzzb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_eta(double eta) {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("photon loss: eta must be in (0, 1]");
}

double loss_effective_mean(double mean_n, std::int64_t n, double eta, double sigma) {
    const double ground = std::min(static_cast<double>(n) * (1.0 - sigma), 0.0);
    return mean_n * (1.0 - sigma * (1.0 - eta)) - ground;
}

double loss_variance(double mean_n, double var_n, double eta, double sigma) {
    const double scale = 1.0 - sigma * (1.0 - eta);
    return var_n * scale * scale + mean_n * sigma * sigma * eta * (1.0 - eta);
}

} // namespace

PhotonLossChannel::PhotonLossChannel(double eta_, double sigma_, std::int64_t n_max_)
    : eta(eta_), sigma(sigma_), n_max(n_max_) {
    check_eta(eta);
    if (n_max < 0) throw std::invalid_argument("PhotonLossChannel: n_max must be >= 0");
}

PhaseDiffusionChannel::PhaseDiffusionChannel(double beta_, double kappa_)
    : beta(beta_), kappa(kappa_) {
    if (!(beta > 0.0)) throw std::invalid_argument("PhaseDiffusionChannel: beta must be > 0");
}

NoisyModeStats photon_loss_stats(const PhotonLossChannel& channel, double mean_n,
                                 double var_n) {
    return photon_loss_stats(mean_n, var_n, channel.n_max, channel.eta, channel.sigma);
}

NoisyModeStats phase_diffusion_stats(const PhaseDiffusionChannel& channel, double mean_n,
                                     double var_n) {
    return phase_diffusion_stats(mean_n, var_n, channel.beta, channel.kappa);
}

EnergySpectrum photon_loss_spectrum(double alpha_sq, std::int64_t n, double eta, double sigma) {
    if (!(alpha_sq > 0.0) || alpha_sq > 1.0)
        throw std::domain_error("photon_loss_spectrum: alpha^2 must be in (0, 1]");
    check_eta(eta);
    if (n < 0) throw std::invalid_argument("photon_loss_spectrum: n must be >= 0");

    std::vector<SpectrumEntry> entries;
    entries.reserve(static_cast<std::size_t>(n) + 2);
    // Binomial(n, 1 - eta) via the multiplicative recurrence; eta = 1
    // collapses to the l = 0 term.
    double p = std::pow(eta, static_cast<double>(n));  // l = 0
    for (std::int64_t l = 0; l <= n; ++l) {
        const double energy = static_cast<double>(n) - sigma * static_cast<double>(l);
        entries.push_back({alpha_sq * p, energy});
        if (l < n) {
            if (eta == 1.0) {
                p = 0.0;
            } else {
                p *= (static_cast<double>(n - l) / static_cast<double>(l + 1)) *
                     ((1.0 - eta) / eta);
            }
        }
    }
    if (alpha_sq < 1.0) entries.push_back({1.0 - alpha_sq, 0.0});
    return EnergySpectrum(std::move(entries));
}

NoisyModeStats photon_loss_stats(double mean_n, double var_n, std::int64_t n, double eta,
                                 double sigma) {
    check_eta(eta);
    NoisyModeStats out;
    out.effective_mean = loss_effective_mean(mean_n, n, eta, sigma);
    out.variance = loss_variance(mean_n, var_n, eta, sigma);
    out.sigma_or_kappa = sigma;
    return out;
}

PhotonLossOptimum photon_loss_optimize(double mean_n, double var_n, std::int64_t n, double eta,
                                       const GridSearch& grid) {
    check_eta(eta);
    if (grid.points < 2) throw std::invalid_argument("photon_loss_optimize: bad grid");
    PhotonLossOptimum out;

    const double step = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
    double best_mean = kInf, best_mean_sigma = grid.lo;
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double sigma = grid.lo + step * static_cast<double>(i);
        const double em = loss_effective_mean(mean_n, n, eta, sigma);
        if (em < best_mean) {
            best_mean = em;
            best_mean_sigma = sigma;
        }
    }
    out.ml = {best_mean, loss_variance(mean_n, var_n, eta, best_mean_sigma), best_mean_sigma};
    out.ml_closed_target = eta * mean_n;
    out.ml_at_sigma1 = loss_effective_mean(mean_n, n, eta, 1.0);
    out.ml_at_sigma2 = loss_effective_mean(mean_n, n, eta, 2.0);

    // MT closed form: sigma* = dn^2 / ((1-eta) dn^2 + eta <n>) minimises the
    // variance; the minimum is eta <n> dn^2 / ((1-eta) dn^2 + eta <n>).
    // sigma is a free purification parameter, so the verification grid widens
    // past the configured range whenever sigma* falls outside it.
    const double denom = (1.0 - eta) * var_n + eta * mean_n;
    double sigma_star = 0.0, var_star = var_n;
    if (denom > 0.0) {
        sigma_star = var_n / denom;
        var_star = eta * mean_n * var_n / denom;
    }
    out.mt = {loss_effective_mean(mean_n, n, eta, sigma_star), var_star, sigma_star};
    const double vhi = std::max(grid.hi, 1.25 * sigma_star);
    const double vstep = (vhi - grid.lo) / static_cast<double>(grid.points - 1);
    double best_var = kInf;
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double sigma = grid.lo + vstep * static_cast<double>(i);
        best_var = std::min(best_var, loss_variance(mean_n, var_n, eta, sigma));
    }
    out.mt_grid_variance = best_var;
    return out;
}

BoundReport photon_loss_vector_bound(const std::vector<LossyModeInput>& modes,
                                     const std::vector<double>& etas, const PriorWindow& prior,
                                     const SpeedLimitConstants& k) {
    if (modes.size() != prior.dim() || etas.size() != prior.dim())
        throw std::invalid_argument("photon_loss_vector_bound: dimension mismatch");
    BoundReport rep;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto opt = photon_loss_optimize(modes[i].mean_n, modes[i].var_n, modes[i].n_max,
                                              etas[i]);
        const GeneratorStats ml_stats(opt.ml.effective_mean, opt.ml.variance, 0.0);
        const GeneratorStats mt_stats(opt.mt.effective_mean, opt.mt.variance, 0.0);
        const auto ml = ml_closed(ml_stats, prior.widths[i], k);
        const auto mt = mt_closed(mt_stats, prior.widths[i], k);
        rep.per_mode_ml.push_back(ml.value);
        rep.per_mode_mt.push_back(mt.value);
        rep.ml_valid.push_back(ml.valid);
        rep.mt_valid.push_back(mt.valid);
        rep.total_ml += ml.value;
        rep.total_mt += mt.value;
    }
    rep.total_combined = std::max(rep.total_ml, rep.total_mt);
    return rep;
}

NoisyModeStats phase_diffusion_stats(double mean_n, double var_n, double beta, double kappa) {
    if (!(beta > 0.0)) throw std::invalid_argument("phase diffusion: beta must be > 0");
    NoisyModeStats out;
    const double env = 1.0 / (2.0 * std::sqrt(2.0 * std::numbers::pi) * beta);
    out.effective_mean = std::abs(1.0 - kappa) * mean_n + std::abs(kappa) * env;
    out.variance = var_n * (1.0 - kappa) * (1.0 - kappa) + kappa * kappa / (8.0 * beta * beta);
    out.sigma_or_kappa = kappa;
    return out;
}

PhaseDiffusionOptimum phase_diffusion_optimize(double mean_n, double var_n, double beta,
                                               const GridSearch& grid) {
    if (!(beta > 0.0)) throw std::invalid_argument("phase diffusion: beta must be > 0");
    if (grid.points < 2) throw std::invalid_argument("phase_diffusion_optimize: bad grid");
    PhaseDiffusionOptimum out;

    // The effective mean is piecewise linear in kappa, so the grid minimum is
    // an endpoint; the grid search stays authoritative.
    const double step = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
    double best_mean = kInf, best_kappa = grid.lo;
    double best_var = kInf;
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double kap = grid.lo + step * static_cast<double>(i);
        const auto st = phase_diffusion_stats(mean_n, var_n, beta, kap);
        if (st.effective_mean < best_mean) {
            best_mean = st.effective_mean;
            best_kappa = kap;
        }
        best_var = std::min(best_var, st.variance);
    }
    out.ml = phase_diffusion_stats(mean_n, var_n, beta, best_kappa);
    const double env = 1.0 / (2.0 * std::sqrt(2.0 * std::numbers::pi) * beta);
    out.ml_closed_target = std::min(mean_n, env);
    out.mt_grid_variance = best_var;

    // MT closed form: kappa* = 8 dn^2 beta^2 / (1 + 8 dn^2 beta^2), minimum
    // variance dn^2 / (1 + 8 beta^2 dn^2).
    const double x = 8.0 * var_n * beta * beta;
    const double kappa_star = x / (1.0 + x);
    out.mt = phase_diffusion_stats(mean_n, var_n, beta, kappa_star);
    out.mt.variance = var_n / (1.0 + x);
    out.mt.sigma_or_kappa = kappa_star;
    return out;
}

BoundReport phase_diffusion_vector_bound(const std::vector<DiffusedModeInput>& modes,
                                         const std::vector<double>& betas,
                                         const PriorWindow& prior, const SpeedLimitConstants& k) {
    if (modes.size() != prior.dim() || betas.size() != prior.dim())
        throw std::invalid_argument("phase_diffusion_vector_bound: dimension mismatch");
    BoundReport rep;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto opt = phase_diffusion_optimize(modes[i].mean_n, modes[i].var_n, betas[i]);
        const GeneratorStats ml_stats(opt.ml.effective_mean, opt.ml.variance, 0.0);
        const GeneratorStats mt_stats(opt.mt.effective_mean, opt.mt.variance, 0.0);
        const auto ml = ml_closed(ml_stats, prior.widths[i], k);
        const auto mt = mt_closed(mt_stats, prior.widths[i], k);
        rep.per_mode_ml.push_back(ml.value);
        rep.per_mode_mt.push_back(mt.value);
        rep.ml_valid.push_back(ml.valid);
        rep.mt_valid.push_back(mt.valid);
        rep.total_ml += ml.value;
        rep.total_mt += mt.value;
        // Markov-limit validity sqrt(2) beta^2 <n> >> 1, reported not enforced.
        if (std::numbers::sqrt2 * betas[i] * betas[i] * modes[i].mean_n < 10.0)
            rep.warnings.push_back("mode " + std::to_string(i) +
                                   ": sqrt(2) beta^2 <n> < 10, diffusion model marginal");
    }
    rep.total_combined = std::max(rep.total_ml, rep.total_mt);
    return rep;
}

} // namespace qzzb
