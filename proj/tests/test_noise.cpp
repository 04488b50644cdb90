#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qzzb/bound.hpp"
#include "qzzb/noise.hpp"
#include "qzzb/probes.hpp"

using namespace qzzb;

namespace {
const SpeedLimitConstants kDefault;

struct ProbeStats {
    double mean, var;
};

ProbeStats optimal_mode_stats(std::int64_t d, std::int64_t n) {
    const auto spec = OptimalProbeSpec::make(d, n);
    const double a2 = spec.alpha * spec.alpha;
    const double nn = static_cast<double>(n);
    return {a2 * nn, a2 * (1.0 - a2) * nn * nn};
}
} // namespace

TEST_CASE("photon loss spectrum") {
    SUBCASE("worked binomial example") {
        // alpha^2 = 0.5, N = 2, eta = 0.5, sigma = 1:
        // {(0.125, 2), (0.25, 1), (0.125, 0)} plus (0.5, 0) merged.
        const auto spec = photon_loss_spectrum(0.5, 2, 0.5, 1.0);
        REQUIRE(spec.size() == 3);
        CHECK(spec.entries()[0].energy == 0.0);
        CHECK(spec.entries()[0].probability == doctest::Approx(0.625).epsilon(1e-13));
        CHECK(spec.entries()[1].energy == 1.0);
        CHECK(spec.entries()[1].probability == doctest::Approx(0.25).epsilon(1e-13));
        CHECK(spec.entries()[2].energy == 2.0);
        CHECK(spec.entries()[2].probability == doctest::Approx(0.125).epsilon(1e-13));
    }
    SUBCASE("eta = 1 collapses to the noiseless two-level spectrum") {
        const auto spec = photon_loss_spectrum(0.3, 5, 1.0, 1.7);
        REQUIRE(spec.size() == 2);
        CHECK(spec.entries()[1].probability == doctest::Approx(0.3).epsilon(1e-13));
        CHECK(spec.entries()[1].energy == 5.0);
    }
    SUBCASE("eta -> 0 pushes the mass to E = N - sigma N and 0") {
        const auto spec = photon_loss_spectrum(0.4, 3, 1e-12, 2.0);
        // l = N dominates: energy 3 - 2*3 = -3.
        CHECK(spec.entries()[0].energy == doctest::Approx(-3.0));
        CHECK(spec.entries()[0].probability == doctest::Approx(0.4).epsilon(1e-9));
    }
    CHECK_THROWS_AS(photon_loss_spectrum(0.0, 2, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(photon_loss_spectrum(1.5, 2, 0.5, 1.0), std::domain_error);
}

TEST_CASE("photon loss stats formulas") {
    SUBCASE("noiseless recovery at eta = 1, sigma <= 1") {
        const auto s = photon_loss_stats(2.5, 1.25, 6, 1.0, 0.7);
        CHECK(s.effective_mean == doctest::Approx(2.5).epsilon(1e-14));
        CHECK(s.variance == doctest::Approx(1.25).epsilon(1e-14));
    }
    SUBCASE("sigma = 1 gives eta <n>") {
        const auto s = photon_loss_stats(2.5, 1.25, 6, 0.4, 1.0);
        CHECK(s.effective_mean == doctest::Approx(0.4 * 2.5).epsilon(1e-14));
    }
    SUBCASE("sigma = 0 keeps the bare statistics") {
        const auto s = photon_loss_stats(2.5, 1.25, 6, 0.4, 0.0);
        CHECK(s.effective_mean == doctest::Approx(2.5).epsilon(1e-14));
        CHECK(s.variance == doctest::Approx(1.25).epsilon(1e-14));
    }
}

TEST_CASE("spectrum route matches the formula route") {
    // Two independent derivations of the effective statistics must agree on
    // the Eq.-(5)-family marginals whenever the l = N Kraus event has weight.
    for (std::int64_t d : {2, 3, 5, 8}) {
        for (std::int64_t n : {2, 7, 20}) {
            const auto ps = optimal_mode_stats(d, n);
            const double a2 = ps.mean / static_cast<double>(n);
            for (double eta : {0.1, 0.45, 0.9}) {
                for (double sigma : {0.0, 0.5, 1.0, 2.0}) {
                    const auto spec = photon_loss_spectrum(a2, n, eta, sigma);
                    const auto via_spec = generator_stats_from_spectrum(spec);
                    const auto via_formula = photon_loss_stats(ps.mean, ps.var, n, eta, sigma);
                    CHECK(via_spec.effective_mean ==
                          doctest::Approx(via_formula.effective_mean).epsilon(1e-10));
                    CHECK(via_spec.variance ==
                          doctest::Approx(via_formula.variance).epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("photon loss optimisation") {
    SUBCASE("MT closed form equals the grid minimum") {
        for (double eta : {0.1, 0.3, 0.6, 0.9, 1.0}) {
            const auto ps = optimal_mode_stats(3, 12);
            const auto opt = photon_loss_optimize(ps.mean, ps.var, 12, eta);
            CHECK(opt.mt.variance == doctest::Approx(opt.mt_grid_variance).epsilon(1e-6));
        }
    }
    SUBCASE("ML grid minimum sits at sigma = 1 with value eta <n>") {
        for (double eta : {0.15, 0.5, 0.85}) {
            const auto ps = optimal_mode_stats(2, 9);
            const auto opt = photon_loss_optimize(ps.mean, ps.var, 9, eta);
            CHECK(opt.ml.effective_mean == doctest::Approx(eta * ps.mean).epsilon(1e-12));
            CHECK(opt.ml.sigma_or_kappa == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(opt.ml_closed_target == doctest::Approx(eta * ps.mean).epsilon(1e-14));
            // The printed delta = 1 candidate (sigma = 2) is never better.
            CHECK(opt.ml_at_sigma2 >= opt.ml.effective_mean - 1e-12);
        }
    }
    SUBCASE("eta = 1 returns the noiseless statistics") {
        const auto opt = photon_loss_optimize(3.0, 2.0, 10, 1.0);
        CHECK(opt.ml.effective_mean == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(opt.mt.variance == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("optimised values never exceed random variational choices") {
        std::mt19937_64 rng(0x5eed0020);
        std::uniform_real_distribution<double> sig(0.0, 4.0);
        const auto ps = optimal_mode_stats(5, 15);
        for (double eta : {0.2, 0.7}) {
            const auto opt = photon_loss_optimize(ps.mean, ps.var, 15, eta);
            for (int i = 0; i < 100; ++i) {
                const auto s = photon_loss_stats(ps.mean, ps.var, 15, eta, sig(rng));
                CHECK(opt.ml.effective_mean <= s.effective_mean + 1e-12);
                CHECK(opt.mt.variance <= s.variance + 1e-12);
            }
        }
    }
}

TEST_CASE("photon loss vector bound") {
    const std::int64_t d = 3, n = 10;
    const auto ps = optimal_mode_stats(d, n);
    const std::vector<LossyModeInput> modes(static_cast<std::size_t>(d),
                                            {ps.mean, ps.var, n});
    const PriorWindow prior(std::vector<double>(3, 0.0), std::vector<double>(3, 1e6));

    SUBCASE("eta = 1 equals the noiseless combined bound") {
        const auto noisy =
            photon_loss_vector_bound(modes, std::vector<double>(3, 1.0), prior, kDefault);
        const std::vector<GeneratorStats> stats(3, GeneratorStats(ps.mean, ps.var, 0.0));
        const auto clean = combined_bound(stats, prior, kDefault);
        CHECK(noisy.total_ml == doctest::Approx(clean.total_ml).epsilon(1e-9));
        CHECK(noisy.total_mt == doctest::Approx(clean.total_mt).epsilon(1e-9));
    }
    SUBCASE("totals follow the eta closed forms") {
        const double eta = 0.35;
        const auto rep =
            photon_loss_vector_bound(modes, std::vector<double>(3, eta), prior, kDefault);
        const double ml_expect = 3.0 * kDefault.c_ml() / (eta * eta * ps.mean * ps.mean);
        const double minvar = eta * ps.mean * ps.var / ((1.0 - eta) * ps.var + eta * ps.mean);
        const double mt_expect = 3.0 * kDefault.c_mt() / minvar;
        CHECK(rep.total_ml == doctest::Approx(ml_expect).epsilon(1e-12));
        CHECK(rep.total_mt == doctest::Approx(mt_expect).epsilon(1e-12));
        CHECK(rep.total_combined == std::max(rep.total_ml, rep.total_mt));
    }
    SUBCASE("decreasing eta never decreases the bound") {
        double prev = 0.0;
        for (double eta : {1.0, 0.8, 0.6, 0.4, 0.2, 0.05}) {
            const auto rep =
                photon_loss_vector_bound(modes, std::vector<double>(3, eta), prior, kDefault);
            CHECK(rep.total_combined >= prev - 1e-12);
            prev = rep.total_combined;
        }
    }
    CHECK_THROWS_AS(
        photon_loss_vector_bound(modes, std::vector<double>(2, 0.5), prior, kDefault),
        std::invalid_argument);
}

TEST_CASE("loss fidelity dominates the optimised surrogates") {
    // Eq.-(5) family: the Kraus-sum fidelity must obey the ML and MT
    // surrogate inequalities built from the optimised statistics.
    const std::int64_t d = 2, n = 6;
    const auto ps = optimal_mode_stats(d, n);
    const double a2 = ps.mean / static_cast<double>(n);
    for (double eta : {0.3, 0.7}) {
        const auto opt = photon_loss_optimize(ps.mean, ps.var, n, eta);

        const auto spec_ml = photon_loss_spectrum(a2, n, eta, opt.ml.sigma_or_kappa);
        for (int i = 0; i <= 400; ++i) {
            const double tau = 2.0 * i / 400.0;
            const double f = fidelity_from_spectrum(spec_ml, tau);
            CHECK(f * f >=
                  1.0 - 2.0 * kDefault.lambda * tau * opt.ml.effective_mean - 1e-9);
        }
        const auto spec_mt = photon_loss_spectrum(a2, n, eta, opt.mt.sigma_or_kappa);
        const double dh = std::sqrt(opt.mt.variance);
        for (int i = 0; i <= 400; ++i) {
            const double tau = (std::numbers::pi / (2.0 * dh)) * i / 400.0;
            const double f = fidelity_from_spectrum(spec_mt, tau);
            const double c = std::cos(dh * tau);
            CHECK(f * f >= c * c - 1e-9);
        }
    }
}

TEST_CASE("channel descriptors validate and forward") {
    const PhotonLossChannel loss(0.4, 1.0, 6);
    const auto a = photon_loss_stats(loss, 2.5, 1.25);
    const auto b = photon_loss_stats(2.5, 1.25, 6, 0.4, 1.0);
    CHECK(a.effective_mean == b.effective_mean);
    CHECK(a.variance == b.variance);
    CHECK_THROWS_AS(PhotonLossChannel(0.0, 1.0, 6), std::invalid_argument);

    const PhaseDiffusionChannel pd(0.5, 8.0 / 9.0);
    CHECK(phase_diffusion_stats(pd, 4.0, 4.0).variance ==
          doctest::Approx(4.0 / 9.0).epsilon(1e-13));
    CHECK_THROWS_AS(PhaseDiffusionChannel(0.0, 0.5), std::invalid_argument);
}

TEST_CASE("phase diffusion stats") {
    SUBCASE("kappa = 0 decouples the environment") {
        const auto s = phase_diffusion_stats(4.0, 4.0, 0.5, 0.0);
        CHECK(s.effective_mean == doctest::Approx(4.0).epsilon(1e-14));
        CHECK(s.variance == doctest::Approx(4.0).epsilon(1e-14));
    }
    SUBCASE("kappa = 1 leaves only the quadrature term") {
        const double beta = 0.5;
        const auto s = phase_diffusion_stats(4.0, 4.0, beta, 1.0);
        CHECK(s.effective_mean ==
              doctest::Approx(1.0 / (2.0 * std::sqrt(2.0 * std::numbers::pi) * beta))
                  .epsilon(1e-14));
        CHECK(s.variance == doctest::Approx(1.0 / (8.0 * beta * beta)).epsilon(1e-14));
    }
    SUBCASE("MT-optimal kappa = 8/9 reproduces variance 4/9") {
        const auto s = phase_diffusion_stats(4.0, 4.0, 0.5, 8.0 / 9.0);
        CHECK(s.variance == doctest::Approx(4.0 / 9.0).epsilon(1e-13));
    }
    CHECK_THROWS_AS(phase_diffusion_stats(1.0, 1.0, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("phase diffusion optimisation") {
    SUBCASE("worked example beta = 0.5, <n> = dn^2 = 4") {
        const auto opt = phase_diffusion_optimize(4.0, 4.0, 0.5);
        CHECK(opt.mt.sigma_or_kappa == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
        CHECK(opt.mt.variance == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
        CHECK(opt.ml.sigma_or_kappa == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(opt.ml.effective_mean ==
              doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
        CHECK(opt.mt.variance == doctest::Approx(opt.mt_grid_variance).epsilon(1e-6));
    }
    SUBCASE("small beta recovers the bare statistics") {
        const auto opt = phase_diffusion_optimize(3.0, 2.0, 1e-9);
        CHECK(opt.mt.sigma_or_kappa == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(opt.mt.variance == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(opt.ml.effective_mean == doctest::Approx(3.0).epsilon(1e-6));
    }
    SUBCASE("minimum variance respects the harmonic ceiling") {
        for (double beta : {0.05, 0.3, 1.0, 2.0}) {
            for (double var : {0.5, 4.0, 50.0}) {
                const auto opt = phase_diffusion_optimize(2.0, var, beta);
                CHECK(opt.mt.variance <= std::min(var, 1.0 / (8.0 * beta * beta)) + 1e-12);
            }
        }
    }
    SUBCASE("optimised values never exceed random variational choices") {
        std::mt19937_64 rng(0x5eed0021);
        std::uniform_real_distribution<double> kap(0.0, 1.0);
        const auto opt = phase_diffusion_optimize(5.0, 3.0, 0.4);
        for (int i = 0; i < 100; ++i) {
            const auto s = phase_diffusion_stats(5.0, 3.0, 0.4, kap(rng));
            CHECK(opt.ml.effective_mean <= s.effective_mean + 1e-12);
            CHECK(opt.mt.variance <= s.variance + 1e-12);
        }
    }
}

TEST_CASE("phase diffusion vector bound") {
    const auto ps = optimal_mode_stats(2, 8);
    const std::vector<DiffusedModeInput> modes(2, {ps.mean, ps.var});
    const PriorWindow prior({0.0, 0.0}, {1e6, 1e6});

    SUBCASE("beta -> 0 recovers the noiseless bound") {
        const auto noisy = phase_diffusion_vector_bound(modes, std::vector<double>(2, 1e-9),
                                                        prior, kDefault);
        const std::vector<GeneratorStats> stats(2, GeneratorStats(ps.mean, ps.var, 0.0));
        const auto clean = combined_bound(stats, prior, kDefault);
        CHECK(noisy.total_ml == doctest::Approx(clean.total_ml).epsilon(1e-6));
        CHECK(noisy.total_mt == doctest::Approx(clean.total_mt).epsilon(1e-6));
    }
    SUBCASE("bound grows with beta") {
        double prev = 0.0;
        for (double beta : {1e-6, 0.01, 0.1, 0.5, 1.0, 2.0}) {
            const auto rep = phase_diffusion_vector_bound(modes, std::vector<double>(2, beta),
                                                          prior, kDefault);
            CHECK(rep.total_combined >= prev - 1e-12);
            prev = rep.total_combined;
        }
    }
    SUBCASE("validity warning below the Markov threshold") {
        const auto rep = phase_diffusion_vector_bound(modes, std::vector<double>(2, 0.01),
                                                      prior, kDefault);
        CHECK(rep.warnings.size() == 2);
    }
}
