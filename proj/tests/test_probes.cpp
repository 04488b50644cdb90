#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qzzb/bound.hpp"
#include "qzzb/fock.hpp"
#include "qzzb/oracle.hpp"
#include "qzzb/probes.hpp"

using namespace qzzb;

namespace {
const SpeedLimitConstants kDefault;

// Closed-route versus pipeline-route bounds for the optimal probe.
BoundReport optimal_pipeline(std::int64_t d, std::int64_t n, double width) {
    const auto state = optimal_probe(d, n);
    std::vector<GeneratorStats> stats;
    for (std::int64_t i = 1; i <= d; ++i)
        stats.push_back(generator_stats_from_spectrum(
            mode_number_spectrum(state, static_cast<std::size_t>(i))));
    const PriorWindow prior(std::vector<double>(static_cast<std::size_t>(d), 0.0),
                            std::vector<double>(static_cast<std::size_t>(d), width));
    return combined_bound(stats, prior, kDefault);
}
} // namespace

TEST_CASE("optimal probe construction") {
    SUBCASE("d = 1, N = 2 is the NOON state") {
        const auto st = optimal_probe(1, 2);
        REQUIRE(st.amplitudes().size() == 2);
        const double w = 1.0 / std::numbers::sqrt2;
        for (const auto& [occ, amp] : st.amplitudes())
            CHECK(std::abs(amp - w) < 1e-14);
    }
    SUBCASE("alpha follows 1/sqrt(d + sqrt(d))") {
        const auto spec = OptimalProbeSpec::make(4, 10);
        CHECK(spec.alpha == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));
        CHECK(4.0 * spec.alpha * spec.alpha + spec.beta * spec.beta ==
              doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("normalization constraint holds out to d = 200") {
        for (std::int64_t d : {1, 2, 7, 50, 200}) {
            const auto spec = OptimalProbeSpec::make(d, 5);
            CHECK(static_cast<double>(d) * spec.alpha * spec.alpha + spec.beta * spec.beta ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("reference-mode spectrum is {(beta^2, N), (1-beta^2, 0)}") {
        const auto spec = OptimalProbeSpec::make(3, 6);
        const auto marg = mode_number_spectrum(optimal_probe(3, 6), 0);
        REQUIRE(marg.size() == 2);
        CHECK(marg.entries()[1].probability ==
              doctest::Approx(spec.beta * spec.beta).epsilon(1e-13));
        CHECK(marg.entries()[1].energy == 6.0);
    }
}

TEST_CASE("noon state") {
    const auto st = noon_state(1);
    REQUIRE(st.amplitudes().size() == 2);
    const auto stats = generator_stats_from_spectrum(mode_number_spectrum(noon_state(5), 0));
    CHECK(stats.effective_mean == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(stats.variance == doctest::Approx(6.25).epsilon(1e-14));
    CHECK(fidelity_from_spectrum(mode_number_spectrum(noon_state(2), 0),
                                 std::numbers::pi / 2) == doctest::Approx(0.0));
}

TEST_CASE("se_bounds_optimal matches the reference decimals") {
    const auto b = se_bounds_optimal(2, 10, kDefault);
    CHECK(b.ml == doctest::Approx(5.5504e-3).epsilon(2e-4));
    CHECK(b.mt == doctest::Approx(1.1284e-2).epsilon(2e-4));

    // d = 1: d + sqrt(d) = 2 so both bounds are 4 c / N^2.
    const auto b1 = se_bounds_optimal(1, 7, kDefault);
    CHECK(b1.ml == doctest::Approx(4.0 * kDefault.c_ml() / 49.0).epsilon(1e-13));
    CHECK(b1.mt == doctest::Approx(4.0 * kDefault.c_mt() / 49.0).epsilon(1e-13));
}

TEST_CASE("se_bounds_optimal equals the generic pipeline") {
    for (std::int64_t d : {1, 2, 3, 10, 25, 50}) {
        for (std::int64_t n : {2, 10, 137, 1000}) {
            const auto closed = se_bounds_optimal(d, n, kDefault);
            const auto rep = optimal_pipeline(d, n, 1e9);
            CHECK(rep.total_ml == doctest::Approx(closed.ml).epsilon(1e-12));
            CHECK(rep.total_mt == doctest::Approx(closed.mt).epsilon(1e-12));
        }
    }
}

TEST_CASE("ie_bounds_noon closed forms") {
    const auto b = ie_bounds_noon(2, 10, kDefault);
    CHECK(b.ml == doctest::Approx(7.6184e-3).epsilon(2e-4));
    CHECK(b.mt == doctest::Approx(3.7392e-2).epsilon(2e-4));
    CHECK(b.exact_split);

    // d = 1 reduction: 1/(20 lambda^2 n^2).
    const auto b1 = ie_bounds_noon(1, 6, kDefault);
    CHECK(b1.ml ==
          doctest::Approx(1.0 / (20.0 * kDefault.lambda * kDefault.lambda * 36.0)).epsilon(1e-13));

    // Closed expressions d^3/(20 lambda^2 N^2), d^3 (pi^2-8)/(4 N^2).
    for (std::int64_t d : {2, 5, 8}) {
        const std::int64_t n = 12 * d;
        const auto bb = ie_bounds_noon(d, n, kDefault);
        const double dd = static_cast<double>(d), nn = static_cast<double>(n);
        CHECK(bb.ml == doctest::Approx(dd * dd * dd /
                                       (20.0 * kDefault.lambda * kDefault.lambda * nn * nn))
                           .epsilon(1e-12));
        CHECK(bb.mt ==
              doctest::Approx(dd * dd * dd * (std::numbers::pi * std::numbers::pi - 8.0) /
                              (4.0 * nn * nn))
                  .epsilon(1e-12));
    }

    // Non-divisible totals floor the per-probe photon number and flag it.
    const auto fl = ie_bounds_noon(3, 10, kDefault);
    CHECK_FALSE(fl.exact_split);
    CHECK(fl.n_per_probe == 3);
    CHECK_THROWS_AS(ie_bounds_noon(5, 3, kDefault), std::domain_error);

    // MT is the tighter IE bound throughout d <= 100.
    for (std::int64_t d = 1; d <= 100; ++d) {
        const auto bb = ie_bounds_noon(d, 120 * d, kDefault);
        CHECK(bb.mt > bb.ml);
    }
}

TEST_CASE("advantage ratio") {
    // d = 1 evaluates to 5 lambda^2 (pi^2 - 8), numerically 4.9081...
    CHECK(advantage_ratio(1, 8, kDefault) == doctest::Approx(4.9081).epsilon(2e-5));

    // N cancels exactly.
    for (std::int64_t d : {2, 3, 7}) {
        const double ref = advantage_ratio(d, d * 2, kDefault);
        for (std::int64_t m : {3, 10, 400}) {
            CHECK(advantage_ratio(d, d * m, kDefault) == doctest::Approx(ref).epsilon(1e-12));
        }
        // Closed algebraic form.
        const double dd = static_cast<double>(d);
        const double s = dd + std::sqrt(dd);
        CHECK(ref == doctest::Approx(advantage_ratio_limit(kDefault) * dd * dd / (s * s))
                         .epsilon(1e-12));
    }

    // Large-d limit approximately 19.63, a factor ~4 above the d = 1 value.
    CHECK(advantage_ratio_limit(kDefault) == doctest::Approx(19.6325).epsilon(1e-4));
    CHECK(advantage_ratio_limit(kDefault) / advantage_ratio(1, 4, kDefault) ==
          doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("squeezed coefficients") {
    SUBCASE("D = 2, r = 1: (cosh 1, -sinh 1)") {
        const auto c = squeezed_coeffs(2, 1.0, CoeffSign::minus);
        REQUIRE(c.size() == 2);
        CHECK(c[0] == doctest::Approx(std::cosh(1.0)).epsilon(1e-13));
        CHECK(c[1] == doctest::Approx(-std::sinh(1.0)).epsilon(1e-13));
    }
    SUBCASE("r = 0 gives the identity expansion") {
        const auto c = squeezed_coeffs(5, 0.0, CoeffSign::minus);
        CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-14));
        for (std::size_t i = 1; i < c.size(); ++i)
            CHECK(c[i] == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("minus family at -r equals plus family at r") {
        for (std::int64_t D : {2, 3, 4, 5, 6}) {
            const auto a = squeezed_coeffs(D, -0.8, CoeffSign::minus);
            const auto b = squeezed_coeffs(D, 0.8, CoeffSign::plus);
            for (std::size_t i = 0; i < a.size(); ++i)
                CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("bogoliubov pair") {
    SUBCASE("r = 0") {
        const auto p = bogoliubov(4, 0.0);
        CHECK(max_abs_diff(p.R, MatD::identity(4)) < 1e-12);
        CHECK(max_abs_diff(p.K, MatD(4, 4)) < 1e-12);
    }
    SUBCASE("D = 2, r = 1: R = cosh(1) I, K = -sinh(1) swap") {
        const auto p = bogoliubov(2, 1.0);
        CHECK(p.R(0, 0) == doctest::Approx(std::cosh(1.0)).epsilon(1e-13));
        CHECK(p.R(0, 1) == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(p.K(0, 1) == doctest::Approx(-std::sinh(1.0)).epsilon(1e-13));
        CHECK(p.K(0, 0) == doctest::Approx(0.0).epsilon(1e-13));
    }
    SUBCASE("construction validates the symplectic conditions") {
        for (std::int64_t D : {2, 3, 5, 6}) CHECK_NOTHROW(bogoliubov(D, 1.3));
    }
    SUBCASE("matches the dense matrix exponential") {
        for (std::int64_t D : {2, 3, 4, 5, 6}) {
            const double r = 0.7;
            MatD shift_t(static_cast<std::size_t>(D), static_cast<std::size_t>(D));
            // A~_{kj} = delta_{(k+1) mod D, j}
            for (std::size_t k = 0; k < static_cast<std::size_t>(D); ++k)
                shift_t(k, (k + 1) % static_cast<std::size_t>(D)) = 1.0;
            MatD neg = shift_t;
            for (auto& v : neg.a) v *= -r;
            const MatD expm = oracle::dense_expm(neg);
            const auto cm = squeezed_coeffs(D, r, CoeffSign::minus);
            MatD rebuilt(static_cast<std::size_t>(D), static_cast<std::size_t>(D));
            for (std::size_t k = 0; k < static_cast<std::size_t>(D); ++k)
                for (std::size_t j = 0; j < static_cast<std::size_t>(D); ++j)
                    rebuilt(k, j) = cm[(j + static_cast<std::size_t>(D) - k) %
                                       static_cast<std::size_t>(D)];
            CHECK(max_abs_diff(expm, rebuilt) < 1e-10);
        }
    }
}

TEST_CASE("squeezed mode statistics") {
    SUBCASE("two-mode closed forms") {
        const auto stats = squeezed_mode_stats(2, 1.0);
        REQUIRE(stats.size() == 2);
        const double sh2 = std::sinh(1.0) * std::sinh(1.0);
        const double ch2 = std::cosh(1.0) * std::cosh(1.0);
        CHECK(stats[0].mean == doctest::Approx(sh2).epsilon(1e-12));
        CHECK(stats[0].variance == doctest::Approx(sh2 * ch2).epsilon(1e-12));
        CHECK(stats[1].mean == stats[0].mean);
    }
    SUBCASE("vacuum") {
        const auto stats = squeezed_mode_stats(4, 0.0);
        CHECK(stats[0].mean == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(stats[0].variance == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("four-mode closed form sinh^2(r)/2, cosh^4(r)/4 - 1/4") {
        const double r = 0.9;
        const auto stats = squeezed_mode_stats(4, r);
        CHECK(stats[0].mean == doctest::Approx(std::sinh(r) * std::sinh(r) / 2.0).epsilon(1e-12));
        const double c2 = std::cosh(r) * std::cosh(r);
        CHECK(stats[0].variance == doctest::Approx((c2 * c2 - 1.0) / 4.0).epsilon(1e-12));
    }
}

TEST_CASE("squeezed spec bundles coefficients and the Bogoliubov pair") {
    const auto spec = SqueezedSpec::make(3, 0.7);
    CHECK(spec.modes == 4);
    CHECK(spec.coeffs_minus.size() == 4);
    CHECK(spec.coeffs_plus.size() == 4);
    CHECK(spec.R.rows == 4);
    CHECK(spec.K.cols == 4);
    // Construction already enforces the symplectic identities; spot-check the
    // identity row sum R R^T - K K^T = I.
    const auto rrt = matmul(spec.R, transpose(spec.R));
    const auto kkt = matmul(spec.K, transpose(spec.K));
    CHECK(rrt(0, 0) - kkt(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rrt(0, 1) - kkt(0, 1) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("photon budget matching") {
    const double target = 2.0 * std::sinh(1.0) * std::sinh(1.0);
    CHECK(match_photon_budget(2, target) == doctest::Approx(1.0).epsilon(1e-9));

    // Strictly increasing in the budget.
    double prev = 0.0;
    for (double n : {0.1, 0.5, 2.0, 10.0, 40.0}) {
        const double r = match_photon_budget(5, n);
        CHECK(r > prev);
        prev = r;
        const double achieved = 5.0 * squeezed_mode_stats(5, r)[0].mean;
        CHECK(achieved == doctest::Approx(n).epsilon(1e-9));
    }
    CHECK_THROWS_AS(match_photon_budget(2, 1e40), std::range_error);
}

TEST_CASE("squeezed SE versus IE comparison") {
    const auto cmp = se_ie_squeezed_comparison(4, 12.0, kDefault);

    // Photon budgets match by construction.
    const double se_total = 5.0 * squeezed_mode_stats(5, cmp.se_r)[0].mean;
    const double ie_total = 4.0 * 2.0 * squeezed_mode_stats(2, cmp.ie_r)[0].mean;
    CHECK(se_total == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(ie_total == doctest::Approx(12.0).epsilon(1e-9));

    CHECK(cmp.se.per_mode_ml.size() == 4);
    CHECK(cmp.ie.per_mode_ml.size() == 4);
    CHECK(cmp.se.total_combined == std::max(cmp.se.total_ml, cmp.se.total_mt));

    // Simultaneous estimation carries more photons per mode, so its bound
    // sits strictly below the individual strategy's.
    const auto wide = se_ie_squeezed_comparison(6, 20.0, kDefault);
    CHECK(wide.se.total_combined < wide.ie.total_combined);
}
