#include "qzzb/probes.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace qzzb {

namespace {

GeneratorStats stats_from_photon(const ModePhotonStats& s) {
    // The photon-number generator has minimum eigenvalue 0, so <n>_+ = <n>.
    return GeneratorStats(s.mean, s.variance, 0.0);
}

} // namespace

OptimalProbeSpec OptimalProbeSpec::make(std::int64_t d, std::int64_t n_total) {
    if (d < 1) throw std::invalid_argument("OptimalProbeSpec: d must be >= 1");
    if (n_total < 1) throw std::invalid_argument("OptimalProbeSpec: n_total must be >= 1");
    OptimalProbeSpec spec;
    spec.d = d;
    spec.n_total = n_total;
    const double dd = static_cast<double>(d);
    spec.alpha = 1.0 / std::sqrt(dd + std::sqrt(dd));
    spec.beta = std::sqrt(1.0 - dd * spec.alpha * spec.alpha);
    return spec;
}

FockState optimal_probe(std::int64_t d, std::int64_t n_total) {
    const auto spec = OptimalProbeSpec::make(d, n_total);
    const std::size_t modes = static_cast<std::size_t>(d) + 1;
    FockState::AmplitudeMap amps;
    Occupation occ(modes, 0);
    occ[0] = static_cast<int>(n_total);
    amps[occ] = spec.beta;
    for (std::size_t i = 1; i < modes; ++i) {
        Occupation o(modes, 0);
        o[i] = static_cast<int>(n_total);
        amps[o] = spec.alpha;
    }
    return FockState(modes, std::move(amps));
}

FockState noon_state(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("noon_state: n must be >= 1");
    const double w = 1.0 / std::numbers::sqrt2;
    FockState::AmplitudeMap amps;
    amps[{static_cast<int>(n), 0}] = w;
    amps[{0, static_cast<int>(n)}] = w;
    return FockState(2, std::move(amps));
}

PairBounds se_bounds_optimal(std::int64_t d, std::int64_t n_total, const SpeedLimitConstants& k) {
    if (d < 1) throw std::invalid_argument("se_bounds_optimal: d must be >= 1");
    if (n_total < 1) throw std::invalid_argument("se_bounds_optimal: n_total must be >= 1");
    const double dd = static_cast<double>(d);
    const double nn = static_cast<double>(n_total);
    const double s = dd + std::sqrt(dd);
    PairBounds out;
    out.ml = dd * s * s * k.c_ml() / (nn * nn);
    out.mt = dd * s * s * k.c_mt() / ((s - 1.0) * nn * nn);
    return out;
}

NoonBounds ie_bounds_noon(std::int64_t d, std::int64_t n_total, const SpeedLimitConstants& k) {
    if (d < 1) throw std::invalid_argument("ie_bounds_noon: d must be >= 1");
    const std::int64_t n = n_total / d;
    if (n < 1) throw std::domain_error("ie_bounds_noon: fewer than one photon per probe");
    NoonBounds out;
    out.n_per_probe = n;
    out.exact_split = (n * d == n_total);
    const double dd = static_cast<double>(d);
    const double nper = static_cast<double>(n);
    // d independent NOON probes: <n>_+ = n/2, dn^2 = n^2/4 each.
    out.ml = dd * 4.0 * k.c_ml() / (nper * nper);
    out.mt = dd * 4.0 * k.c_mt() / (nper * nper);
    return out;
}

double advantage_ratio(std::int64_t d, std::int64_t n_total, const SpeedLimitConstants& k) {
    const auto se = se_bounds_optimal(d, n_total, k);
    const auto ie = ie_bounds_noon(d, n_total, k);
    return ie.mt / se.ml;
}

double advantage_ratio_limit(const SpeedLimitConstants& k) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return 20.0 * k.lambda * k.lambda * (pi2 - 8.0);
}

std::vector<double> squeezed_coeffs(std::int64_t modes, double r, CoeffSign sign) {
    if (modes < 2) throw std::invalid_argument("squeezed_coeffs: need >= 2 modes");
    const std::size_t D = static_cast<std::size_t>(modes);
    const double omega = 2.0 * std::numbers::pi / static_cast<double>(D);
    const double s = (sign == CoeffSign::minus) ? -r : r;
    // Conjugate symmetry j <-> D-j cancels the imaginary parts; the residue
    // check scales with the coefficient magnitude e^{|r|}.
    const double residue_tol = 1e-10 * std::max(1.0, std::exp(std::abs(r)));
    std::vector<double> out(D);
    for (std::size_t m = 0; m < D; ++m) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < D; ++j) {
            const double phi = omega * static_cast<double>(j);
            const std::complex<double> eigen = std::polar(1.0, phi);  // shift eigenvalue
            const std::complex<double> val = std::exp(s * eigen);
            acc += std::polar(1.0, -static_cast<double>(m) * phi) * val;
        }
        acc /= static_cast<double>(D);
        if (std::abs(acc.imag()) >= residue_tol)
            throw std::runtime_error("squeezed_coeffs: imaginary residue too large");
        out[m] = acc.real();
    }
    return out;
}

BogoliubovPair bogoliubov(std::int64_t modes, double r) {
    const auto cm = squeezed_coeffs(modes, r, CoeffSign::minus);
    const auto cp = squeezed_coeffs(modes, r, CoeffSign::plus);
    const std::size_t D = static_cast<std::size_t>(modes);
    // exp(-r A~)_{kj} = cm_{(j-k) mod D}; exp(r A)_{kj} = cp_{(k-j) mod D}.
    MatD em(D, D), ep(D, D);
    for (std::size_t k = 0; k < D; ++k) {
        for (std::size_t j = 0; j < D; ++j) {
            em(k, j) = cm[(j + D - k) % D];
            ep(k, j) = cp[(k + D - j) % D];
        }
    }
    BogoliubovPair out;
    out.R = MatD(D, D);
    out.K = MatD(D, D);
    for (std::size_t i = 0; i < D * D; ++i) {
        out.R.a[i] = 0.5 * (em.a[i] + ep.a[i]);
        out.K.a[i] = 0.5 * (em.a[i] - ep.a[i]);
    }

    // Consistency: R R^T - K K^T = I, R K^T symmetric, and the row-wise
    // contraction sum_i em_ki ep_ki = 1.  The entries grow like e^{2r}, so
    // the 1e-9 tolerance widens with that scale once rounding dominates it.
    const double tol = std::max(1e-9, 1e-13 * std::exp(2.0 * std::abs(r)));
    const MatD rrt = matmul(out.R, transpose(out.R));
    const MatD kkt = matmul(out.K, transpose(out.K));
    MatD diff(D, D);
    for (std::size_t i = 0; i < D * D; ++i) diff.a[i] = rrt.a[i] - kkt.a[i];
    if (max_abs_diff(diff, MatD::identity(D)) > tol)
        throw std::runtime_error("bogoliubov: R R^T - K K^T != I");
    const MatD rkt = matmul(out.R, transpose(out.K));
    if (max_abs_diff(rkt, transpose(rkt)) > tol)
        throw std::runtime_error("bogoliubov: R K^T not symmetric");
    for (std::size_t k = 0; k < D; ++k) {
        double contraction = 0.0;
        for (std::size_t i = 0; i < D; ++i) contraction += em(k, i) * ep(k, i);
        if (std::abs(contraction - 1.0) > tol)
            throw std::runtime_error("bogoliubov: contraction identity violated");
    }
    return out;
}

SqueezedSpec SqueezedSpec::make(std::int64_t d, double r) {
    if (d < 1) throw std::invalid_argument("SqueezedSpec: d must be >= 1");
    if (r < 0.0) throw std::invalid_argument("SqueezedSpec: r must be >= 0");
    SqueezedSpec spec;
    spec.d = d;
    spec.modes = d + 1;
    spec.r = r;
    spec.coeffs_minus = squeezed_coeffs(spec.modes, r, CoeffSign::minus);
    spec.coeffs_plus = squeezed_coeffs(spec.modes, r, CoeffSign::plus);
    auto pair = bogoliubov(spec.modes, r);
    spec.R = std::move(pair.R);
    spec.K = std::move(pair.K);
    return spec;
}

std::vector<ModePhotonStats> squeezed_mode_stats(std::int64_t modes, double r) {
    const auto cm = squeezed_coeffs(modes, r, CoeffSign::minus);
    const auto cp = squeezed_coeffs(modes, r, CoeffSign::plus);
    double sm = 0.0, sp = 0.0;
    for (double c : cm) sm += c * c;
    for (double c : cp) sp += c * c;
    ModePhotonStats stat;
    stat.mean = 0.25 * (sm + sp) - 0.5;
    stat.variance = 0.125 * sm * sm + 0.125 * sp * sp - 0.25;
    if (stat.mean < 0.0 && stat.mean > -1e-12) stat.mean = 0.0;
    if (stat.variance < 0.0 && stat.variance > -1e-12) stat.variance = 0.0;

    // Independent route to the mean: row norm of the Bogoliubov K.
    const auto pair = bogoliubov(modes, r);
    double krow = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(modes); ++i)
        krow += pair.K(0, i) * pair.K(0, i);
    if (std::abs(krow - stat.mean) > std::max(1e-9, 1e-13 * stat.mean))
        throw std::runtime_error("squeezed_mode_stats: mean disagrees with Bogoliubov route");

    return std::vector<ModePhotonStats>(static_cast<std::size_t>(modes), stat);
}

double match_photon_budget(std::int64_t modes, double n_total) {
    if (!(n_total > 0.0)) throw std::invalid_argument("match_photon_budget: n_total must be > 0");
    const double dd = static_cast<double>(modes);
    auto total_mean = [&](double r) { return dd * squeezed_mode_stats(modes, r)[0].mean; };
    double lo = 0.0, hi = 20.0;
    if (total_mean(hi) < n_total)
        throw std::range_error("match_photon_budget: n_total not reachable with r <= 20");
    // Total mean is strictly increasing in r.
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total_mean(mid) < n_total ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

PriorWindow auto_prior(const std::vector<GeneratorStats>& stats, const SpeedLimitConstants& k,
                       double factor) {
    std::vector<double> widths;
    widths.reserve(stats.size());
    for (const auto& s : stats) {
        double w = 1.0;
        if (s.effective_mean > 0.0) w = std::max(w, k.ml_min_width(s.effective_mean));
        if (s.variance > 0.0) w = std::max(w, k.mt_min_width(std::sqrt(s.variance)));
        widths.push_back(factor / SpeedLimitConstants::validity_factor * w);
    }
    return PriorWindow(std::vector<double>(stats.size(), 0.0), std::move(widths));
}

SqueezedComparison se_ie_squeezed_comparison(std::int64_t d, double n_total,
                                             const SpeedLimitConstants& k) {
    if (d < 2) throw std::invalid_argument("se_ie_squeezed_comparison: d must be >= 2");
    SqueezedComparison out;

    // SE: one (d+1)-mode squeezed vacuum carrying the whole budget; the d
    // parameter modes enter the bound.
    out.se_r = match_photon_budget(d + 1, n_total);
    const auto se_stats = squeezed_mode_stats(d + 1, out.se_r)[0];
    std::vector<GeneratorStats> se_modes(static_cast<std::size_t>(d), stats_from_photon(se_stats));
    out.se = combined_bound(se_modes, auto_prior(se_modes, k), k);

    // IE: d two-mode squeezed vacua with budget n_total/d each, one
    // estimating mode per probe.
    out.ie_r = match_photon_budget(2, n_total / static_cast<double>(d));
    const auto ie_stats = squeezed_mode_stats(2, out.ie_r)[0];
    std::vector<GeneratorStats> ie_modes(static_cast<std::size_t>(d), stats_from_photon(ie_stats));
    out.ie = combined_bound(ie_modes, auto_prior(ie_modes, k), k);
    return out;
}

} // namespace qzzb
