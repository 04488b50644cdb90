#include "qzzb/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace qzzb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1 - sqrt(1 - F^2) without cancellation near F = 0.
double one_minus_root(double f2) {
    f2 = std::clamp(f2, 0.0, 1.0);
    return f2 / (1.0 + std::sqrt(1.0 - f2));
}

double checked_fidelity(const std::function<double(double)>& fidelity, double tau) {
    double f = fidelity(tau);
    if (f < -1e-9 || f > 1.0 + 1e-9)
        throw std::domain_error("zzb: fidelity outside [0, 1]");
    return std::clamp(f, 0.0, 1.0);
}

double composite_sum(const std::vector<double>& values, double h, QuadratureRule rule) {
    const std::size_t n = values.size() - 1;  // intervals
    double s = 0.0;
    if (rule == QuadratureRule::trapezoid) {
        for (std::size_t i = 1; i < n; ++i) s += values[i];
        s += 0.5 * (values.front() + values.back());
        return s * h;
    }
    // Simpson; caller guarantees n even.
    s = values.front() + values.back();
    for (std::size_t i = 1; i < n; i += 2) s += 4.0 * values[i];
    for (std::size_t i = 2; i < n; i += 2) s += 2.0 * values[i];
    return s * h / 3.0;
}

// One fixed-grid evaluation shared by both bound variants.  `error_factor`
// maps tau to the hypothesis-testing factor in [0, 1]; `prior_factor` maps
// tau to the prior-overlap weight.  Valley filling acts on the error factor.
double grid_bound(double width, std::size_t intervals, QuadratureRule rule, bool fill,
                  const std::function<double(double)>& error_factor,
                  const std::function<double(double)>& prior_factor) {
    const double h = width / static_cast<double>(intervals);
    std::vector<double> err(intervals + 1), prior(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double tau = h * static_cast<double>(i);
        err[i] = error_factor(tau);
        prior[i] = prior_factor(tau);
    }
    if (fill) err = valley_fill(err);
    std::vector<double> integrand(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double tau = h * static_cast<double>(i);
        integrand[i] = 0.5 * tau * prior[i] * err[i];
    }
    return composite_sum(integrand, h, rule);
}

double refined_bound(double width, const QuadratureConfig& cfg,
                     const std::function<double(double)>& error_factor,
                     const std::function<double(double)>& prior_factor) {
    cfg.validate();
    std::size_t n = cfg.intervals;
    double value = grid_bound(width, n, cfg.rule, cfg.valley_fill, error_factor, prior_factor);
    if (!cfg.refine) return value;
    while (n * 2 <= cfg.max_intervals) {
        n *= 2;
        const double next =
            grid_bound(width, n, cfg.rule, cfg.valley_fill, error_factor, prior_factor);
        const double change = std::abs(next - value);
        value = next;
        // A pair of zero samples is not evidence of convergence: coarse grids
        // can miss narrow support entirely.
        if (value != 0.0 && change <= cfg.refine_rel_tol * std::abs(value)) break;
    }
    return value;
}

} // namespace

PriorWindow::PriorWindow(std::vector<double> means_, std::vector<double> widths_)
    : means(std::move(means_)), widths(std::move(widths_)) {
    if (means.size() != widths.size())
        throw std::invalid_argument("PriorWindow: means/widths length mismatch");
    if (widths.empty()) throw std::invalid_argument("PriorWindow: empty");
    for (double w : widths)
        if (!(w > 0.0)) throw std::invalid_argument("PriorWindow: widths must be > 0");
}

void QuadratureConfig::validate() const {
    if (intervals < 16) throw std::invalid_argument("QuadratureConfig: intervals must be >= 16");
    if (rule == QuadratureRule::simpson && intervals % 2 != 0)
        throw std::invalid_argument("QuadratureConfig: simpson needs an even interval count");
}

std::vector<double> valley_fill(const std::vector<double>& samples) {
    if (samples.empty()) throw std::domain_error("valley_fill: empty input");
    std::vector<double> out(samples);
    for (std::size_t i = out.size() - 1; i-- > 0;) out[i] = std::max(out[i], out[i + 1]);
    return out;
}

double uniform_overlap(double tau, double width) {
    if (tau < 0.0) throw std::invalid_argument("uniform_overlap: tau must be >= 0");
    if (!(width > 0.0)) throw std::invalid_argument("uniform_overlap: width must be > 0");
    return std::max(0.0, 1.0 - tau / width);
}

double pe_equally_likely(double fidelity) {
    if (fidelity < 0.0 || fidelity > 1.0)
        throw std::domain_error("pe_equally_likely: fidelity outside [0, 1]");
    return 0.5 * one_minus_root(fidelity * fidelity);
}

double qzzb_mode_bound(const std::function<double(double)>& fidelity, double width,
                       const QuadratureConfig& cfg) {
    if (!(width > 0.0)) throw std::invalid_argument("qzzb_mode_bound: width must be > 0");
    auto error_factor = [&](double tau) {
        const double f = checked_fidelity(fidelity, tau);
        return one_minus_root(f * f);
    };
    auto prior_factor = [&](double tau) { return uniform_overlap(tau, width); };
    return refined_bound(width, cfg, error_factor, prior_factor);
}

double zzb_variant2_mode_bound(const std::function<double(double)>& fidelity, double width,
                               const QuadratureConfig& cfg) {
    if (!(width > 0.0)) throw std::invalid_argument("zzb_variant2_mode_bound: width must be > 0");

    // Midpoint rule over zeta on each region where at least one of the two
    // shifted windows is supported.  The uniform density is 1/width on
    // [-width/2, width/2] (means drop out by translation invariance).
    const auto density = [width](double z) {
        return (z >= -width / 2.0 && z <= width / 2.0) ? 1.0 / width : 0.0;
    };
    constexpr std::size_t kZetaPoints = 200;

    struct ZetaIntegral {
        double weighted;  // int [P(z)+P(z+tau)] * Pe_factor dz
        double mass;      // int over the overlap of [P(z)+P(z+tau)] dz
    };
    auto integrate_zeta = [&](double tau, double f) -> ZetaIntegral {
        const double f2 = f * f;
        const double lo = -width / 2.0 - tau, hi = width / 2.0;
        ZetaIntegral out{0.0, 0.0};
        // Region boundaries: left-only, overlap, right-only.
        const double cuts[4] = {lo, -width / 2.0, width / 2.0 - tau, hi};
        for (int r = 0; r < 3; ++r) {
            const double a = cuts[r], b = cuts[r + 1];
            if (!(b > a)) continue;
            const double h = (b - a) / kZetaPoints;
            double acc_w = 0.0, acc_m = 0.0;
            for (std::size_t i = 0; i < kZetaPoints; ++i) {
                const double z = a + (static_cast<double>(i) + 0.5) * h;
                const double p0 = density(z), p1 = density(z + tau);
                const double sum = p0 + p1;
                if (sum <= 0.0) continue;
                const double prod = (p0 / sum) * (p1 / sum);
                acc_w += sum * 0.5 * one_minus_root(4.0 * prod * f2);
                if (p0 > 0.0 && p1 > 0.0) acc_m += sum;
            }
            out.weighted += acc_w * h;
            out.mass += acc_m * h;
        }
        return out;
    };

    // The grid machinery valley-fills the error factor; the prior mass m/2
    // plays the role of the overlap weight, so the product reproduces the
    // zeta integral.  Cache the last tau: the grid helper asks for both
    // factors at the same points.
    struct Cache {
        double tau = -1.0;
        ZetaIntegral zi{};
    };
    auto cache = std::make_shared<Cache>();
    auto cached = [&fidelity, &integrate_zeta, cache](double tau) -> ZetaIntegral {
        if (cache->tau != tau) {
            cache->zi = integrate_zeta(tau, checked_fidelity(fidelity, tau));
            cache->tau = tau;
        }
        return cache->zi;
    };
    // At zero overlap (tau >= W) the normalised priors degenerate to the
    // equally likely pair, so the error factor continues as 1 - sqrt(1 - F^2);
    // this keeps the valley fill consistent with qzzb_mode_bound's factor.
    auto error_factor = [&fidelity, cached](double tau) {
        const auto zi = cached(tau);
        if (zi.mass > 0.0) return zi.weighted / (zi.mass / 2.0);
        const double f = checked_fidelity(fidelity, tau);
        return one_minus_root(f * f);
    };
    auto prior_factor = [cached](double tau) { return cached(tau).mass / 2.0; };
    return refined_bound(width, cfg, error_factor, prior_factor);
}

ClosedBound ml_closed(const GeneratorStats& stats, double width, const SpeedLimitConstants& k) {
    if (stats.effective_mean <= 0.0) return {kInf, false};
    return {k.c_ml() / (stats.effective_mean * stats.effective_mean),
            width >= k.ml_min_width(stats.effective_mean)};
}

ClosedBound mt_closed(const GeneratorStats& stats, double width, const SpeedLimitConstants& k) {
    if (stats.variance <= 0.0) return {kInf, false};
    return {k.c_mt() / stats.variance, width >= k.mt_min_width(std::sqrt(stats.variance))};
}

BoundReport combined_bound(const std::vector<GeneratorStats>& per_mode_stats,
                           const PriorWindow& prior, const SpeedLimitConstants& k) {
    if (per_mode_stats.size() != prior.dim())
        throw std::invalid_argument("combined_bound: stats/prior dimension mismatch");
    if (per_mode_stats.empty()) throw std::invalid_argument("combined_bound: no modes");
    BoundReport rep;
    for (std::size_t i = 0; i < per_mode_stats.size(); ++i) {
        const auto ml = ml_closed(per_mode_stats[i], prior.widths[i], k);
        const auto mt = mt_closed(per_mode_stats[i], prior.widths[i], k);
        rep.per_mode_ml.push_back(ml.value);
        rep.per_mode_mt.push_back(mt.value);
        rep.ml_valid.push_back(ml.valid);
        rep.mt_valid.push_back(mt.valid);
        rep.total_ml += ml.value;
        rep.total_mt += mt.value;
        if (std::isinf(ml.value) || std::isinf(mt.value))
            rep.warnings.push_back("mode " + std::to_string(i) +
                                   ": stationary generator, bound unbounded");
    }
    rep.total_combined = std::max(rep.total_ml, rep.total_mt);
    return rep;
}

BoundReport qzzb_vector_bound(const std::vector<EnergySpectrum>& spectra,
                              const PriorWindow& prior, const QuadratureConfig& cfg,
                              const SpeedLimitConstants& k) {
    if (spectra.size() != prior.dim())
        throw std::invalid_argument("qzzb_vector_bound: spectra/prior dimension mismatch");
    std::vector<GeneratorStats> stats;
    stats.reserve(spectra.size());
    for (const auto& s : spectra) stats.push_back(generator_stats_from_spectrum(s));

    BoundReport rep = combined_bound(stats, prior, k);
    double total = 0.0;
    for (std::size_t i = 0; i < spectra.size(); ++i) {
        const EnergySpectrum& spec = spectra[i];
        auto fid = [&spec](double tau) { return fidelity_from_spectrum(spec, tau); };
        const double v = qzzb_mode_bound(fid, prior.widths[i], cfg);
        rep.per_mode_integral.push_back(v);
        total += v;
    }
    rep.total_integral = total;
    rep.quadrature = cfg;
    return rep;
}

} // namespace qzzb
