#include "qzzb/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qzzb {

FockState::FockState(std::size_t modes, AmplitudeMap amplitudes)
    : modes_(modes), amps_(std::move(amplitudes)) {
    if (modes_ == 0) throw std::invalid_argument("FockState: modes must be >= 1");
    if (amps_.empty()) throw std::invalid_argument("FockState: empty amplitude map");
    double norm2 = 0.0;
    for (const auto& [occ, amp] : amps_) {
        if (occ.size() != modes_)
            throw std::invalid_argument("FockState: occupation length != mode count");
        for (int n : occ)
            if (n < 0) throw std::invalid_argument("FockState: negative occupation");
        norm2 += std::norm(amp);
    }
    if (std::abs(norm2 - 1.0) > 1e-12)
        throw std::invalid_argument("FockState: state not normalized");
}

EnergySpectrum::EnergySpectrum(std::vector<SpectrumEntry> entries) {
    if (entries.empty()) throw std::invalid_argument("EnergySpectrum: no entries");
    for (const auto& e : entries) {
        if (!(e.probability >= 0.0) || e.probability > 1.0 + 1e-12)
            throw std::invalid_argument("EnergySpectrum: probability outside [0, 1]");
        if (!std::isfinite(e.energy))
            throw std::invalid_argument("EnergySpectrum: non-finite energy");
    }
    std::sort(entries.begin(), entries.end(),
              [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.energy < b.energy; });
    double total = 0.0;
    for (const auto& e : entries) {
        if (e.probability == 0.0) continue;
        const double scale = std::max({1.0, std::abs(e.energy),
                                       entries_.empty() ? 0.0 : std::abs(entries_.back().energy)});
        if (!entries_.empty() && std::abs(e.energy - entries_.back().energy) <= 1e-12 * scale) {
            entries_.back().probability += e.probability;
        } else {
            entries_.push_back(e);
        }
        total += e.probability;
    }
    if (entries_.empty()) throw std::invalid_argument("EnergySpectrum: all probabilities zero");
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("EnergySpectrum: probabilities do not sum to 1");
}

GeneratorStats::GeneratorStats(double mean_, double variance_, double e_min_)
    : mean(mean_), effective_mean(mean_ - e_min_), variance(variance_), e_min(e_min_) {
    if (variance < 0.0 && variance > -1e-12) variance = 0.0;
    if (effective_mean < 0.0 && effective_mean > -1e-12) effective_mean = 0.0;
    if (variance < 0.0) throw std::invalid_argument("GeneratorStats: negative variance");
    if (effective_mean < 0.0)
        throw std::invalid_argument("GeneratorStats: mean below minimum eigenvalue");
}

EnergySpectrum mode_number_spectrum(const FockState& state, std::size_t mode) {
    if (mode >= state.modes())
        throw std::out_of_range("mode_number_spectrum: mode index out of range");
    std::map<int, double> marginal;
    for (const auto& [occ, amp] : state.amplitudes())
        marginal[occ[mode]] += std::norm(amp);
    std::vector<SpectrumEntry> entries;
    entries.reserve(marginal.size());
    for (const auto& [n, p] : marginal)
        entries.push_back({p, static_cast<double>(n)});
    return EnergySpectrum(std::move(entries));
}

double fidelity_from_spectrum(const EnergySpectrum& spec, double tau) {
    if (tau < 0.0) throw std::invalid_argument("fidelity_from_spectrum: tau must be >= 0");
    if (tau == 0.0) return 1.0;
    std::complex<double> sum = 0.0;
    for (const auto& e : spec.entries())
        sum += e.probability * std::polar(1.0, tau * e.energy);
    return std::min(1.0, std::abs(sum));
}

GeneratorStats generator_stats_from_spectrum(const EnergySpectrum& spec) {
    if (spec.size() == 0) throw std::domain_error("generator_stats_from_spectrum: empty spectrum");
    double mean = 0.0, second = 0.0;
    double e_min = spec.entries().front().energy;  // entries sorted, support only
    for (const auto& e : spec.entries()) {
        mean += e.probability * e.energy;
        second += e.probability * e.energy * e.energy;
        e_min = std::min(e_min, e.energy);
    }
    double variance = second - mean * mean;
    if (variance < 0.0) variance = 0.0;  // rounding on degenerate spectra
    return GeneratorStats(mean, variance, e_min);
}

double ml_fidelity_surrogate(const GeneratorStats& stats, double lambda, double tau) {
    if (tau < 0.0) throw std::invalid_argument("ml_fidelity_surrogate: tau must be >= 0");
    const double x = 1.0 - 2.0 * lambda * tau * stats.effective_mean;
    return std::sqrt(std::max(0.0, x));
}

double mt_fidelity_surrogate(const GeneratorStats& stats, double tau) {
    if (tau < 0.0) throw std::invalid_argument("mt_fidelity_surrogate: tau must be >= 0");
    const double dh = std::sqrt(stats.variance);
    const double phase = dh * tau;
    if (phase > std::numbers::pi / 2.0) return 0.0;
    return std::abs(std::cos(phase));
}

} // namespace qzzb
