#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include "qzzb/constants.hpp"

namespace qzzb {

// Photon numbers per mode.  Length always equals the owning state's mode count.
using Occupation = std::vector<int>;

// Sparse multimode bosonic pure state.  The probe families used here have at
// most d+2 support points, so amplitudes are keyed by occupation vector.
// Immutable after construction; Sum |amplitude|^2 must be 1 within 1e-12.
class FockState {
public:
    using AmplitudeMap = std::map<Occupation, std::complex<double>>;

    FockState(std::size_t modes, AmplitudeMap amplitudes);

    std::size_t modes() const { return modes_; }
    const AmplitudeMap& amplitudes() const { return amps_; }

private:
    std::size_t modes_;
    AmplitudeMap amps_;
};

struct SpectrumEntry {
    double probability;
    double energy;
};

// Probability-energy pairs {(P_l, E_l)} defining the fidelity
// F(tau) = |Sum_l P_l exp(i tau E_l)|.  Entries are sorted by energy,
// duplicate energies merged (tolerance 1e-12 on energy equality) and
// zero-probability entries dropped, so e_min is the minimum over the
// actual support.
class EnergySpectrum {
public:
    explicit EnergySpectrum(std::vector<SpectrumEntry> entries);

    const std::vector<SpectrumEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<SpectrumEntry> entries_;
};

// Mean, variance and effective mean (mean above the ground level) of a
// generator on the probe state.
struct GeneratorStats {
    double mean = 0.0;
    double effective_mean = 0.0;  // mean - e_min, always >= 0
    double variance = 0.0;
    double e_min = 0.0;

    GeneratorStats() = default;
    GeneratorStats(double mean_, double variance_, double e_min_);
};

// Marginal photon-number distribution of one mode, as an energy spectrum for
// the number generator of that mode.
EnergySpectrum mode_number_spectrum(const FockState& state, std::size_t mode);

// F(tau) = |Sum_l P_l exp(i tau E_l)|, in [0, 1]; exactly 1 at tau = 0.
double fidelity_from_spectrum(const EnergySpectrum& spec, double tau);

GeneratorStats generator_stats_from_spectrum(const EnergySpectrum& spec);

// Margolus-Levitin surrogate: sqrt(max(0, 1 - 2 lambda tau <H>_+)), a lower
// bound on the fidelity for every spectrum.
double ml_fidelity_surrogate(const GeneratorStats& stats, double lambda, double tau);

// Mandelstam-Tamm surrogate: |cos(dH tau)| on the first quarter period,
// 0 beyond it.
double mt_fidelity_surrogate(const GeneratorStats& stats, double tau);

} // namespace qzzb
