#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qzzb/linalg.hpp"

namespace qzzb::oracle {

// Brute-force verifiers.  Everything here is allowed O(dim^3) cost; instances
// are desk-scale.

struct truncation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class DensityMatrix {
public:
    explicit DensityMatrix(MatC rho);

    std::size_t dim() const { return rho_.rows; }
    const MatC& mat() const { return rho_; }

private:
    MatC rho_;
};

struct HypothesisTest {
    double p0 = 0.5;
    double p1 = 0.5;
    DensityMatrix rho0;
    DensityMatrix rho1;

    HypothesisTest(double p0_, double p1_, DensityMatrix rho0_, DensityMatrix rho1_);
};

struct EigResult {
    std::vector<double> values;  // ascending
    MatC vectors;                // columns
};

// Cyclic Jacobi for complex Hermitian matrices.
EigResult hermitian_eig(const MatC& a);

// Scaling-and-squaring Taylor exponential for real square matrices.
MatD dense_expm(const MatD& m);

// 1/2 - 1/2 ||p1 rho1 - p0 rho0||_1 via Hermitian eigendecomposition.
double helstrom_error(const HypothesisTest& test);

// Tr sqrt(sqrt(rho) sigma sqrt(rho)); equals |<psi|phi>| for pure inputs.
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// One-mode loss channel: Sum_l pi_l rho pi_l^dag with
// pi_l = sqrt((1-eta)^l / l!) e^{i x (n - delta l)} eta^{n/2} a^l and
// sigma = delta + 1, realised as (n_max+1)-dimensional matrices.
DensityMatrix loss_channel_apply(const DensityMatrix& rho, double eta, double x_phase,
                                 double sigma);

// Adaptive Simpson with absolute tolerance; throws on subdivision depth > 40.
double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double tol);

// Matrix-free linear operator on complex vectors.
struct SparseOp {
    std::size_t dim = 0;
    std::function<void(const std::complex<double>*, std::complex<double>*)> apply;
};

// y = exp(G) v for anti-Hermitian G, via two-pass Lanczos on iG with adaptive
// substepping.  Preserves the norm to ~1e-9.
std::vector<std::complex<double>> expm_apply_antihermitian(
    const SparseOp& g, std::vector<std::complex<double>> v);

struct SqueezeSimResult {
    std::vector<double> means;
    std::vector<double> variances;
    int cutoff = 0;        // per-mode photon cap actually used
    double tail_mass = 0;  // probability of any occupation > cutoff - 2
};

// Builds the cyclic squeezing generator on the truncated D-mode Fock space
// from ladder matrix elements, exponentiates onto the vacuum and reads off
// per-mode photon statistics.  Throws truncation_error when the tail
// certificate (tail mass < 1e-10) fails or the space exceeds max_dim.
SqueezeSimResult truncated_squeeze_sim(std::int64_t modes, double r, int cutoff,
                                       std::size_t max_dim = 6'000'000);

// Same, choosing the cutoff automatically and doubling on certificate
// failure.
SqueezeSimResult truncated_squeeze_sim_auto(std::int64_t modes, double r,
                                            std::size_t max_dim = 6'000'000);

// Is the direct simulation expected to fit in max_dim at this (modes, r)?
bool truncated_squeeze_sim_feasible(std::int64_t modes, double r,
                                    std::size_t max_dim = 6'000'000);

// Brute-force route that factorises the cyclic generator into its
// discrete-Fourier normal modes (single- and two-mode squeezers), simulates
// each block on a truncated Fock space and accumulates the fourth-order
// moments of the original-mode photon number exactly.  Feasible for any
// (modes <= ~8, r <= ~2) cell.
SqueezeSimResult squeeze_stats_blocked(std::int64_t modes, double r);

} // namespace qzzb::oracle
