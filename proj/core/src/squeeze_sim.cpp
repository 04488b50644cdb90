#include "qzzb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace qzzb::oracle {

namespace {

using cplx = std::complex<double>;
using Vec = std::vector<cplx>;

double norm2(const Vec& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

cplx dot(const Vec& a, const Vec& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// u = exp(-i tau T) e1 for the real symmetric tridiagonal T given by
// alpha (diagonal) and beta (subdiagonal).
Vec tridiag_exp_e1(const std::vector<double>& alpha, const std::vector<double>& beta,
                   double tau) {
    const std::size_t m = alpha.size();
    MatC t(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) {
            t(i, i + 1) = beta[i];
            t(i + 1, i) = beta[i];
        }
    }
    const auto eig = hermitian_eig(t);
    Vec u(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            acc += eig.vectors(i, k) * std::polar(1.0, -tau * eig.values[k]) *
                   std::conj(eig.vectors(0, k));
        u[i] = acc;
    }
    return u;
}

struct KrylovBasisStats {
    std::vector<double> alpha;
    std::vector<double> beta;      // beta[j] couples v_j and v_{j+1}
    double beta_out = 0.0;         // residual coupling past the last vector
    std::size_t m = 0;
};

// One Lanczos pass on H = iG.  gen_apply computes G x.  With store == null
// only the recurrence coefficients are produced; with store != null the same
// recurrence is replayed and result += u[j] v_j accumulated.
KrylovBasisStats lanczos_pass(const SparseOp& g, const Vec& v0, std::size_t m_max,
                              const Vec* u, Vec* result) {
    const std::size_t n = g.dim;
    KrylovBasisStats out;
    Vec vcur = v0, vprev(n, 0.0), w(n, 0.0);
    double beta_prev = 0.0;
    for (std::size_t j = 0; j < m_max; ++j) {
        if (result && u) {
            const cplx uj = (*u)[j];
            for (std::size_t i = 0; i < n; ++i) (*result)[i] += uj * vcur[i];
            if (j + 1 == u->size()) {
                out.m = j + 1;
                return out;
            }
        }
        g.apply(vcur.data(), w.data());
        for (auto& x : w) x *= cplx(0.0, 1.0);  // H = iG
        const double alpha = std::real(dot(vcur, w));
        for (std::size_t i = 0; i < n; ++i) w[i] -= alpha * vcur[i] + beta_prev * vprev[i];
        const double beta = norm2(w);
        out.alpha.push_back(alpha);
        if (j + 1 == m_max || beta < 1e-13 * (std::abs(alpha) + 1.0)) {
            out.beta_out = (j + 1 == m_max) ? beta : 0.0;
            out.m = j + 1;
            return out;
        }
        out.beta.push_back(beta);
        vprev.swap(vcur);
        vcur.swap(w);
        for (auto& x : vcur) x /= beta;
        w.assign(n, 0.0);
        beta_prev = beta;
    }
    out.m = m_max;
    return out;
}

} // namespace

std::vector<cplx> expm_apply_antihermitian(const SparseOp& g, Vec v) {
    if (v.size() != g.dim) throw std::invalid_argument("expm_apply: vector size mismatch");
    const double vnorm = norm2(v);
    if (vnorm == 0.0) return v;
    for (auto& x : v) x /= vnorm;

    const std::size_t m = std::min<std::size_t>(g.dim, 36);
    constexpr double kStepTol = 1e-13;
    double remaining = 1.0;
    double step_hint = 1.0;
    int steps = 0;
    while (remaining > 0.0) {
        if (++steps > 4096) throw std::runtime_error("expm_apply: too many substeps");
        const auto basis = lanczos_pass(g, v, m, nullptr, nullptr);
        double tau = std::min(remaining, step_hint);
        Vec u;
        for (int halvings = 0;; ++halvings) {
            if (halvings > 80) throw std::runtime_error("expm_apply: step underflow");
            u = tridiag_exp_e1(basis.alpha, basis.beta, tau);
            // A last component at the rounding floor means the Krylov
            // polynomial has converged as far as doubles allow.
            const bool floor_hit = std::abs(u.back()) < 1e-14;
            const double err = std::abs(basis.beta_out) * std::abs(u.back());
            if (err <= kStepTol || floor_hit || basis.beta_out == 0.0) break;
            tau *= 0.5;
        }
        Vec result(g.dim, 0.0);
        lanczos_pass(g, v, basis.m, &u, &result);
        v.swap(result);
        const double nv = norm2(v);
        if (std::abs(nv - 1.0) > 1e-9) throw std::runtime_error("expm_apply: norm drift");
        for (auto& x : v) x /= nv;
        remaining -= tau;
        step_hint = tau * 2.0;
    }
    for (auto& x : v) x *= vnorm;
    return v;
}

// ---------------------------------------------------------------------------
// Direct simulation on the joint truncated Fock space.
// ---------------------------------------------------------------------------

namespace {

// Expected photon count at which the collective squeezed tail falls below
// `tail`, from the pair-production ratio tanh^2(r).
double tail_photons(double r, double tail) {
    const double q = std::tanh(std::abs(r)) * std::tanh(std::abs(r));
    if (q <= 0.0) return 2.0;
    return 2.0 * std::log(tail) / std::log(q) + 2.0;
}

int direct_cutoff_guess(std::int64_t modes, double r) {
    const double ph = tail_photons(r, 1e-11);
    const double d = static_cast<double>(modes);
    const double mean = ph / d;
    const double spread = std::sqrt(std::max(1.0, ph * (1.0 / d) * (1.0 - 1.0 / d)));
    return std::max(6, static_cast<int>(std::ceil(mean + 2.5 * spread + 3.0)));
}

std::size_t pow_dim(std::int64_t modes, int cutoff, std::size_t max_dim) {
    std::size_t dim = 1;
    for (std::int64_t i = 0; i < modes; ++i) {
        if (dim > max_dim / static_cast<std::size_t>(cutoff + 1))
            throw truncation_error("truncated_squeeze_sim: state space exceeds budget");
        dim *= static_cast<std::size_t>(cutoff + 1);
    }
    return dim;
}

// G = (r/2) sum_k (a_k + a_k^dag)(a_{k-1} - a_{k-1}^dag), matrix elements
// scattered from the occupation digits.
SparseOp make_cyclic_generator(std::int64_t modes, double r, int cutoff, std::size_t dim) {
    const std::size_t d = static_cast<std::size_t>(modes);
    const int base = cutoff + 1;
    std::vector<std::size_t> stride(d, 1);
    for (std::size_t j = 1; j < d; ++j) stride[j] = stride[j - 1] * static_cast<std::size_t>(base);
    std::vector<double> sq(static_cast<std::size_t>(base) + 1);
    for (std::size_t n = 0; n < sq.size(); ++n) sq[n] = std::sqrt(static_cast<double>(n));
    const double h = 0.5 * r;

    SparseOp op;
    op.dim = dim;
    op.apply = [d, base, cutoff, stride, sq, h, dim](const cplx* x, cplx* y) {
        std::fill(y, y + dim, cplx{0.0, 0.0});
        std::vector<int> n(d, 0);
        for (std::size_t i = 0; i < dim; ++i) {
            const cplx xi = x[i];
            if (xi != cplx{0.0, 0.0}) {
                for (std::size_t k = 0; k < d; ++k) {
                    const std::size_t km = (k + d - 1) % d;
                    const int nk = n[k], nkm = n[km];
                    const std::size_t sk = stride[k], skm = stride[km];
                    if (nk > 0 && nkm > 0)
                        y[i - sk - skm] += h * sq[nk] * sq[nkm] * xi;
                    if (nk > 0 && nkm < cutoff)
                        y[i - sk + skm] -= h * sq[nk] * sq[nkm + 1] * xi;
                    if (nk < cutoff && nkm > 0)
                        y[i + sk - skm] += h * sq[nk + 1] * sq[nkm] * xi;
                    if (nk < cutoff && nkm < cutoff)
                        y[i + sk + skm] -= h * sq[nk + 1] * sq[nkm + 1] * xi;
                }
            }
            for (std::size_t j = 0; j < d; ++j) {  // odometer increment
                if (++n[j] <= cutoff) break;
                n[j] = 0;
            }
        }
    };
    return op;
}

} // namespace

SqueezeSimResult truncated_squeeze_sim(std::int64_t modes, double r, int cutoff,
                                       std::size_t max_dim) {
    if (modes < 2) throw std::invalid_argument("truncated_squeeze_sim: need >= 2 modes");
    if (cutoff < 2) throw std::invalid_argument("truncated_squeeze_sim: cutoff must be >= 2");
    if (r < 0.0) throw std::invalid_argument("truncated_squeeze_sim: r must be >= 0");
    const std::size_t d = static_cast<std::size_t>(modes);
    const std::size_t dim = pow_dim(modes, cutoff, max_dim);
    const auto g = make_cyclic_generator(modes, r, cutoff, dim);

    Vec psi(dim, 0.0);
    psi[0] = 1.0;
    if (r > 0.0) psi = expm_apply_antihermitian(g, std::move(psi));

    // Conserved-generator certificate: <psi|G|psi> must stay at its vacuum
    // value 0.
    {
        Vec w(dim, 0.0);
        g.apply(psi.data(), w.data());
        if (std::abs(dot(psi, w)) > 1e-8 * std::max(1.0, norm2(w)))
            throw std::runtime_error("truncated_squeeze_sim: generator expectation drift");
    }

    SqueezeSimResult out;
    out.cutoff = cutoff;
    out.means.assign(d, 0.0);
    out.variances.assign(d, 0.0);
    std::vector<double> second(d, 0.0);
    double tail = 0.0;
    std::vector<int> n(d, 0);
    for (std::size_t i = 0; i < dim; ++i) {
        const double p = std::norm(psi[i]);
        if (p > 0.0) {
            bool boundary = false;
            for (std::size_t k = 0; k < d; ++k) {
                const double nk = static_cast<double>(n[k]);
                out.means[k] += p * nk;
                second[k] += p * nk * nk;
                boundary = boundary || n[k] > cutoff - 2;
            }
            if (boundary) tail += p;
        }
        for (std::size_t j = 0; j < d; ++j) {
            if (++n[j] <= cutoff) break;
            n[j] = 0;
        }
    }
    out.tail_mass = tail;
    if (tail >= 1e-10)
        throw truncation_error("truncated_squeeze_sim: tail certificate failed");
    for (std::size_t k = 0; k < d; ++k)
        out.variances[k] = std::max(0.0, second[k] - out.means[k] * out.means[k]);
    return out;
}

SqueezeSimResult truncated_squeeze_sim_auto(std::int64_t modes, double r, std::size_t max_dim) {
    int cutoff = direct_cutoff_guess(modes, r);
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            return truncated_squeeze_sim(modes, r, cutoff, max_dim);
        } catch (const truncation_error&) {
            if (attempt == 3) throw;
            cutoff *= 2;
        }
    }
    throw truncation_error("truncated_squeeze_sim_auto: unreachable");
}

bool truncated_squeeze_sim_feasible(std::int64_t modes, double r, std::size_t max_dim) {
    const int cutoff = direct_cutoff_guess(modes, r);
    double dim = 1.0;
    for (std::int64_t i = 0; i < modes; ++i) dim *= static_cast<double>(cutoff + 1);
    return dim <= static_cast<double>(max_dim);
}

// ---------------------------------------------------------------------------
// Discrete-Fourier block route.
// ---------------------------------------------------------------------------

namespace {

struct Block {
    std::vector<int> dft_modes;  // size 1 (single-mode squeezer) or 2 (pair)
    double strength = 0.0;       // xi for b^2 - b^dag^2 / s for b1 b2 - h.c.
    int cutoff = 0;
    Vec psi;
};

SparseOp single_mode_squeeze_gen(double xi, int cutoff) {
    const std::size_t dim = static_cast<std::size_t>(cutoff) + 1;
    std::vector<double> sq(dim + 2);
    for (std::size_t n = 0; n < sq.size(); ++n) sq[n] = std::sqrt(static_cast<double>(n));
    SparseOp op;
    op.dim = dim;
    op.apply = [xi, cutoff, sq, dim](const cplx* x, cplx* y) {
        std::fill(y, y + dim, cplx{0.0, 0.0});
        for (int n = 0; n <= cutoff; ++n) {
            const cplx xn = x[n];
            if (xn == cplx{0.0, 0.0}) continue;
            if (n >= 2) y[n - 2] += 0.5 * xi * sq[n] * sq[n - 1] * xn;
            if (n + 2 <= cutoff) y[n + 2] -= 0.5 * xi * sq[n + 1] * sq[n + 2] * xn;
        }
    };
    return op;
}

SparseOp two_mode_squeeze_gen(double s, int cutoff) {
    const std::size_t base = static_cast<std::size_t>(cutoff) + 1;
    const std::size_t dim = base * base;
    std::vector<double> sq(base + 1);
    for (std::size_t n = 0; n < sq.size(); ++n) sq[n] = std::sqrt(static_cast<double>(n));
    SparseOp op;
    op.dim = dim;
    op.apply = [s, cutoff, base, sq, dim](const cplx* x, cplx* y) {
        std::fill(y, y + dim, cplx{0.0, 0.0});
        for (std::size_t i = 0; i < dim; ++i) {
            const cplx xi = x[i];
            if (xi == cplx{0.0, 0.0}) continue;
            const int n1 = static_cast<int>(i % base);
            const int n2 = static_cast<int>(i / base);
            if (n1 > 0 && n2 > 0) y[i - 1 - base] += s * sq[n1] * sq[n2] * xi;
            if (n1 < cutoff && n2 < cutoff)
                y[i + 1 + base] -= s * sq[n1 + 1] * sq[n2 + 1] * xi;
        }
    };
    return op;
}

int block_cutoff_guess(double strength) {
    const double ph = tail_photons(strength, 1e-15);
    return std::clamp(static_cast<int>(std::ceil(ph)) + 12, 24, 2000);
}

double block_tail(const Block& b) {
    const std::size_t base = static_cast<std::size_t>(b.cutoff) + 1;
    double tail = 0.0;
    for (std::size_t i = 0; i < b.psi.size(); ++i) {
        const int n1 = static_cast<int>(i % base);
        const int n2 = static_cast<int>(i / base);
        if (n1 > b.cutoff - 2 || (b.dft_modes.size() == 2 && n2 > b.cutoff - 2))
            tail += std::norm(b.psi[i]);
    }
    return tail;
}

Block simulate_block(std::vector<int> dft_modes, double strength) {
    Block b;
    b.dft_modes = std::move(dft_modes);
    b.strength = strength;
    b.cutoff = block_cutoff_guess(strength);
    for (int attempt = 0;; ++attempt) {
        const bool pair = b.dft_modes.size() == 2;
        const std::size_t base = static_cast<std::size_t>(b.cutoff) + 1;
        const std::size_t dim = pair ? base * base : base;
        if (dim > 4'000'000) throw truncation_error("squeeze_stats_blocked: block too large");
        const SparseOp g = pair ? two_mode_squeeze_gen(strength, b.cutoff)
                                : single_mode_squeeze_gen(strength, b.cutoff);
        b.psi.assign(dim, 0.0);
        b.psi[0] = 1.0;
        if (strength != 0.0) b.psi = expm_apply_antihermitian(g, std::move(b.psi));
        if (block_tail(b) < 1e-13) break;
        if (attempt >= 4) throw truncation_error("squeeze_stats_blocked: tail certificate");
        b.cutoff *= 2;
    }
    return b;
}

// Ordered ladder-operator product on a block state, applied right to left.
// ops entries: (local mode, dagger).
cplx block_expectation(const Block& b, const std::vector<std::pair<int, bool>>& ops) {
    const std::size_t base = static_cast<std::size_t>(b.cutoff) + 1;
    Vec phi = b.psi;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        const auto [mode, dagger] = *it;
        const std::size_t stride = (mode == 0) ? 1 : base;
        Vec next(phi.size(), 0.0);
        for (std::size_t i = 0; i < phi.size(); ++i) {
            if (phi[i] == cplx{0.0, 0.0}) continue;
            const int n = (mode == 0) ? static_cast<int>(i % base)
                                      : static_cast<int>(i / base);
            if (dagger) {
                if (n < b.cutoff)
                    next[i + stride] += std::sqrt(static_cast<double>(n + 1)) * phi[i];
            } else {
                if (n > 0) next[i - stride] += std::sqrt(static_cast<double>(n)) * phi[i];
            }
        }
        phi.swap(next);
    }
    return dot(b.psi, phi);
}

} // namespace

SqueezeSimResult squeeze_stats_blocked(std::int64_t modes, double r) {
    if (modes < 2) throw std::invalid_argument("squeeze_stats_blocked: need >= 2 modes");
    if (r < 0.0) throw std::invalid_argument("squeeze_stats_blocked: r must be >= 0");
    const int D = static_cast<int>(modes);
    const double omega = 2.0 * std::numbers::pi / static_cast<double>(D);

    // exp(i r Q^T A P) factorises over the shift matrix's Fourier modes:
    // mode 0 squeezes with +r, mode D/2 (even D) with -r, and each pair
    // (j, D-j) forms a two-mode squeezer of strength r cos(2 pi j / D).
    std::vector<Block> blocks;
    std::vector<std::pair<int, int>> where(static_cast<std::size_t>(D));  // mode -> (block, local)
    blocks.push_back(simulate_block({0}, r));
    where[0] = {0, 0};
    if (D % 2 == 0) {
        blocks.push_back(simulate_block({D / 2}, -r));
        where[static_cast<std::size_t>(D / 2)] = {static_cast<int>(blocks.size()) - 1, 0};
    }
    for (int j = 1; 2 * j < D; ++j) {
        const double s = r * std::cos(omega * static_cast<double>(j));
        blocks.push_back(simulate_block({j, D - j}, s));
        where[static_cast<std::size_t>(j)] = {static_cast<int>(blocks.size()) - 1, 0};
        where[static_cast<std::size_t>(D - j)] = {static_cast<int>(blocks.size()) - 1, 1};
    }

    // Memoised per-block expectations keyed by the packed op subsequence.
    std::vector<std::map<std::uint32_t, cplx>> memo(blocks.size());
    auto expect_ops = [&](const std::vector<std::pair<int, bool>>& global_ops) -> cplx {
        std::vector<std::vector<std::pair<int, bool>>> per_block(blocks.size());
        for (const auto& [mode, dagger] : global_ops) {
            const auto [bi, local] = where[static_cast<std::size_t>(mode)];
            per_block[static_cast<std::size_t>(bi)].push_back({local, dagger});
        }
        cplx prod = 1.0;
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            if (per_block[bi].empty()) continue;
            std::uint32_t key = 0;
            for (const auto& [m, dag] : per_block[bi])
                key = key * 8 + 1 + static_cast<std::uint32_t>(m) * 2 +
                      static_cast<std::uint32_t>(dag);
            auto [it, inserted] = memo[bi].try_emplace(key, cplx{0.0, 0.0});
            if (inserted) it->second = block_expectation(blocks[bi], per_block[bi]);
            prod *= it->second;
            if (prod == cplx{0.0, 0.0}) return prod;
        }
        return prod;
    };

    // n_k = (1/D) sum_{j j'} w^{k(j'-j)} b_j^dag b_{j'} with w = exp(2 pi i/D).
    auto stats_for_mode = [&](int k) -> std::pair<double, double> {
        cplx mean = 0.0;
        for (int j = 0; j < D; ++j)
            for (int jp = 0; jp < D; ++jp) {
                const cplx phase = std::polar(1.0, omega * static_cast<double>(k * (jp - j)));
                mean += phase * expect_ops({{j, true}, {jp, false}});
            }
        mean /= static_cast<double>(D);
        cplx second = 0.0;
        for (int j1 = 0; j1 < D; ++j1)
            for (int j2 = 0; j2 < D; ++j2)
                for (int j3 = 0; j3 < D; ++j3)
                    for (int j4 = 0; j4 < D; ++j4) {
                        const cplx phase = std::polar(
                            1.0, omega * static_cast<double>(k * (-j1 + j2 - j3 + j4)));
                        second += phase * expect_ops(
                                              {{j1, true}, {j2, false}, {j3, true}, {j4, false}});
                    }
        second /= static_cast<double>(D * D);
        if (std::abs(mean.imag()) > 1e-9 || std::abs(second.imag()) > 1e-9)
            throw std::runtime_error("squeeze_stats_blocked: complex moment residue");
        return {mean.real(), second.real() - mean.real() * mean.real()};
    };

    const auto [m0, v0] = stats_for_mode(0);
    const auto [m1, v1] = stats_for_mode(1);
    if (std::abs(m0 - m1) > 1e-10 * std::max(1.0, m0) ||
        std::abs(v0 - v1) > 1e-10 * std::max(1.0, v0))
        throw std::runtime_error("squeeze_stats_blocked: cyclic symmetry violated");

    SqueezeSimResult out;
    out.means.assign(static_cast<std::size_t>(D), m0);
    out.variances.assign(static_cast<std::size_t>(D), std::max(0.0, v0));
    for (const auto& b : blocks) {
        out.cutoff = std::max(out.cutoff, b.cutoff);
        out.tail_mass = std::max(out.tail_mass, block_tail(b));
    }
    return out;
}

} // namespace qzzb::oracle
