#include "qzzb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qzzb::oracle {

namespace {

using cplx = std::complex<double>;

double off_diagonal_norm(const MatC& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

} // namespace

DensityMatrix::DensityMatrix(MatC rho) : rho_(std::move(rho)) {
    if (!rho_.square() || rho_.rows == 0)
        throw std::invalid_argument("DensityMatrix: need a square matrix");
    double herm = 0.0;
    cplx tr = 0.0;
    for (std::size_t i = 0; i < rho_.rows; ++i) {
        tr += rho_(i, i);
        for (std::size_t j = 0; j < rho_.cols; ++j)
            herm = std::max(herm, std::abs(rho_(i, j) - std::conj(rho_(j, i))));
    }
    if (herm > 1e-10) throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(tr - 1.0) > 1e-10) throw std::invalid_argument("DensityMatrix: trace != 1");
    const auto eig = hermitian_eig(rho_);
    if (eig.values.front() < -1e-10)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

HypothesisTest::HypothesisTest(double p0_, double p1_, DensityMatrix rho0_, DensityMatrix rho1_)
    : p0(p0_), p1(p1_), rho0(std::move(rho0_)), rho1(std::move(rho1_)) {
    if (p0 < 0.0 || p1 < 0.0 || std::abs(p0 + p1 - 1.0) > 1e-12)
        throw std::invalid_argument("HypothesisTest: priors must be >= 0 and sum to 1");
    if (rho0.dim() != rho1.dim())
        throw std::invalid_argument("HypothesisTest: dimension mismatch");
}

EigResult hermitian_eig(const MatC& input) {
    if (!input.square()) throw std::invalid_argument("hermitian_eig: need a square matrix");
    const std::size_t n = input.rows;
    MatC a = input;
    MatC v = MatC::identity(n);

    double scale = 0.0;
    for (const auto& x : a.a) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) scale = 1.0;
    const double tol = 1e-14 * scale * static_cast<double>(n);

    for (int sweep = 0; sweep < 100; ++sweep) {
        if (off_diagonal_norm(a) <= tol) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx z = a(p, q);
                if (std::abs(z) <= tol / static_cast<double>(n)) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double phi = std::arg(z);
                const double az = std::abs(z);
                const double tau = (aqq - app) / (2.0 * az);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx sp = std::polar(s, phi);

                // A <- J^dag A J with J = I except J_pp = c, J_pq = sp,
                // J_qp = -conj(sp), J_qq = c.
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - std::conj(sp) * aiq;
                    a(i, q) = sp * aip + c * aiq;
                    a(p, i) = std::conj(a(i, p));
                    a(q, i) = std::conj(a(i, q));
                }
                const double app2 = c * c * app - 2.0 * c * s * az + s * s * aqq;
                const double aqq2 = s * s * app + 2.0 * c * s * az + c * c * aqq;
                a(p, p) = app2;
                a(q, q) = aqq2;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - std::conj(sp) * viq;
                    v(i, q) = sp * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    EigResult out;
    out.values.resize(n);
    out.vectors = MatC(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

MatD dense_expm(const MatD& m) {
    if (!m.square()) throw std::invalid_argument("dense_expm: need a square matrix");
    for (double x : m.a)
        if (!std::isfinite(x)) throw std::range_error("dense_expm: non-finite entry");
    const double norm = one_norm(m);
    if (norm > 1e3) throw std::range_error("dense_expm: norm too large");
    int s = 0;
    double scaled = norm;
    while (scaled > 0.5) {
        scaled /= 2.0;
        ++s;
    }
    MatD x = m;
    const double factor = std::ldexp(1.0, -s);
    for (auto& v : x.a) v *= factor;

    MatD result = MatD::identity(m.rows);
    MatD term = MatD::identity(m.rows);
    for (int k = 1; k <= 40; ++k) {
        term = matmul(term, x);
        for (auto& v : term.a) v /= static_cast<double>(k);
        double tnorm = 0.0;
        for (double v : term.a) tnorm = std::max(tnorm, std::abs(v));
        for (std::size_t i = 0; i < result.a.size(); ++i) result.a[i] += term.a[i];
        if (tnorm < 1e-18) break;
    }
    for (int i = 0; i < s; ++i) result = matmul(result, result);
    return result;
}

double helstrom_error(const HypothesisTest& test) {
    const std::size_t n = test.rho0.dim();
    MatC gamma(n, n);
    for (std::size_t i = 0; i < n * n; ++i)
        gamma.a[i] = test.p1 * test.rho1.mat().a[i] - test.p0 * test.rho0.mat().a[i];
    const auto eig = hermitian_eig(gamma);
    double trace_norm = 0.0;
    for (double g : eig.values) trace_norm += std::abs(g);
    return 0.5 - 0.5 * trace_norm;
}

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("uhlmann_fidelity: dimension mismatch");
    const std::size_t n = rho.dim();
    const auto er = hermitian_eig(rho.mat());
    MatC root(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double lam = std::max(0.0, er.values[k]);
                acc += er.vectors(i, k) * std::sqrt(lam) * std::conj(er.vectors(j, k));
            }
            root(i, j) = acc;
        }
    }
    const MatC inner = matmul(matmul(root, sigma.mat()), root);
    const auto ei = hermitian_eig(inner);
    // Rounding noise on zero eigenvalues would be amplified by the square
    // root; clamp anything at the noise floor.
    const double floor = 1e-12 * std::max(1.0, std::abs(ei.values.back()));
    double fid = 0.0;
    for (double lam : ei.values)
        if (lam > floor) fid += std::sqrt(lam);
    return std::min(1.0, fid);
}

DensityMatrix loss_channel_apply(const DensityMatrix& rho, double eta, double x_phase,
                                 double sigma) {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("loss_channel_apply: eta must be in (0, 1]");
    const std::size_t dim = rho.dim();
    const double delta = sigma - 1.0;
    MatC out(dim, dim);
    // pi_l entries: <m-l| pi_l |m> = sqrt((1-eta)^l / l!) sqrt(m!/(m-l)!)
    //               eta^{(m-l)/2} exp(i x (m - l - delta l)).
    for (std::size_t l = 0; l < dim; ++l) {
        if (l > 0 && eta == 1.0) break;  // higher Kraus terms vanish
        MatC kraus(dim, dim);
        for (std::size_t m = l; m < dim; ++m) {
            double lf = 0.0;  // log of (1-eta)^l * m! / (l! (m-l)!)
            for (std::size_t j = 0; j < l; ++j)
                lf += std::log1p(-eta) + std::log(static_cast<double>(m - j)) -
                      std::log(static_cast<double>(j + 1));
            const double amp = std::exp(0.5 * lf) *
                               std::pow(eta, 0.5 * static_cast<double>(m - l));
            const double phase = x_phase * (static_cast<double>(m - l) -
                                            delta * static_cast<double>(l));
            kraus(m - l, m) = std::polar(amp, phase);
        }
        const MatC tmp = matmul(kraus, rho.mat());
        const MatC contrib = matmul(tmp, adjoint(kraus));
        for (std::size_t i = 0; i < dim * dim; ++i) out.a[i] += contrib.a[i];
    }
    cplx tr = 0.0;
    for (std::size_t i = 0; i < dim; ++i) tr += out(i, i);
    if (std::abs(tr - 1.0) > 1e-8)
        throw std::runtime_error("loss_channel_apply: trace drift");
    // Remove rounding-level drift so the DensityMatrix invariants hold.
    for (auto& v : out.a) v /= tr.real();
    for (std::size_t i = 0; i < dim; ++i) {
        out(i, i) = out(i, i).real();
        for (std::size_t j = i + 1; j < dim; ++j) {
            const cplx avg = 0.5 * (out(i, j) + std::conj(out(j, i)));
            out(i, j) = avg;
            out(j, i) = std::conj(avg);
        }
    }
    return DensityMatrix(std::move(out));
}

namespace {

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
    if (depth > 40) throw std::runtime_error("adaptive_quadrature: subdivision limit");
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double split = left + right;
    // The minimum depth keeps periodic integrands from terminating on a
    // coincidental agreement at the first dyadic points.
    if (depth >= 6 && std::abs(split - whole) <= 15.0 * tol)
        return split + (split - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1);
}

} // namespace

double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double tol) {
    if (!(a < b)) throw std::invalid_argument("adaptive_quadrature: need a < b");
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0);
}

} // namespace qzzb::oracle
