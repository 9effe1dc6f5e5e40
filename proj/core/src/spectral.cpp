#include "solsel/spectral.hpp"

#include "solsel/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace solsel {

// ---------------------------------------------------------------- operator

Hamiltonian::Hamiltonian(const Grid& g, const Potential& V)
    : grid_(g), pot_(V), V_(V.sample(g)), fft_(Fft::shared(g.n)) {
    const RVec k = g.wavenumbers();
    k2_ = k.array().square();
}

CVec Hamiltonian::kinetic(const CVec& u) const {
    CVec uh, out;
    fft_->forward(u, uh);
    uh.array() *= k2_.array().cast<cplx>();
    fft_->backward(uh, out);
    return out;
}

CVec Hamiltonian::apply(const CVec& u) const {
    CVec out = kinetic(u);
    out.array() += V_.array().cast<cplx>() * u.array();
    return out;
}

RVec Hamiltonian::apply(const RVec& u) const {
    return apply(CVec(u.cast<cplx>())).real();
}

std::shared_ptr<const Hamiltonian> build_operator(const Grid& g, const Potential& V) {
    auto op = std::make_shared<const Hamiltonian>(g, V);
    const RVec& v = op->V();
    const double vmax = v.cwiseAbs().maxCoeff();
    if (vmax > 0) {
        for (int i = 0; i + 1 < g.n; ++i)
            if (std::abs(v[i + 1] - v[i]) > 0.5 * vmax)
                throw GridTooCoarse("potential jumps by " + std::to_string(std::abs(v[i + 1] - v[i])) +
                                    " across cell " + std::to_string(i));
    }
    return op;
}

// ---------------------------------------------------------------- helpers

namespace {

// Preconditioned CG for P (H - lambda) P x = P b on the continuous subspace,
// where P removes every stored bound state.  Requires lambda below the
// spectrum of H restricted there.
struct DeflatedSystem {
    const Hamiltonian& H;
    const std::vector<RVec>& basis;
    double lambda;

    void project(CVec& v) const {
        const double h = H.grid().h();
        for (const auto& p : basis) {
            const cplx c = (v.array() * p.array().cast<cplx>()).sum() * h;
            v -= c * p.cast<cplx>();
        }
    }
    CVec apply(const CVec& v) const {
        CVec w = H.apply(v) - lambda * v;
        project(w);
        return w;
    }
    CVec precondition(const CVec& r) const {
        CVec rh, out;
        H.fft().forward(r, rh);
        const double shift = std::max(-lambda, 1e-3);
        rh.array() /= (H.k2().array() + shift).cast<cplx>();
        H.fft().backward(rh, out);
        project(out);
        return out;
    }
};

struct CgReport {
    int iterations = 0;
    double rel_residual = 0;
};

CgReport deflated_pcg(const DeflatedSystem& sys, const CVec& b_in, CVec& x, double rel_tol, int max_iter) {
    CVec b = b_in;
    sys.project(b);
    const double bnorm = b.norm();
    x = CVec::Zero(b.size());
    CgReport rep;
    if (bnorm == 0) return rep;
    CVec r = b;
    CVec z = sys.precondition(r);
    CVec p = z;
    cplx rz = r.dot(z);
    for (int it = 1; it <= max_iter; ++it) {
        const CVec Ap = sys.apply(p);
        const cplx alpha = rz / p.dot(Ap);
        x += alpha * p;
        r -= alpha * Ap;
        rep.iterations = it;
        rep.rel_residual = r.norm() / bnorm;
        if (rep.rel_residual <= rel_tol) break;
        z = sys.precondition(r);
        const cplx rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    // true residual: recurrences drift at very tight tolerances
    rep.rel_residual = (sys.apply(x) - b).norm() / bnorm;
    return rep;
}

// Fourier interpolation from a coarse periodic grid to a finer one sharing
// the same period and origin.
RVec fourier_interpolate(const RVec& coarse, int n_fine) {
    const int nc = static_cast<int>(coarse.size());
    if (nc == n_fine) return coarse;
    auto fc = Fft::shared(nc);
    auto ff = Fft::shared(n_fine);
    CVec ch;
    fc->forward(CVec(coarse.cast<cplx>()), ch);
    CVec fh = CVec::Zero(n_fine);
    for (int i = 0; i < nc / 2; ++i) fh[i] = ch[i];
    for (int i = 1; i < nc / 2; ++i) fh[n_fine - i] = ch[nc - i];
    fh[nc / 2] = 0.5 * ch[nc / 2];
    fh[n_fine - nc / 2] = 0.5 * ch[nc / 2];
    fh *= static_cast<double>(n_fine) / nc;
    CVec out;
    ff->backward(fh, out);
    return out.real();
}

void fix_sign(RVec& v) {
    const double m = v.cwiseAbs().maxCoeff();
    int idx = 0;
    for (int i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) >= m * (1 - 1e-8)) { idx = i; break; }
    if (v[idx] < 0) v = -v;
}

double tail_fit(const Grid& g, const RVec& v) {
    // least squares of log|v| against x on the right tail between 1e-3 and 1e-9 of the peak
    const double m = v.cwiseAbs().maxCoeff();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = g.n / 2; i < g.n; ++i) {
        const double a = std::abs(v[i]) / m;
        if (a < 1e-3 && a > 1e-9) {
            const double x = g.x(i), y = std::log(a);
            sx += x; sy += y; sxx += x * x; sxy += x * y; ++cnt;
        }
    }
    if (cnt < 4) return std::numeric_limits<double>::quiet_NaN();
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return -slope;
}

} // namespace

// ---------------------------------------------------------------- spectrum

double SpectralData::default_weight_rate() const {
    double r = std::numeric_limits<double>::infinity();
    for (double w : omega) r = std::min(r, std::sqrt(-w));
    return 0.5 * r;
}

SpectralData discrete_spectrum(std::shared_ptr<const Hamiltonian> op, int max_states, const SpectrumOptions& opt) {
    if (max_states < 1) throw InvalidArgument("max_states must be >= 1");
    const Grid& g = op->grid();

    // 1. dense Fourier-collocation solve on a coarse grid
    int nc = 8;
    while (nc < g.n && 2.0 * g.half_length / nc > opt.coarse_spacing) nc *= 2;
    nc = std::min(nc, g.n);
    const Grid gc(g.half_length, nc);
    Hamiltonian Hc(gc, op->potential());
    Eigen::MatrixXd M(nc, nc);
    for (int j = 0; j < nc; ++j) {
        CVec e = CVec::Zero(nc);
        e[j] = 1.0;
        M.col(j) = Hc.apply(e).real();
    }
    M = 0.5 * (M + M.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const RVec& ev = es.eigenvalues();

    SpectralData s;
    s.op = op;
    s.smallest_abs_box_eigenvalue = ev.cwiseAbs().minCoeff();
    for (int i = 0; i < nc && s.n_bound() < max_states; ++i) {
        if (!(ev[i] < -opt.tol_edge)) break;
        s.omega.push_back(ev[i]);
        RVec v = fourier_interpolate(es.eigenvectors().col(i), g.n);
        v /= g.norm(v);
        s.phi.push_back(std::move(v));
    }
    if (s.omega.empty()) throw NoBoundStates("no eigenvalue below " + std::to_string(-opt.tol_edge));

    // 2. Newton-type polishing on the fine grid: correction orthogonal to the
    //    current basis via deflated PCG, explicit division for bound components
    const int N = s.n_bound();
    auto rayleigh = [&](const RVec& v) { return g.inner(op->apply(v), v) / g.inner(v, v); };
    auto orthonormalize = [&]() {
        for (int j = 0; j < N; ++j) {
            for (int i = 0; i < j; ++i) s.phi[j] -= g.inner(s.phi[j], s.phi[i]) * s.phi[i];
            s.phi[j] /= g.norm(s.phi[j]);
        }
        for (int j = 0; j < N; ++j) s.omega[j] = rayleigh(s.phi[j]);
    };
    orthonormalize();
    s.residual.assign(N, 0.0);
    for (int it = 0; it < opt.max_polish; ++it) {
        std::vector<RVec> r(N);
        double worst = 0;
        for (int j = 0; j < N; ++j) {
            r[j] = op->apply(s.phi[j]) - s.omega[j] * s.phi[j];
            s.residual[j] = g.norm(r[j]);
            worst = std::max(worst, s.residual[j] / std::abs(s.omega[j]));
        }
        if (worst < 1e-11) break;
        std::vector<RVec> corr(N);
        for (int j = 0; j < N; ++j) {
            RVec t = RVec::Zero(g.n);
            for (int k = 0; k < N; ++k) {
                if (k == j) continue;
                t -= g.inner(r[j], s.phi[k]) / (s.omega[k] - s.omega[j]) * s.phi[k];
            }
            DeflatedSystem sys{*op, s.phi, s.omega[j]};
            CVec x;
            deflated_pcg(sys, CVec(r[j].cast<cplx>()), x, 1e-13, 2000);
            t -= x.real();
            corr[j] = std::move(t);
        }
        for (int j = 0; j < N; ++j) s.phi[j] += corr[j];
        orthonormalize();
    }
    for (int j = 0; j < N; ++j) {
        s.residual[j] = g.norm(RVec(op->apply(s.phi[j]) - s.omega[j] * s.phi[j]));
        fix_sign(s.phi[j]);
        s.boundary_amplitude.push_back(std::max(std::abs(s.phi[j][0]), std::abs(s.phi[j][g.n - 1])));
        s.decay_fit.push_back(tail_fit(g, s.phi[j]));
    }
    for (int j = 1; j < N; ++j)
        if (s.omega[j] - s.omega[j - 1] < opt.gap_tol)
            throw DegenerateSpectrum("eigenvalues " + std::to_string(s.omega[j - 1]) + " and " +
                                     std::to_string(s.omega[j]) + " closer than the simplicity threshold");
    return s;
}

CVec project_continuous(const SpectralData& s, const CVec& f) {
    CVec out = f;
    const double h = s.grid().h();
    for (const auto& p : s.phi) {
        const cplx c = (f.array() * p.array().cast<cplx>()).sum() * h;
        out -= c * p.cast<cplx>();
    }
    return out;
}

RVec project_continuous(const SpectralData& s, const RVec& f) {
    RVec out = f;
    for (const auto& p : s.phi) out -= s.grid().inner(f, p) * p;
    return out;
}

// ---------------------------------------------------------------- resolvent

CVec resolvent_solve(const SpectralData& s, double lambda, const CVec& f, const ResolventOptions& opt) {
    const Grid& g = s.grid();
    if (lambda > -opt.tol_gap)
        throw NearSpectrum("lambda = " + std::to_string(lambda) + " is not below the continuum edge by tol_gap");
    for (int j = 0; j < s.n_bound(); ++j)
        if (j != opt.exclude && std::abs(lambda - s.omega[j]) < opt.tol_gap)
            throw NearSpectrum("lambda = " + std::to_string(lambda) + " is within tol_gap of eigenvalue " +
                               std::to_string(s.omega[j]));
    const double fnorm = g.norm(f);
    if (fnorm == 0) return CVec::Zero(g.n);

    CVec w = CVec::Zero(g.n);
    for (int j = 0; j < s.n_bound(); ++j) {
        if (j == opt.exclude) continue;
        const cplx c = g.pairing(f, CVec(s.phi[j].cast<cplx>()));
        w += c / (s.omega[j] - lambda) * s.phi[j].cast<cplx>();
    }
    DeflatedSystem sys{*s.op, s.phi, lambda};
    CVec x;
    const CgReport rep = deflated_pcg(sys, f, x, opt.rel_tol, opt.max_iter);
    w += x;

    CVec target = f;
    if (opt.exclude >= 0) {
        const RVec& p = s.phi[opt.exclude];
        target -= g.pairing(f, CVec(p.cast<cplx>())) * p.cast<cplx>();
    }
    const double res = g.norm(CVec(s.op->apply(w) - lambda * w - target));
    if (!(res <= opt.accept_tol * fnorm))
        throw NoConvergence("resolvent residual " + std::to_string(res / fnorm) + " after " +
                            std::to_string(rep.iterations) + " PCG iterations");
    return w;
}

RVec resolvent_solve(const SpectralData& s, double lambda, const RVec& f, const ResolventOptions& opt) {
    return resolvent_solve(s, lambda, CVec(f.cast<cplx>()), opt).real();
}

RVec reduced_resolvent(const SpectralData& s, int j, const RVec& f) {
    ResolventOptions opt;
    opt.exclude = j;
    opt.tol_gap = 0;   // the other eigenvalues are separated by assumption
    const RVec& p = s.phi[j];
    RVec fp = f - s.grid().inner(f, p) * p;
    RVec w = resolvent_solve(s, s.omega[j], fp, opt);
    return w - s.grid().inner(w, p) * p;
}

// ---------------------------------------------------------------- zero energy

namespace {

// RK4 for psi'' = q(x) psi on the grid points of g, q evaluated analytically.
template <class Q>
void rk4_grid(const Grid& g, Q q, cplx psi0, cplx dpsi0, bool leftward, CVec* psi_out, cplx* end_psi, cplx* end_dpsi) {
    const double h = g.h();
    cplx psi = psi0, dpsi = dpsi0;
    const int n = g.n;
    const double ds = leftward ? -h : h;
    int i = leftward ? n - 1 : 0;
    if (psi_out) { psi_out->resize(n); (*psi_out)[i] = psi; }
    for (int step = 0; step + 1 < n; ++step) {
        const double x = g.x(i);
        const cplx k1y = dpsi, k1v = q(x) * psi;
        const cplx qm = q(x + 0.5 * ds);
        const cplx k2y = dpsi + 0.5 * ds * k1v, k2v = qm * (psi + 0.5 * ds * k1y);
        const cplx k3y = dpsi + 0.5 * ds * k2v, k3v = qm * (psi + 0.5 * ds * k2y);
        const cplx k4y = dpsi + ds * k3v, k4v = q(x + ds) * (psi + ds * k3y);
        psi += ds / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dpsi += ds / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        i += leftward ? -1 : 1;
        if (psi_out) (*psi_out)[i] = psi;
    }
    if (end_psi) *end_psi = psi;
    if (end_dpsi) *end_dpsi = dpsi;
}

} // namespace

ZeroEnergyCheck zero_energy_check(const SpectralData& s, double threshold) {
    const Grid& g = s.grid();
    const Potential& V = s.op->potential();
    CVec psi;
    cplx a_end, b_end;
    rk4_grid(g, [&](double x) { return cplx(V(x), 0); }, 1.0, 0.0, false, &psi, &a_end, &b_end);
    const double xr = g.x(g.n - 1);
    const double b = b_end.real();
    const double a = a_end.real() - xr * b;
    ZeroEnergyCheck z;
    z.slope_indicator = std::abs(b) / std::hypot(a, b);
    z.smallest_box_eigenvalue = s.smallest_abs_box_eigenvalue;
    z.threshold = threshold;
    z.pass = z.slope_indicator > threshold;
    return z;
}

// ---------------------------------------------------------------- scattering

ScatteringPair scattering_states(const SpectralData& s, double lambda) {
    if (!(lambda > 0)) throw NotInContinuum("scattering states need lambda > 0");
    const Grid& g = s.grid();
    const Potential& V = s.op->potential();
    const double k = std::sqrt(lambda);
    const cplx I(0, 1);
    auto q = [&](double x) { return cplx(V(x) - lambda, 0); };
    ScatteringPair sp;
    sp.k = k;
    // Jost solution ~ e^{ikx} on the right, integrated leftwards; on the left it
    // reads A e^{ikx} + B e^{-ikx}, so dividing by A gives the left-incident state.
    {
        const double xr = g.x(g.n - 1);
        CVec f;
        cplx p, dp;
        rk4_grid(g, q, std::exp(I * k * xr), I * k * std::exp(I * k * xr), true, &f, &p, &dp);
        const double xl = g.x(0);
        const cplx A = 0.5 * (p + dp / (I * k)) * std::exp(-I * k * xl);
        sp.left = f / A;
    }
    {
        const double xl = g.x(0);
        CVec f;
        cplx p, dp;
        rk4_grid(g, q, std::exp(-I * k * xl), -I * k * std::exp(-I * k * xl), false, &f, &p, &dp);
        const double xr = g.x(g.n - 1);
        // on the right: A e^{-ikx} + B e^{ikx}
        const cplx A = 0.5 * (p - dp / (I * k)) * std::exp(I * k * xr);
        sp.right = f / A;
    }
    return sp;
}

double spectral_density_pairing(const SpectralData& s, double lambda, const CVec& f) {
    const ScatteringPair sp = scattering_states(s, lambda);
    const Grid& g = s.grid();
    const cplx cl = (f.array() * sp.left.array().conjugate()).sum() * g.h();
    const cplx cr = (f.array() * sp.right.array().conjugate()).sum() * g.h();
    return (std::norm(cl) + std::norm(cr)) / (4.0 * sp.k);
}

// ---------------------------------------------------------------- limiting absorption

namespace {

double neville_at_zero(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> p = y;
    const int n = static_cast<int>(x.size());
    for (int m = 1; m < n; ++m)
        for (int i = 0; i + m < n; ++i)
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
    return p[0];
}

// Lagrange weights for evaluating the interpolant through (x_i, .) at 0.
std::vector<double> lagrange_at_zero(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> w(n, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i) w[i] *= x[j] / (x[j] - x[i]);
    return w;
}

} // namespace

AbsorptionResult limiting_absorption(const SpectralData& s, double lambda, const CVec& f, const AbsorptionOptions& opt) {
    if (!(lambda > opt.tol_edge)) throw NotInContinuum("lambda = " + std::to_string(lambda) + " is not inside the continuum");
    if (opt.eps.empty()) throw InvalidArgument("empty eps schedule");
    for (std::size_t i = 1; i < opt.eps.size(); ++i)
        if (!(opt.eps[i] < opt.eps[i - 1])) throw InvalidArgument("eps schedule must decrease");

    const Grid& g = s.grid();
    const double h = g.h();
    AbsorptionResult out;
    const double w0 = opt.layer_fraction * g.half_length;
    if (opt.cap_strength > 0) {
        out.absorber.geometry = Absorber::Geometry::Wall;
        out.absorber.half_length = g.half_length;
        out.absorber.width = w0;
        out.absorber.strength = opt.cap_strength;
        out.absorber.tuned_energy = lambda;
        out.absorber.reflection = absorber_reflection(Absorber::Geometry::Wall, w0, opt.cap_strength, lambda);
    } else {
        // widen by whole cells until the layer is quiet enough
        const double w_max = std::max(w0, opt.max_layer_fraction * g.half_length);
        int pad = 0;
        while (true) {
            const double w = w0 + pad * h;
            out.absorber = tune_absorber(Absorber::Geometry::Wall, w / opt.layer_fraction, opt.layer_fraction, lambda);
            out.padding = pad;
            if (out.absorber.reflection <= opt.reflection_target || w >= w_max) break;
            pad = std::min(static_cast<int>(std::ceil((1.25 * w - w0) / h)), static_cast<int>(std::floor((w_max - w0) / h)));
            if (pad <= out.padding) break;
        }
        out.absorber.half_length = g.half_length + out.padding * h;
    }
    const int n = g.n + 2 * out.padding;
    const int off = out.padding;
    RVec V(n), W(n);
    for (int i = 0; i < n; ++i) {
        const double x = g.x(0) + (i - off) * h;
        V[i] = (i >= off && i < off + g.n) ? s.op->V()[i - off] : s.op->potential()(x);
        W[i] = out.absorber(x);
    }
    CVec fp = CVec::Zero(n);
    fp.segment(off, g.n) = f;

    // 8th-order central second difference, no wrap-around
    static const double c[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
    const double ih2 = 1.0 / (h * h);
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 9);
    for (int i = 0; i < n; ++i) {
        for (int d = -4; d <= 4; ++d) {
            const int j = i + d;
            if (j < 0 || j >= n) continue;
            double v = -c[std::abs(d)] * ih2;
            if (d == 0) v += V[i];
            trip.emplace_back(i, j, cplx(v, d == 0 ? -W[i] : 0.0));
        }
    }
    Eigen::SparseMatrix<cplx> A0(n, n);
    A0.setFromTriplets(trip.begin(), trip.end());

    std::vector<CVec> ws;
    for (double eps : opt.eps) {
        Eigen::SparseMatrix<cplx> A = A0;
        for (int i = 0; i < n; ++i) A.coeffRef(i, i) -= cplx(lambda, eps);
        A.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw NoConvergence("sparse LU failed for eps = " + std::to_string(eps));
        CVec w = lu.solve(fp).segment(off, g.n);
        const cplx p = (w.array() * f.array().conjugate()).sum() * h;
        out.eps.push_back(eps);
        out.values.push_back(p.imag());
        ws.push_back(std::move(w));
    }

    // Neville extrapolants from the k smallest eps, k = 1..n
    const int m = static_cast<int>(out.eps.size());
    for (int k = 1; k <= m; ++k) {
        std::vector<double> x(out.eps.end() - k, out.eps.end()), y(out.values.end() - k, out.values.end());
        out.extrapolants.push_back(neville_at_zero(x, y));
    }
    const auto wts = lagrange_at_zero(out.eps);
    out.w = CVec::Zero(g.n);
    for (int i = 0; i < m; ++i) out.w += wts[i] * ws[i];
    out.value = out.extrapolants.back();
    out.principal = ((out.w.array() * f.array().conjugate()).sum() * g.h()).real();
    if (m >= 2) {
        const double a = out.extrapolants[m - 1], b = out.extrapolants[m - 2];
        const double scale = std::max(std::abs(a), std::abs(b));
        out.rel_spread = scale > 0 ? std::abs(a - b) / scale : 0.0;
    }
    out.stable = out.rel_spread <= opt.max_rel_spread;
    if (!out.stable && opt.throw_if_unstable)
        throw ExtrapolationUnstable("successive eps extrapolants differ by " + std::to_string(100 * out.rel_spread) + "%");
    return out;
}

} // namespace solsel
