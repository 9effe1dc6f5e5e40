#include "solsel/modulation.hpp"

#include "solsel/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace solsel {

ZVec linear_guess(const ProfileSet& ps, const CVec& u) {
    const Grid& g = ps.grid();
    ZVec z(ps.dim());
    for (int j = 0; j < ps.dim(); ++j) {
        const CVec p = ps.spec->phi[j].cast<cplx>();
        z[j] = cplx(g.inner(u, p), g.inner(u, CVec(cplx(0, 1) * p)));
    }
    return z;
}

namespace {

ZVec direction(int N, int k) {
    ZVec d = ZVec::Zero(N);
    if (k < N) d[k] = 1.0;
    else d[k - N] = cplx(0, 1);
    return d;
}

struct NewtonResult {
    ZVec z;
    int iters = 0;
    double fnorm = std::numeric_limits<double>::infinity();
    bool converged = false;
};

NewtonResult newton(const ProfileSet& ps, const CVec& u, ZVec z, double tol, int max_iter) {
    const Grid& g = ps.grid();
    const int N = ps.dim();
    const int M = 2 * N;
    const cplx I(0, 1);
    NewtonResult r;
    std::vector<CVec> D(M);
    for (int it = 0; it <= max_iter; ++it) {
        CVec eta;
        try {
            eta = u - assemble_phi(ps, z);
            for (int k = 0; k < M; ++k) D[k] = d_phi(ps, z, direction(N, k));
        } catch (const AmplitudeTooLarge&) {
            return r;
        }
        const CVec ieta = I * eta;
        Eigen::VectorXd F(M);
        for (int k = 0; k < M; ++k) F[k] = g.inner(ieta, D[k]);
        r.z = z;
        r.iters = it;
        r.fnorm = F.norm();
        if (!std::isfinite(r.fnorm)) return r;
        if (r.fnorm <= tol) {
            r.converged = true;
            return r;
        }
        if (it == max_iter) break;
        Eigen::MatrixXd J(M, M);
        for (int k = 0; k < M; ++k) {
            for (int l = k; l < M; ++l) {
                const double second = g.inner(ieta, d2_phi(ps, z, direction(N, k), direction(N, l)));
                J(k, l) = second;
                if (l != k) J(l, k) = second;
            }
        }
        for (int k = 0; k < M; ++k)
            for (int l = 0; l < M; ++l) J(k, l) += g.inner(CVec(-I * D[l]), D[k]);
        const Eigen::VectorXd step = J.fullPivLu().solve(F);
        for (int j = 0; j < N; ++j) z[j] -= cplx(step[j], step[j + N]);
    }
    return r;
}

} // namespace

ModulationState extract(const ProfileSet& ps, const CVec& u, const ZVec& z_guess, const ExtractOptions& opt) {
    const Grid& g = ps.grid();
    const double unorm = g.norm(u);
    ModulationState st;
    if (unorm == 0) {
        st.z = ZVec::Zero(ps.dim());
        st.eta = CVec::Zero(g.n);
        return st;
    }
    const double tol = opt.rel_tol * unorm;
    NewtonResult r = newton(ps, u, z_guess, tol, opt.max_iter);
    if (!r.converged) {
        const ZVec lin = linear_guess(ps, u);
        if ((lin - z_guess).norm() > 0) {
            NewtonResult r2 = newton(ps, u, lin, tol, opt.max_iter);
            r2.iters += r.iters;
            r = r2;
            st.fallback = true;
        }
    }
    if (!r.converged)
        throw NewtonDiverged("modulation Newton stalled at |F|/|u| = " + std::to_string(r.fnorm / unorm));
    st.z = r.z;
    st.eta = u - assemble_phi(ps, st.z);
    st.newton_iters = r.iters;
    const cplx I(0, 1);
    const CVec ieta = I * st.eta;
    for (int k = 0; k < 2 * ps.dim(); ++k)
        st.ortho_residual = std::max(st.ortho_residual, std::abs(g.inner(ieta, d_phi(ps, st.z, direction(ps.dim(), k)))));
    return st;
}

// ---------------------------------------------------------------- tracker

ModulationTracker::ModulationTracker(const ProfileSet& ps, double weight_rate, const ExtractOptions& opt)
    : ps_(ps), opt_(opt) {
    series_.resonant = ps.sets.minimal_resonant;
    series_.weight_rate = weight_rate > 0 ? weight_rate : ps.spec->default_weight_rate();
}

void ModulationTracker::observe(double t, const CVec& u, double absorbed) {
    const Grid& g = ps_.grid();
    DiagnosticSample s;
    s.t = t;
    s.mass = mass(g, u);
    s.absorbed = absorbed;
    if (series_.samples.empty()) series_.initial_mass = s.mass + absorbed;
    const ZVec guess = have_last_ ? last_z_ : linear_guess(ps_, u);
    ModulationState st;
    try {
        st = extract(ps_, u, guess, opt_);
    } catch (const Error& e) {
        ++series_.failed_extractions;
        series_.annotations.push_back("t=" + std::to_string(t) + ": " + e.what());
        return;
    }
    s.z = st.z;
    s.ortho_residual = st.ortho_residual;
    s.newton_iters = st.newton_iters;
    s.eta_mass = mass(g, st.eta);
    s.eta_weighted = weighted_norm(g, st.eta, series_.weight_rate);
    s.eta_local = dual_weighted_norm(g, st.eta, series_.weight_rate);
    s.profile_mass = mass(g, CVec(u - st.eta));
    for (const auto& m : series_.resonant) s.zm_abs.push_back(std::abs(zpow(st.z, m)));
    series_.samples.push_back(std::move(s));
    last_z_ = st.z;
    have_last_ = true;
}

DiagnosticSeries ModulationTracker::finish(double window_fraction) const {
    DiagnosticSeries out = series_;
    out.window_fraction = window_fraction;
    auto& S = out.samples;
    const int n = static_cast<int>(S.size());
    const int N = ps_.dim();
    const int R = static_cast<int>(out.resonant.size());
    if (n == 0) return out;
    const cplx I(0, 1);
    const Eigen::MatrixXd coup = ps_.resonant_coupling();

    // time derivative: difference e^{i varpi (t' - t)} z(t') at the neighbours,
    // which removes the fast rotation before differencing
    for (int i = 0; i < n; ++i) {
        RVec rho(N);
        for (int j = 0; j < N; ++j) rho[j] = std::norm(S[i].z[j]);
        const RVec w = frequency(ps_, rho);
        S[i].dz = ZVec::Zero(N);
        if (n >= 2) {
            const int a = std::max(i - 1, 0), b = std::min(i + 1, n - 1);
            const double ta = S[a].t - S[i].t, tb = S[b].t - S[i].t;
            for (int j = 0; j < N; ++j) {
                const cplx ya = std::exp(I * w[j] * ta) * S[a].z[j];
                const cplx yb = std::exp(I * w[j] * tb) * S[b].z[j];
                // d/dt of y at t equals dz/dt + i varpi z
                S[i].dz[j] = (yb - ya) / (tb - ta) - I * w[j] * S[i].z[j];
            }
        }
        ZVec modres(N), disc(N);
        for (int j = 0; j < N; ++j) modres[j] = S[i].dz[j] + I * w[j] * S[i].z[j];
        disc = modres;
        for (int r = 0; r < R; ++r) {
            const cplx zm = zpow(S[i].z, out.resonant[r]);
            for (int j = 0; j < N; ++j) disc[j] += I * coup(r, j) * zm;
        }
        S[i].modulation_residual = modres.norm();
        S[i].discrete_residual = disc.norm();
    }

    // running L2-in-time by the trapezoid rule
    std::vector<double> Izm(R, 0.0);
    double Imod = 0, Idisc = 0, Ieta = 0;
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            const double dt = S[i].t - S[i - 1].t;
            auto trap = [&](double a, double b) { return 0.5 * dt * (a * a + b * b); };
            for (int r = 0; r < R; ++r) Izm[r] += trap(S[i - 1].zm_abs[r], S[i].zm_abs[r]);
            Imod += trap(S[i - 1].modulation_residual, S[i].modulation_residual);
            Idisc += trap(S[i - 1].discrete_residual, S[i].discrete_residual);
            Ieta += trap(S[i - 1].eta_local, S[i].eta_local);
        }
        S[i].acc_zm.resize(R);
        S[i].acc_zm_total = 0;
        for (int r = 0; r < R; ++r) {
            S[i].acc_zm[r] = std::sqrt(Izm[r]);
            S[i].acc_zm_total += S[i].acc_zm[r];
        }
        S[i].acc_modulation = std::sqrt(Imod);
        S[i].acc_discrete = std::sqrt(Idisc);
        S[i].acc_eta_local = std::sqrt(Ieta);
    }

    // summary over the final window
    const double T0 = S.front().t, T1 = S.back().t;
    const double tw = T1 - window_fraction * (T1 - T0);
    double sum = 0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    int cnt = 0;
    out.final_modulus.assign(N, 0.0);
    for (const auto& s : S) {
        if (s.t < tw) continue;
        const double a = s.z.norm();
        sum += a;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
        for (int j = 0; j < N; ++j) out.final_modulus[j] += std::abs(s.z[j]);
        ++cnt;
    }
    out.rho_plus = sum / cnt;
    out.rho_window_spread = hi - lo;
    for (auto& v : out.final_modulus) v /= cnt;
    out.decay_factor.assign(N, 0.0);
    double best = -1;
    for (int j = 0; j < N; ++j) {
        const double z0 = std::abs(S.front().z[j]);
        out.decay_factor[j] = out.final_modulus[j] > 0 ? z0 / out.final_modulus[j] : std::numeric_limits<double>::infinity();
        if (out.final_modulus[j] > best) {
            best = out.final_modulus[j];
            out.selected_mode = j;
        }
    }
    if (best <= 0) out.selected_mode = -1;

    const double tq = T1 - 0.25 * (T1 - T0);
    int iq = 0;
    while (iq + 1 < n && S[iq].t < tq) ++iq;
    out.plateau_increment.assign(R, 0.0);
    for (int r = 0; r < R; ++r) {
        const double total = S.back().acc_zm[r];
        out.plateau_increment[r] = total > 0 ? (total - S[iq].acc_zm[r]) / total : 0.0;
    }
    for (const auto& s : S) {
        const double base = std::max(out.initial_mass, 1e-300);
        out.mass_closure = std::max(out.mass_closure, std::abs(s.profile_mass + s.eta_mass + s.absorbed - out.initial_mass) / base);
        out.max_ortho = std::max(out.max_ortho, s.ortho_residual / std::max(std::sqrt(s.mass), 1e-300));
    }
    return out;
}

DiagnosticSeries diagnose_run(const ProfileSet& ps, const RunRecord& rec, double window_fraction) {
    ModulationTracker tr(ps);
    for (std::size_t i = 0; i < rec.snapshots.size(); ++i) {
        const double absorbed = i < rec.snapshot_absorbed.size() ? rec.snapshot_absorbed[i] : 0.0;
        tr.observe(rec.snapshot_times[i], rec.snapshots[i], absorbed);
    }
    return tr.finish(window_fraction);
}

double time_to_half(const std::vector<double>& t, const std::vector<double>& modulus, double window) {
    const int n = static_cast<int>(t.size());
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    const double ref = modulus.front();
    if (ref <= 0) return std::numeric_limits<double>::quiet_NaN();
    int lo = 0, hi = 0;
    double acc = 0;
    for (int i = 0; i < n; ++i) {
        while (hi < n && t[hi] <= t[i] + 0.5 * window) acc += modulus[hi++];
        while (lo < hi && t[lo] < t[i] - 0.5 * window) acc -= modulus[lo++];
        if (t[i] - t[0] < 0.5 * window) continue;   // window not yet full
        if (acc / (hi - lo) <= 0.5 * ref) return t[i];
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace solsel
