#include "solsel/reduced.hpp"

#include "solsel/errors.hpp"

#include <cmath>
#include <limits>

namespace solsel {

ReducedModel make_reduced_model(const ProfileSet& ps, const std::vector<FgrEntry>& fgr, bool include_principal) {
    ReducedModel m;
    m.omega = Eigen::Map<const RVec>(ps.omega.data(), ps.dim());
    m.varpi1 = ps.varpi1;
    m.resonant = ps.sets.minimal_resonant;
    m.coupling = ps.resonant_coupling();
    m.include_principal = include_principal;
    for (const auto& r : m.resonant) {
        double gam = 0, pv = 0;
        for (const auto& e : fgr)
            if (e.m == r) { gam = e.gamma; pv = e.principal; }
        m.gamma.push_back(gam);
        m.principal.push_back(pv);
    }
    return m;
}

ZVec ReducedModel::damping_terms(const ZVec& z) const {
    const int N = dim();
    ZVec d = ZVec::Zero(N);
    if (!damping) return d;
    for (std::size_t r = 0; r < resonant.size(); ++r) {
        const MultiIndex& m = resonant[r];
        const cplx L(gamma[r], include_principal ? -principal[r] : 0.0);
        const Monomial mono = Monomial::from_index(m);
        const cplx zm = mono.eval(z);
        for (int j = 0; j < N; ++j) {
            if (m[j] == 0) continue;
            Monomial dm = mono;
            if (m[j] > 0) {
                dm.a[j] -= 1;
                const cplx dzj = double(m[j]) * dm.eval(z);
                d[j] -= std::conj(dzj) * zm * L;
            } else {
                dm.b[j] -= 1;
                const cplx dzbj = double(-m[j]) * dm.eval(z);
                d[j] += std::conj(std::conj(dzbj) * zm * L);
            }
        }
    }
    return d;
}

ZVec ReducedModel::rhs(const ZVec& z) const {
    const int N = dim();
    const cplx I(0, 1);
    RVec rho(N);
    for (int j = 0; j < N; ++j) rho[j] = std::norm(z[j]);
    const RVec w = omega + varpi1 * rho;
    ZVec out(N);
    for (int j = 0; j < N; ++j) out[j] = -I * w[j] * z[j];
    for (std::size_t r = 0; r < resonant.size(); ++r) {
        const cplx zm = zpow(z, resonant[r]);
        for (int j = 0; j < N; ++j) out[j] -= I * coupling(r, j) * zm;
    }
    return out + damping_terms(z);
}

double ReducedModel::dissipation(const ZVec& z) const {
    const ZVec d = damping_terms(z);
    double s = 0;
    for (int j = 0; j < dim(); ++j) s += omega[j] * (std::conj(z[j]) * d[j]).real();
    return s;
}

ReducedTrajectory integrate_reduced(const ReducedModel& model, const ZVec& z0, double dt, double t_final, int output_stride) {
    if (!(dt > 0)) throw InvalidArgument("dt must be positive");
    if (output_stride < 1) throw InvalidArgument("output_stride must be >= 1");
    const long long nsteps = std::llround(t_final / dt);
    const double z0n = z0.norm();
    ReducedTrajectory tr;
    ZVec z = z0;
    double cum = 0;
    auto record = [&](double t) {
        tr.times.push_back(t);
        tr.z.push_back(z);
        std::vector<double> a;
        for (const auto& m : model.resonant) a.push_back(std::abs(zpow(z, m)));
        tr.zm_abs.push_back(std::move(a));
        double e = 0;
        for (int j = 0; j < model.dim(); ++j) e += 0.5 * model.omega[j] * std::norm(z[j]);
        tr.quadratic_energy.push_back(e);
        tr.cumulative_damping.push_back(cum);
    };
    record(0.0);
    for (long long n = 1; n <= nsteps; ++n) {
        const ZVec k1 = model.rhs(z);
        const ZVec k2 = model.rhs(z + 0.5 * dt * k1);
        const ZVec k3 = model.rhs(z + 0.5 * dt * k2);
        const ZVec k4 = model.rhs(z + dt * k3);
        const double d0 = model.dissipation(z);
        z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        cum += 0.5 * dt * (d0 + model.dissipation(z));
        if (!z.allFinite() || z.norm() > 2 * z0n + 1e-300)
            throw StepUnstable("reduced amplitudes left the small-data regime at t = " + std::to_string(n * dt));
        if (n % output_stride == 0 || n == nsteps) record(n * dt);
    }
    return tr;
}

Comparison compare(const ReducedTrajectory& reduced, const DiagnosticSeries& full, double smoothing_window) {
    Comparison c;
    if (reduced.times.empty() || full.samples.empty()) return c;
    const int N = static_cast<int>(reduced.z.front().size());
    // linear interpolation of the reduced moduli at the full-model times
    std::size_t k = 0;
    for (const auto& s : full.samples) {
        if (s.t > reduced.times.back() + 1e-12) break;
        while (k + 1 < reduced.times.size() && reduced.times[k + 1] < s.t) ++k;
        std::vector<double> dev(N);
        for (int j = 0; j < N; ++j) {
            double a = std::abs(reduced.z[k][j]);
            if (k + 1 < reduced.times.size()) {
                const double t0 = reduced.times[k], t1 = reduced.times[k + 1];
                const double th = (s.t - t0) / (t1 - t0);
                a = (1 - th) * std::abs(reduced.z[k][j]) + th * std::abs(reduced.z[k + 1][j]);
            }
            const double b = std::abs(s.z[j]);
            dev[j] = std::abs(a - b) / std::max(b, 1e-300);
            c.max_rel_deviation = std::max(c.max_rel_deviation, dev[j]);
        }
        c.times.push_back(s.t);
        c.rel_deviation.push_back(std::move(dev));
    }
    std::vector<double> tf;
    for (const auto& s : full.samples) tf.push_back(s.t);
    double worst = std::numeric_limits<double>::infinity();
    for (int j = 0; j < N; ++j) {
        std::vector<double> mr, mf;
        for (const auto& z : reduced.z) mr.push_back(std::abs(z[j]));
        for (const auto& s : full.samples) mf.push_back(std::abs(s.z[j]));
        const double a = time_to_half(reduced.times, mr, smoothing_window);
        const double b = time_to_half(tf, mf, smoothing_window);
        c.t_half_reduced.push_back(a);
        c.t_half_full.push_back(b);
        c.rate_ratio.push_back(a / b);
        // the decaying mode is the one whose full-model modulus falls furthest
        const double ratio = mf.back() / std::max(mf.front(), 1e-300);
        if (mf.front() > 0 && ratio < worst) {
            worst = ratio;
            c.decaying_mode = j;
        }
    }
    return c;
}

} // namespace solsel
