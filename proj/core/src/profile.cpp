#include "solsel/profile.hpp"

#include "solsel/errors.hpp"

#include <algorithm>
#include <cmath>

namespace solsel {

// ---------------------------------------------------------------- monomials

namespace {

cplx ipow(cplx z, int p) {
    cplx r = 1.0;
    for (int i = 0; i < p; ++i) r *= z;
    return r;
}

// h(z) = z^a conj(z)^b and its first/second real-directional derivatives
struct Factor {
    int a, b;
    cplx val(cplx z) const { return ipow(z, a) * ipow(std::conj(z), b); }
    cplx d(cplx z, cplx w) const {
        cplx r = 0;
        if (a > 0) r += double(a) * ipow(z, a - 1) * ipow(std::conj(z), b) * w;
        if (b > 0) r += double(b) * ipow(z, a) * ipow(std::conj(z), b - 1) * std::conj(w);
        return r;
    }
    cplx d2(cplx z, cplx w1, cplx w2) const {
        const cplx zb = std::conj(z);
        cplx r = 0;
        if (a > 1) r += double(a * (a - 1)) * ipow(z, a - 2) * ipow(zb, b) * w1 * w2;
        if (a > 0 && b > 0) r += double(a * b) * ipow(z, a - 1) * ipow(zb, b - 1) * (w1 * std::conj(w2) + std::conj(w1) * w2);
        if (b > 1) r += double(b * (b - 1)) * ipow(z, a) * ipow(zb, b - 2) * std::conj(w1) * std::conj(w2);
        return r;
    }
};

} // namespace

Monomial Monomial::from_index(const MultiIndex& m, const std::vector<int>& rho_power) {
    Monomial mono;
    const int n = m.size();
    mono.a.assign(n, 0);
    mono.b.assign(n, 0);
    for (int l = 0; l < n; ++l) {
        const int p = rho_power.empty() ? 0 : rho_power[l];
        mono.a[l] = std::max(m[l], 0) + p;
        mono.b[l] = std::max(-m[l], 0) + p;
    }
    return mono;
}

cplx Monomial::eval(const ZVec& z) const {
    cplx r = 1.0;
    for (std::size_t l = 0; l < a.size(); ++l) r *= Factor{a[l], b[l]}.val(z[l]);
    return r;
}

cplx Monomial::d(const ZVec& z, const ZVec& w) const {
    const int n = static_cast<int>(a.size());
    cplx total = 0;
    for (int l = 0; l < n; ++l) {
        const Factor f{a[l], b[l]};
        cplx t = f.d(z[l], w[l]);
        if (t == 0.0) continue;
        for (int k = 0; k < n; ++k)
            if (k != l) t *= Factor{a[k], b[k]}.val(z[k]);
        total += t;
    }
    return total;
}

cplx Monomial::d2(const ZVec& z, const ZVec& w1, const ZVec& w2) const {
    const int n = static_cast<int>(a.size());
    cplx total = 0;
    for (int l = 0; l < n; ++l) {
        for (int k = 0; k < n; ++k) {
            cplx t;
            if (k == l) {
                t = Factor{a[l], b[l]}.d2(z[l], w1[l], w2[l]);
            } else {
                t = Factor{a[l], b[l]}.d(z[l], w1[l]) * Factor{a[k], b[k]}.d(z[k], w2[k]);
            }
            if (t == 0.0) continue;
            for (int q = 0; q < n; ++q)
                if (q != l && q != k) t *= Factor{a[q], b[q]}.val(z[q]);
            total += t;
        }
    }
    return total;
}

cplx zpow(const ZVec& z, const MultiIndex& m) {
    return Monomial::from_index(m).eval(z);
}

// ---------------------------------------------------------------- build

namespace {

// sum_k g^(k)(0)/k! sum_{A(k,m)} prod of corrections (even slots conjugated;
// every factor is real so conjugation is the identity on values)
RVec assemble_source(const ProfileSet& ps, const MultiIndex& m) {
    const Grid& g = ps.grid();
    RVec src = RVec::Zero(g.n);
    double fact = 1;
    for (int k = 1; k <= ps.opt.max_derivative_order; ++k) {
        fact *= k;
        if (2 * k + 1 > m.norm()) break;
        const double coef = ps.nl.derivative_at_zero(k) / fact;
        if (coef == 0) continue;
        for (const auto& tuple : enumerate_A(k, m, ps.sets.truncated_nonresonant)) {
            RVec prod = RVec::Ones(g.n);
            for (const auto& mi : tuple) {
                auto it = ps.corrections.find(mi);
                if (it == ps.corrections.end())
                    throw MissingDependency("correction for " + mi.str() + " needed by " + m.str() + " is not built yet");
                prod.array() *= it->second.array();
            }
            src += coef * prod;
        }
    }
    return src;
}

} // namespace

Eigen::MatrixXd ProfileSet::resonant_coupling() const {
    const auto& R = sets.minimal_resonant;
    Eigen::MatrixXd c(R.size(), dim());
    for (std::size_t i = 0; i < R.size(); ++i)
        for (int j = 0; j < dim(); ++j) c(i, j) = grid().inner(resonant.at(R[i]), spec->phi[j]);
    return c;
}

ProfileSet build_profile_set(std::shared_ptr<const SpectralData> spec, const IndexSets& sets,
                             const Nonlinearity& nl, const ProfileOptions& opt) {
    ProfileSet ps;
    ps.spec = spec;
    ps.nl = nl;
    ps.sets = sets;
    ps.omega = spec->omega;
    ps.opt = opt;
    const int N = spec->n_bound();
    const Grid& g = spec->grid();
    for (const auto& m : sets.truncated_nonresonant)
        if (m.size() != N) throw InvalidArgument("index sets and spectrum disagree on the number of modes");

    // increasing ||m||, lexicographic within a shell
    std::vector<MultiIndex> order = sets.truncated_nonresonant;
    std::stable_sort(order.begin(), order.end(), [](const MultiIndex& x, const MultiIndex& y) { return x.norm() < y.norm(); });
    for (const auto& m : order) {
        const int j = m.unit_slot();
        if (j >= 0) {
            ps.corrections[m] = spec->phi[j];
            ps.sources[m] = RVec::Zero(g.n);
            continue;
        }
        RVec src = assemble_source(ps, m);
        const double lam = m.dot(ps.omega);
        RVec corr = src.isZero(0) ? RVec(RVec::Zero(g.n)) : RVec(-resolvent_solve(*spec, lam, src));
        ps.sources[m] = std::move(src);
        ps.corrections[m] = std::move(corr);
    }
    for (const auto& m : sets.minimal_resonant) ps.resonant[m] = assemble_source(ps, m);

    // cubic order along z_j |z_l|^2: solvability gives varpi1, the rest is inverted
    const double g1 = nl.derivative_at_zero(1);
    ps.varpi1 = Eigen::MatrixXd::Zero(N, N);
    ps.amplitude_corrections.assign(N, std::vector<RVec>(N, RVec::Zero(g.n)));
    for (int j = 0; j < N; ++j) {
        for (int l = 0; l < N; ++l) {
            const double mult = (j == l) ? 1.0 : 2.0;
            RVec S = (g1 * mult) * spec->phi[j].array() * spec->phi[l].array().square();
            ps.varpi1(j, l) = g.inner(S, spec->phi[j]);
            if (opt.amplitude_corrections && g1 != 0) {
                S -= ps.varpi1(j, l) * spec->phi[j];
                ps.amplitude_corrections[j][l] = -reduced_resolvent(*spec, j, S);
            }
        }
    }

    for (const auto& [m, f] : ps.corrections) {
        if (!m.is_unit() && f.isZero(0)) continue;
        ps.terms.push_back({m, {}, Monomial::from_index(m), f});
    }
    if (opt.amplitude_corrections && g1 != 0) {
        for (int j = 0; j < N; ++j)
            for (int l = 0; l < N; ++l) {
                std::vector<int> p(N, 0);
                p[l] = 1;
                const MultiIndex e = MultiIndex::unit(N, j);
                ps.terms.push_back({e, p, Monomial::from_index(e, p), ps.amplitude_corrections[j][l]});
            }
    }
    return ps;
}

// ---------------------------------------------------------------- evaluation

void check_amplitude(const ProfileSet& ps, const ZVec& z) {
    if (z.size() != ps.dim()) throw InvalidArgument("amplitude vector has the wrong length");
    const double a = z.cwiseAbs().sum();
    if (!(a < ps.opt.amplitude_limit))
        throw AmplitudeTooLarge("||z|| = " + std::to_string(a) + " exceeds " + std::to_string(ps.opt.amplitude_limit));
}

CVec assemble_phi(const ProfileSet& ps, const ZVec& z) {
    check_amplitude(ps, z);
    CVec out = CVec::Zero(ps.grid().n);
    for (const auto& t : ps.terms) {
        const cplx c = t.mono.eval(z);
        if (c != 0.0) out += c * t.f.cast<cplx>();
    }
    return out;
}

CVec d_phi(const ProfileSet& ps, const ZVec& z, const ZVec& dz) {
    check_amplitude(ps, z);
    CVec out = CVec::Zero(ps.grid().n);
    for (const auto& t : ps.terms) {
        const cplx c = t.mono.d(z, dz);
        if (c != 0.0) out += c * t.f.cast<cplx>();
    }
    return out;
}

CVec d2_phi(const ProfileSet& ps, const ZVec& z, const ZVec& w1, const ZVec& w2) {
    check_amplitude(ps, z);
    CVec out = CVec::Zero(ps.grid().n);
    for (const auto& t : ps.terms) {
        const cplx c = t.mono.d2(z, w1, w2);
        if (c != 0.0) out += c * t.f.cast<cplx>();
    }
    return out;
}

RVec frequency(const ProfileSet& ps, const RVec& rho) {
    RVec w = Eigen::Map<const RVec>(ps.omega.data(), ps.dim());
    return w + ps.varpi1 * rho;
}

ZVec d_rotation(const ProfileSet& ps, const ZVec& z, const ZVec& dz) {
    const int N = ps.dim();
    RVec rho(N), drho(N);
    for (int l = 0; l < N; ++l) {
        rho[l] = std::norm(z[l]);
        drho[l] = 2 * (std::conj(z[l]) * dz[l]).real();
    }
    const RVec w = frequency(ps, rho);
    const RVec dw = ps.varpi1 * drho;
    const cplx I(0, 1);
    ZVec out(N);
    for (int j = 0; j < N; ++j) out[j] = -I * (w[j] * dz[j] + dw[j] * z[j]);
    return out;
}

CVec nonlinear_term(const Nonlinearity& nl, const CVec& u) {
    CVec out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = nl.g(std::norm(u[i])) * u[i];
    return out;
}

CVec linearized_apply(const ProfileSet& ps, const CVec& p, const CVec& f) {
    CVec out = ps.spec->op->apply(f);
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double s = std::norm(p[i]);
        out[i] += ps.nl.g(s) * f[i] + 2 * ps.nl.dg(s) * (std::conj(p[i]) * f[i]).real() * p[i];
    }
    return out;
}

ResidualReport forced_residual(const ProfileSet& ps, const ZVec& z) {
    const int N = ps.dim();
    const cplx I(0, 1);
    RVec rho(N);
    for (int l = 0; l < N; ++l) rho[l] = std::norm(z[l]);
    const RVec w = frequency(ps, rho);
    ZVec rot(N);
    for (int j = 0; j < N; ++j) rot[j] = -I * w[j] * z[j];

    const CVec p = assemble_phi(ps, z);
    ResidualReport rep;
    rep.r = I * d_phi(ps, z, rot) - ps.spec->op->apply(p) - nonlinear_term(ps.nl, p);
    double zm = 0;
    for (const auto& [m, G] : ps.resonant) {
        const cplx c = zpow(z, m);
        rep.r += c * G.cast<cplx>();
        zm += std::abs(c);
    }
    rep.norm = ps.grid().norm(rep.r);
    rep.amplitude = z.cwiseAbs().sum();
    rep.bound_form = rep.amplitude * rep.amplitude * zm;
    return rep;
}

IdentityCheck derivative_identity(const ProfileSet& ps, const ZVec& z, const ZVec& dz, double fd_step) {
    const int N = ps.dim();
    const cplx I(0, 1);
    RVec rho(N);
    for (int l = 0; l < N; ++l) rho[l] = std::norm(z[l]);
    const RVec w = frequency(ps, rho);
    ZVec rot(N);
    for (int j = 0; j < N; ++j) rot[j] = -I * w[j] * z[j];

    const CVec p = assemble_phi(ps, z);
    IdentityCheck ic;
    ic.lhs = linearized_apply(ps, p, d_phi(ps, z, dz));

    // D_z of the remainder; the stored residual is minus the remainder
    const double scale = std::max(z.cwiseAbs().maxCoeff(), 1e-3);
    const double hstep = fd_step > 0 ? fd_step : 1e-3 * scale / std::max(dz.cwiseAbs().maxCoeff(), 1e-300);
    auto R = [&](double t) { return CVec(-forced_residual(ps, ZVec(z + t * dz)).r); };
    const CVec dR = (8.0 * (R(hstep) - R(-hstep)) - (R(2 * hstep) - R(-2 * hstep))) / (12.0 * hstep);

    ic.rhs = I * d2_phi(ps, z, rot, dz) + I * d_phi(ps, z, d_rotation(ps, z, dz)) + dR;
    for (const auto& [m, G] : ps.resonant) ic.rhs += Monomial::from_index(m).d(z, dz) * G.cast<cplx>();

    const Grid& g = ps.grid();
    ic.rel_error = g.norm(CVec(ic.lhs - ic.rhs)) / std::max(g.norm(ic.lhs), 1e-300);
    return ic;
}

std::vector<double> log_space(double lo, double hi, int n) {
    if (!(lo > 0 && hi > lo) || n < 2) throw InvalidArgument("log_space needs 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return out;
}

ScalingStudy residual_scaling(const ProfileSet& ps, const std::vector<double>& rhos) {
    ScalingStudy st;
    const int N = ps.dim();
    for (int j = 0; j < N; ++j) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (double rho : rhos) {
            ZVec z = ZVec::Zero(N);
            z[j] = rho;
            const ResidualReport r = forced_residual(ps, z);
            st.rows.push_back({j, rho, r.norm, r.bound_form});
            if (r.norm > 0) {
                const double x = std::log(rho), y = std::log(r.norm);
                sx += x, sy += y, sxx += x * x, sxy += x * y;
                ++cnt;
            }
        }
        const double den = cnt * sxx - sx * sx;
        st.slope.push_back(cnt >= 2 && den > 0 ? (cnt * sxy - sx * sy) / den : std::nan(""));
    }
    return st;
}

} // namespace solsel
