#include "fixtures.hpp"

#include "solsel/modulation.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace solsel;

namespace {

const ProfileSet& ps() { return *fixture::pt2().profile; }
const ProfileSet& small() { return *fixture::pt2_small().profile; }

ZVec zvec(cplx a, cplx b) {
    ZVec z(2);
    z << a, b;
    return z;
}

ZVec direction(int N, int k) {
    ZVec d = ZVec::Zero(N);
    if (k < N) d[k] = 1.0;
    else d[k - N] = cplx(0, 1);
    return d;
}

// w0 corrected by a combination of i D phi(z) e_k so that <i w, D phi(z) e_k> = 0 for all k
CVec symplectic_complement(const ProfileSet& p, const ZVec& z, const CVec& w0) {
    const Grid& g = p.grid();
    const int M = 2 * p.dim();
    const cplx I(0, 1);
    std::vector<CVec> D(M);
    for (int k = 0; k < M; ++k) D[k] = d_phi(p, z, direction(p.dim(), k));
    Eigen::MatrixXd gram(M, M);
    Eigen::VectorXd rhs(M);
    for (int k = 0; k < M; ++k) {
        rhs[k] = g.inner(CVec(I * w0), D[k]);
        for (int l = 0; l < M; ++l) gram(k, l) = g.inner(D[l], D[k]);
    }
    const Eigen::VectorXd c = gram.ldlt().solve(rhs);
    CVec w = w0;
    for (int l = 0; l < M; ++l) w += c[l] * I * D[l];
    return w;
}

CVec bump(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1, 1);
    const double c = 3 * U(rng), s = 1.5 + U(rng), k = 2 * U(rng);
    CVec w(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        w[i] = std::exp(-(x - c) * (x - c) / (2 * s * s)) * std::exp(cplx(0, k * x));
    }
    return w;
}

} // namespace

TEST_CASE("linear guess reads off the bound-state components") {
    const auto& p = ps();
    const ZVec z = zvec({0.3, -0.2}, {0.1, 0.05});
    const CVec u = z[0] * p.spec->phi[0].cast<cplx>() + z[1] * p.spec->phi[1].cast<cplx>();
    CHECK((linear_guess(p, u) - z).norm() <= 1e-13);
}

TEST_CASE("pure profiles and the zero state") {
    const auto& p = ps();
    const ZVec z = zvec({0.02, 0.01}, {-0.015, 0.007});
    auto st = extract(p, assemble_phi(p, z), linear_guess(p, assemble_phi(p, z)));
    CHECK((st.z - z).norm() <= 1e-10 * z.norm());
    CHECK(p.grid().norm(st.eta) <= 1e-10 * p.grid().norm(assemble_phi(p, z)));

    auto zero = extract(p, CVec(CVec::Zero(p.grid().n)), ZVec::Zero(2));
    CHECK(zero.z.norm() == 0.0);
    CHECK(zero.eta.norm() == 0.0);
}

TEST_CASE("round trip with symplectically orthogonal radiation") {
    const auto& p = ps();
    const Grid& g = p.grid();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int k = 0; k < 10; ++k) {
        const ZVec z = 0.03 * zvec({U(rng), U(rng)}, {U(rng), U(rng)});
        CVec w = symplectic_complement(p, z, bump(g, rng));
        w *= 0.01 * z.norm() / g.norm(w);
        const CVec u = assemble_phi(p, z) + w;
        auto st = extract(p, u, linear_guess(p, u));
        CHECK((st.z - z).norm() <= 1e-10);
        CHECK(g.norm(CVec(st.eta - w)) <= 1e-10 * g.norm(u));
        CHECK(st.ortho_residual <= 1e-10 * g.norm(u));
    }
}

TEST_CASE("scaled ground state") {
    const auto& p = ps();
    const Grid& g = p.grid();
    std::vector<double> e1, e2;
    for (double eps : {0.04, 0.02, 0.01}) {
        const CVec u = eps * p.spec->phi[0].cast<cplx>();
        auto st = extract(p, u, linear_guess(p, u));
        CHECK(st.ortho_residual <= 1e-10 * g.norm(u));
        e1.push_back(std::abs(st.z[0] - eps) / std::pow(eps, 3));
        e2.push_back(std::abs(st.z[1]) / std::pow(eps, 3));
    }
    // the cubic part of eps phi_1 is not a profile: both amplitudes move by O(eps^3)
    for (std::size_t i = 0; i < e1.size(); ++i) {
        CHECK(e1[i] <= 3.0);
        CHECK(e2[i] <= 1.0);
        if (i > 0) CHECK(e1[i] <= e1[i - 1]);
    }
}

TEST_CASE("a run on the ground-state axis never leaves it") {
    const auto& p = small();
    SimulationConfig cfg;
    cfg.t_final = 5.0;
    cfg.output_stride = 20;
    ModulationTracker tr(p);
    simulate(p.spec->op, p.nl, assemble_phi(p, zvec(0.03, 0)), cfg, [&](double t, const CVec& u, double a) {
        tr.observe(t, u, a);
    });
    auto d = tr.finish();
    REQUIRE(d.failed_extractions == 0);
    for (const auto& s : d.samples) {
        for (double zm : s.zm_abs) CHECK(zm <= 1e-8);
        CHECK(std::abs(s.z[0]) == doctest::Approx(0.03).epsilon(1e-4));
    }
    CHECK(d.selected_mode == 0);
    CHECK(d.mass_closure <= 1e-10);
}

TEST_CASE("linear two-mode run: constant moduli and vanishing residuals") {
    const auto& base = small();
    const auto lin = build_profile_set(base.spec, base.sets, Nonlinearity::cubic(0.0));
    const ZVec z0 = zvec(0.03, cplx(0.01, 0.02));
    SimulationConfig cfg;
    cfg.t_final = 5.0;
    cfg.output_stride = 10;
    ModulationTracker tr(lin);
    simulate(lin.spec->op, lin.nl, assemble_phi(lin, z0), cfg, [&](double t, const CVec& u, double a) {
        tr.observe(t, u, a);
    });
    auto d = tr.finish();
    REQUIRE(d.failed_extractions == 0);
    REQUIRE(d.samples.size() > 10);
    for (const auto& s : d.samples) {
        for (int j = 0; j < 2; ++j) CHECK(std::abs(std::abs(s.z[j]) - std::abs(z0[j])) <= 1e-6);
        CHECK(s.modulation_residual <= 1e-6);
        CHECK(s.discrete_residual <= 1e-6);
        CHECK(s.eta_mass <= 1e-12);
    }
    // running accumulations are nondecreasing and finite
    for (std::size_t i = 1; i < d.samples.size(); ++i) {
        const auto &a = d.samples[i - 1], &b = d.samples[i];
        CHECK(b.acc_zm_total >= a.acc_zm_total);
        CHECK(b.acc_modulation >= a.acc_modulation);
        CHECK(b.acc_discrete >= a.acc_discrete);
        CHECK(b.acc_eta_local >= a.acc_eta_local);
        CHECK(std::isfinite(b.acc_zm_total));
    }
    CHECK(d.rho_window_spread <= 1e-6);
    CHECK(d.rho_plus == doctest::Approx(z0.norm()).epsilon(1e-6));
}

TEST_CASE("time to half of a smoothed modulus") {
    std::vector<double> t, m, flat;
    const double tau = 20.0;
    for (int i = 0; i <= 10000; ++i) {
        t.push_back(0.01 * i);
        m.push_back(std::exp(-t.back() / tau));
        flat.push_back(1.0);
    }
    CHECK(time_to_half(t, m, 5.0) == doctest::Approx(tau * std::log(2.0)).epsilon(5e-3));
    CHECK(std::isnan(time_to_half(t, flat, 5.0)));
    CHECK(std::isnan(time_to_half({}, {}, 5.0)));
}
