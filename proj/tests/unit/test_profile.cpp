#include "fixtures.hpp"
#include "oracles.hpp"

#include "solsel/errors.hpp"
#include "solsel/profile.hpp"

#include <doctest.h>

#include <random>

using namespace solsel;

namespace {

const ProfileSet& ps() { return *fixture::pt2().profile; }

ZVec zvec(cplx a, cplx b) {
    ZVec z(2);
    z << a, b;
    return z;
}

double rel(const Grid& g, const CVec& a, const CVec& b) { return g.norm(CVec(a - b)) / std::max(g.norm(b), 1e-300); }

} // namespace

TEST_CASE("recursion base and stored equations") {
    const auto& p = ps();
    const Grid& g = p.grid();
    REQUIRE(p.dim() == 2);
    CHECK(p.sets.minimal_resonant == IndexSet{MultiIndex{-1, 2}});
    for (int j = 0; j < 2; ++j) {
        const MultiIndex e = MultiIndex::unit(2, j);
        CHECK(p.corrections.at(e) == p.spec->phi[j]);
        if (p.sources.count(e)) CHECK(p.sources.at(e).norm() == 0.0);
    }
    for (const auto& [m, f] : p.corrections) {
        if (m.is_unit()) continue;
        const double lam = m.dot(p.omega);
        const RVec r = p.spec->op->apply(f) - lam * f + p.sources.at(m);
        CHECK(g.norm(r) <= 1e-7 * g.norm(p.sources.at(m)));
    }
}

TEST_CASE("the (2,-1) correction is the resolvent of the cubic source") {
    const auto& p = ps();
    const Grid& g = p.grid();
    const MultiIndex m{2, -1};
    REQUIRE(p.corrections.count(m));
    const double gp = p.nl.derivative_at_zero(1);
    const RVec src = gp * p.spec->phi[0].array().square() * p.spec->phi[1].array();
    const RVec& f = p.corrections.at(m);
    // (H - m.omega) phi~ = -g'(0) phi_1^2 phi_2, checked with the operator alone
    const RVec r = p.spec->op->apply(f) - m.dot(p.omega) * f + src;
    CHECK(g.norm(r) <= 1e-7 * g.norm(src));
}

TEST_CASE("resonant source has the closed form and decays") {
    const auto& p = ps();
    const Grid& g = p.grid();
    const RVec& G = p.resonant.at(MultiIndex{-1, 2});
    const RVec ref = p.nl.derivative_at_zero(1) * p.spec->phi[0].array() * p.spec->phi[1].array().square();
    CHECK(g.norm(RVec(G - ref)) <= 1e-8 * g.norm(G));
    CHECK(std::abs(G[0]) < 1e-8);
    CHECK(std::abs(G[g.n - 1]) < 1e-8);
}

TEST_CASE("linear equation: no corrections, no sources, no shift") {
    const auto& p = ps();
    ProfileSet lin = build_profile_set(p.spec, p.sets, Nonlinearity::cubic(0.0));
    for (const auto& [m, f] : lin.corrections)
        if (!m.is_unit()) CHECK(f.norm() == 0.0);
    for (const auto& [m, G] : lin.resonant) CHECK(G.norm() == 0.0);
    CHECK(lin.varpi1.norm() == 0.0);
    RVec rho(2);
    rho << 0.01, 0.02;
    RVec w = frequency(lin, rho);
    CHECK(w[0] == p.omega[0]);
    CHECK(w[1] == p.omega[1]);
}

TEST_CASE("first-order frequency") {
    const auto& p = ps();
    const Grid& g = p.grid();
    RVec w0 = frequency(p, RVec::Zero(2));
    CHECK(w0[0] == p.omega[0]);
    CHECK(w0[1] == p.omega[1]);
    // single-mode perturbation theory: g'(0) int phi_j^4
    for (int j = 0; j < 2; ++j) {
        const double ref = p.nl.derivative_at_zero(1) * p.spec->phi[j].array().pow(4).sum() * g.h();
        CHECK(p.varpi1(j, j) == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("profile map: zero, axis and gauge") {
    const auto& p = ps();
    const Grid& g = p.grid();
    CHECK(g.norm(assemble_phi(p, ZVec::Zero(2))) == 0.0);

    // on an axis the mixed monomials vanish and the correction is cubic
    auto excess = [&](double r) { return g.norm(CVec(assemble_phi(p, zvec(r, 0)) - r * p.spec->phi[0].cast<cplx>())); };
    CHECK(excess(0.02) / excess(0.01) == doctest::Approx(8.0).epsilon(0.01));
    CHECK(zpow(zvec(0.1, 0), MultiIndex{2, -1}) == cplx(0));
    CHECK(zpow(zvec(0.1, 0), MultiIndex{-1, 2}) == cplx(0));

    const ZVec z = zvec({0.02, -0.01}, {0.005, 0.015});
    for (double th : {0.3, 1.7, -2.4}) {
        const cplx ph = std::exp(cplx(0, th));
        CHECK(rel(g, assemble_phi(p, ph * z), ph * assemble_phi(p, z)) <= 1e-13);
        CHECK(std::abs(forced_residual(p, ph * z).norm - forced_residual(p, z).norm) <=
              1e-9 * forced_residual(p, z).norm);
    }
    CHECK_THROWS_AS(assemble_phi(p, zvec(0.2, 0.2)), AmplitudeTooLarge);
}

TEST_CASE("profile derivatives") {
    const auto& p = ps();
    const Grid& g = p.grid();
    const ZVec zero = ZVec::Zero(2);
    const ZVec w = zvec({0.4, -1.0}, {0.3, 0.2});
    // D phi(0) w = w . phi
    const CVec lin = w[0] * p.spec->phi[0].cast<cplx>() + w[1] * p.spec->phi[1].cast<cplx>();
    CHECK(rel(g, d_phi(p, zero, w), lin) <= 1e-14);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int k = 0; k < 5; ++k) {
        const ZVec z = 0.03 * zvec({U(rng), U(rng)}, {U(rng), U(rng)});
        const ZVec dz = zvec({U(rng), U(rng)}, {U(rng), U(rng)}).normalized();
        CHECK(g.norm(d_phi(p, z, zero)) == 0.0);
        // step 1e-4 along a unit direction; the error must also shrink as h^2
        auto fd_err = [&](double h) {
            const CVec fd = (assemble_phi(p, z + h * dz) - assemble_phi(p, z - h * dz)) / (2 * h);
            return rel(g, d_phi(p, z, dz), fd);
        };
        const double h = 1e-4;
        CHECK(fd_err(h) <= 1e-6);
        CHECK(fd_err(h) / fd_err(h / 2) == doctest::Approx(4.0).epsilon(0.05));
        const ZVec w2 = zvec({U(rng), 0}, {0, U(rng)});
        const CVec fd2 = (d_phi(p, z + h * w2, dz) - d_phi(p, z - h * w2, dz)) / (2 * h);
        CHECK(rel(g, d2_phi(p, z, dz, w2), fd2) <= 1e-6);
    }
}

TEST_CASE("forced residual scaling") {
    const auto& p = ps();
    CHECK(forced_residual(p, ZVec::Zero(2)).norm == 0.0);

    auto study = residual_scaling(p, log_space(1e-3, 1e-1, 9));
    REQUIRE(study.slope.size() == 2);
    for (double s : study.slope) CHECK(s >= 4.5);

    // off the axes the residual follows ||z||^2 sum |z^m|
    std::vector<double> ratio;
    for (double r : {1e-3, 3e-3, 1e-2, 3e-2}) {
        auto rep = forced_residual(p, zvec(r, r));
        ratio.push_back(rep.norm / rep.bound_form);
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    CHECK(*hi / *lo < 3.0);
}

TEST_CASE("linearized operator is symmetric and the derivative identity holds") {
    const auto& p = ps();
    const Grid& g = p.grid();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int k = 0; k < 10; ++k) {
        const ZVec z = 0.02 * zvec({U(rng), U(rng)}, {U(rng), U(rng)});
        const ZVec dz = zvec({U(rng), U(rng)}, {U(rng), U(rng)});
        const CVec phi = assemble_phi(p, z);
        CVec u(g.n), v(g.n);
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            u[i] = cplx(std::exp(-x * x), x * std::exp(-x * x / 2)) * U(rng);
            v[i] = cplx(std::cos(x), 1.0) / std::cosh(x) * U(rng);
        }
        const double asym = std::abs(g.inner(linearized_apply(p, phi, u), v) - g.inner(u, linearized_apply(p, phi, v)));
        CHECK(asym <= 1e-9 * g.norm(u) * g.norm(v));
        CHECK(derivative_identity(p, z, dz).rel_error <= 1e-5);
    }
}

TEST_CASE("resonant coupling uses the stored sources") {
    const auto& p = ps();
    const Grid& g = p.grid();
    auto c = p.resonant_coupling();
    REQUIRE(c.rows() == 1);
    const RVec& G = p.resonant.at(MultiIndex{-1, 2});
    for (int j = 0; j < 2; ++j) CHECK(c(0, j) == doctest::Approx(g.inner(G, p.spec->phi[j])).epsilon(1e-12));
}

TEST_CASE("monomials") {
    const ZVec z = zvec({0.3, 0.1}, {-0.2, 0.4});
    const Monomial m = Monomial::from_index(MultiIndex{-1, 2});
    CHECK(std::abs(m.eval(z) - std::conj(z[0]) * z[1] * z[1]) < 1e-15);
    CHECK(std::abs(zpow(z, MultiIndex{-1, 2}) - m.eval(z)) < 1e-15);
    const ZVec w = zvec({0.0, 1.0}, {0.5, -0.3});
    const double h = 1e-6;
    CHECK(std::abs(m.d(z, w) - (m.eval(z + h * w) - m.eval(z - h * w)) / (2 * h)) < 1e-9);
}
