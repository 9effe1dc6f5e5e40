#pragma once
// Leading-order refined profile
//
//   phi(z) = sum_j z_j phi_j
//          + sum_{m in NR_1, |m| > 1} z^(m) phi~_m
//          + sum_{j,l} z_j |z_l|^2 psi_j^(l)
//
// with the nonresonant corrections phi~_m from the inductive resolvent
// recursion, resonant sources G_m for the minimal resonant indices, and the
// first-order frequency map varpi(rho) = omega + varpi1 * rho.  The last sum
// is the first-order amplitude correction along each mode; without it the
// profile misses the z_j|z_l|^2 terms of g(|u|^2)u and the residual along an
// axis is only O(rho^3).

#include "solsel/lattice.hpp"
#include "solsel/nonlinearity.hpp"
#include "solsel/spectral.hpp"

#include <Eigen/Core>

#include <map>
#include <memory>
#include <vector>

namespace solsel {

using ZVec = Eigen::VectorXcd;   // modulation amplitudes, length N

// c(z) = prod_l z_l^{a_l} conj(z_l)^{b_l}
struct Monomial {
    std::vector<int> a, b;

    static Monomial from_index(const MultiIndex& m, const std::vector<int>& rho_power = {});
    cplx eval(const ZVec& z) const;
    cplx d(const ZVec& z, const ZVec& w) const;                      // real-directional derivative
    cplx d2(const ZVec& z, const ZVec& w1, const ZVec& w2) const;    // second derivative
};

// z^(m): z^m for m >= 0, conj(z)^{-m} for m < 0, multiplied over slots
cplx zpow(const ZVec& z, const MultiIndex& m);

struct ProfileTerm {
    MultiIndex m;
    std::vector<int> rho_power;   // extra prod_l |z_l|^{2 p_l}
    Monomial mono;
    RVec f;
};

struct ProfileOptions {
    double amplitude_limit = 0.3;      // on sum_j |z_j|
    bool amplitude_corrections = true; // the psi_j^(l) terms
    int max_derivative_order = 6;      // K_max
};

struct ProfileSet {
    std::shared_ptr<const SpectralData> spec;
    Nonlinearity nl;
    IndexSets sets;
    std::vector<double> omega;
    ProfileOptions opt;

    std::map<MultiIndex, RVec> corrections;   // phi~_m, m in NR_1 (phi_j for units)
    std::map<MultiIndex, RVec> sources;       // g_m, m in NR_1
    std::map<MultiIndex, RVec> resonant;      // G_m, m in R_min
    Eigen::MatrixXd varpi1;                   // N x N
    std::vector<std::vector<RVec>> amplitude_corrections;   // [j][l]
    std::vector<ProfileTerm> terms;

    int dim() const { return static_cast<int>(omega.size()); }
    const Grid& grid() const { return spec->grid(); }
    // <G_m, phi_j>, rows follow sets.minimal_resonant
    Eigen::MatrixXd resonant_coupling() const;
};

ProfileSet build_profile_set(std::shared_ptr<const SpectralData> spec, const IndexSets& sets,
                             const Nonlinearity& nl, const ProfileOptions& opt = {});

void check_amplitude(const ProfileSet& ps, const ZVec& z);

CVec assemble_phi(const ProfileSet& ps, const ZVec& z);
CVec d_phi(const ProfileSet& ps, const ZVec& z, const ZVec& dz);
CVec d2_phi(const ProfileSet& ps, const ZVec& z, const ZVec& w1, const ZVec& w2);

RVec frequency(const ProfileSet& ps, const RVec& rho);
// D_z( -i varpi(|z|^2) z ) dz
ZVec d_rotation(const ProfileSet& ps, const ZVec& z, const ZVec& dz);

// g(|u|^2) u
CVec nonlinear_term(const Nonlinearity& nl, const CVec& u);
// H[z] f = H f + g(|phi|^2) f + 2 g'(|phi|^2) Re(conj(phi) f) phi
CVec linearized_apply(const ProfileSet& ps, const CVec& phi_z, const CVec& f);

struct ResidualReport {
    CVec r;
    double norm = 0;
    double bound_form = 0;   // ||z||^2 sum_{R_min} |z^m|,  ||z|| = sum |z_j|
    double amplitude = 0;    // ||z||
};

// i D phi(z)(-i varpi z) - H phi - g(|phi|^2) phi + sum z^m G_m
ResidualReport forced_residual(const ProfileSet& ps, const ZVec& z);

// Both sides of the derivative identity along dz, with the derivative of the
// residual taken by fourth-order central differences of forced_residual.
struct IdentityCheck {
    CVec lhs, rhs;
    double rel_error = 0;
};
IdentityCheck derivative_identity(const ProfileSet& ps, const ZVec& z, const ZVec& dz, double fd_step = 0);

// Forced residual along each axis z = rho e_j and the least-squares slope of
// log ||residual|| against log rho.
struct ScalingRow {
    int mode = 0;
    double rho = 0;
    double residual = 0;
    double bound_form = 0;
};
struct ScalingStudy {
    std::vector<ScalingRow> rows;
    std::vector<double> slope;   // per mode
};
ScalingStudy residual_scaling(const ProfileSet& ps, const std::vector<double>& rhos);

// n points log-spaced in [lo, hi]
std::vector<double> log_space(double lo, double hi, int n);

} // namespace solsel
