#pragma once
// Reduced ODE for the discrete amplitudes with a radiation-damping closure:
//
//   dz_j/dt = -i varpi_j(|z|^2) z_j - i sum_m g_{m,j} z^m + d_j(z)
//
// Substituting the outgoing response eta ~ -z^m (H - m.omega - i0)^{-1} P_c G_m
// into the coupling of eta to the amplitudes gives, with
// L_m = gamma_m - i * pv_m (pv_m the principal-value part, optional),
//
//   d_j = -sum_m conj(d z^m / d z_j) z^m L_m             (slots with m_j > 0)
//       + sum_m conj( conj(d z^m / d conj(z_j)) z^m L_m)  (slots with m_j < 0)
//
// so that d/dt (1/2 sum_j omega_j |z_j|^2) = -sum_m (m.omega) gamma_m |z^m|^2 <= 0.

#include "solsel/fgr.hpp"
#include "solsel/modulation.hpp"
#include "solsel/profile.hpp"

#include <vector>

namespace solsel {

struct ReducedModel {
    RVec omega;
    Eigen::MatrixXd varpi1;
    std::vector<MultiIndex> resonant;
    Eigen::MatrixXd coupling;       // g_{m,j}
    std::vector<double> gamma, principal;
    bool include_principal = false;
    bool damping = true;

    int dim() const { return static_cast<int>(omega.size()); }
    ZVec rhs(const ZVec& z) const;
    ZVec damping_terms(const ZVec& z) const;
    // d/dt of 1/2 sum omega_j |z_j|^2 due to the damping terms alone
    double dissipation(const ZVec& z) const;
};

ReducedModel make_reduced_model(const ProfileSet& ps, const std::vector<FgrEntry>& fgr, bool include_principal = false);

// z' from the spec of ReducedModel, evaluated at z.  Convenience alias used
// by the diagnostics.
inline ZVec reduced_discrete_rhs(const ReducedModel& model, const ZVec& z) { return model.rhs(z); }

struct ReducedTrajectory {
    std::vector<double> times;
    std::vector<ZVec> z;
    std::vector<std::vector<double>> zm_abs;
    std::vector<double> quadratic_energy;     // 1/2 sum omega_j |z_j|^2
    std::vector<double> cumulative_damping;   // int dissipation dt  (<= 0)
};

// Classical RK4.  Throws StepUnstable if |z| exceeds twice |z0|.
ReducedTrajectory integrate_reduced(const ReducedModel& model, const ZVec& z0, double dt, double t_final,
                                    int output_stride = 1);

struct Comparison {
    std::vector<double> times;
    std::vector<std::vector<double>> rel_deviation;   // [sample][j] of |z_j|
    double max_rel_deviation = 0;
    std::vector<double> t_half_reduced, t_half_full;  // NaN when the mode never halves
    std::vector<double> rate_ratio;                   // t_half_reduced / t_half_full
    int decaying_mode = -1;
};

Comparison compare(const ReducedTrajectory& reduced, const DiagnosticSeries& full, double smoothing_window = 5.0);

} // namespace solsel
