#pragma once
// Radiation-damping coefficients of the resonant sources:
//   gamma_m = Im < (H - m.omega - i0)^{-1} P_c G_m, G_m >   (>= 0)

#include "solsel/profile.hpp"

#include <vector>

namespace solsel {

struct FgrEntry {
    MultiIndex m;
    double lambda = 0;          // m.omega
    double gamma = 0;           // extrapolated absorption value
    double principal = 0;       // Re part of the same pairing (frequency shift)
    double source_norm2 = 0;    // ||G_m||^2
    double cross_check = 0;     // scattering-state quadrature of the same quantity
    std::vector<double> eps, table, extrapolants;
    double rel_spread = 0;
    bool stable = false;
    bool degenerate = false;    // gamma below 1e-10: the damping assumption fails numerically
    double cap_strength = 0, cap_width = 0, cap_reflection = 0;
};

struct FgrOptions {
    AbsorptionOptions absorption;
    bool cross_check = true;
};

FgrEntry fgr_coefficient(const SpectralData& spec, const MultiIndex& m, double lambda, const RVec& G,
                         const FgrOptions& opt = {});
std::vector<FgrEntry> fgr_coefficients(const ProfileSet& ps, const FgrOptions& opt = {});

struct FgrCheck {
    bool pass = true;
    double threshold = 1e-8;    // relative to ||G_m||^2
    std::vector<std::string> failures;
};
FgrCheck check_fgr_assumption(const std::vector<FgrEntry>& entries, double rel_threshold = 1e-8);

} // namespace solsel
