#include "solsel/fgr.hpp"

#include "solsel/errors.hpp"

namespace solsel {

FgrEntry fgr_coefficient(const SpectralData& spec, const MultiIndex& m, double lambda, const RVec& G,
                         const FgrOptions& opt) {
    FgrEntry e;
    e.m = m;
    e.lambda = lambda;
    const Grid& g = spec.grid();
    e.source_norm2 = g.inner(G, G);
    const CVec f = project_continuous(spec, CVec(G.cast<cplx>()));
    if (g.norm(f) <= 1e-14 * std::max(std::sqrt(e.source_norm2), 1e-300)) {
        e.stable = true;
        e.degenerate = true;
        return e;
    }
    // the pairing against G equals the pairing against P_c G: the bound
    // components of (H - lambda - i0)^{-1} P_c G vanish
    const AbsorptionResult a = limiting_absorption(spec, lambda, f, opt.absorption);
    e.gamma = a.value;
    e.principal = a.principal;
    e.eps = a.eps;
    e.table = a.values;
    e.extrapolants = a.extrapolants;
    e.rel_spread = a.rel_spread;
    e.stable = a.stable;
    e.cap_strength = a.absorber.strength;
    e.cap_width = a.absorber.width;
    e.cap_reflection = a.absorber.reflection;
    e.degenerate = e.gamma < 1e-10;
    if (opt.cross_check) e.cross_check = spectral_density_pairing(spec, lambda, f);
    return e;
}

std::vector<FgrEntry> fgr_coefficients(const ProfileSet& ps, const FgrOptions& opt) {
    std::vector<FgrEntry> out;
    for (const auto& m : ps.sets.minimal_resonant)
        out.push_back(fgr_coefficient(*ps.spec, m, m.dot(ps.omega), ps.resonant.at(m), opt));
    return out;
}

FgrCheck check_fgr_assumption(const std::vector<FgrEntry>& entries, double rel_threshold) {
    FgrCheck c;
    c.threshold = rel_threshold;
    for (const auto& e : entries) {
        if (!e.stable) {
            c.pass = false;
            c.failures.push_back(e.m.str() + ": eps extrapolation unstable");
        } else if (!(e.gamma > rel_threshold * e.source_norm2)) {
            c.pass = false;
            c.failures.push_back(e.m.str() + ": gamma = " + std::to_string(e.gamma) + " not above threshold");
        }
    }
    return c;
}

} // namespace solsel
