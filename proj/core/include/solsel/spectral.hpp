#pragma once
// H = -d^2/dx^2 + V on the periodic grid (Fourier Laplacian), its bound
// states, the continuous-spectrum projector, real-energy resolvents and the
// limiting-absorption resolvent (H - lambda - i0)^{-1}.

#include "solsel/absorber.hpp"
#include "solsel/fft.hpp"
#include "solsel/grid.hpp"
#include "solsel/potential.hpp"

#include <memory>
#include <vector>

namespace solsel {

class Hamiltonian {
public:
    Hamiltonian(const Grid& g, const Potential& V);

    const Grid& grid() const { return grid_; }
    const Potential& potential() const { return pot_; }
    const RVec& V() const { return V_; }
    const RVec& k2() const { return k2_; }
    const Fft& fft() const { return *fft_; }

    CVec apply(const CVec& u) const;
    RVec apply(const RVec& u) const;
    CVec kinetic(const CVec& u) const;   // -u''

private:
    Grid grid_;
    Potential pot_;
    RVec V_;
    RVec k2_;
    std::shared_ptr<const Fft> fft_;
};

// Throws GridTooCoarse if V jumps by more than half its sup norm between
// neighbouring cells.
std::shared_ptr<const Hamiltonian> build_operator(const Grid& g, const Potential& V);

struct SpectrumOptions {
    double tol_edge = 1e-3;         // eigenvalues above -tol_edge are not bound states
    double gap_tol = 1e-6;          // simplicity threshold
    double coarse_spacing = 0.25;   // dense solve grid spacing before polishing
    int max_polish = 40;
};

struct SpectralData {
    std::shared_ptr<const Hamiltonian> op;
    std::vector<double> omega;      // ascending
    std::vector<RVec> phi;          // real, L2-normalized, sign-fixed
    std::vector<double> residual;   // ||H phi - omega phi||
    std::vector<double> boundary_amplitude;   // max |phi| over the two edge cells
    std::vector<double> decay_fit;  // fitted tail rate, compare with sqrt(-omega)
    double smallest_abs_box_eigenvalue = 0;   // from the dense coarse solve

    int n_bound() const { return static_cast<int>(omega.size()); }
    const Grid& grid() const { return op->grid(); }
    double default_weight_rate() const;   // half the slowest bound-state decay rate
};

SpectralData discrete_spectrum(std::shared_ptr<const Hamiltonian> op, int max_states,
                               const SpectrumOptions& opt = {});

CVec project_continuous(const SpectralData& s, const CVec& f);
RVec project_continuous(const SpectralData& s, const RVec& f);

struct ResolventOptions {
    double tol_gap = 1e-3;
    double rel_tol = 1e-12;    // PCG target
    double accept_tol = 1e-8;  // final residual check
    int max_iter = 4000;
    int exclude = -1;          // bound state whose component is dropped (deflated solve)
};

// (H - lambda)^{-1} f for real lambda off the spectrum.  With opt.exclude = j
// this is the reduced resolvent on {phi_j}^perp and lambda may equal omega_j.
CVec resolvent_solve(const SpectralData& s, double lambda, const CVec& f, const ResolventOptions& opt = {});
RVec resolvent_solve(const SpectralData& s, double lambda, const RVec& f, const ResolventOptions& opt = {});

// (H - lambda)^{-1} restricted to the orthogonal complement of phi_j, at lambda = omega_j.
RVec reduced_resolvent(const SpectralData& s, int j, const RVec& f);

// Threshold surrogate for "zero is neither an eigenvalue nor a resonance":
// integrate H psi = 0 from the far left with psi = 1; a bounded solution at
// the far right means a zero-energy resonance.  The indicator is the
// right-end data psi = a + b x; the indicator is |b| / hypot(a, b).
struct ZeroEnergyCheck {
    double slope_indicator = 0;
    double smallest_box_eigenvalue = 0;   // min |eigenvalue| of the dense coarse solve
    double threshold = 0;
    bool pass = false;
};
ZeroEnergyCheck zero_energy_check(const SpectralData& s, double threshold = 1e-2);

struct AbsorptionOptions {
    std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
    double layer_fraction = 0.15;
    double cap_strength = -1;     // <= 0: tune automatically
    // When tuning, the layer is widened by padding cells outside [-L, L]
    // until the free-wave reflection drops below the target, up to a total
    // width of max_layer_fraction * L.
    double reflection_target = 1e-4;
    double max_layer_fraction = 1.0;
    double tol_edge = 1e-3;
    double max_rel_spread = 0.05;
    bool throw_if_unstable = true;
};

struct AbsorptionResult {
    CVec w;                           // extrapolated (H - lambda - i0)^{-1} f
    std::vector<double> eps;
    std::vector<double> values;       // <w_eps, i f> = Im int w_eps conj(f)
    std::vector<double> extrapolants; // Neville estimates using the k smallest eps
    double value = 0;                 // extrapolated functional
    double principal = 0;             // Re int w conj(f) (principal-value part)
    double rel_spread = 0;
    bool stable = false;
    Absorber absorber;            // on the padded domain
    int padding = 0;              // cells added on each side
};

// Solves (H_fd - i W - lambda - i eps) w = f on an 8th-order finite-difference
// version of H with hard walls and an absorbing layer, then extrapolates eps -> 0.
// w is returned on the original grid.
AbsorptionResult limiting_absorption(const SpectralData& s, double lambda, const CVec& f,
                                     const AbsorptionOptions& opt = {});

// Left/right scattering states at energy k^2 obtained by integrating the ODE
// with the analytic potential; psi_L ~ e^{ikx} + r e^{-ikx} on the left.
struct ScatteringPair {
    CVec left, right;
    double k = 0;
};
ScatteringPair scattering_states(const SpectralData& s, double lambda);

// Im <(H - lambda - i0)^{-1} f, f> through the scattering-state expansion:
// sum_{L,R} |int f conj(psi)|^2 / (4k).
double spectral_density_pairing(const SpectralData& s, double lambda, const CVec& f);

} // namespace solsel
