#pragma once
// Split-step Fourier integration of i u_t = H u + g(|u|^2) u.
//
// The basic step is Strang: half a pointwise phase flow for V + g(|u|^2)
// (exact, |u| is invariant under it), a full free flow in Fourier space, and
// the other half.  Both pieces are unitary, so mass is conserved to roundoff.
// simulate() composes Strang steps symmetrically (Yoshida) for 4th or 6th
// order so that bound-state phases stay accurate over long runs.

#include "solsel/absorber.hpp"
#include "solsel/nonlinearity.hpp"
#include "solsel/spectral.hpp"

#include <functional>
#include <map>
#include <memory>
#include <vector>

namespace solsel {

double mass(const Grid& g, const CVec& u);
// E(u) = 1/2 <H u, u> + 1/2 int G(|u|^2),  G' = g, G(0) = 0
double energy(const Hamiltonian& H, const Nonlinearity& nl, const CVec& u);

class SplitStepper {
public:
    SplitStepper(std::shared_ptr<const Hamiltonian> H, Nonlinearity nl, double dt, int order = 2,
                 const Absorber& absorber = {});

    // One step of the configured order; returns the mass removed by the absorber.
    double step(CVec& u) const;
    // A single Strang step of length tau (tau may be negative).
    void strang(CVec& u, double tau) const;

    double dt() const { return dt_; }
    int order() const { return order_; }
    const Absorber& absorber() const { return absorber_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    void nonlinear_phase(CVec& u, double tau) const;
    void free_flow(CVec& u, double tau) const;
    double absorb(CVec& u, double tau) const;

    std::shared_ptr<const Hamiltonian> H_;
    Nonlinearity nl_;
    double dt_;
    int order_;
    Absorber absorber_;
    RVec W_;
    std::vector<double> weights_;
    std::map<double, CVec> phases_;   // free-flow multipliers keyed by tau
    mutable CVec scratch_;
};

// Plain second-order Strang step (no absorber).
void step(const Hamiltonian& H, const Nonlinearity& nl, CVec& u, double dt);

struct SimulationConfig {
    double dt = 0.005;
    double t_final = 1.0;
    int output_stride = 20;       // steps between series samples / observer calls
    int snapshot_stride = 0;      // steps between stored snapshots, 0 = first and last only
    int order = 6;                // 2, 4 or 6
    bool absorber = false;
    double absorber_fraction = 0.15;
    double absorber_strength = -1;   // <= 0: tuned at absorber_energy
    double absorber_energy = 1.0;
    unsigned long long seed = 0;     // recorded for provenance; the stepper is deterministic
};

struct RunRecord {
    Grid grid;
    std::vector<double> times;       // series samples
    std::vector<double> mass, energy, absorbed;
    std::vector<double> snapshot_times;
    std::vector<CVec> snapshots;
    std::vector<double> snapshot_absorbed;
    Absorber absorber;
    bool complete = false;
};

using Observer = std::function<void(double t, const CVec& u, double absorbed)>;

// Fills rec as it goes so a NonFinite abort leaves the partial record behind.
void simulate(std::shared_ptr<const Hamiltonian> H, const Nonlinearity& nl, const CVec& u0,
              const SimulationConfig& cfg, RunRecord& rec, const Observer& obs = {});
RunRecord simulate(std::shared_ptr<const Hamiltonian> H, const Nonlinearity& nl, const CVec& u0,
                   const SimulationConfig& cfg, const Observer& obs = {});

} // namespace solsel
