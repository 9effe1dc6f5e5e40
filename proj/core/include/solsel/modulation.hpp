#pragma once
// Modulation coordinates u = phi(z) + eta with eta symplectically orthogonal
// to the tangent directions D phi(z) e_j, D phi(z) i e_j, and the per-run
// diagnostics built on top of them.

#include "solsel/dynamics.hpp"
#include "solsel/profile.hpp"

#include <vector>

namespace solsel {

struct ModulationState {
    ZVec z;
    CVec eta;
    double ortho_residual = 0;   // max_k |<i eta, D phi(z) zhat_k>|
    int newton_iters = 0;
    bool fallback = false;       // restarted from the linear guess
};

struct ExtractOptions {
    double rel_tol = 1e-12;      // on ||F|| / ||u||
    int max_iter = 25;
};

// z_j = <u, phi_j> + i <u, i phi_j>
ZVec linear_guess(const ProfileSet& ps, const CVec& u);

ModulationState extract(const ProfileSet& ps, const CVec& u, const ZVec& z_guess, const ExtractOptions& opt = {});

struct DiagnosticSample {
    double t = 0;
    ZVec z;
    ZVec dz;                      // d/dt z by centered differences in the rotating frame
    std::vector<double> zm_abs;   // |z^m|, m in R_min
    double modulation_residual = 0;   // |dz/dt + i varpi z|
    double discrete_residual = 0;     // |dz/dt + i varpi z + i sum_m g_{m,j} z^m|
    double eta_weighted = 0;      // ||cosh(gamma x) eta||
    double eta_local = 0;         // ||eta / cosh(gamma x)||
    double eta_mass = 0;          // ||eta||^2
    double profile_mass = 0;      // ||phi(z)||^2
    double mass = 0;              // ||u||^2
    double absorbed = 0;          // mass removed by the absorber up to t
    double ortho_residual = 0;
    int newton_iters = 0;
    // running discrete-time L2 accumulations up to t
    std::vector<double> acc_zm;   // per m: sqrt(int |z^m|^2)
    double acc_zm_total = 0;      // sum over m of the above
    double acc_modulation = 0;    // sqrt(int modulation_residual^2)
    double acc_discrete = 0;
    double acc_eta_local = 0;     // sqrt(int ||eta/cosh||^2)
};

struct DiagnosticSeries {
    std::vector<MultiIndex> resonant;
    double weight_rate = 0;
    double initial_mass = 0;
    std::vector<DiagnosticSample> samples;

    // summary
    double rho_plus = 0;          // mean of the euclidean |z| over the final window
    double rho_window_spread = 0; // max - min of |z| over the same window
    double window_fraction = 0.2;
    int selected_mode = -1;       // 0-based
    std::vector<double> final_modulus;     // window mean of |z_j|
    std::vector<double> decay_factor;      // |z_j(0)| / final_modulus_j
    std::vector<double> plateau_increment; // per m: (A(T) - A(3T/4)) / A(T)
    double mass_closure = 0;      // max relative |phi mass + eta mass + absorbed - initial|
    double max_ortho = 0;         // max ortho residual / ||u||
    int failed_extractions = 0;
    std::vector<std::string> annotations;
};

// Online variant: feed states in time order, then finish().
class ModulationTracker {
public:
    explicit ModulationTracker(const ProfileSet& ps, double weight_rate = 0, const ExtractOptions& opt = {});
    void observe(double t, const CVec& u, double absorbed);
    DiagnosticSeries finish(double window_fraction = 0.2) const;
    const std::vector<DiagnosticSample>& samples() const { return series_.samples; }

private:
    const ProfileSet& ps_;
    ExtractOptions opt_;
    DiagnosticSeries series_;
    ZVec last_z_;
    bool have_last_ = false;
};

// Offline variant over the stored snapshots of a run.
DiagnosticSeries diagnose_run(const ProfileSet& ps, const RunRecord& rec, double window_fraction = 0.2);

// First time the centered moving average (width `window`) of |z_j| drops to
// half its initial value; NaN if never.
double time_to_half(const std::vector<double>& t, const std::vector<double>& modulus, double window = 5.0);

} // namespace solsel
