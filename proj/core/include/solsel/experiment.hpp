#pragma once
// Scenario definitions and the end-to-end pipeline:
//   spectrum -> index sets -> profile -> damping coefficients -> run -> diagnose

#include "solsel/dynamics.hpp"
#include "solsel/fgr.hpp"
#include "solsel/modulation.hpp"
#include "solsel/profile.hpp"
#include "solsel/reduced.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace solsel {

struct ScenarioSpec {
    std::string name = "custom";
    std::string expected = "selection";   // selection | nonresonance-fail | stress
    Grid grid{60.0, 8192};
    Potential potential;
    Nonlinearity nonlinearity;
    int max_states = 8;
    SpectrumOptions spectrum;
    double zero_energy_threshold = 1e-2;
    double boundary_tol = 1e-10;

    int max_radius = 8;                 // index-set stabilization cap
    int relation_radius = 8;            // integer-relation search radius
    double tol_res = kResonanceTol;
    std::vector<double> omega;          // combinatorics only: use these instead of the computed spectrum

    ProfileOptions profile;
    FgrOptions fgr;
    double fgr_threshold = 1e-8;

    std::vector<cplx> z0;
    SimulationConfig sim;               // absorber_energy <= 0 means "smallest resonant energy"
    double output_interval = 0.05;      // time between modulation samples
    double snapshot_interval = 10.0;
    double window_fraction = 0.2;

    double reduced_dt = 0.01;
    bool include_principal = false;
    double smoothing_window = 5.0;
};

std::vector<std::string> builtin_scenarios();
ScenarioSpec builtin_scenario(const std::string& name);

struct StageCheck {
    std::string stage;        // spectrum | combinatorics | profile | fgr
    std::string assumption;   // what the check stands for
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    bool pass = false;
    std::string failed_stage;
    std::string error_kind;   // exception kind that stopped the chain, if any
    bool numerical_failure = false;
    std::vector<StageCheck> checks;

    std::shared_ptr<const SpectralData> spec;
    std::optional<ZeroEnergyCheck> zero_energy;
    std::optional<MultiIndex> relation;
    std::optional<IndexSets> sets;
    std::shared_ptr<const ProfileSet> profile;
    std::vector<FgrEntry> fgr;
    std::optional<FgrCheck> fgr_check;
};

// Runs the chain and records PASS/FAIL per stage.  Never throws for
// scenario-level failures; they are reported.
ValidationReport validate(const ScenarioSpec& sc);

struct SelectionReport {
    ValidationReport validation;
    ZVec z0;
    RunRecord run;
    DiagnosticSeries diagnostics;
    std::optional<ReducedTrajectory> reduced;
    std::optional<Comparison> comparison;
    std::string reduced_error;

    // verdict
    int selected_mode = -1;
    double rho_plus = 0;
    std::vector<double> decay_factor;
};

// Throws InvalidArgument if validation fails and force is false.  The
// in-place form leaves whatever was computed in `out` when a later stage
// throws (partial run, diagnostics up to the failure).
SelectionReport run_selection_experiment(const ScenarioSpec& sc, bool force = false);
void run_selection_experiment(const ScenarioSpec& sc, SelectionReport& out, bool force = false);

// Pieces of the pipeline, reusable from the CLI.
SimulationConfig resolved_simulation(const ScenarioSpec& sc, const ProfileSet* ps);
ZVec initial_amplitudes(const ScenarioSpec& sc, int n_modes);

} // namespace solsel
