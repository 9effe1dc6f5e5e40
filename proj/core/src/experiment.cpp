#include "solsel/experiment.hpp"

#include "solsel/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace solsel {

std::vector<std::string> builtin_scenarios() { return {"pt2-generic", "pt2-resonant-fail", "triple-well"}; }

ScenarioSpec builtin_scenario(const std::string& name) {
    ScenarioSpec sc;
    sc.name = name;
    if (name == "pt2-generic") {
        // Poschl-Teller well broken by a small off-centre bump: two bound states,
        // generic frequencies, one minimal resonance (-1,2).  The focusing cubic
        // coupling is large so the radiation-damping time scale fits in t = 300
        // at amplitude 0.03.
        sc.expected = "selection";
        sc.grid = Grid(60.0, 8192);
        sc.potential = Potential({Well{Well::Shape::Sech2, 5.04, 1.0, 0.0}, Well{Well::Shape::Gauss, 0.3, 1.0, 0.4}});
        sc.nonlinearity = Nonlinearity::cubic(-1000.0);
        sc.z0 = {0.03, 0.03};
        sc.sim.dt = 0.005;
        sc.sim.t_final = 300.0;
        sc.sim.absorber = true;
        sc.sim.absorber_energy = -1;
        return sc;
    }
    if (name == "pt2-resonant-fail") {
        // exact Poschl-Teller: omega = (-4, -1) satisfies omega_1 = 4 omega_2
        sc.expected = "nonresonance-fail";
        sc.grid = Grid(40.0, 4096);
        sc.potential = Potential::sech2(6.0);
        sc.nonlinearity = Nonlinearity::cubic(-1.0);
        sc.z0 = {0.03, 0.03};
        sc.sim.t_final = 10.0;
        return sc;
    }
    if (name == "triple-well") {
        sc.expected = "stress";
        sc.grid = Grid(60.0, 8192);
        sc.potential = Potential({Well{Well::Shape::Gauss, 3.0, 1.0, -3.5}, Well{Well::Shape::Gauss, 3.4, 1.0, 0.0},
                                  Well{Well::Shape::Gauss, 2.7, 1.0, 3.7}});
        sc.nonlinearity = Nonlinearity::cubic(-200.0);
        sc.z0 = {0.02, 0.02, 0.02};
        sc.sim.t_final = 100.0;
        sc.sim.absorber = true;
        sc.sim.absorber_energy = -1;
        return sc;
    }
    throw InvalidArgument("unknown scenario '" + name + "'");
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

ValidationReport validate(const ScenarioSpec& sc) {
    ValidationReport rep;
    std::string stage = "spectrum";
    auto add = [&](std::string assumption, bool pass, std::string detail) {
        rep.checks.push_back({stage, std::move(assumption), pass, std::move(detail)});
        if (!pass && rep.failed_stage.empty()) rep.failed_stage = stage;
    };
    try {
        auto op = build_operator(sc.grid, sc.potential);
        auto spec = std::make_shared<SpectralData>(discrete_spectrum(op, sc.max_states, sc.spectrum));
        rep.spec = spec;
        double worst_res = 0, worst_edge = 0;
        for (int j = 0; j < spec->n_bound(); ++j) {
            worst_res = std::max(worst_res, spec->residual[j] / std::abs(spec->omega[j]));
            worst_edge = std::max(worst_edge, spec->boundary_amplitude[j]);
        }
        add("eigen-residual", worst_res <= 1e-8, "max ||H phi - omega phi|| / |omega| = " + fmt(worst_res));
        add("bound states decay inside the box", worst_edge <= sc.boundary_tol, "max edge amplitude = " + fmt(worst_edge));
        rep.zero_energy = zero_energy_check(*spec, sc.zero_energy_threshold);
        add("zero is not an eigenvalue or resonance", rep.zero_energy->pass,
            "slope indicator = " + fmt(rep.zero_energy->slope_indicator) + " (threshold " + fmt(sc.zero_energy_threshold) +
                "), smallest |box eigenvalue| = " + fmt(rep.zero_energy->smallest_box_eigenvalue));

        stage = "combinatorics";
        double gap = std::numeric_limits<double>::infinity();
        for (int j = 1; j < spec->n_bound(); ++j) gap = std::min(gap, spec->omega[j] - spec->omega[j - 1]);
        add("eigenvalues simple", true, spec->n_bound() > 1 ? "min gap = " + fmt(gap) : "single eigenvalue");
        rep.relation = find_integer_relation(spec->omega, sc.relation_radius, sc.tol_res);
        if (rep.relation) {
            add("frequencies nonresonant", false,
                "m = " + rep.relation->str() + " has |m.omega| = " + fmt(std::abs(rep.relation->dot(spec->omega))));
        } else {
            add("frequencies nonresonant", true, "no integer relation with ||m|| <= " + std::to_string(sc.relation_radius));
        }
        rep.sets = index_sets_stabilized(spec->omega, sc.max_radius, sc.tol_res);
        add("index sets stabilized", rep.sets->stabilized,
            "radius " + std::to_string(rep.sets->radius_used) + ", |R_min| = " + std::to_string(rep.sets->minimal_resonant.size()) +
                ", |NR_1| = " + std::to_string(rep.sets->truncated_nonresonant.size()));
        if (!rep.failed_stage.empty()) {
            rep.pass = false;
            return rep;
        }

        stage = "profile";
        auto ps = std::make_shared<ProfileSet>(build_profile_set(spec, *rep.sets, sc.nonlinearity, sc.profile));
        rep.profile = ps;
        const double cons = sc.nonlinearity.consistency_error();
        add("nonlinearity derivatives consistent", cons < 1e-4, "relative mismatch = " + fmt(cons));
        add("nonlinearity growth", std::isfinite(sc.nonlinearity.growth_constant()),
            "sup |g(s)|/(1+s)^2 = " + fmt(sc.nonlinearity.growth_constant()));

        stage = "fgr";
        rep.fgr = fgr_coefficients(*ps, sc.fgr);
        rep.fgr_check = check_fgr_assumption(rep.fgr, sc.fgr_threshold);
        std::string d;
        for (const auto& e : rep.fgr) d += e.m.str() + ": gamma = " + fmt(e.gamma) + ", lambda = " + fmt(e.lambda) + "; ";
        if (rep.fgr.empty()) d = "no resonant indices";
        add("radiation damping positive", rep.fgr_check->pass, d);
    } catch (const Error& e) {
        rep.error_kind = e.kind();
        rep.numerical_failure = e.numerical();
        add(e.kind(), false, e.what());
    }
    rep.pass = rep.failed_stage.empty();
    return rep;
}

ZVec initial_amplitudes(const ScenarioSpec& sc, int n_modes) {
    ZVec z = ZVec::Zero(n_modes);
    if (static_cast<int>(sc.z0.size()) > n_modes)
        throw InvalidArgument("z0 has more entries than there are bound states");
    for (std::size_t j = 0; j < sc.z0.size(); ++j) z[j] = sc.z0[j];
    return z;
}

SimulationConfig resolved_simulation(const ScenarioSpec& sc, const ProfileSet* ps) {
    SimulationConfig cfg = sc.sim;
    cfg.output_stride = std::max(1, static_cast<int>(std::lround(sc.output_interval / cfg.dt)));
    cfg.snapshot_stride = sc.snapshot_interval > 0 ? std::max(1, static_cast<int>(std::lround(sc.snapshot_interval / cfg.dt))) : 0;
    if (cfg.absorber && !(cfg.absorber_energy > 0)) {
        double e = 1.0;
        if (ps && !ps->sets.minimal_resonant.empty()) {
            e = std::numeric_limits<double>::infinity();
            for (const auto& m : ps->sets.minimal_resonant) e = std::min(e, m.dot(ps->omega));
        }
        cfg.absorber_energy = e;
    }
    return cfg;
}

SelectionReport run_selection_experiment(const ScenarioSpec& sc, bool force) {
    SelectionReport out;
    run_selection_experiment(sc, out, force);
    return out;
}

void run_selection_experiment(const ScenarioSpec& sc, SelectionReport& out, bool force) {
    out.validation = validate(sc);
    if (!out.validation.pass && !force)
        throw InvalidArgument("scenario '" + sc.name + "' failed validation at stage " + out.validation.failed_stage);
    if (!out.validation.profile)
        throw InvalidArgument("scenario '" + sc.name + "' cannot run: no profile was built (stage " + out.validation.failed_stage + ")");
    const ProfileSet& ps = *out.validation.profile;
    out.z0 = initial_amplitudes(sc, ps.dim());
    const CVec u0 = assemble_phi(ps, out.z0);
    const SimulationConfig cfg = resolved_simulation(sc, &ps);

    ModulationTracker tracker(ps);
    try {
        simulate(ps.spec->op, ps.nl, u0, cfg, out.run,
                 [&](double t, const CVec& u, double absorbed) { tracker.observe(t, u, absorbed); });
    } catch (const Error&) {
        out.diagnostics = tracker.finish(sc.window_fraction);
        throw;
    }
    out.diagnostics = tracker.finish(sc.window_fraction);

    try {
        const ReducedModel model = make_reduced_model(ps, out.validation.fgr, sc.include_principal);
        const int stride = std::max(1, static_cast<int>(std::lround(sc.output_interval / sc.reduced_dt)));
        out.reduced = integrate_reduced(model, out.z0, sc.reduced_dt, cfg.t_final, stride);
        out.comparison = compare(*out.reduced, out.diagnostics, sc.smoothing_window);
    } catch (const Error& e) {
        out.reduced_error = e.what();
    }
    out.selected_mode = out.diagnostics.selected_mode;
    out.rho_plus = out.diagnostics.rho_plus;
    out.decay_factor = out.diagnostics.decay_factor;
}

} // namespace solsel
