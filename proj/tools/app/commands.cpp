#include "commands.hpp"

#include "config.hpp"
#include "report.hpp"

#include "solsel/errors.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace solsel::app {

namespace fs = std::filesystem;

namespace {

std::ostream& log(const Context& ctx) { return ctx.log ? *ctx.log : std::cout; }

std::string path(const Context& ctx, const std::string& file) {
    fs::create_directories(ctx.out_dir);
    return (fs::path(ctx.out_dir) / file).string();
}

template <class F>
void write_file(const std::string& p, F&& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + p + "'");
    body(out);
}

std::string scenario_text(const ScenarioSpec& sc) {
    std::ostringstream os;
    write_scenario(os, sc);
    return os.str();
}

json document(const ScenarioSpec& sc, const std::string& kind) {
    json j = provenance(sc, sc.sim.seed);
    j["kind"] = kind;
    return j;
}

void save_scenario(const ScenarioSpec& sc, const Context& ctx) { write_text(path(ctx, "scenario.ini"), scenario_text(sc)); }

std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

// Validation chain up to and including `last` (spectrum | combinatorics | profile | fgr).
ValidationReport checked_chain(const ScenarioSpec& sc, const Context& ctx, bool require_pass) {
    ValidationReport v = validate(sc);
    if (!v.pass && require_pass && !ctx.force) {
        write_json(path(ctx, "validation.json"), [&] {
            json j = document(sc, "validation");
            j["validation"] = to_json(v);
            return j;
        }());
        if (v.numerical_failure) throw NoConvergence("validation stopped at stage " + v.failed_stage + ": " + v.error_kind);
        throw InvalidArgument("scenario '" + sc.name + "' failed validation at stage " + v.failed_stage +
                              " (use --force to run anyway)");
    }
    return v;
}

std::shared_ptr<const ProfileSet> need_profile(const ValidationReport& v) {
    if (!v.profile) throw InvalidArgument("no profile could be built (failed at stage " + v.failed_stage + ")");
    return v.profile;
}

void print_checks(const ValidationReport& v, std::ostream& out) {
    for (const auto& c : v.checks)
        out << (c.pass ? "PASS " : "FAIL ") << c.stage << ": " << c.assumption << " - " << c.detail << "\n";
}

ScalingStudy default_scaling(const ProfileSet& ps) { return residual_scaling(ps, log_space(1e-3, 1e-1, 9)); }

std::vector<IdentityCheck> identity_checks(const ProfileSet& ps, unsigned long long seed) {
    std::vector<IdentityCheck> out;
    for (const auto& [z, dz] : identity_samples(ps.dim(), 10, 0.02, seed)) out.push_back(derivative_identity(ps, z, dz));
    return out;
}

// ---- subcommands ----

int cmd_spectrum(const ScenarioSpec& sc, const Context& ctx) {
    auto op = build_operator(sc.grid, sc.potential);
    const SpectralData s = discrete_spectrum(op, sc.max_states, sc.spectrum);
    const ZeroEnergyCheck z = zero_energy_check(s, sc.zero_energy_threshold);
    json j = document(sc, "spectrum");
    j["spectrum"] = to_json(s);
    j["zero_energy"] = to_json(z);
    write_json(path(ctx, "spectrum.json"), j);
    write_file(path(ctx, "eigenfunctions.csv"), [&](std::ostream& o) { write_eigenfunctions_csv(o, s); });
    save_scenario(sc, ctx);
    auto& out = log(ctx);
    for (int k = 0; k < s.n_bound(); ++k)
        out << "omega_" << k + 1 << " = " << fmt(s.omega[k], 15) << "  residual " << fmt(s.residual[k], 3) << "  decay fit "
            << fmt(s.decay_fit[k], 4) << " (expected " << fmt(std::sqrt(-s.omega[k]), 4) << ")\n";
    out << "zero energy: indicator " << fmt(z.slope_indicator, 3) << (z.pass ? " PASS" : " FAIL") << "\n";
    return kExitOk;
}

int cmd_combinatorics(const ScenarioSpec& sc, const Context& ctx) {
    std::vector<double> omega = sc.omega;
    if (omega.empty()) {
        auto op = build_operator(sc.grid, sc.potential);
        omega = discrete_spectrum(op, sc.max_states, sc.spectrum).omega;
    }
    for (std::size_t k = 0; k < omega.size(); ++k) {
        if (!(omega[k] < 0)) throw InvalidArgument("frequencies must be negative");
        if (k > 0 && !(omega[k] > omega[k - 1])) throw InvalidArgument("frequencies must be strictly increasing");
    }
    const auto relation = find_integer_relation(omega, sc.relation_radius, sc.tol_res);
    json j = document(sc, "combinatorics");
    j["omega"] = omega;
    j["integer_relation"] = relation ? to_json(*relation) : json(nullptr);
    auto& out = log(ctx);
    int code = kExitOk;
    if (relation) {
        out << "integer relation m = " << relation->str() << ", |m.omega| = " << fmt(std::abs(relation->dot(omega)), 3) << "\n";
        j["pass"] = false;
        code = kExitValidation;
    } else {
        const IndexSets sets = index_sets_upto(omega, sc.max_radius, sc.tol_res);
        j.update(to_json(sets));
        j["pass"] = sets.stabilized;
        out << "R_min:";
        for (const auto& m : sets.minimal_resonant) out << " " << m.str();
        out << "\nNR_1:";
        for (const auto& m : sets.truncated_nonresonant) out << " " << m.str();
        out << "\nradius " << sets.radius_used << (sets.stabilized ? ", stabilized\n" : ", NOT stabilized\n");
        if (!sets.stabilized) code = kExitValidation;
    }
    write_json(path(ctx, "combinatorics.json"), j);
    save_scenario(sc, ctx);
    return code;
}

int cmd_profile(const ScenarioSpec& sc, const Context& ctx) {
    const ValidationReport v = validate(sc);
    if (!v.profile) {
        print_checks(v, log(ctx));
        throw InvalidArgument("no profile could be built (failed at stage " + v.failed_stage + ")");
    }
    const ProfileSet& ps = *v.profile;
    const ScalingStudy st = default_scaling(ps);
    const auto ids = identity_checks(ps, sc.sim.seed);
    json j = document(sc, "profile");
    j["profile"] = profile_json(ps, st, ids);
    write_json(path(ctx, "profile.json"), j);
    std::map<MultiIndex, RVec> nonunit;
    for (const auto& [m, f] : ps.corrections)
        if (!m.is_unit()) nonunit.emplace(m, f);
    write_file(path(ctx, "corrections.csv"), [&](std::ostream& o) { write_profile_csv(o, ps.grid(), nonunit, "phi"); });
    write_file(path(ctx, "resonant.csv"), [&](std::ostream& o) { write_profile_csv(o, ps.grid(), ps.resonant, "G"); });
    write_file(path(ctx, "residual_scaling.csv"), [&](std::ostream& o) { write_scaling_csv(o, st); });
    save_scenario(sc, ctx);
    auto& out = log(ctx);
    for (std::size_t k = 0; k < st.slope.size(); ++k) out << "residual slope along e_" << k + 1 << ": " << fmt(st.slope[k], 4) << "\n";
    double worst = 0;
    for (const auto& c : ids) worst = std::max(worst, c.rel_error);
    out << "derivative identity: max relative error " << fmt(worst, 3) << " over " << ids.size() << " samples\n";
    return kExitOk;
}

int cmd_fgr(const ScenarioSpec& sc, const Context& ctx) {
    const ValidationReport v = validate(sc);
    if (!v.profile || (v.fgr.empty() && !v.sets->minimal_resonant.empty())) {
        print_checks(v, log(ctx));
        if (v.numerical_failure) throw NoConvergence("stopped at stage " + v.failed_stage + ": " + v.error_kind);
        throw InvalidArgument("damping coefficients unavailable (failed at stage " + v.failed_stage + ")");
    }
    json j = document(sc, "fgr");
    json entries = json::array();
    for (const auto& e : v.fgr) entries.push_back(to_json(e));
    j["entries"] = entries;
    j["check"] = to_json(*v.fgr_check);
    j["pass"] = v.fgr_check->pass;
    write_json(path(ctx, "fgr.json"), j);
    write_file(path(ctx, "fgr_table.csv"), [&](std::ostream& o) { write_fgr_table_csv(o, v.fgr); });
    save_scenario(sc, ctx);
    auto& out = log(ctx);
    for (const auto& e : v.fgr)
        out << e.m.str() << ": lambda " << fmt(e.lambda, 8) << "  gamma " << fmt(e.gamma, 8) << "  cross-check "
            << fmt(e.cross_check, 8) << "  spread " << fmt(e.rel_spread, 2) << (e.stable ? "" : "  UNSTABLE") << "\n";
    out << "damping assumption " << (v.fgr_check->pass ? "PASS" : "FAIL") << "\n";
    return v.fgr_check->pass ? kExitOk : kExitValidation;
}

void write_run(const ScenarioSpec& sc, const Context& ctx, const RunRecord& rec, const std::string& error) {
    json snaps = json::array();
    fs::create_directories(fs::path(ctx.out_dir) / "snapshots");
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshots/u_%05zu.csv", k);
        write_file(path(ctx, name), [&](std::ostream& o) { write_snapshot_csv(o, rec.grid, rec.snapshots[k]); });
        snaps.push_back({{"t", rec.snapshot_times[k]},
                         {"absorbed", k < rec.snapshot_absorbed.size() ? rec.snapshot_absorbed[k] : 0.0},
                         {"file", name}});
    }
    write_file(path(ctx, "series.csv"), [&](std::ostream& o) { write_series_csv(o, rec); });
    json j = document(sc, "run");
    j["config_ini"] = scenario_text(sc);
    j["complete"] = rec.complete;
    j["error"] = error;
    j["absorber"] = to_json(rec.absorber);
    j["series"] = "series.csv";
    j["snapshots"] = snaps;
    j["grid"] = {{"half_length", rec.grid.half_length}, {"points", rec.grid.n}};
    write_json(path(ctx, "run.json"), j);
    save_scenario(sc, ctx);
}

int cmd_simulate(const ScenarioSpec& sc, const Context& ctx) {
    const ValidationReport v = checked_chain(sc, ctx, true);
    const ProfileSet& ps = *need_profile(v);
    const ZVec z0 = initial_amplitudes(sc, ps.dim());
    const SimulationConfig cfg = resolved_simulation(sc, &ps);
    RunRecord rec;
    try {
        simulate(ps.spec->op, ps.nl, assemble_phi(ps, z0), cfg, rec);
    } catch (const Error& e) {
        write_run(sc, ctx, rec, e.what());
        throw;
    }
    write_run(sc, ctx, rec, "");
    auto& out = log(ctx);
    out << "simulated to t = " << fmt(rec.times.empty() ? 0 : rec.times.back()) << ", " << rec.snapshots.size()
        << " snapshots, final mass " << fmt(rec.mass.back(), 10) << ", absorbed " << fmt(rec.absorbed.back(), 4) << "\n";
    return kExitOk;
}

int cmd_diagnose(const ScenarioSpec& sc_cli, const Context& ctx) {
    const std::string dir = ctx.run_dir.empty() ? ctx.out_dir : ctx.run_dir;
    const json manifest = read_json((fs::path(dir) / "run.json").string());
    std::istringstream ini(manifest.at("config_ini").get<std::string>());
    ScenarioSpec sc = parse_scenario(ini, "run.json");
    sc.sim.seed = sc_cli.sim.seed;
    const ValidationReport v = checked_chain(sc, ctx, true);
    const ProfileSet& ps = *need_profile(v);

    RunRecord rec;
    rec.grid = ps.grid();
    for (const auto& s : manifest.at("snapshots")) {
        std::ifstream in((fs::path(dir) / s.at("file").get<std::string>()).string());
        if (!in) throw InvalidArgument("missing snapshot " + s.at("file").get<std::string>());
        const CsvTable t = read_csv(in);
        if (static_cast<int>(t.size()) != rec.grid.n) throw InvalidArgument("snapshot size does not match the grid");
        CVec u(rec.grid.n);
        const int re = t.column("re_u"), im = t.column("im_u");
        for (int i = 0; i < rec.grid.n; ++i) u[i] = cplx(t.value(i, re), t.value(i, im));
        rec.snapshot_times.push_back(s.at("t").get<double>());
        rec.snapshot_absorbed.push_back(s.at("absorbed").get<double>());
        rec.snapshots.push_back(std::move(u));
    }
    const DiagnosticSeries d = diagnose_run(ps, rec, sc.window_fraction);
    json j = document(sc, "diagnostics");
    j["source"] = "snapshots";
    j["diagnostics"] = to_json(d);
    write_json(path(ctx, "diagnostics.json"), j);
    write_file(path(ctx, "diagnostics.csv"), [&](std::ostream& o) { write_diagnostics_csv(o, d); });
    auto& out = log(ctx);
    out << "diagnosed " << d.samples.size() << " snapshots; rho_plus " << fmt(d.rho_plus) << ", selected mode "
        << d.selected_mode + 1 << ", mass closure " << fmt(d.mass_closure, 3) << "\n";
    return kExitOk;
}

ReducedTrajectory reduced_run(const ScenarioSpec& sc, const ValidationReport& v, const ZVec& z0) {
    const ProfileSet& ps = *need_profile(v);
    const ReducedModel model = make_reduced_model(ps, v.fgr, sc.include_principal);
    const int stride = std::max(1, static_cast<int>(std::lround(sc.output_interval / sc.reduced_dt)));
    return integrate_reduced(model, z0, sc.reduced_dt, sc.sim.t_final, stride);
}

int cmd_reduce(const ScenarioSpec& sc, const Context& ctx) {
    const ValidationReport v = checked_chain(sc, ctx, true);
    const ProfileSet& ps = *need_profile(v);
    const ZVec z0 = initial_amplitudes(sc, ps.dim());
    const ReducedTrajectory tr = reduced_run(sc, v, z0);
    json j = document(sc, "reduced");
    j["z0"] = zvec_json(z0);
    j["samples"] = tr.times.size();
    j["final"] = zvec_json(tr.z.back());
    j["cumulative_damping"] = tr.cumulative_damping.back();
    write_json(path(ctx, "reduced.json"), j);
    write_file(path(ctx, "reduced.csv"), [&](std::ostream& o) { write_reduced_csv(o, tr, ps.sets.minimal_resonant); });
    save_scenario(sc, ctx);
    auto& out = log(ctx);
    out << "reduced model to t = " << fmt(tr.times.back()) << ":";
    for (Eigen::Index k = 0; k < tr.z.back().size(); ++k) out << " |z_" << k + 1 << "| = " << fmt(std::abs(tr.z.back()[k]));
    out << "\n";
    return kExitOk;
}

// Full-model samples from a diagnostics.csv (only t and z are needed for the comparison).
DiagnosticSeries read_diagnostics(const std::string& file, int n_modes) {
    std::ifstream in(file);
    if (!in) throw InvalidArgument("cannot open '" + file + "'");
    const CsvTable t = read_csv(in);
    DiagnosticSeries d;
    const int ct = t.column("t");
    for (std::size_t r = 0; r < t.size(); ++r) {
        DiagnosticSample s;
        s.t = t.value(r, ct);
        s.z = ZVec(n_modes);
        for (int j = 0; j < n_modes; ++j) {
            const int a = t.column("re_z" + std::to_string(j + 1)), b = t.column("im_z" + std::to_string(j + 1));
            if (a < 0 || b < 0) throw InvalidArgument(file + ": missing amplitude columns for mode " + std::to_string(j + 1));
            s.z[j] = cplx(t.value(r, a), t.value(r, b));
        }
        d.samples.push_back(std::move(s));
    }
    return d;
}

void write_comparison(const ScenarioSpec& sc, const Context& ctx, const Comparison& c) {
    json j = document(sc, "comparison");
    j["comparison"] = to_json(c);
    write_json(path(ctx, "comparison.json"), j);
    write_file(path(ctx, "comparison.csv"), [&](std::ostream& o) { write_comparison_csv(o, c); });
}

void print_comparison(const Comparison& c, std::ostream& out) {
    for (std::size_t k = 0; k < c.t_half_full.size(); ++k)
        out << "mode " << k + 1 << ": time to half reduced " << fmt(c.t_half_reduced[k]) << ", full " << fmt(c.t_half_full[k])
            << ", ratio " << fmt(c.rate_ratio[k], 4) << "\n";
}

int cmd_select(const ScenarioSpec& sc, const Context& ctx);

int cmd_compare(const ScenarioSpec& sc, const Context& ctx) {
    if (ctx.run_dir.empty()) return cmd_select(sc, ctx);   // nothing to compare against yet: run everything
    const ValidationReport v = checked_chain(sc, ctx, true);
    const ProfileSet& ps = *need_profile(v);
    const ZVec z0 = initial_amplitudes(sc, ps.dim());
    const DiagnosticSeries full = read_diagnostics((fs::path(ctx.run_dir) / "diagnostics.csv").string(), ps.dim());
    const ReducedTrajectory tr = reduced_run(sc, v, z0);
    const Comparison c = compare(tr, full, sc.smoothing_window);
    write_file(path(ctx, "reduced.csv"), [&](std::ostream& o) { write_reduced_csv(o, tr, ps.sets.minimal_resonant); });
    write_comparison(sc, ctx, c);
    save_scenario(sc, ctx);
    print_comparison(c, log(ctx));
    return kExitOk;
}

int cmd_validate(const ScenarioSpec& sc, const Context& ctx) {
    const ValidationReport v = validate(sc);
    json j = document(sc, "validation");
    j["validation"] = to_json(v);
    write_json(path(ctx, "validation.json"), j);
    save_scenario(sc, ctx);
    print_checks(v, log(ctx));
    log(ctx) << "validation " << (v.pass ? "PASS" : "FAIL") << "\n";
    if (v.pass) return kExitOk;
    return v.numerical_failure ? kExitNumerical : kExitValidation;
}

int cmd_select(const ScenarioSpec& sc, const Context& ctx) {
    SelectionReport r;
    std::string error;
    int code = kExitOk;
    try {
        run_selection_experiment(sc, r, ctx.force);
    } catch (const Error& e) {
        error = e.what();
        code = e.numerical() ? kExitNumerical : kExitValidation;
    }
    auto& out = log(ctx);
    print_checks(r.validation, out);

    // whatever exists is written, also after a failure
    json j = document(sc, "selection");
    j.update(selection_json(r));
    j["error"] = error;
    if (r.validation.profile) {
        const ProfileSet& ps = *r.validation.profile;
        const ScalingStudy st = default_scaling(ps);
        j["profile"] = profile_json(ps, st, identity_checks(ps, sc.sim.seed));
        write_file(path(ctx, "residual_scaling.csv"), [&](std::ostream& o) { write_scaling_csv(o, st); });
        write_file(path(ctx, "fgr_table.csv"), [&](std::ostream& o) { write_fgr_table_csv(o, r.validation.fgr); });
    }
    if (!r.run.times.empty()) write_file(path(ctx, "series.csv"), [&](std::ostream& o) { write_series_csv(o, r.run); });
    if (!r.diagnostics.samples.empty())
        write_file(path(ctx, "diagnostics.csv"), [&](std::ostream& o) { write_diagnostics_csv(o, r.diagnostics); });
    if (r.reduced && r.validation.profile)
        write_file(path(ctx, "reduced.csv"),
                   [&](std::ostream& o) { write_reduced_csv(o, *r.reduced, r.validation.profile->sets.minimal_resonant); });
    if (r.comparison) write_comparison(sc, ctx, *r.comparison);
    write_json(path(ctx, "report.json"), j);
    save_scenario(sc, ctx);

    if (!error.empty()) {
        out << "error: " << error << "\n";
        return code;
    }
    out << "selected mode " << r.selected_mode + 1 << ", rho_plus " << fmt(r.rho_plus) << ", decay factors";
    for (double d : r.decay_factor) out << " " << fmt(d, 4);
    out << "\nplateau increment";
    for (double p : r.diagnostics.plateau_increment) out << " " << fmt(p, 3);
    out << ", rho window spread " << fmt(r.diagnostics.rho_window_spread / r.diagnostics.rho_plus, 3) << " (relative)"
        << ", mass closure " << fmt(r.diagnostics.mass_closure, 3) << "\n";
    if (r.comparison) print_comparison(*r.comparison, out);
    if (!r.reduced_error.empty()) out << "reduced model: " << r.reduced_error << "\n";
    return kExitOk;
}

} // namespace

std::vector<std::pair<ZVec, ZVec>> identity_samples(int n, int count, double scale, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::pair<ZVec, ZVec>> out;
    for (int k = 0; k < count; ++k) {
        ZVec z(n), dz(n);
        for (int j = 0; j < n; ++j) {
            z[j] = cplx(u(rng), u(rng)) * (scale / n);
            dz[j] = cplx(u(rng), u(rng));
        }
        out.emplace_back(z, dz);
    }
    return out;
}

const std::map<std::string, Command>& commands() {
    static const std::map<std::string, Command> table{
        {"spectrum", cmd_spectrum}, {"combinatorics", cmd_combinatorics}, {"profile", cmd_profile},
        {"fgr", cmd_fgr},           {"simulate", cmd_simulate},           {"diagnose", cmd_diagnose},
        {"reduce", cmd_reduce},     {"compare", cmd_compare},             {"validate", cmd_validate},
        {"select", cmd_select},
    };
    return table;
}

int run_command(const std::string& name, const ScenarioSpec& sc, const Context& ctx) {
    auto it = commands().find(name);
    if (it == commands().end()) {
        log(ctx) << "error: unknown command '" << name << "'\n";
        return kExitValidation;
    }
    try {
        return it->second(sc, ctx);
    } catch (const Error& e) {
        log(ctx) << "error: " << e.what() << "\n";
        return e.numerical() ? kExitNumerical : kExitValidation;
    } catch (const std::exception& e) {
        log(ctx) << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace solsel::app
