#include "report.hpp"

#include "solsel/errors.hpp"
#include "solsel/version.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace solsel::app {

namespace {

// NaN/inf are not JSON; they become null
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

class Row {
public:
    explicit Row(std::ostream& out) : out_(out) {}
    ~Row() { out_ << '\n'; }
    Row& operator<<(double v) {
        sep();
        if (std::isnan(v)) out_ << "nan";
        else {
            char buf[32];
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out_.write(buf, p - buf);
        }
        return *this;
    }
    Row& operator<<(int v) {
        sep();
        out_ << v;
        return *this;
    }
    Row& operator<<(const std::string& v) {
        sep();
        out_ << v;
        return *this;
    }

private:
    void sep() {
        if (!first_) out_ << ',';
        first_ = false;
    }
    std::ostream& out_;
    bool first_ = true;
};

void header(std::ostream& out, const std::vector<std::string>& cols) {
    Row r(out);
    for (const auto& c : cols) r << c;
}

std::string idx(int j) { return std::to_string(j + 1); }

} // namespace

std::string index_label(const MultiIndex& m) {
    std::string s = "[";
    for (int j = 0; j < m.size(); ++j) s += (j ? ";" : "") + std::to_string(m[j]);
    return s + "]";
}

json complex_json(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

json zvec_json(const ZVec& z) {
    json a = json::array();
    for (Eigen::Index j = 0; j < z.size(); ++j) a.push_back(complex_json(z[j]));
    return a;
}

json scenario_json(const ScenarioSpec& sc) {
    json wells = json::array();
    for (const auto& w : sc.potential.wells())
        wells.push_back({{"shape", w.shape == Well::Shape::Sech2 ? "sech2" : "gauss"},
                         {"depth", w.depth},
                         {"width", w.width},
                         {"center", w.center}});
    json nl;
    if (sc.nonlinearity.kind() == Nonlinearity::Kind::Saturable)
        nl = {{"kind", "saturable"}, {"kappa", sc.nonlinearity.kappa()}, {"saturation", sc.nonlinearity.saturation()}};
    else
        nl = {{"kind", "polynomial"}, {"derivatives", sc.nonlinearity.coefficients()}};
    json z0 = json::array();
    for (auto z : sc.z0) z0.push_back(complex_json(z));
    return {
        {"name", sc.name},
        {"expected", sc.expected},
        {"grid", {{"half_length", sc.grid.half_length}, {"points", sc.grid.n}}},
        {"potential", wells},
        {"nonlinearity", nl},
        {"spectrum",
         {{"max_states", sc.max_states},
          {"tol_edge", sc.spectrum.tol_edge},
          {"gap_tol", sc.spectrum.gap_tol},
          {"coarse_spacing", sc.spectrum.coarse_spacing},
          {"max_polish", sc.spectrum.max_polish}}},
        {"combinatorics",
         {{"max_radius", sc.max_radius}, {"relation_radius", sc.relation_radius}, {"tol_res", sc.tol_res}, {"omega", sc.omega}}},
        {"profile",
         {{"amplitude_limit", sc.profile.amplitude_limit},
          {"amplitude_corrections", sc.profile.amplitude_corrections},
          {"max_derivative_order", sc.profile.max_derivative_order}}},
        {"fgr",
         {{"eps", sc.fgr.absorption.eps},
          {"layer_fraction", sc.fgr.absorption.layer_fraction},
          {"cap_strength", sc.fgr.absorption.cap_strength},
          {"reflection_target", sc.fgr.absorption.reflection_target},
          {"max_layer_fraction", sc.fgr.absorption.max_layer_fraction},
          {"cross_check", sc.fgr.cross_check}}},
        {"initial", {{"z0", z0}}},
        {"simulation",
         {{"dt", sc.sim.dt},
          {"t_final", sc.sim.t_final},
          {"order", sc.sim.order},
          {"absorber", sc.sim.absorber},
          {"absorber_fraction", sc.sim.absorber_fraction},
          {"absorber_strength", sc.sim.absorber_strength},
          {"absorber_energy", sc.sim.absorber_energy},
          {"output_interval", sc.output_interval},
          {"snapshot_interval", sc.snapshot_interval},
          {"window_fraction", sc.window_fraction}}},
        {"reduced", {{"dt", sc.reduced_dt}, {"include_principal", sc.include_principal}, {"smoothing_window", sc.smoothing_window}}},
    };
}

json thresholds_json(const ScenarioSpec& sc) {
    const ResolventOptions ro;
    const ExtractOptions eo;
    return {
        {"eigen_residual_rel", 1e-8},
        {"boundary_amplitude", sc.boundary_tol},
        {"zero_energy_indicator", sc.zero_energy_threshold},
        {"bound_state_edge", sc.spectrum.tol_edge},
        {"eigenvalue_gap", sc.spectrum.gap_tol},
        {"resonance_tol", sc.tol_res},
        {"relation_radius", sc.relation_radius},
        {"stabilization_max_radius", sc.max_radius},
        {"nonlinearity_consistency", 1e-4},
        {"amplitude_limit", sc.profile.amplitude_limit},
        {"resolvent_gap", ro.tol_gap},
        {"resolvent_rel_tol", ro.rel_tol},
        {"resolvent_accept_tol", ro.accept_tol},
        {"extrapolation_max_rel_spread", sc.fgr.absorption.max_rel_spread},
        {"cap_reflection_target", sc.fgr.absorption.reflection_target},
        {"fgr_positivity_rel", sc.fgr_threshold},
        {"fgr_degenerate_abs", 1e-10},
        {"modulation_newton_rel_tol", eo.rel_tol},
        {"modulation_newton_max_iter", eo.max_iter},
        {"selection_window_fraction", sc.window_fraction},
        {"time_to_half_smoothing", sc.smoothing_window},
    };
}

json provenance(const ScenarioSpec& sc, unsigned long long seed) {
    return {{"tool", "solsel"}, {"version", version()}, {"seed", seed}, {"scenario", scenario_json(sc)}, {"thresholds", thresholds_json(sc)}};
}

json to_json(const MultiIndex& m) { return m.e; }

json to_json(const IndexSet& s) {
    json a = json::array();
    for (const auto& m : s) a.push_back(to_json(m));
    return a;
}

json to_json(const IndexSets& s) {
    return {{"R_min", to_json(s.minimal_resonant)},
            {"NR_1", to_json(s.truncated_nonresonant)},
            {"radius_used", s.radius_used},
            {"stabilized", s.stabilized}};
}

json to_json(const SpectralData& s) {
    json states = json::array();
    for (int j = 0; j < s.n_bound(); ++j)
        states.push_back({{"omega", s.omega[j]},
                          {"residual", num(s.residual[j])},
                          {"boundary_amplitude", num(s.boundary_amplitude[j])},
                          {"decay_fit", num(s.decay_fit[j])},
                          {"decay_expected", std::sqrt(-s.omega[j])}});
    return {{"n_bound", s.n_bound()},
            {"omega", s.omega},
            {"states", states},
            {"smallest_abs_box_eigenvalue", num(s.smallest_abs_box_eigenvalue)},
            {"grid", {{"half_length", s.grid().half_length}, {"points", s.grid().n}}},
            {"potential", s.op->potential().describe()}};
}

json to_json(const ZeroEnergyCheck& z) {
    return {{"slope_indicator", num(z.slope_indicator)},
            {"smallest_box_eigenvalue", num(z.smallest_box_eigenvalue)},
            {"threshold", z.threshold},
            {"pass", z.pass}};
}

json to_json(const FgrEntry& e) {
    json table = json::array();
    for (std::size_t k = 0; k < e.eps.size(); ++k) table.push_back({{"eps", e.eps[k]}, {"value", num(e.table[k])}});
    return {{"m", to_json(e.m)},
            {"lambda", e.lambda},
            {"gamma", num(e.gamma)},
            {"principal", num(e.principal)},
            {"source_norm2", num(e.source_norm2)},
            {"cross_check", num(e.cross_check)},
            {"cross_check_rel_diff", num(std::abs(e.gamma - e.cross_check) / std::max(std::abs(e.cross_check), 1e-300))},
            {"table", table},
            {"extrapolants", nums(e.extrapolants)},
            {"rel_spread", num(e.rel_spread)},
            {"stable", e.stable},
            {"degenerate", e.degenerate},
            {"cap", {{"strength", e.cap_strength}, {"width", e.cap_width}, {"reflection", num(e.cap_reflection)}}}};
}

json to_json(const FgrCheck& c) { return {{"pass", c.pass}, {"threshold", c.threshold}, {"failures", c.failures}}; }

json to_json(const ValidationReport& v) {
    json checks = json::array();
    for (const auto& c : v.checks)
        checks.push_back({{"stage", c.stage}, {"assumption", c.assumption}, {"pass", c.pass}, {"detail", c.detail}});
    json j = {{"pass", v.pass},
              {"failed_stage", v.failed_stage},
              {"error_kind", v.error_kind},
              {"numerical_failure", v.numerical_failure},
              {"checks", checks}};
    if (v.spec) j["spectrum"] = to_json(*v.spec);
    if (v.zero_energy) j["zero_energy"] = to_json(*v.zero_energy);
    if (v.relation) j["integer_relation"] = to_json(*v.relation);
    if (v.sets) j["index_sets"] = to_json(*v.sets);
    if (!v.fgr.empty()) {
        json f = json::array();
        for (const auto& e : v.fgr) f.push_back(to_json(e));
        j["fgr"] = f;
    }
    if (v.fgr_check) j["fgr_check"] = to_json(*v.fgr_check);
    return j;
}

json to_json(const DiagnosticSeries& d) {
    json j = {{"resonant", to_json(d.resonant)},
              {"weight_rate", d.weight_rate},
              {"initial_mass", d.initial_mass},
              {"samples", d.samples.size()},
              {"rho_plus", num(d.rho_plus)},
              {"rho_window_spread", num(d.rho_window_spread)},
              {"window_fraction", d.window_fraction},
              {"selected_mode", d.selected_mode >= 0 ? json(d.selected_mode + 1) : json(nullptr)},
              {"final_modulus", nums(d.final_modulus)},
              {"decay_factor", nums(d.decay_factor)},
              {"plateau_increment", nums(d.plateau_increment)},
              {"mass_closure", num(d.mass_closure)},
              {"max_ortho", num(d.max_ortho)},
              {"failed_extractions", d.failed_extractions},
              {"annotations", d.annotations}};
    if (!d.samples.empty()) {
        const auto& s = d.samples.back();
        j["accumulations"] = {{"zm", nums(s.acc_zm)},
                              {"zm_total", num(s.acc_zm_total)},
                              {"modulation_residual", num(s.acc_modulation)},
                              {"discrete_residual", num(s.acc_discrete)},
                              {"eta_local", num(s.acc_eta_local)}};
    }
    return j;
}

json to_json(const Comparison& c) {
    json th = json::array();
    for (std::size_t j = 0; j < c.t_half_full.size(); ++j)
        th.push_back({{"mode", j + 1}, {"t_half_reduced", num(c.t_half_reduced[j])}, {"t_half_full", num(c.t_half_full[j])},
                      {"ratio", num(c.rate_ratio[j])}});
    return {{"samples", c.times.size()},
            {"max_rel_deviation", num(c.max_rel_deviation)},
            {"decaying_mode", c.decaying_mode >= 0 ? json(c.decaying_mode + 1) : json(nullptr)},
            {"time_to_half", th}};
}

json to_json(const Absorber& a) {
    return {{"geometry", a.geometry == Absorber::Geometry::Wall ? "wall" : "periodic"},
            {"width", a.width},
            {"strength", a.strength},
            {"tuned_energy", a.tuned_energy},
            {"reflection", num(a.reflection)},
            {"active", a.active()}};
}

json profile_json(const ProfileSet& ps, const ScalingStudy& scaling, const std::vector<IdentityCheck>& identity) {
    const int N = ps.dim();
    json varpi1 = json::array();
    for (int j = 0; j < N; ++j) {
        json row = json::array();
        for (int l = 0; l < N; ++l) row.push_back(ps.varpi1(j, l));
        varpi1.push_back(row);
    }
    const Eigen::MatrixXd g = ps.resonant_coupling();
    json coupling = json::array();
    int r = 0;
    for (const auto& m : ps.sets.minimal_resonant) {
        json row = json::array();
        for (int j = 0; j < N; ++j) row.push_back(g(r, j));
        coupling.push_back({{"m", to_json(m)}, {"g", row}, {"norm", ps.grid().norm(ps.resonant.at(m))}});
        ++r;
    }
    json corr = json::array();
    for (const auto& [m, f] : ps.corrections) corr.push_back({{"m", to_json(m)}, {"norm", ps.grid().norm(f)}});
    json id = json::array();
    double worst = 0;
    for (const auto& c : identity) {
        id.push_back(num(c.rel_error));
        worst = std::max(worst, c.rel_error);
    }
    return {{"omega", ps.omega},
            {"index_sets", to_json(ps.sets)},
            {"varpi1", varpi1},
            {"resonant_coupling", coupling},
            {"corrections", corr},
            {"amplitude_corrections", ps.opt.amplitude_corrections},
            {"terms", ps.terms.size()},
            {"residual_scaling_slope", nums(scaling.slope)},
            {"identity_rel_error", id},
            {"identity_max_rel_error", num(worst)}};
}

json selection_json(const SelectionReport& r) {
    json j = {{"validation", to_json(r.validation)},
              {"z0", zvec_json(r.z0)},
              {"run",
               {{"complete", r.run.complete},
                {"t_final", r.run.times.empty() ? 0.0 : r.run.times.back()},
                {"absorber", to_json(r.run.absorber)},
                {"absorbed", r.run.absorbed.empty() ? 0.0 : r.run.absorbed.back()}}},
              {"diagnostics", to_json(r.diagnostics)},
              {"verdict",
               {{"selected_mode", r.selected_mode >= 0 ? json(r.selected_mode + 1) : json(nullptr)},
                {"rho_plus", num(r.rho_plus)},
                {"decay_factor", nums(r.decay_factor)}}}};
    if (r.comparison) j["comparison"] = to_json(*r.comparison);
    if (!r.reduced_error.empty()) j["reduced_error"] = r.reduced_error;
    return j;
}

// ---- CSV ----

std::vector<std::string> eigenfunctions_columns(int n_bound) {
    std::vector<std::string> c{"x", "V"};
    for (int j = 0; j < n_bound; ++j) c.push_back("phi" + idx(j));
    return c;
}

std::vector<std::string> series_columns() { return {"t", "mass", "energy", "absorbed"}; }

std::vector<std::string> snapshot_columns() { return {"x", "re_u", "im_u"}; }

std::vector<std::string> diagnostics_columns(int n, const std::vector<MultiIndex>& resonant) {
    std::vector<std::string> c{"t"};
    for (int j = 0; j < n; ++j)
        for (const char* p : {"re_z", "im_z", "abs_z"}) c.push_back(p + idx(j));
    for (const auto& m : resonant) c.push_back("abs_zm" + index_label(m));
    for (const char* k : {"modulation_residual", "discrete_residual", "eta_weighted", "eta_local", "eta_mass", "profile_mass",
                          "mass", "absorbed", "ortho_residual", "newton_iters"})
        c.push_back(k);
    for (const auto& m : resonant) c.push_back("acc_zm" + index_label(m));
    for (const char* k : {"acc_zm_total", "acc_modulation", "acc_discrete", "acc_eta_local"}) c.push_back(k);
    return c;
}

std::vector<std::string> reduced_columns(int n, const std::vector<MultiIndex>& resonant) {
    std::vector<std::string> c{"t"};
    for (int j = 0; j < n; ++j)
        for (const char* p : {"re_z", "im_z", "abs_z"}) c.push_back(p + idx(j));
    for (const auto& m : resonant) c.push_back("abs_zm" + index_label(m));
    c.push_back("quadratic_energy");
    c.push_back("cumulative_damping");
    return c;
}

std::vector<std::string> comparison_columns(int n) {
    std::vector<std::string> c{"t"};
    for (int j = 0; j < n; ++j) c.push_back("rel_dev_z" + idx(j));
    return c;
}

std::vector<std::string> scaling_columns() { return {"mode", "rho", "residual", "bound_form"}; }

std::vector<std::string> fgr_table_columns() { return {"m", "lambda", "eps", "value"}; }

std::vector<std::string> profile_columns(const std::vector<MultiIndex>& labels, const std::string& prefix) {
    std::vector<std::string> c{"x"};
    for (const auto& m : labels) c.push_back(prefix + index_label(m));
    return c;
}

void write_eigenfunctions_csv(std::ostream& out, const SpectralData& s) {
    header(out, eigenfunctions_columns(s.n_bound()));
    const Grid& g = s.grid();
    for (int i = 0; i < g.n; ++i) {
        Row r(out);
        r << g.x(i) << s.op->V()[i];
        for (int j = 0; j < s.n_bound(); ++j) r << s.phi[j][i];
    }
}

void write_series_csv(std::ostream& out, const RunRecord& rec) {
    header(out, series_columns());
    for (std::size_t k = 0; k < rec.times.size(); ++k) Row(out) << rec.times[k] << rec.mass[k] << rec.energy[k] << rec.absorbed[k];
}

void write_snapshot_csv(std::ostream& out, const Grid& g, const CVec& u) {
    header(out, snapshot_columns());
    for (int i = 0; i < g.n; ++i) Row(out) << g.x(i) << u[i].real() << u[i].imag();
}

void write_diagnostics_csv(std::ostream& out, const DiagnosticSeries& d) {
    const int n = d.samples.empty() ? 0 : static_cast<int>(d.samples.front().z.size());
    header(out, diagnostics_columns(n, d.resonant));
    for (const auto& s : d.samples) {
        Row r(out);
        r << s.t;
        for (int j = 0; j < n; ++j) r << s.z[j].real() << s.z[j].imag() << std::abs(s.z[j]);
        for (double v : s.zm_abs) r << v;
        r << s.modulation_residual << s.discrete_residual << s.eta_weighted << s.eta_local << s.eta_mass << s.profile_mass << s.mass
          << s.absorbed << s.ortho_residual << s.newton_iters;
        for (double v : s.acc_zm) r << v;
        r << s.acc_zm_total << s.acc_modulation << s.acc_discrete << s.acc_eta_local;
    }
}

void write_reduced_csv(std::ostream& out, const ReducedTrajectory& tr, const std::vector<MultiIndex>& resonant) {
    const int n = tr.z.empty() ? 0 : static_cast<int>(tr.z.front().size());
    header(out, reduced_columns(n, resonant));
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        Row r(out);
        r << tr.times[k];
        for (int j = 0; j < n; ++j) r << tr.z[k][j].real() << tr.z[k][j].imag() << std::abs(tr.z[k][j]);
        for (double v : tr.zm_abs[k]) r << v;
        r << tr.quadratic_energy[k] << tr.cumulative_damping[k];
    }
}

void write_comparison_csv(std::ostream& out, const Comparison& c) {
    const int n = c.rel_deviation.empty() ? 0 : static_cast<int>(c.rel_deviation.front().size());
    header(out, comparison_columns(n));
    for (std::size_t k = 0; k < c.times.size(); ++k) {
        Row r(out);
        r << c.times[k];
        for (double v : c.rel_deviation[k]) r << v;
    }
}

void write_scaling_csv(std::ostream& out, const ScalingStudy& st) {
    header(out, scaling_columns());
    for (const auto& row : st.rows) Row(out) << row.mode + 1 << row.rho << row.residual << row.bound_form;
}

void write_fgr_table_csv(std::ostream& out, const std::vector<FgrEntry>& entries) {
    header(out, fgr_table_columns());
    for (const auto& e : entries)
        for (std::size_t k = 0; k < e.eps.size(); ++k) Row(out) << index_label(e.m) << e.lambda << e.eps[k] << e.table[k];
}

void write_profile_csv(std::ostream& out, const Grid& g, const std::map<MultiIndex, RVec>& fns, const std::string& prefix) {
    std::vector<MultiIndex> labels;
    for (const auto& kv : fns) labels.push_back(kv.first);
    header(out, profile_columns(labels, prefix));
    for (int i = 0; i < g.n; ++i) {
        Row r(out);
        r << g.x(i);
        for (const auto& kv : fns) r << kv.second[i];
    }
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
        if (columns[k] == name) return static_cast<int>(k);
    return -1;
}

double CsvTable::value(std::size_t row, int col) const {
    if (row >= cells.size() || col < 0 || col >= static_cast<int>(cells[row].size()))
        throw InvalidArgument("CSV cell out of range");
    const std::string& s = cells[row][col];
    if (s == "nan") return std::nan("");
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw InvalidArgument("CSV cell '" + s + "' is not a number");
    return v;
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> out;
        std::string cur;
        std::istringstream is(l);
        while (std::getline(is, cur, ',')) out.push_back(cur);
        if (!l.empty() && l.back() == ',') out.emplace_back();
        return out;
    };
    if (!std::getline(in, line)) throw InvalidArgument("empty CSV");
    t.columns = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != t.columns.size())
            throw InvalidArgument("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(t.columns.size()));
        t.cells.push_back(std::move(cells));
    }
    return t;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

} // namespace solsel::app
