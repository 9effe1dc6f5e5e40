#include "fixtures.hpp"

#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace solsel;
using namespace solsel::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "solsel_outputs" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ScenarioSpec short_spec() {
    auto sc = fixture::pt2_small_spec();
    sc.name = "short";
    sc.sim.t_final = 2.0;
    sc.output_interval = 0.1;
    sc.snapshot_interval = 0.5;
    sc.smoothing_window = 0.5;
    return sc;
}

struct Run {
    int code;
    std::string log;
};

Run run(const std::string& cmd, const ScenarioSpec& sc, const fs::path& out, const fs::path& run_dir = {}) {
    std::ostringstream log;
    Context ctx;
    ctx.out_dir = out.string();
    ctx.run_dir = run_dir.string();
    ctx.log = &log;
    return {run_command(cmd, sc, ctx), log.str()};
}

CsvTable csv(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in);
    return read_csv(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void check_provenance(const json& j, const std::string& kind) {
    CHECK(j.at("tool") == "solsel");
    CHECK(j.contains("version"));
    CHECK(j.contains("seed"));
    CHECK(j.at("kind") == kind);
    CHECK(j.at("scenario").contains("grid"));
    CHECK(j.at("scenario").contains("fgr"));
    for (const char* k : {"eigen_residual_rel", "resonance_tol", "fgr_positivity_rel", "cap_reflection_target",
                          "selection_window_fraction", "time_to_half_smoothing"})
        CHECK(j.at("thresholds").contains(k));
}

const std::vector<MultiIndex> kRes{MultiIndex{-1, 2}};

} // namespace

TEST_CASE("column layouts") {
    CHECK(index_label(MultiIndex{-1, 2}) == "[-1;2]");
    CHECK(series_columns() == std::vector<std::string>{"t", "mass", "energy", "absorbed"});
    CHECK(snapshot_columns() == std::vector<std::string>{"x", "re_u", "im_u"});
    CHECK(eigenfunctions_columns(2) == std::vector<std::string>{"x", "V", "phi1", "phi2"});
    CHECK(comparison_columns(2) == std::vector<std::string>{"t", "rel_dev_z1", "rel_dev_z2"});
    CHECK(scaling_columns() == std::vector<std::string>{"mode", "rho", "residual", "bound_form"});
    CHECK(fgr_table_columns() == std::vector<std::string>{"m", "lambda", "eps", "value"});
    CHECK(profile_columns(kRes, "G") == std::vector<std::string>{"x", "G[-1;2]"});
    CHECK(reduced_columns(2, kRes) == std::vector<std::string>{"t", "re_z1", "im_z1", "abs_z1", "re_z2", "im_z2", "abs_z2",
                                                                "abs_zm[-1;2]", "quadratic_energy", "cumulative_damping"});
    CHECK(diagnostics_columns(2, kRes) ==
          std::vector<std::string>{"t", "re_z1", "im_z1", "abs_z1", "re_z2", "im_z2", "abs_z2", "abs_zm[-1;2]",
                                   "modulation_residual", "discrete_residual", "eta_weighted", "eta_local", "eta_mass",
                                   "profile_mass", "mass", "absorbed", "ortho_residual", "newton_iters", "acc_zm[-1;2]",
                                   "acc_zm_total", "acc_modulation", "acc_discrete", "acc_eta_local"});
}

TEST_CASE("CSV numbers round-trip and NaN is spelled out") {
    RunRecord rec;
    rec.times = {0.0, 0.1, 1.0 / 3.0};
    rec.mass = {1.0, 0.9999999999999998, 1e-300};
    rec.energy = {-0.5, std::nan(""), 2.5e7};
    rec.absorbed = {0.0, 1e-17, 0.125};
    std::stringstream ss;
    write_series_csv(ss, rec);
    CHECK(ss.str().find("nan") != std::string::npos);
    const CsvTable t = read_csv(ss);
    CHECK(t.columns == series_columns());
    REQUIRE(t.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(t.value(r, t.column("t")) == rec.times[r]);
        CHECK(t.value(r, t.column("mass")) == rec.mass[r]);
        CHECK(t.value(r, t.column("absorbed")) == rec.absorbed[r]);
    }
    CHECK(std::isnan(t.value(1, t.column("energy"))));
    CHECK(t.column("missing") == -1);

    std::stringstream bad("a,b\n1,2,3\n");
    CHECK_THROWS(read_csv(bad));
}

TEST_CASE("JSON never carries non-finite numbers") {
    FgrEntry e;
    e.m = MultiIndex{-1, 2};
    e.gamma = std::nan("");
    e.cross_check = std::numeric_limits<double>::infinity();
    const json j = to_json(e);
    CHECK(j.at("gamma").is_null());
    CHECK(j.at("cross_check").is_null());
    CHECK(j.at("m") == json::array({-1, 2}));
    CHECK(complex_json(cplx(1, -2)) == json::array({1.0, -2.0}));
}

TEST_CASE("stage commands write their documented files") {
    const auto sc = short_spec();
    const fs::path d = scratch("stages");

    auto r = run("spectrum", sc, d / "spectrum");
    CHECK(r.code == kExitOk);
    const json spec = read_json((d / "spectrum" / "spectrum.json").string());
    check_provenance(spec, "spectrum");
    CHECK(spec.at("spectrum").at("n_bound") == 2);
    CHECK(spec.at("zero_energy").contains("pass"));
    const auto ef = csv(d / "spectrum" / "eigenfunctions.csv");
    CHECK(ef.columns == eigenfunctions_columns(2));
    CHECK(static_cast<int>(ef.size()) == sc.grid.n);
    CHECK(fs::exists(d / "spectrum" / "scenario.ini"));

    r = run("combinatorics", sc, d / "comb");
    CHECK(r.code == kExitOk);
    const json comb = read_json((d / "comb" / "combinatorics.json").string());
    check_provenance(comb, "combinatorics");
    CHECK(comb.at("R_min") == json::array({json::array({-1, 2})}));
    CHECK(comb.at("integer_relation").is_null());
    CHECK(comb.at("pass") == true);

    r = run("profile", sc, d / "profile");
    CHECK(r.code == kExitOk);
    const json prof = read_json((d / "profile" / "profile.json").string());
    check_provenance(prof, "profile");
    for (const char* k : {"omega", "index_sets", "varpi1", "resonant_coupling", "corrections", "residual_scaling_slope",
                          "identity_rel_error", "identity_max_rel_error"})
        CHECK(prof.at("profile").contains(k));
    CHECK(csv(d / "profile" / "resonant.csv").columns == profile_columns(kRes, "G"));
    CHECK(csv(d / "profile" / "residual_scaling.csv").columns == scaling_columns());
    CHECK(csv(d / "profile" / "corrections.csv").columns.front() == "x");

    r = run("fgr", sc, d / "fgr");
    CHECK(r.code == kExitOk);
    const json fgr = read_json((d / "fgr" / "fgr.json").string());
    check_provenance(fgr, "fgr");
    REQUIRE(fgr.at("entries").size() == 1);
    for (const char* k : {"m", "lambda", "gamma", "principal", "cross_check", "cross_check_rel_diff", "table", "extrapolants",
                          "rel_spread", "stable", "degenerate", "cap"})
        CHECK(fgr.at("entries")[0].contains(k));
    CHECK(fgr.at("entries")[0].at("cap").contains("reflection"));
    CHECK(fgr.at("pass") == true);
    const auto tab = csv(d / "fgr" / "fgr_table.csv");
    CHECK(tab.columns == fgr_table_columns());
    CHECK(tab.size() == sc.fgr.absorption.eps.size());
}

TEST_CASE("simulate, diagnose, reduce and compare chain through files") {
    const auto sc = short_spec();
    const fs::path d = scratch("chain");

    auto r = run("simulate", sc, d / "sim");
    REQUIRE(r.code == kExitOk);
    const json manifest = read_json((d / "sim" / "run.json").string());
    check_provenance(manifest, "run");
    CHECK(manifest.at("complete") == true);
    CHECK(manifest.at("series") == "series.csv");
    REQUIRE(manifest.at("snapshots").size() == 5);
    CHECK(manifest.at("snapshots")[0].at("file") == "snapshots/u_00000.csv");
    const auto snap = csv(d / "sim" / "snapshots" / "u_00004.csv");
    CHECK(snap.columns == snapshot_columns());
    CHECK(static_cast<int>(snap.size()) == sc.grid.n);
    CHECK(csv(d / "sim" / "series.csv").columns == series_columns());
    // the embedded scenario reproduces the run
    std::istringstream ini(manifest.at("config_ini").get<std::string>());
    std::ostringstream a, b;
    write_scenario(a, parse_scenario(ini));
    write_scenario(b, sc);
    CHECK(a.str() == b.str());

    r = run("diagnose", sc, d / "diag", d / "sim");
    REQUIRE(r.code == kExitOk);
    const json diag = read_json((d / "diag" / "diagnostics.json").string());
    check_provenance(diag, "diagnostics");
    for (const char* k : {"rho_plus", "rho_window_spread", "selected_mode", "decay_factor", "plateau_increment", "mass_closure",
                          "max_ortho", "failed_extractions", "accumulations"})
        CHECK(diag.at("diagnostics").contains(k));
    CHECK(diag.at("diagnostics").at("samples") == 5);
    const auto dc = csv(d / "diag" / "diagnostics.csv");
    CHECK(dc.columns == diagnostics_columns(2, kRes));
    CHECK(dc.size() == 5);

    r = run("reduce", sc, d / "red");
    REQUIRE(r.code == kExitOk);
    CHECK(csv(d / "red" / "reduced.csv").columns == reduced_columns(2, kRes));
    const json red = read_json((d / "red" / "reduced.json").string());
    check_provenance(red, "reduced");
    CHECK(red.at("z0").size() == 2);

    r = run("compare", sc, d / "cmp", d / "diag");
    REQUIRE(r.code == kExitOk);
    const auto cc = csv(d / "cmp" / "comparison.csv");
    CHECK(cc.columns == comparison_columns(2));
    CHECK(cc.size() == 5);
    const json cmp = read_json((d / "cmp" / "comparison.json").string());
    check_provenance(cmp, "comparison");
    CHECK(cmp.at("comparison").at("time_to_half").size() == 2);
}

TEST_CASE("select writes the full report and is deterministic") {
    const auto sc = short_spec();
    const fs::path d = scratch("select");
    REQUIRE(run("select", sc, d / "a").code == kExitOk);
    REQUIRE(run("select", sc, d / "b").code == kExitOk);
    const json rep = read_json((d / "a" / "report.json").string());
    check_provenance(rep, "selection");
    for (const char* k : {"validation", "z0", "run", "diagnostics", "verdict", "comparison", "profile", "error"})
        CHECK(rep.contains(k));
    CHECK(rep.at("verdict").contains("selected_mode"));
    CHECK(rep.at("error") == "");
    for (const char* f : {"report.json", "series.csv", "diagnostics.csv", "reduced.csv", "comparison.csv", "comparison.json",
                          "residual_scaling.csv", "fgr_table.csv", "scenario.ini"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(d / "a" / f));
        CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
    }
    CHECK(csv(d / "a" / "diagnostics.csv").size() == 21);
}

TEST_CASE("exit codes") {
    const fs::path d = scratch("codes");
    auto r = run("validate", short_spec(), d / "ok");
    CHECK(r.code == kExitOk);
    CHECK(r.log.find("validation PASS") != std::string::npos);
    const json v = read_json((d / "ok" / "validation.json").string());
    check_provenance(v, "validation");
    CHECK(v.at("validation").at("pass") == true);

    r = run("validate", builtin_scenario("pt2-resonant-fail"), d / "res");
    CHECK(r.code == kExitValidation);
    const json vr = read_json((d / "res" / "validation.json").string());
    CHECK(vr.at("validation").at("integer_relation") == json::array({1, -4}));

    auto free = load_scenario(std::string(SOLSEL_SCENARIO_DIR) + "/free.ini");
    CHECK(run("validate", free, d / "free").code == kExitValidation);
    CHECK(run("simulate", builtin_scenario("pt2-resonant-fail"), d / "sim").code == kExitValidation);
    CHECK(fs::exists(d / "sim" / "validation.json"));
    CHECK(run("select", builtin_scenario("pt2-resonant-fail"), d / "sel").code == kExitValidation);
    CHECK(fs::exists(d / "sel" / "report.json"));
    CHECK(run("diagnose", short_spec(), d / "diag", d / "missing").code == kExitValidation);
    CHECK(run("no-such-command", short_spec(), d / "x").code == kExitValidation);

    // an extrapolation that cannot settle is a numerical failure
    auto strict = short_spec();
    strict.fgr.absorption.max_rel_spread = 1e-15;
    r = run("validate", strict, d / "strict");
    CHECK(r.code == kExitNumerical);
}

TEST_CASE("identity samples follow the seed") {
    const auto a = identity_samples(2, 10, 0.02, 7), b = identity_samples(2, 10, 0.02, 7), c = identity_samples(2, 10, 0.02, 8);
    REQUIRE(a.size() == 10);
    CHECK(a[3].first == b[3].first);
    CHECK(a[3].second == b[3].second);
    CHECK(a[3].first != c[3].first);
    for (const auto& [z, dz] : a) CHECK(z.cwiseAbs().maxCoeff() <= 0.02);
}
