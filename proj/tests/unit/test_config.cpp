#include "app/config.hpp"

#include "solsel/errors.hpp"

#include <doctest.h>

#include <sstream>

using namespace solsel;
using namespace solsel::app;

namespace {

ScenarioSpec parse(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in, "test");
}

std::string written(const ScenarioSpec& sc) {
    std::ostringstream os;
    write_scenario(os, sc);
    return os.str();
}

} // namespace

TEST_CASE("wells") {
    const Well w = parse_well("sech2:5.04:1:0");
    CHECK(w.shape == Well::Shape::Sech2);
    CHECK(w.depth == 5.04);
    CHECK(w.width == 1.0);
    CHECK(w.center == 0.0);
    const Well g = parse_well(" gauss:0.3:1.5:-0.4 ");
    CHECK(g.shape == Well::Shape::Gauss);
    CHECK(g.center == -0.4);
    CHECK(parse_well("gauss:2").width == 1.0);
    const Well back = parse_well(format_well(g));
    CHECK(back.depth == g.depth);
    CHECK(back.width == g.width);
    CHECK(back.center == g.center);
    CHECK_THROWS_AS(parse_well("box:1"), InvalidArgument);
    CHECK_THROWS_AS(parse_well("sech2"), InvalidArgument);
    CHECK_THROWS_AS(parse_well("sech2:1:0"), InvalidArgument);
    CHECK_THROWS_AS(parse_well("sech2:x"), InvalidArgument);
}

TEST_CASE("complex amplitudes") {
    CHECK(parse_complex("0.03") == cplx(0.03, 0));
    CHECK(parse_complex("0.03+0.01i") == cplx(0.03, 0.01));
    CHECK(parse_complex("0.02 - 0.5i") == cplx(0.02, -0.5));
    CHECK(parse_complex("-0.1i") == cplx(0, -0.1));
    CHECK(parse_complex("1e-3-2e-3i") == cplx(1e-3, -2e-3));
    CHECK(parse_complex("-1e-3i") == cplx(0, -1e-3));
    CHECK(parse_complex("i") == cplx(0, 1));
    CHECK(parse_complex("2-i") == cplx(2, -1));
    for (cplx z : {cplx(0.03, 0), cplx(0.1, -0.2), cplx(-1e-7, 3.5)}) CHECK(parse_complex(format_complex(z)) == z);
    CHECK_THROWS_AS(parse_complex(""), InvalidArgument);
    CHECK_THROWS_AS(parse_complex("abc"), InvalidArgument);
}

TEST_CASE("minimal file and defaults") {
    const auto sc = parse("[scenario]\nname = mini\n[potential]\nwells = sech2:6\n[nonlinearity]\nkind = cubic\nslope = -2\n");
    CHECK(sc.name == "mini");
    CHECK(sc.potential.wells().size() == 1);
    CHECK(sc.nonlinearity.derivative_at_zero(1) == -2.0);
    const ScenarioSpec def;
    CHECK(sc.grid.n == def.grid.n);
    CHECK(sc.sim.dt == def.sim.dt);
    CHECK(sc.fgr.absorption.eps == def.fgr.absorption.eps);
}

TEST_CASE("round trip through the writer") {
    for (const auto& name : builtin_scenarios()) {
        const auto sc = builtin_scenario(name);
        const auto back = parse(written(sc));
        CHECK(written(back) == written(sc));
        CHECK(back.name == sc.name);
        CHECK(back.grid.n == sc.grid.n);
        CHECK(back.potential.wells().size() == sc.potential.wells().size());
        CHECK(back.z0 == sc.z0);
        CHECK(back.sim.absorber == sc.sim.absorber);
    }
    auto sat = builtin_scenario("pt2-generic");
    sat.nonlinearity = Nonlinearity::saturable(-2.0, 0.5);
    sat.omega = {-1.5, -0.3};
    sat.z0 = {cplx(0.01, -0.02)};
    const auto back = parse(written(sat));
    CHECK(back.nonlinearity.kind() == Nonlinearity::Kind::Saturable);
    CHECK(back.nonlinearity.kappa() == -2.0);
    CHECK(back.omega == sat.omega);
    CHECK(back.z0 == sat.z0);
    CHECK(written(back) == written(sat));
}

TEST_CASE("base scenarios are inherited and overridden") {
    const auto sc = parse("[scenario]\nbase = pt2-generic\nname = short\n[simulation]\nt_final = 20\n");
    const auto ref = builtin_scenario("pt2-generic");
    CHECK(sc.name == "short");
    CHECK(sc.sim.t_final == 20.0);
    CHECK(sc.grid.n == ref.grid.n);
    CHECK(sc.nonlinearity.derivative_at_zero(1) == ref.nonlinearity.derivative_at_zero(1));
    CHECK(sc.sim.absorber);
    CHECK_THROWS_AS(parse("[scenario]\nbase = nothing\n"), InvalidArgument);
}

TEST_CASE("unknown keys and malformed values are rejected") {
    CHECK_THROWS_AS(parse("[grid]\npoint = 1024\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[gird]\npoints = 1024\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[grid]\npoints = many\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[grid]\nhalf_length = 1.0x\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[simulation]\nabsorber = maybe\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[scenario]\nexpected = success\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("orphan = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[nonlinearity]\nkind = quintic\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[nonlinearity]\nkind = cubic\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[nonlinearity]\nkind = cubic\nslope = 1\nkappa = 2\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[nonlinearity]\nkind = saturable\nkappa = 2\n"), InvalidArgument);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.ini"), InvalidArgument);
}

TEST_CASE("range checks") {
    CHECK_THROWS_AS(parse("[grid]\npoints = 1000\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[grid]\npoints = 32\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[grid]\nhalf_length = -1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[simulation]\ndt = 0\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[simulation]\norder = 3\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[simulation]\nt_final = -1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[simulation]\nabsorber_fraction = 0.5\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[simulation]\nwindow_fraction = 0\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[combinatorics]\nmax_radius = 2\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[fgr]\neps = \n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[fgr]\neps = 0.1, -0.05\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[fgr]\nlayer_fraction = 0.6\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[fgr]\nreflection_target = 0\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[reduced]\ndt = 0\n"), InvalidArgument);
    CHECK_NOTHROW(parse("[simulation]\nt_final = 0\n"));
}

TEST_CASE("shipped scenario files parse") {
    for (const char* f : {"pt2-generic.ini", "pt2-resonant-fail.ini", "pt2-short.ini", "triple-well.ini", "free.ini"}) {
        CAPTURE(f);
        CHECK_NOTHROW(load_scenario(std::string(SOLSEL_SCENARIO_DIR) + "/" + f));
    }
    // the shipped default matches the builtin
    const auto file = load_scenario(std::string(SOLSEL_SCENARIO_DIR) + "/pt2-generic.ini");
    CHECK(written(file) == written(builtin_scenario("pt2-generic")));
}
