#pragma once
// Shared, lazily built pipeline objects for the unit tests.

#include "solsel/experiment.hpp"

#include <stdexcept>

namespace fixture {

// the default two-mode scenario, validated once per process
inline const solsel::ValidationReport& pt2() {
    static const solsel::ValidationReport v = [] {
        auto r = solsel::validate(solsel::builtin_scenario("pt2-generic"));
        if (!r.pass) throw std::runtime_error("pt2-generic does not validate: " + r.failed_stage);
        return r;
    }();
    return v;
}

// same potential on a smaller box, for time stepping in tests
inline solsel::ScenarioSpec pt2_small_spec() {
    auto sc = solsel::builtin_scenario("pt2-generic");
    sc.name = "pt2-small";
    sc.grid = solsel::Grid(30.0, 2048);
    return sc;
}

inline const solsel::ValidationReport& pt2_small() {
    static const solsel::ValidationReport v = [] {
        auto r = solsel::validate(pt2_small_spec());
        if (!r.pass) throw std::runtime_error("pt2-small does not validate: " + r.failed_stage);
        return r;
    }();
    return v;
}

} // namespace fixture
