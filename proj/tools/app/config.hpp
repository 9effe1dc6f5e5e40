#pragma once
// Scenario files: INI-style "key = value" with [sections].  See docs/config.md.

#include "solsel/experiment.hpp"

#include <iosfwd>
#include <string>

namespace solsel::app {

// Unknown sections/keys and malformed values raise InvalidArgument.
ScenarioSpec parse_scenario(std::istream& in, const std::string& origin = "<stream>");
ScenarioSpec load_scenario(const std::string& path);

// Writes a file that parse_scenario reads back into an equivalent spec.
void write_scenario(std::ostream& out, const ScenarioSpec& sc);

// "sech2:depth:width:center" / "gauss:..." and the inverse
Well parse_well(const std::string& text);
std::string format_well(const Well& w);

// "0.03", "0.03+0.01i", "0.02-0.5i", "-0.1i"
cplx parse_complex(const std::string& text);
std::string format_complex(cplx z);

} // namespace solsel::app
