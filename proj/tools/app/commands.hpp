#pragma once
// The subcommands of the solsel tool, callable without the argument parser.
// Each returns the process exit code: 0 ok, 2 validation failure, 3 numerical
// failure.  Outputs go to ctx.out_dir.

#include "solsel/experiment.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace solsel::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct Context {
    std::string out_dir = "out";
    std::string run_dir;        // diagnose / compare: directory written by an earlier command
    bool force = false;
    std::ostream* log = nullptr;
};

using Command = std::function<int(const ScenarioSpec&, const Context&)>;

// name -> command; names are the CLI subcommands
const std::map<std::string, Command>& commands();

// Wraps a command so that library errors map to exit codes and are logged.
int run_command(const std::string& name, const ScenarioSpec& sc, const Context& ctx);

// Random small (z, dz) pairs for the derivative identity, drawn from the seed.
std::vector<std::pair<ZVec, ZVec>> identity_samples(int n_modes, int count, double scale, unsigned long long seed);

} // namespace solsel::app
