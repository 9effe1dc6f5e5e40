// solsel - command line front end.  One subcommand per pipeline stage; every
// stage writes JSON/CSV into --out.  Several scenarios may be given at once;
// they run in parallel on --threads workers, each into its own subdirectory.

#include "app/commands.hpp"
#include "app/config.hpp"

#include "solsel/errors.hpp"
#include "solsel/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

using namespace solsel;

int main(int argc, char** argv) {
    CLI::App cli{"soliton selection laboratory"};
    cli.set_version_flag("--version", std::string("solsel ") + version());
    cli.require_subcommand(1, 1);

    std::vector<std::string> configs, scenarios;
    std::string out_dir = "out", run_dir;
    bool force = false, list = false;
    unsigned threads = 1;
    std::optional<unsigned long long> seed;

    static const std::map<std::string, std::string> help{
        {"spectrum", "bound states, residuals, decay fits, zero-energy check"},
        {"combinatorics", "resonant / nonresonant index sets of the frequencies"},
        {"profile", "refined profile, resonant sources, residual scaling, derivative identity"},
        {"fgr", "radiation damping coefficients by limiting absorption"},
        {"simulate", "time-integrate the NLS from the profile initial datum"},
        {"diagnose", "modulation diagnostics from a simulate output (--run)"},
        {"reduce", "integrate the reduced amplitude equations"},
        {"compare", "reduced versus full model (full run from --run, or run it now)"},
        {"validate", "check the assumption surrogates stage by stage"},
        {"select", "full pipeline: validate, run, diagnose, reduce, compare"},
    };
    for (const auto& [name, text] : help) {
        auto* sub = cli.add_subcommand(name, text);
        sub->fallthrough();
    }
    cli.add_option("--config", configs, "scenario file (repeatable)")->check(CLI::ExistingFile);
    cli.add_option("--scenario", scenarios, "built-in scenario name (repeatable)");
    cli.add_option("--out", out_dir, "output directory")->capture_default_str();
    cli.add_option("--run", run_dir, "directory of an earlier simulate/select output");
    cli.add_flag("--force", force, "run past a failed validation");
    cli.add_option("--threads", threads, "scenarios processed concurrently")->check(CLI::Range(1u, 256u))->capture_default_str();
    cli.add_option("--seed", seed, "seed recorded in reports and used for randomized checks");
    cli.add_flag("--list-scenarios", list, "print the built-in scenario names and exit");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return cli.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        if (list) {
            for (const auto& s : builtin_scenarios()) std::cout << s << "\n";
            return 0;
        }
        cli.exit(e);
        return app::kExitValidation;
    }

    const std::string command = cli.get_subcommands().front()->get_name();

    struct Job {
        std::string label;
        ScenarioSpec spec;
        std::string error;
    };
    std::vector<Job> jobs;
    for (const auto& p : configs) {
        Job j{p, {}, {}};
        try {
            j.spec = app::load_scenario(p);
        } catch (const Error& e) {
            j.error = e.what();
        }
        jobs.push_back(std::move(j));
    }
    for (const auto& s : scenarios) {
        Job j{s, {}, {}};
        try {
            j.spec = builtin_scenario(s);
        } catch (const Error& e) {
            j.error = e.what();
        }
        jobs.push_back(std::move(j));
    }
    if (jobs.empty()) jobs.push_back({"pt2-generic", builtin_scenario("pt2-generic"), {}});

    const bool many = jobs.size() > 1;
    std::vector<std::string> logs(jobs.size());
    std::vector<int> codes(jobs.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < jobs.size();) {
            std::ostringstream os;
            Job& job = jobs[k];
            if (!job.error.empty()) {
                os << "error: " << job.error << "\n";
                codes[k] = app::kExitValidation;
            } else {
                if (seed) job.spec.sim.seed = *seed;
                app::Context ctx;
                ctx.out_dir = many ? (std::filesystem::path(out_dir) / job.spec.name).string() : out_dir;
                ctx.run_dir = run_dir.empty() || !many ? run_dir : (std::filesystem::path(run_dir) / job.spec.name).string();
                ctx.force = force;
                ctx.log = &os;
                codes[k] = app::run_command(command, job.spec, ctx);
            }
            logs[k] = os.str();
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = 0;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        if (many) std::cout << "== " << jobs[k].label << "\n";
        std::cout << logs[k];
        code = std::max(code, codes[k]);
    }
    return code;
}
