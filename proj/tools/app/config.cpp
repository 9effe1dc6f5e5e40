#include "config.hpp"

#include "solsel/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace solsel::app {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    std::string t = trim(v);
    if (t.size() > 1 && t[0] == '+') t.erase(0, 1);   // from_chars takes no explicit plus
    double out = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw InvalidArgument(key + ": expected a number, got '" + v + "'");
    return out;
}

long to_int(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    long out = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw InvalidArgument(key + ": expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
    if (t == "false" || t == "no" || t == "off" || t == "0") return false;
    throw InvalidArgument(key + ": expected true/false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split(v, ',')) out.push_back(to_double(key, item));
    return out;
}

// shortest text that reads back to the same double
std::string num(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s;
}

using Setter = std::function<void(ScenarioSpec&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto real = [&](const std::string& k, auto member) {
            t[k] = [member](ScenarioSpec& sc, const std::string& key, const std::string& v) { member(sc) = to_double(key, v); };
        };
        auto integer = [&](const std::string& k, auto member) {
            t[k] = [member](ScenarioSpec& sc, const std::string& key, const std::string& v) {
                member(sc) = static_cast<std::remove_reference_t<decltype(member(sc))>>(to_int(key, v));
            };
        };
        auto flag = [&](const std::string& k, auto member) {
            t[k] = [member](ScenarioSpec& sc, const std::string& key, const std::string& v) { member(sc) = to_bool(key, v); };
        };

        t["scenario.name"] = [](ScenarioSpec& sc, const std::string&, const std::string& v) { sc.name = trim(v); };
        t["scenario.expected"] = [](ScenarioSpec& sc, const std::string& key, const std::string& v) {
            const std::string e = trim(v);
            if (e != "selection" && e != "nonresonance-fail" && e != "stress")
                throw InvalidArgument(key + ": expected selection | nonresonance-fail | stress");
            sc.expected = e;
        };

        real("grid.half_length", [](ScenarioSpec& sc) -> double& { return sc.grid.half_length; });
        integer("grid.points", [](ScenarioSpec& sc) -> int& { return sc.grid.n; });

        t["potential.wells"] = [](ScenarioSpec& sc, const std::string&, const std::string& v) {
            std::vector<Well> wells;
            for (const auto& item : split(v, ','))
                if (!item.empty()) wells.push_back(parse_well(item));
            sc.potential = Potential(std::move(wells));
        };

        // nonlinearity keys are collected and resolved together (see apply_nonlinearity)

        integer("spectrum.max_states", [](ScenarioSpec& sc) -> int& { return sc.max_states; });
        real("spectrum.tol_edge", [](ScenarioSpec& sc) -> double& { return sc.spectrum.tol_edge; });
        real("spectrum.gap_tol", [](ScenarioSpec& sc) -> double& { return sc.spectrum.gap_tol; });
        real("spectrum.coarse_spacing", [](ScenarioSpec& sc) -> double& { return sc.spectrum.coarse_spacing; });
        integer("spectrum.max_polish", [](ScenarioSpec& sc) -> int& { return sc.spectrum.max_polish; });
        real("spectrum.zero_energy_threshold", [](ScenarioSpec& sc) -> double& { return sc.zero_energy_threshold; });
        real("spectrum.boundary_tol", [](ScenarioSpec& sc) -> double& { return sc.boundary_tol; });

        integer("combinatorics.max_radius", [](ScenarioSpec& sc) -> int& { return sc.max_radius; });
        integer("combinatorics.relation_radius", [](ScenarioSpec& sc) -> int& { return sc.relation_radius; });
        real("combinatorics.tol_res", [](ScenarioSpec& sc) -> double& { return sc.tol_res; });
        t["combinatorics.omega"] = [](ScenarioSpec& sc, const std::string& key, const std::string& v) {
            sc.omega = to_list(key, v);
        };

        real("profile.amplitude_limit", [](ScenarioSpec& sc) -> double& { return sc.profile.amplitude_limit; });
        flag("profile.amplitude_corrections", [](ScenarioSpec& sc) -> bool& { return sc.profile.amplitude_corrections; });
        integer("profile.max_derivative_order", [](ScenarioSpec& sc) -> int& { return sc.profile.max_derivative_order; });

        t["fgr.eps"] = [](ScenarioSpec& sc, const std::string& key, const std::string& v) {
            sc.fgr.absorption.eps = to_list(key, v);
        };
        real("fgr.layer_fraction", [](ScenarioSpec& sc) -> double& { return sc.fgr.absorption.layer_fraction; });
        real("fgr.cap_strength", [](ScenarioSpec& sc) -> double& { return sc.fgr.absorption.cap_strength; });
        real("fgr.reflection_target", [](ScenarioSpec& sc) -> double& { return sc.fgr.absorption.reflection_target; });
        real("fgr.max_layer_fraction", [](ScenarioSpec& sc) -> double& { return sc.fgr.absorption.max_layer_fraction; });
        real("fgr.max_rel_spread", [](ScenarioSpec& sc) -> double& { return sc.fgr.absorption.max_rel_spread; });
        flag("fgr.cross_check", [](ScenarioSpec& sc) -> bool& { return sc.fgr.cross_check; });
        real("fgr.threshold", [](ScenarioSpec& sc) -> double& { return sc.fgr_threshold; });

        t["initial.z0"] = [](ScenarioSpec& sc, const std::string&, const std::string& v) {
            sc.z0.clear();
            for (const auto& item : split(v, ','))
                if (!item.empty()) sc.z0.push_back(parse_complex(item));
        };

        real("simulation.dt", [](ScenarioSpec& sc) -> double& { return sc.sim.dt; });
        real("simulation.t_final", [](ScenarioSpec& sc) -> double& { return sc.sim.t_final; });
        integer("simulation.order", [](ScenarioSpec& sc) -> int& { return sc.sim.order; });
        flag("simulation.absorber", [](ScenarioSpec& sc) -> bool& { return sc.sim.absorber; });
        real("simulation.absorber_fraction", [](ScenarioSpec& sc) -> double& { return sc.sim.absorber_fraction; });
        real("simulation.absorber_strength", [](ScenarioSpec& sc) -> double& { return sc.sim.absorber_strength; });
        real("simulation.absorber_energy", [](ScenarioSpec& sc) -> double& { return sc.sim.absorber_energy; });
        integer("simulation.seed", [](ScenarioSpec& sc) -> unsigned long long& { return sc.sim.seed; });
        real("simulation.output_interval", [](ScenarioSpec& sc) -> double& { return sc.output_interval; });
        real("simulation.snapshot_interval", [](ScenarioSpec& sc) -> double& { return sc.snapshot_interval; });
        real("simulation.window_fraction", [](ScenarioSpec& sc) -> double& { return sc.window_fraction; });

        real("reduced.dt", [](ScenarioSpec& sc) -> double& { return sc.reduced_dt; });
        flag("reduced.include_principal", [](ScenarioSpec& sc) -> bool& { return sc.include_principal; });
        real("reduced.smoothing_window", [](ScenarioSpec& sc) -> double& { return sc.smoothing_window; });
        return t;
    }();
    return table;
}

void apply_nonlinearity(ScenarioSpec& sc, const std::map<std::string, std::string>& kv) {
    if (kv.empty()) return;
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    const std::string kind = get("kind") ? trim(*get("kind")) : "cubic";
    auto reject_others = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [k, v] : kv) {
            bool ok = k == "kind";
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) throw InvalidArgument("nonlinearity." + k + " does not apply to kind = " + kind);
        }
    };
    if (kind == "cubic") {
        reject_others({"slope"});
        if (!get("slope")) throw InvalidArgument("nonlinearity.slope is required for kind = cubic");
        sc.nonlinearity = Nonlinearity::cubic(to_double("nonlinearity.slope", *get("slope")));
    } else if (kind == "polynomial") {
        reject_others({"derivatives"});
        if (!get("derivatives")) throw InvalidArgument("nonlinearity.derivatives is required for kind = polynomial");
        sc.nonlinearity = Nonlinearity::polynomial(to_list("nonlinearity.derivatives", *get("derivatives")));
    } else if (kind == "saturable") {
        reject_others({"kappa", "saturation"});
        if (!get("kappa") || !get("saturation"))
            throw InvalidArgument("nonlinearity.kappa and nonlinearity.saturation are required for kind = saturable");
        sc.nonlinearity = Nonlinearity::saturable(to_double("nonlinearity.kappa", *get("kappa")),
                                                  to_double("nonlinearity.saturation", *get("saturation")));
    } else {
        throw InvalidArgument("nonlinearity.kind: expected cubic | polynomial | saturable, got '" + kind + "'");
    }
}

void check_ranges(const ScenarioSpec& sc) {
    auto req = [](bool ok, const std::string& what) {
        if (!ok) throw InvalidArgument(what);
    };
    req(sc.grid.half_length > 0, "grid.half_length must be positive");
    req(is_power_of_two(sc.grid.n) && sc.grid.n >= 64, "grid.points must be a power of two >= 64");
    req(sc.max_states >= 1, "spectrum.max_states must be >= 1");
    req(sc.max_radius >= 3, "combinatorics.max_radius must be >= 3");
    req(sc.relation_radius >= 1, "combinatorics.relation_radius must be >= 1");
    req(sc.sim.dt > 0, "simulation.dt must be positive");
    req(sc.sim.t_final >= 0, "simulation.t_final must be >= 0");
    req(sc.sim.order == 2 || sc.sim.order == 4 || sc.sim.order == 6, "simulation.order must be 2, 4 or 6");
    req(sc.sim.absorber_fraction > 0 && sc.sim.absorber_fraction < 0.5, "simulation.absorber_fraction must lie in (0, 0.5)");
    req(sc.output_interval > 0, "simulation.output_interval must be positive");
    req(sc.window_fraction > 0 && sc.window_fraction <= 1, "simulation.window_fraction must lie in (0, 1]");
    req(sc.reduced_dt > 0, "reduced.dt must be positive");
    req(!sc.fgr.absorption.eps.empty(), "fgr.eps must not be empty");
    for (double e : sc.fgr.absorption.eps) req(e > 0, "fgr.eps entries must be positive");
    req(sc.fgr.absorption.layer_fraction > 0 && sc.fgr.absorption.layer_fraction < 0.5, "fgr.layer_fraction must lie in (0, 0.5)");
    req(sc.fgr.absorption.reflection_target > 0, "fgr.reflection_target must be positive");
    req(sc.profile.amplitude_limit > 0, "profile.amplitude_limit must be positive");
}

} // namespace

Well parse_well(const std::string& text) {
    const auto parts = split(trim(text), ':');
    if (parts.size() < 2 || parts.size() > 4)
        throw InvalidArgument("well '" + text + "': expected shape:depth[:width[:center]]");
    Well w;
    if (parts[0] == "sech2") w.shape = Well::Shape::Sech2;
    else if (parts[0] == "gauss") w.shape = Well::Shape::Gauss;
    else throw InvalidArgument("well '" + text + "': shape must be sech2 or gauss");
    w.depth = to_double("well depth", parts[1]);
    if (parts.size() > 2) w.width = to_double("well width", parts[2]);
    if (parts.size() > 3) w.center = to_double("well center", parts[3]);
    if (!(w.width > 0)) throw InvalidArgument("well '" + text + "': width must be positive");
    return w;
}

std::string format_well(const Well& w) {
    return std::string(w.shape == Well::Shape::Sech2 ? "sech2" : "gauss") + ":" + num(w.depth) + ":" + num(w.width) + ":" +
           num(w.center);
}

cplx parse_complex(const std::string& text) {
    std::string t;
    for (char c : text)
        if (c != ' ' && c != '\t') t += c;
    if (t.empty()) throw InvalidArgument("empty complex number");
    if (t.back() != 'i') return {to_double("amplitude", t), 0.0};
    t.pop_back();
    // split at the last sign that is not an exponent sign and not leading
    std::size_t cut = std::string::npos;
    for (std::size_t k = t.size(); k-- > 1;) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
            cut = k;
            break;
        }
    }
    if (cut == std::string::npos) {
        if (t.empty() || t == "+" || t == "-") return {0.0, t == "-" ? -1.0 : 1.0};
        return {0.0, to_double("amplitude", t)};
    }
    std::string im = t.substr(cut);
    if (im == "+" || im == "-") im += "1";
    return {to_double("amplitude", t.substr(0, cut)), to_double("amplitude", im)};
}

std::string format_complex(cplx z) {
    if (z.imag() == 0) return num(z.real());
    return num(z.real()) + (std::signbit(z.imag()) ? "-" : "+") + num(std::abs(z.imag())) + "i";
}

ScenarioSpec parse_scenario(std::istream& in, const std::string& origin) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InvalidArgument(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    ScenarioSpec sc;
    if (auto base = tree.get_optional<std::string>("scenario.base")) sc = builtin_scenario(trim(*base));

    std::map<std::string, std::string> nl;
    const auto& table = setters();
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw InvalidArgument(origin + ": key '" + section + "' outside of a section");
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            if (full == "scenario.base") continue;
            if (section == "nonlinearity") {
                nl[key] = value.data();
                continue;
            }
            auto it = table.find(full);
            if (it == table.end()) throw InvalidArgument(origin + ": unknown key '" + full + "'");
            it->second(sc, full, value.data());
        }
    }
    apply_nonlinearity(sc, nl);
    check_ranges(sc);
    return sc;
}

ScenarioSpec load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config '" + path + "'");
    return parse_scenario(in, path);
}

void write_scenario(std::ostream& out, const ScenarioSpec& sc) {
    out << "[scenario]\nname = " << sc.name << "\nexpected = " << sc.expected << "\n\n";
    out << "[grid]\nhalf_length = " << num(sc.grid.half_length) << "\npoints = " << sc.grid.n << "\n\n";
    out << "[potential]\nwells = ";
    for (std::size_t i = 0; i < sc.potential.wells().size(); ++i) out << (i ? ", " : "") << format_well(sc.potential.wells()[i]);
    out << "\n\n[nonlinearity]\n";
    if (sc.nonlinearity.kind() == Nonlinearity::Kind::Saturable) {
        out << "kind = saturable\nkappa = " << num(sc.nonlinearity.kappa()) << "\nsaturation = " << num(sc.nonlinearity.saturation())
            << "\n\n";
    } else if (sc.nonlinearity.coefficients().size() == 1) {
        out << "kind = cubic\nslope = " << num(sc.nonlinearity.coefficients()[0]) << "\n\n";
    } else {
        out << "kind = polynomial\nderivatives = " << (sc.nonlinearity.coefficients().empty() ? "0" : join(sc.nonlinearity.coefficients()))
            << "\n\n";
    }
    out << "[spectrum]\nmax_states = " << sc.max_states << "\ntol_edge = " << num(sc.spectrum.tol_edge)
        << "\ngap_tol = " << num(sc.spectrum.gap_tol) << "\ncoarse_spacing = " << num(sc.spectrum.coarse_spacing)
        << "\nmax_polish = " << sc.spectrum.max_polish << "\nzero_energy_threshold = " << num(sc.zero_energy_threshold)
        << "\nboundary_tol = " << num(sc.boundary_tol) << "\n\n";
    out << "[combinatorics]\nmax_radius = " << sc.max_radius << "\nrelation_radius = " << sc.relation_radius
        << "\ntol_res = " << num(sc.tol_res) << "\n";
    if (!sc.omega.empty()) out << "omega = " << join(sc.omega) << "\n";
    out << "\n";
    out << "[profile]\namplitude_limit = " << num(sc.profile.amplitude_limit)
        << "\namplitude_corrections = " << (sc.profile.amplitude_corrections ? "true" : "false")
        << "\nmax_derivative_order = " << sc.profile.max_derivative_order << "\n\n";
    out << "[fgr]\neps = " << join(sc.fgr.absorption.eps) << "\nlayer_fraction = " << num(sc.fgr.absorption.layer_fraction)
        << "\ncap_strength = " << num(sc.fgr.absorption.cap_strength)
        << "\nreflection_target = " << num(sc.fgr.absorption.reflection_target)
        << "\nmax_layer_fraction = " << num(sc.fgr.absorption.max_layer_fraction) << "\nmax_rel_spread = " << num(sc.fgr.absorption.max_rel_spread)
        << "\ncross_check = " << (sc.fgr.cross_check ? "true" : "false") << "\nthreshold = " << num(sc.fgr_threshold) << "\n\n";
    out << "[initial]\nz0 = ";
    for (std::size_t i = 0; i < sc.z0.size(); ++i) out << (i ? ", " : "") << format_complex(sc.z0[i]);
    out << "\n\n[simulation]\ndt = " << num(sc.sim.dt) << "\nt_final = " << num(sc.sim.t_final) << "\norder = " << sc.sim.order
        << "\nabsorber = " << (sc.sim.absorber ? "true" : "false") << "\nabsorber_fraction = " << num(sc.sim.absorber_fraction)
        << "\nabsorber_strength = " << num(sc.sim.absorber_strength) << "\nabsorber_energy = " << num(sc.sim.absorber_energy)
        << "\nseed = " << sc.sim.seed << "\noutput_interval = " << num(sc.output_interval)
        << "\nsnapshot_interval = " << num(sc.snapshot_interval) << "\nwindow_fraction = " << num(sc.window_fraction) << "\n\n";
    out << "[reduced]\ndt = " << num(sc.reduced_dt) << "\ninclude_principal = " << (sc.include_principal ? "true" : "false")
        << "\nsmoothing_window = " << num(sc.smoothing_window) << "\n";
}

} // namespace solsel::app
