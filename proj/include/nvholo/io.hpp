#pragma once

#include "scenarios.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace nvholo {

inline constexpr std::string_view artifact_version = "1.0.0";

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> to_double(std::string_view s) {
    double v = 0;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc{} || r.ptr != end) return std::nullopt;
    return v;
}

}  // namespace detail

/// Reads a real number. Besides plain decimals it accepts multiples of pi written as
/// "pi", "-pi/6", "5pi/6", "2*pi", "0.25pi".
inline double parse_number(std::string_view text) {
    const std::string s = detail::trim(text);
    if (s.empty()) throw ConfigError("empty number");
    if (auto v = detail::to_double(s)) return *v;
    const auto p = s.find("pi");
    if (p == std::string::npos) throw ConfigError("not a number: '" + s + "'");
    std::string coef = detail::trim(std::string_view(s).substr(0, p));
    if (!coef.empty() && coef.back() == '*') coef = detail::trim(std::string_view(coef).substr(0, coef.size() - 1));
    double c = 1.0;
    if (coef == "-") c = -1.0;
    else if (coef == "+" || coef.empty()) c = 1.0;
    else if (auto v = detail::to_double(coef)) c = *v;
    else throw ConfigError("not a number: '" + s + "'");
    const std::string rest = detail::trim(std::string_view(s).substr(p + 2));
    double d = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/') throw ConfigError("not a number: '" + s + "'");
        const auto v = detail::to_double(detail::trim(std::string_view(rest).substr(1)));
        if (!v || *v == 0.0) throw ConfigError("bad divisor in '" + s + "'");
        d = *v;
    }
    return c * pi / d;
}

/// Shortest representation that reads back to the same double.
inline std::string format_exact(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// 12 significant digits, locale independent.
inline std::string format_cell(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, r.ptr);
}

namespace detail {

inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "off" || s == "no") return false;
    throw ConfigError("not a boolean: '" + s + "'");
}

inline int parse_int(const std::string& s) {
    int v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw ConfigError("not an integer: '" + s + "'");
    return v;
}

inline std::vector<double> parse_list(const std::string& s, char sep = ',') {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!trim(item).empty()) out.push_back(parse_number(item));
    return out;
}

inline std::vector<std::array<double, 3>> parse_triples(const std::string& s) {
    std::vector<std::array<double, 3>> out;
    std::stringstream ss(s);
    std::string group;
    while (std::getline(ss, group, ';')) {
        if (trim(group).empty()) continue;
        const auto v = parse_list(group);
        if (v.size() != 3) throw ConfigError("detuning triple needs three values: '" + trim(group) + "'");
        out.push_back({v[0], v[1], v[2]});
    }
    return out;
}

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_exact(v[i]);
    return s;
}

inline std::string envelope_name(EnvelopeKind k) {
    switch (k) {
    case EnvelopeKind::constant: return "constant";
    case EnvelopeKind::gaussian: return "gaussian";
    case EnvelopeKind::sin_squared: return "sin_squared";
    }
    return "?";
}

inline EnvelopeKind envelope_from(const std::string& s) {
    if (s == "constant") return EnvelopeKind::constant;
    if (s == "gaussian") return EnvelopeKind::gaussian;
    if (s == "sin_squared") return EnvelopeKind::sin_squared;
    throw ConfigError("unknown envelope '" + s + "'");
}

// Line of `key` inside `[section]`, 0 when absent.
inline int locate(const std::string& text, const std::string& section, const std::string& key) {
    std::istringstream in(text);
    std::string line, current;
    for (int n = 1; std::getline(in, line); ++n) {
        const std::string t = trim(line);
        if (t.size() > 1 && t.front() == '[' && t.back() == ']') {
            current = trim(std::string_view(t).substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (current == section && eq != std::string::npos && trim(std::string_view(t).substr(0, eq)) == key) return n;
    }
    return 0;
}

/// One config key: how to read it into a ScenarioConfig and how to write it back.
struct KeyDef {
    const char* section;
    const char* key;
    void (*read)(ScenarioConfig&, const std::string&);
    std::string (*write)(const ScenarioConfig&);
};

#define NVHOLO_NUM(sec, name, field)                                                                  \
    KeyDef {                                                                                          \
        sec, name, [](ScenarioConfig& c, const std::string& v) { c.field = parse_number(v); },       \
            [](const ScenarioConfig& c) { return format_exact(c.field); }                             \
    }
#define NVHOLO_INT(sec, name, field)                                                                  \
    KeyDef {                                                                                          \
        sec, name, [](ScenarioConfig& c, const std::string& v) { c.field = parse_int(v); },          \
            [](const ScenarioConfig& c) { return std::to_string(c.field); }                           \
    }

inline const std::vector<KeyDef>& key_table() {
    static const std::vector<KeyDef> keys = {
        {"scenario", "id",
         [](ScenarioConfig& c, const std::string& v) {
             const auto id = scenario_from_name(v);
             if (!id) throw ConfigError("unknown scenario id '" + v + "'");
             c.id = *id;
         },
         [](const ScenarioConfig& c) { return std::string(scenario_name(c.id)); }},
        NVHOLO_INT("scenario", "initial_level", initial_level),
        NVHOLO_NUM("scenario", "prep_theta", prep_theta),
        NVHOLO_NUM("scenario", "prep_q1", prep_angles[0]),
        NVHOLO_NUM("scenario", "prep_q2", prep_angles[1]),
        NVHOLO_NUM("scenario", "prep_q3", prep_angles[2]),
        NVHOLO_NUM("scenario", "theta_start", theta.start),
        NVHOLO_NUM("scenario", "theta_stop", theta.stop),
        NVHOLO_NUM("scenario", "theta_step", theta.step),
        NVHOLO_NUM("scenario", "gate_theta", gate_theta),
        NVHOLO_INT("scenario", "composite_gates", composite_gates),
        NVHOLO_NUM("scenario", "composite_prep_theta", composite_prep_theta),
        NVHOLO_NUM("scenario", "duration_us", duration_us),
        NVHOLO_NUM("scenario", "hold_us", hold_us),
        NVHOLO_INT("scenario", "samples_per_path", samples_per_path),
        NVHOLO_NUM("scenario", "beta", beta),
        NVHOLO_NUM("scenario", "varphi", varphi),

        NVHOLO_NUM("pulses", "rabi_mhz", rabi_mhz),
        NVHOLO_NUM("pulses", "pump_mhz", pump_mhz),
        NVHOLO_NUM("pulses", "stokes_mhz", stokes_mhz),
        NVHOLO_NUM("pulses", "excited_splitting_mhz", excited_splitting_mhz),
        NVHOLO_NUM("pulses", "alpha_mhz", alpha_mhz),
        {"pulses", "envelope", [](ScenarioConfig& c, const std::string& v) { c.envelope = envelope_from(v); },
         [](const ScenarioConfig& c) { return envelope_name(c.envelope); }},
        NVHOLO_NUM("pulses", "pi3_angle", pi3_angle),
        NVHOLO_NUM("pulses", "qubit_frequency_mhz", qubit_frequency_mhz),
        {"pulses", "interaction_rabi_mhz",
         [](ScenarioConfig& c, const std::string& v) {
             const auto l = parse_list(v);
             if (l.size() != 6) throw ConfigError("interaction_rabi_mhz needs six values");
             std::copy(l.begin(), l.end(), c.interaction_rabi_mhz.begin());
         },
         [](const ScenarioConfig& c) {
             return join({c.interaction_rabi_mhz.begin(), c.interaction_rabi_mhz.end()});
         }},

        NVHOLO_NUM("detunings", "delta1_mhz", delta1_mhz),
        NVHOLO_NUM("detunings", "delta2_mhz", delta2_mhz),
        NVHOLO_NUM("detunings", "delta3_mhz", delta3_mhz),
        NVHOLO_NUM("detunings", "delta1_start", delta1_sweep.start),
        NVHOLO_NUM("detunings", "delta1_stop", delta1_sweep.stop),
        NVHOLO_NUM("detunings", "delta1_step", delta1_sweep.step),
        NVHOLO_NUM("detunings", "delta_start", delta_sweep.start),
        NVHOLO_NUM("detunings", "delta_stop", delta_sweep.stop),
        NVHOLO_NUM("detunings", "delta_step", delta_sweep.step),
        {"detunings", "triples", [](ScenarioConfig& c, const std::string& v) { c.triples = parse_triples(v); },
         [](const ScenarioConfig& c) {
             std::string s;
             for (std::size_t i = 0; i < c.triples.size(); ++i)
                 s += (i ? "; " : "") + join({c.triples[i][0], c.triples[i][1], c.triples[i][2]});
             return s;
         }},

        {"noise", "enabled", [](ScenarioConfig& c, const std::string& v) { c.noise.enabled = parse_bool(v); },
         [](const ScenarioConfig& c) { return std::string(c.noise.enabled ? "true" : "false"); }},
        NVHOLO_NUM("noise", "t1_us", noise.t1_us),
        NVHOLO_NUM("noise", "t2_us", noise.t2_us),
        {"noise", "grid_us", [](ScenarioConfig& c, const std::string& v) { c.noise_grid_us = parse_list(v); },
         [](const ScenarioConfig& c) { return join(c.noise_grid_us); }},

        NVHOLO_NUM("integrator", "dt_us", dt_us),
        NVHOLO_INT("integrator", "record_stride", record_stride),
        {"integrator", "renormalize", [](ScenarioConfig& c, const std::string& v) { c.renormalize = parse_bool(v); },
         [](const ScenarioConfig& c) { return std::string(c.renormalize ? "true" : "false"); }},
        {"integrator", "hermiticity",
         [](ScenarioConfig& c, const std::string& v) {
             if (v == "hermitized") c.hermiticity = HermiticityMode::hermitized;
             else if (v == "literal") c.hermiticity = HermiticityMode::literal;
             else throw ConfigError("hermiticity must be 'hermitized' or 'literal'");
         },
         [](const ScenarioConfig& c) {
             return std::string(c.hermiticity == HermiticityMode::hermitized ? "hermitized" : "literal");
         }},
        NVHOLO_INT("integrator", "threads", threads),
    };
    return keys;
}

#undef NVHOLO_NUM
#undef NVHOLO_INT

}  // namespace detail

/// Parses the sectioned key = value format. Omitted keys keep their defaults; the
/// result is validated before it is returned.
inline ScenarioConfig parse_config(const std::string& text) {
    namespace bpt = boost::property_tree;
    bpt::ptree tree;
    std::istringstream in(text);
    try {
        bpt::read_ini(in, tree);
    } catch (const bpt::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
    }
    auto where = [&](const std::string& sec, const std::string& key) {
        const int line = detail::locate(text, sec, key);
        return line > 0 ? "line " + std::to_string(line) + ": " : std::string();
    };

    ScenarioConfig cfg;
    for (const auto& [sec, body] : tree) {
        if (body.data().size() && body.empty())
            throw ConfigError(where("", sec) + "key '" + sec + "' outside any section");
        bool known_section = false;
        for (const auto& k : detail::key_table()) known_section |= sec == k.section;
        if (!known_section) throw ConfigError("unknown section [" + sec + "]");
        for (const auto& [key, node] : body) {
            const detail::KeyDef* def = nullptr;
            for (const auto& k : detail::key_table())
                if (sec == k.section && key == k.key) def = &k;
            if (!def) throw ConfigError(where(sec, key) + "unknown key '" + key + "' in [" + sec + "]");
            try {
                def->read(cfg, detail::trim(node.data()));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(where(sec, key) + key + ": " + e.what());
            }
        }
    }
    try {
        cfg.check();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

/// Every key with its resolved value; parse_config(serialize_config(c)) reproduces c.
inline std::string serialize_config(const ScenarioConfig& cfg) {
    std::string out, section;
    for (const auto& k : detail::key_table()) {
        if (section != k.section) {
            if (!section.empty()) out += "\n";
            section = k.section;
            out += "[" + section + "]\n";
        }
        out += std::string(k.key) + " = " + k.write(cfg) + "\n";
    }
    return out;
}

struct RunManifest {
    ScenarioConfig config;
    double dt_us = 0.0;  // integrator step actually used (0 when it varies per piece)
    double wall_time_s = 0.0;
    double max_norm_correction = 0.0;

    std::string to_text() const {
        std::string s = "# nvholo run manifest\n";
        s += "# version = " + std::string(artifact_version) + "\n";
        s += "# scenario = " + std::string(scenario_name(config.id)) + "\n";
        s += "# integrator_dt_us = " + format_exact(dt_us) + "\n";
        s += "# noise = " + std::string(config.noise.enabled ? "on" : "off") + ", t1_us = " +
             format_exact(config.noise.t1_us) + ", t2_us = " + format_exact(config.noise.t2_us) + "\n";
        s += "# max_norm_correction = " + format_exact(max_norm_correction) + "\n";
        s += "# wall_time_s = " + format_exact(wall_time_s) + "\n";
        return s + serialize_config(config);
    }
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void check() const {
        if (header.empty()) throw std::invalid_argument("csv table has no columns");
        for (const auto& r : rows)
            if (r.size() != header.size()) throw std::invalid_argument("csv table is not rectangular");
    }
    void add(std::vector<double> row) { rows.push_back(std::move(row)); }
};

inline std::string to_csv_text(const CsvTable& t) {
    t.check();
    std::string s;
    for (std::size_t i = 0; i < t.header.size(); ++i) s += (i ? "," : "") + t.header[i];
    s += "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_cell(r[i]);
        s += "\n";
    }
    return s;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << text;
    f.flush();
    if (!f) throw IoError("write failed for '" + path + "'");
}

inline void write_csv(const CsvTable& t, const std::string& path) { write_text(path, to_csv_text(t)); }

inline CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read '" + path + "'");
    CsvTable t;
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty csv '" + path + "'");
    std::stringstream hs(line);
    for (std::string c; std::getline(hs, c, ',');) t.header.push_back(c);
    while (std::getline(f, line)) {
        std::vector<double> row;
        std::stringstream rs(line);
        for (std::string c; std::getline(rs, c, ',');) {
            const auto v = detail::to_double(c);
            if (!v) throw IoError("bad csv cell '" + c + "'");
            row.push_back(*v);
        }
        t.rows.push_back(std::move(row));
    }
    t.check();
    return t;
}

// --- scenario results as tables ---------------------------------------------------------

inline CsvTable sweep_table(const SweepResult& r) {
    CsvTable t;
    t.header.push_back(r.axis_name);
    for (const auto& c : r.series) t.header.push_back(c.name);
    for (std::size_t k = 0; k < r.axis_values.size(); ++k) {
        std::vector<double> row{r.axis_values[k]};
        for (const auto& c : r.series) row.push_back(c.values[k]);
        t.add(std::move(row));
    }
    return t;
}

inline CsvTable two_qubit_table(const Trajectory& tr) {
    CsvTable t{{"time_us", "amp1", "amp2", "amp3", "amp4", "norm"}, {}};
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const auto& s = tr.states[k];
        const auto& p = tr.populations[k];
        t.add({tr.times[k], std::abs(s[0]), std::abs(s[1]), std::abs(s[2]), std::abs(s[3]),
               std::sqrt(p[0] + p[1] + p[2] + p[3])});
    }
    return t;
}

inline CsvTable pi3_table(const Trajectory& tr) {
    CsvTable t{{"time_us", "p1", "p2", "p5", "p_other", "norm"}, {}};
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const auto& p = tr.populations[k];
        double total = 0;
        for (double v : p) total += v;
        t.add({tr.times[k], p[0], p[1], p[4], total - p[0] - p[1] - p[4], std::sqrt(total)});
    }
    return t;
}

inline CsvTable time_evolution_table(const TimeEvolutionSet& set) {
    CsvTable t{{"triple_index", "delta1_mhz", "delta2_mhz", "delta3_mhz", "time_us", "p_return_state1"}, {}};
    for (std::size_t i = 0; i < set.runs.size(); ++i)
        for (std::size_t k = 0; k < set.runs[i].size(); ++k)
            t.add({static_cast<double>(i), set.triples[i][0], set.triples[i][1], set.triples[i][2], set.runs[i].times[k],
                   set.runs[i].populations[k][0]});
    return t;
}

inline CsvTable dark_state_table(const DarkSpectrum& d) {
    CsvTable t{{"index", "eigenvalue_rad_per_us", "is_dark", "leakage", "alignment"}, {}};
    const int n = d.hamiltonian.dim();
    for (int i = 0; i < n; ++i) {
        t.header.push_back("amp" + std::to_string(i + 1) + "_re");
        t.header.push_back("amp" + std::to_string(i + 1) + "_im");
    }
    for (std::size_t k = 0; k < d.eigen.values.size(); ++k) {
        std::vector<double> row{static_cast<double>(k), d.eigen.values[k], d.dark[k] ? 1.0 : 0.0, d.leakage[k],
                                d.alignment[k]};
        for (int i = 0; i < n; ++i) {
            row.push_back(d.eigen.vectors[k][i].real());
            row.push_back(d.eigen.vectors[k][i].imag());
        }
        t.add(std::move(row));
    }
    return t;
}

inline CsvTable fidelity_table(const ResonantFidelity& configured, const ScenarioConfig& cfg,
                               const std::vector<NoiseGridPoint>& grid) {
    CsvTable t{{"t1_us", "t2_us", "off_resonant", "on_resonant", "difference"}, {}};
    t.add({cfg.noise.t1_us, cfg.noise.t2_us, configured.off_resonant, configured.on_resonant,
           configured.off_resonant - configured.on_resonant});
    for (const auto& g : grid)
        t.add({g.t1_us, g.t2_us, g.fidelity.off_resonant, g.fidelity.on_resonant,
               g.fidelity.off_resonant - g.fidelity.on_resonant});
    return t;
}

}  // namespace nvholo
