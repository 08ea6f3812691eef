#pragma once

#include "io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

namespace nvholo {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3 };

namespace detail {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    int threads = 0;  // 0 keeps the config value
    std::optional<long> seed;
    double dt_override = 0.0;
};

struct RunOutput {
    CsvTable table;
    double dt_us = 0.0;
    double max_norm_correction = 0.0;
};

inline RunOutput run_scenario(const ScenarioConfig& cfg) {
    RunOutput o;
    o.dt_us = cfg.dt_us;
    switch (cfg.id) {
    case ScenarioId::theta_sweep: o.table = sweep_table(run_single_qubit_theta_sweep(cfg)); break;
    case ScenarioId::detune_sweep: o.table = sweep_table(run_single_qubit_detuning_sweep(cfg)); break;
    case ScenarioId::composite: o.table = sweep_table(run_composite_gate_scenario(cfg)); break;
    case ScenarioId::three_qubit_sweep: o.table = sweep_table(run_three_qubit_detuning_sweep(cfg)); break;
    case ScenarioId::two_qubit_pi2:
    case ScenarioId::pi3: {
        const Trajectory tr = cfg.id == ScenarioId::pi3 ? run_pi3_rotation(cfg) : run_two_qubit_pi2(cfg);
        o.table = cfg.id == ScenarioId::pi3 ? pi3_table(tr) : two_qubit_table(tr);
        o.dt_us = (tr.times.back() - tr.times.front()) / static_cast<double>(tr.steps);
        o.max_norm_correction = tr.max_norm_correction;
        break;
    }
    case ScenarioId::three_qubit_time: {
        const TimeEvolutionSet set = run_three_qubit_time_evolution(cfg);
        for (const auto& r : set.runs) o.max_norm_correction = std::max(o.max_norm_correction, r.max_norm_correction);
        o.table = time_evolution_table(set);
        break;
    }
    case ScenarioId::dark_states: o.table = dark_state_table(run_dark_state_spectrum(cfg)); break;
    case ScenarioId::fidelity_compare:
        if (!cfg.noise.enabled) throw ConfigError("fidelity-compare needs [noise] enabled = true");
        o.table = fidelity_table(compare_resonant_fidelity(cfg), cfg, noise_grid_fidelity(cfg));
        break;
    }
    return o;
}

inline ScenarioConfig resolve_config(const CliOptions& opt, std::optional<ScenarioId> id) {
    ScenarioConfig cfg;
    if (!opt.config_path.empty()) {
        cfg = load_config(opt.config_path);
        std::ifstream f(opt.config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        const bool has_id = detail::locate(ss.str(), "scenario", "id") > 0;
        if (id && has_id && cfg.id != *id)
            throw ConfigError("config is for '" + std::string(scenario_name(cfg.id)) + "', not '" +
                              std::string(scenario_name(*id)) + "'");
    }
    if (id) cfg.id = *id;
    if (opt.threads > 0) cfg.threads = opt.threads;
    if (opt.dt_override > 0) cfg.dt_us = opt.dt_override;
    try {
        cfg.check();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

}  // namespace detail

/// Command-line front end. Diagnostics go to `err`; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& err = std::cerr) {
    CLI::App app{"Holonomic control simulator for NV-centre registers"};
    app.require_subcommand(1);
    detail::CliOptions opt;
    std::vector<std::pair<CLI::App*, std::optional<ScenarioId>>> subs;

    auto add_common = [&](CLI::App* s, bool needs_out) {
        s->add_option("--config", opt.config_path, "Scenario config file")->check(CLI::ExistingFile);
        if (needs_out) s->add_option("--out", opt.out_dir, "Output directory")->required();
        s->add_option("--threads", opt.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
        s->add_option("--seed", opt.seed, "Ignored: the simulator has no randomness");
        s->add_option("--dt-override", opt.dt_override, "Integrator step in us")->check(CLI::PositiveNumber);
    };
    for (const auto& [id, name] : scenario_names) {
        CLI::App* s = app.add_subcommand(std::string(name), "Run the " + std::string(name) + " scenario");
        add_common(s, true);
        subs.emplace_back(s, id);
    }
    CLI::App* validate = app.add_subcommand("validate", "Parse and check a config without running it");
    add_common(validate, false);
    subs.emplace_back(validate, std::nullopt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, err, err);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        err << app.help();
        return exit_config;
    }

    std::optional<ScenarioId> id;
    bool is_validate = false;
    for (const auto& [s, sid] : subs)
        if (s->parsed()) {
            id = sid;
            is_validate = !sid;
        }
    if (opt.seed) err << "warning: --seed ignored, the simulation is deterministic\n";

    ScenarioConfig cfg;
    try {
        cfg = detail::resolve_config(opt, id);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    }
    if (is_validate) return exit_ok;

    const auto t0 = std::chrono::steady_clock::now();
    detail::RunOutput result;
    try {
        result = detail::run_scenario(cfg);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    try {
        std::error_code ec;
        std::filesystem::create_directories(opt.out_dir, ec);
        if (ec) throw IoError("cannot create '" + opt.out_dir + "': " + ec.message());
        const std::filesystem::path out(opt.out_dir);
        write_csv(result.table, (out / "result.csv").string());
        RunManifest m{cfg, result.dt_us, wall, result.max_norm_correction};
        write_text((out / "manifest").string(), m.to_text());
    } catch (const std::exception& e) {
        err << "output error: " << e.what() << "\n";
        return exit_numerical;
    }
    return exit_ok;
}

}  // namespace nvholo
