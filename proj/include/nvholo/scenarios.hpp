#pragma once

#include "gates.hpp"
#include "hamiltonians.hpp"
#include "parallel.hpp"
#include "phase.hpp"

#include <map>
#include <string_view>

namespace nvholo {

enum class ScenarioId {
    theta_sweep,
    detune_sweep,
    composite,
    two_qubit_pi2,
    three_qubit_sweep,
    three_qubit_time,
    pi3,
    dark_states,
    fidelity_compare,
};

inline constexpr std::array<std::pair<ScenarioId, std::string_view>, 9> scenario_names{{
    {ScenarioId::theta_sweep, "theta-sweep"},
    {ScenarioId::detune_sweep, "detune-sweep"},
    {ScenarioId::composite, "composite"},
    {ScenarioId::two_qubit_pi2, "two-qubit-pi2"},
    {ScenarioId::three_qubit_sweep, "three-qubit-sweep"},
    {ScenarioId::three_qubit_time, "three-qubit-time"},
    {ScenarioId::pi3, "pi3"},
    {ScenarioId::dark_states, "dark-states"},
    {ScenarioId::fidelity_compare, "fidelity-compare"},
}};

inline std::string_view scenario_name(ScenarioId id) {
    for (const auto& [k, v] : scenario_names)
        if (k == id) return v;
    return "?";
}

inline std::optional<ScenarioId> scenario_from_name(std::string_view s) {
    for (const auto& [k, v] : scenario_names)
        if (v == s) return k;
    return std::nullopt;
}

/// Level count the scenario works in.
inline int scenario_dim(ScenarioId id) {
    switch (id) {
    case ScenarioId::theta_sweep:
    case ScenarioId::detune_sweep:
    case ScenarioId::composite: return 2;
    case ScenarioId::two_qubit_pi2: return 4;
    default: return 8;
    }
}

struct SweepSpec {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    void check(const std::string& what) const {
        if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
            throw std::invalid_argument(what + ": non-finite sweep bound");
        if (!(step > 0)) throw std::invalid_argument(what + ": sweep step must be positive");
        if (stop < start) throw std::invalid_argument(what + ": sweep stop must be >= start");
    }
    std::size_t count() const { return static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1; }
    std::vector<double> values() const {
        std::vector<double> v(count());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = start + static_cast<double>(k) * step;
        return v;
    }
};

struct ScenarioConfig {
    ScenarioId id = ScenarioId::three_qubit_sweep;

    // [scenario]
    int initial_level = 1;  // 1-based ket label
    double prep_theta = 0.0;  // R_x applied to the initial level (two-level scenarios)
    std::array<double, 3> prep_angles{5 * pi / 6, -pi / 6, pi / 3};  // R_x per qubit, qubit 1 first
    SweepSpec theta{0.0, two_pi, pi / 24};
    double gate_theta = pi / 2;  // fixed rotation of the detuning sweep
    int composite_gates = 3;
    double composite_prep_theta = pi / 4;
    double duration_us = 1.0;  // dark-state evolution time
    double hold_us = 4.5;      // idle interval after each three-qubit path
    int samples_per_path = 41;
    double beta = pi / 2;  // dark-state parameters used for the alignment column
    double varphi = 0.0;

    // [pulses]
    double rabi_mhz = 15.0;
    double pump_mhz = 2.8226796709818465;
    double stokes_mhz = 2.8226796709818465;
    double excited_splitting_mhz = 20.0;
    double alpha_mhz = 1.1;
    EnvelopeKind envelope = EnvelopeKind::gaussian;
    double pi3_angle = 2 * pi / 3;  // Bloch angle of the |1> <-> |5> pulse
    double qubit_frequency_mhz = 4966.0;
    std::array<double, 6> interaction_rabi_mhz{15, 15, 15, 15, 15, 15};

    // [detunings]
    double delta1_mhz = 0.0, delta2_mhz = 0.0, delta3_mhz = 0.0;
    SweepSpec delta1_sweep{0.0, 600.0, 12.5};
    SweepSpec delta_sweep{-60.0, 60.0, 2.5};
    std::vector<std::array<double, 3>> triples;

    // [noise]
    NoiseModel noise;
    std::vector<double> noise_grid_us{20, 50, 100, 200, 500};

    // [integrator]
    double dt_us = 0.0;  // 0 = automatic
    int record_stride = 1;
    bool renormalize = true;
    HermiticityMode hermiticity = HermiticityMode::hermitized;
    int threads = 1;

    void check() const {
        auto positive = [](double v, const char* what) {
            if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
        };
        const int dim = scenario_dim(id);
        if (initial_level < 1 || initial_level > dim)
            throw std::invalid_argument("initial_level must lie in 1.." + std::to_string(dim));
        theta.check("theta");
        delta1_sweep.check("delta1");
        delta_sweep.check("delta");
        positive(rabi_mhz, "rabi_mhz");
        positive(duration_us, "duration_us");
        positive(alpha_mhz, "alpha_mhz");
        positive(qubit_frequency_mhz, "qubit_frequency_mhz");
        positive(pi3_angle, "pi3_angle");
        if (pump_mhz < 0 || stokes_mhz < 0) throw std::invalid_argument("pump and stokes amplitudes must be >= 0");
        for (double r : interaction_rabi_mhz)
            if (!std::isfinite(r)) throw std::invalid_argument("non-finite interaction rabi amplitude");
        if (hold_us < 0) throw std::invalid_argument("hold_us must be >= 0");
        if (samples_per_path < 2) throw std::invalid_argument("samples_per_path must be >= 2");
        if (composite_gates < 1) throw std::invalid_argument("composite_gates must be >= 1");
        if (dt_us < 0) throw std::invalid_argument("dt_us must be >= 0");
        if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
        if (threads < 1) throw std::invalid_argument("threads must be >= 1");
        noise.check();
        for (double v : noise_grid_us) positive(v, "noise grid entry");
        if (id == ScenarioId::three_qubit_time && triples.empty())
            throw std::invalid_argument("three-qubit-time needs at least one detuning triple");
    }
};

struct SweepColumn {
    std::string name;
    std::vector<double> values;
};

struct SweepResult {
    std::string axis_name;
    std::vector<double> axis_values;
    std::vector<SweepColumn> series;  // in output order
    std::vector<PhaseEstimate> phase_estimates;
    std::map<std::string, double> fidelities;

    const std::vector<double>& column(const std::string& name) const {
        for (const auto& c : series)
            if (c.name == name) return c.values;
        throw std::out_of_range("no column " + name);
    }
};

namespace detail {

/// Constant Hamiltonian held for `duration` µs.
struct Piece {
    Matrix h;
    double duration = 0.0;
    bool driven = true;
};

inline double piece_dt(const ScenarioConfig& cfg, double f_max, double span) {
    const double auto_dt = recommended_dt(f_max, span);
    return cfg.dt_us > 0 ? std::min(cfg.dt_us, span) : auto_dt;
}

/// Runs the pieces back to back. Each piece is sampled at `samples` evenly spaced points
/// (end points included); axis value p + k/(samples-1) marks sample k of piece p.
inline Trajectory evolve_pieces(const std::vector<Piece>& pieces, const StateVector& psi0, const ScenarioConfig& cfg,
                                int samples) {
    Trajectory out;
    StateVector psi = psi0;
    double t0 = 0.0;
    const long per = samples - 1;
    for (std::size_t p = 0; p < pieces.size(); ++p) {
        const Piece& pc = pieces[p];
        if (!(pc.duration > 0)) throw std::invalid_argument("path piece with non-positive duration");
        const Matrix h = pc.h;
        const double f = h.norm_inf();
        const long n0 = step_count(pc.duration, piece_dt(cfg, f, pc.duration));
        const long n = ((n0 + per - 1) / per) * per;
        EvolutionConfig ec;
        ec.t_start = t0;
        ec.t_end = t0 + pc.duration;
        ec.dt = pc.duration / static_cast<double>(n);
        ec.record_stride = static_cast<int>(n / per);
        ec.renormalize = cfg.renormalize;
        const Trajectory tr = evolve_schrodinger([&h](double) { return h; }, psi, ec, f);
        for (std::size_t k = (p == 0 ? 0 : 1); k < tr.size(); ++k) {
            out.times.push_back(tr.times[k]);
            out.axis.push_back(static_cast<double>(p) + static_cast<double>(k) / per);
            out.states.push_back(tr.states[k]);
            out.populations.push_back(tr.populations[k]);
        }
        out.max_norm_correction = std::max(out.max_norm_correction, tr.max_norm_correction);
        out.steps += tr.steps;
        psi = tr.final_state();
        t0 = ec.t_end;
    }
    return out;
}

/// Lindblad counterpart of evolve_pieces; returns the final density matrix only.
inline Matrix evolve_pieces_mixed(const std::vector<Piece>& pieces, const Matrix& rho0, const ScenarioConfig& cfg) {
    Matrix rho = rho0;
    double t0 = 0.0;
    const int nq = qubit_count(rho0.dim());
    for (const Piece& pc : pieces) {
        const Matrix h = pc.h;
        double f = h.norm_inf();
        if (cfg.noise.enabled) f = std::max(f, nq * (cfg.noise.damping_rate() + cfg.noise.dephasing_rate()));
        EvolutionConfig ec;
        ec.t_start = t0;
        ec.t_end = t0 + pc.duration;
        ec.dt = piece_dt(cfg, f, pc.duration);
        ec.record_stride = std::numeric_limits<int>::max();
        const MixedTrajectory tr = evolve_lindblad([&h](double) { return h; }, rho, cfg.noise, ec, f);
        rho = tr.final_rho();
        t0 = ec.t_end;
    }
    return rho;
}

inline double expectation(const Matrix& rho, const StateVector& s) {
    return inner_product(s.amps(), rho * s.amps()).real();
}

inline double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return (1 - w) * y[i - 1] + w * y[i];
}

inline StateVector prepared_qubit(double theta, int level = 0) {
    return apply(rx(theta), StateVector::basis(2, level));
}

// --- single-qubit gate realization -------------------------------------------------
// R_z factors are frame updates (instantaneous); R_x(theta) is a resonant drive
// of strength rabi lasting |theta| / (2 pi rabi).

inline std::vector<Piece> gate_pulses(const GateParams& g) {
    std::vector<Piece> out;
    if (g.theta != 0.0) {
        const double sgn = g.theta > 0 ? 1.0 : -1.0;
        out.push_back({qubit_drive(sgn * g.rabi_mhz, 0.0, 0.0), std::abs(g.theta) / (two_pi * g.rabi_mhz), true});
    }
    return out;
}

struct GateRun {
    StateVector ideal;
    Matrix rho;  // noisy when noise is enabled, otherwise the pulse-level pure state
};

inline GateRun run_gate_sequence(const std::vector<GateParams>& gates, const StateVector& psi0, const ScenarioConfig& cfg) {
    StateVector ideal = psi0;
    StateVector pure = psi0;
    Matrix rho = outer(psi0.amps(), psi0.amps());
    for (const GateParams& g : gates) {
        ideal = apply(single_qubit_unitary(g), ideal);
        const Matrix z_in = rz(2.0 * std::atan(g.lambda));
        const Matrix z_out = rz(g.phi);
        const auto pulses = gate_pulses(g);
        if (cfg.noise.enabled) {
            rho = z_in * rho * z_in.adjoint();
            if (!pulses.empty()) rho = evolve_pieces_mixed(pulses, rho, cfg);
            rho = z_out * rho * z_out.adjoint();
        } else {
            pure = apply(z_in, pure);
            if (!pulses.empty()) pure = evolve_pieces(pulses, pure, cfg, 2).final_state();
            pure = apply(z_out, pure);
        }
    }
    if (!cfg.noise.enabled) rho = outer(pure.amps(), pure.amps());
    return {ideal, rho};
}

inline std::vector<StateVector> cardinal_states() {
    const double r = 1.0 / std::sqrt(2.0);
    return {StateVector{1.0, 0.0},        StateVector{0.0, 1.0},         StateVector{r, r},
            StateVector{r, -r},           StateVector{r, cplx(0, r)},    StateVector{r, cplx(0, -r)}};
}

// --- three-qubit paths ---------------------------------------------------------------

/// Path detunings relative to the first path's frame: (0, D2 - D1, D3 - D1), indexed by qubit.
inline std::array<double, 3> relative_detunings(double d1, double d2, double d3) { return {0.0, d2 - d1, d3 - d1}; }

inline constexpr std::array<int, 3> path_order{2, 1, 0};

/// Each path is a pi rotation of one qubit about the tilted axis (rabi, 0, delta):
/// duration 1 / (2 sqrt(rabi^2 + delta^2)). Paths run on qubit 3, then 2, then 1.
inline std::vector<Piece> three_qubit_pieces(const ScenarioConfig& cfg, const std::array<double, 3>& rel, bool holds) {
    std::vector<Piece> out;
    for (int q : path_order) {
        const double w = std::hypot(cfg.rabi_mhz, rel[q]);
        out.push_back({qubit_drive(cfg.rabi_mhz, rel[q], 0.0, q, 3), 1.0 / (2.0 * w), true});
        if (holds && cfg.hold_us > 0) out.push_back({Matrix(8), cfg.hold_us, false});
    }
    return out;
}

inline StateVector three_qubit_initial(const ScenarioConfig& cfg) {
    return product_state({prepared_qubit(cfg.prep_angles[0]), prepared_qubit(cfg.prep_angles[1]),
                          prepared_qubit(cfg.prep_angles[2])});
}

/// |<psi0|psi(t)>|^2 along a trajectory.
inline std::vector<double> return_probability(const Trajectory& tr, const StateVector& psi0) {
    std::vector<double> p(tr.size());
    for (std::size_t k = 0; k < tr.size(); ++k) p[k] = fidelity(psi0, tr.states[k]);
    return p;
}

/// Replaces per-level populations by the return probability so that
/// phase_from_discrepancy can compare it through level 0.
inline Trajectory with_return_channel(Trajectory tr, const StateVector& psi0) {
    const auto p = return_probability(tr, psi0);
    for (std::size_t k = 0; k < tr.size(); ++k) tr.populations[k] = {p[k]};
    return tr;
}

inline double three_qubit_fidelity(const ScenarioConfig& cfg, const std::array<double, 3>& rel) {
    const auto pieces = three_qubit_pieces(cfg, rel, true);
    const StateVector psi0 = three_qubit_initial(cfg);
    const StateVector ideal = evolve_pieces(pieces, psi0, cfg, 2).final_state();
    if (!cfg.noise.enabled) return 1.0;
    const Matrix rho = evolve_pieces_mixed(pieces, outer(psi0.amps(), psi0.amps()), cfg);
    return expectation(rho, ideal);
}

}  // namespace detail

/// Single gate U(theta, phi = 0) on the prepared qubit, theta swept.
inline SweepResult run_single_qubit_theta_sweep(const ScenarioConfig& cfg) {
    cfg.check();
    const auto thetas = cfg.theta.values();
    const StateVector psi0 = detail::prepared_qubit(cfg.prep_theta, cfg.initial_level - 1);
    struct Row {
        double p1, p2, i1, i2;
    };
    const auto rows = parallel_map<Row>(thetas.size(), cfg.threads, [&](std::size_t k) {
        GateParams g;
        g.theta = thetas[k];
        g.rabi_mhz = cfg.rabi_mhz;
        const auto r = detail::run_gate_sequence({g}, psi0, cfg);
        return Row{r.rho(0, 0).real(), r.rho(1, 1).real(), std::norm(r.ideal[0]), std::norm(r.ideal[1])};
    });
    SweepResult res;
    res.axis_name = "theta_rad";
    res.axis_values = thetas;
    res.series = {{"p1", {}}, {"p2", {}}, {"p1_ideal", {}}, {"p2_ideal", {}}, {"discrepancy", {}}};
    for (const Row& r : rows) {
        res.series[0].values.push_back(r.p1);
        res.series[1].values.push_back(r.p2);
        res.series[2].values.push_back(r.i1);
        res.series[3].values.push_back(r.i2);
        res.series[4].values.push_back(std::abs(r.p1 - r.i1));
    }
    return res;
}

/// Drive of fixed rotation angle gate_theta, detuning swept; phases are taken against
/// the resonant run, and the noisy-vs-ideal gap is reported when noise is enabled.
inline SweepResult run_single_qubit_detuning_sweep(const ScenarioConfig& cfg) {
    cfg.check();
    const auto deltas = cfg.delta_sweep.values();
    const StateVector psi0 = detail::prepared_qubit(cfg.prep_theta, cfg.initial_level - 1);
    const double duration = std::abs(cfg.gate_theta) / (two_pi * cfg.rabi_mhz);
    const int samples = cfg.samples_per_path;
    auto pieces_for = [&](double d) {
        return std::vector<detail::Piece>{{qubit_drive(cfg.rabi_mhz, d, 0.0), duration, true}};
    };
    const Trajectory ref = detail::evolve_pieces(pieces_for(0.0), psi0, cfg, samples);

    struct Row {
        double p1, p2, disc_ref, phase, disc_ideal;
        bool defined;
        PhaseEstimate pe;
    };
    const auto rows = parallel_map<Row>(deltas.size(), cfg.threads, [&](std::size_t k) {
        const auto pieces = pieces_for(deltas[k]);
        const Trajectory act = detail::evolve_pieces(pieces, psi0, cfg, samples);
        const PhaseEstimate pe = phase_from_discrepancy(ref, act, 0, "resonant");
        Row r{act.populations.back()[0], act.populations.back()[1], pe.discrepancy, std::abs(pe.magnitude), 0.0,
              pe.defined, pe};
        if (cfg.noise.enabled) {
            // sample the noisy run on the same grid as the pure one
            Matrix rho = outer(psi0.amps(), psi0.amps());
            const double sub = duration / (samples - 1);
            const std::vector<detail::Piece> slice{{pieces[0].h, sub, true}};
            for (int s = 1; s < samples; ++s) {
                rho = detail::evolve_pieces_mixed(slice, rho, cfg);
                r.disc_ideal = std::max(r.disc_ideal, std::abs(rho(0, 0).real() - act.populations[s][0]));
            }
            r.p1 = rho(0, 0).real();
            r.p2 = rho(1, 1).real();
        }
        return r;
    });
    SweepResult res;
    res.axis_name = "delta_mhz";
    res.axis_values = deltas;
    res.series = {{"p1", {}}, {"p2", {}}, {"discrepancy_vs_resonant", {}}, {"phase_vs_resonant_rad", {}},
                  {"phase_defined", {}}, {"discrepancy_vs_ideal", {}}};
    for (const Row& r : rows) {
        res.series[0].values.push_back(r.p1);
        res.series[1].values.push_back(r.p2);
        res.series[2].values.push_back(r.disc_ref);
        res.series[3].values.push_back(r.phase);
        res.series[4].values.push_back(r.defined ? 1.0 : 0.0);
        res.series[5].values.push_back(r.disc_ideal);
        res.phase_estimates.push_back(r.pe);
    }
    return res;
}

/// The swept angle theta is split over composite_gates loops U(theta/n, phi = theta/n).
/// single_discrepancy is the same measure for one gate U(theta, 0).
inline SweepResult run_composite_gate_scenario(const ScenarioConfig& cfg) {
    cfg.check();
    const auto thetas = cfg.theta.values();
    const StateVector psi0 = detail::prepared_qubit(cfg.composite_prep_theta, cfg.initial_level - 1);
    const auto cardinals = detail::cardinal_states();
    const int n = cfg.composite_gates;

    struct Row {
        double p1, p2, i1, i2, avg_f, single_disc;
    };
    const auto rows = parallel_map<Row>(thetas.size(), cfg.threads, [&](std::size_t k) {
        GateParams g;
        g.theta = thetas[k] / n;
        g.phi = thetas[k] / n;
        g.rabi_mhz = cfg.rabi_mhz;
        const std::vector<GateParams> seq(static_cast<std::size_t>(n), g);
        const auto r = detail::run_gate_sequence(seq, psi0, cfg);
        double f = 0;
        for (const auto& c : cardinals) {
            const auto rc = detail::run_gate_sequence(seq, c, cfg);
            f += detail::expectation(rc.rho, rc.ideal);
        }
        GateParams single;
        single.theta = thetas[k];
        single.rabi_mhz = cfg.rabi_mhz;
        const auto rs = detail::run_gate_sequence({single}, psi0, cfg);
        return Row{r.rho(0, 0).real(), r.rho(1, 1).real(), std::norm(r.ideal[0]), std::norm(r.ideal[1]),
                   f / static_cast<double>(cardinals.size()), std::abs(rs.rho(0, 0).real() - std::norm(rs.ideal[0]))};
    });
    SweepResult res;
    res.axis_name = "theta_rad";
    res.axis_values = thetas;
    res.series = {{"p1", {}}, {"p2", {}}, {"p1_ideal", {}}, {"p2_ideal", {}},
                  {"discrepancy", {}}, {"avg_fidelity", {}}, {"single_discrepancy", {}}};
    double comp_max = 0, single_max = 0, f_sum = 0;
    for (const Row& r : rows) {
        res.series[0].values.push_back(r.p1);
        res.series[1].values.push_back(r.p2);
        res.series[2].values.push_back(r.i1);
        res.series[3].values.push_back(r.i2);
        res.series[4].values.push_back(std::abs(r.p1 - r.i1));
        res.series[5].values.push_back(r.avg_f);
        res.series[6].values.push_back(r.single_disc);
        comp_max = std::max(comp_max, std::abs(r.p1 - r.i1));
        single_max = std::max(single_max, r.single_disc);
        f_sum += r.avg_f;
    }
    res.fidelities["composite_max_discrepancy"] = comp_max;
    res.fidelities["single_max_discrepancy"] = single_max;
    res.fidelities["composite_avg_fidelity"] = rows.empty() ? 1.0 : f_sum / static_cast<double>(rows.size());
    return res;
}

/// Four-level pi/2 transfer: pump and Stokes share one envelope of width 1/alpha; the
/// excited levels sit at +/- excited_splitting/2 around the carrier.
inline Trajectory run_two_qubit_pi2(const ScenarioConfig& cfg) {
    cfg.check();
    LevelSpec spec;
    spec.dim = 4;
    const double half = 0.5 * cfg.excited_splitting_mhz;
    spec.energies_mhz = {0.0, 0.0, half, -half};
    const double width = 1.0 / cfg.alpha_mhz;
    const EnvelopeShape env{cfg.envelope};
    const double support = envelope_support(env, width);
    PulseSet ps;
    ps.pump.push_back({cfg.pump_mhz, 0.0, env, 0.5 * support, width, 0.0});
    ps.stokes.push_back({cfg.stokes_mhz, 0.0, env, 0.5 * support, width, 0.0});
    const HamiltonianFn h = [spec, ps](double t) { return build_rotating_frame_4(spec, ps, t); };
    EvolutionConfig ec;
    ec.t_end = support;
    ec.dt = cfg.dt_us > 0 ? std::min(cfg.dt_us, support) : 0.0;
    ec.record_stride = cfg.record_stride;
    ec.renormalize = cfg.renormalize;
    return evolve_schrodinger(h, StateVector::basis(4, cfg.initial_level - 1), ec);
}

/// On-resonant reference series used by the sweep and the time runs.
inline Trajectory three_qubit_reference(const ScenarioConfig& cfg, int samples, bool holds = false) {
    return detail::evolve_pieces(detail::three_qubit_pieces(cfg, {0.0, 0.0, 0.0}, holds), detail::three_qubit_initial(cfg),
                                 cfg, samples);
}

/// Sweeps delta1 with delta2, delta3 fixed. Row k also carries the on-resonant return
/// probability at the normalized rotation angle pi*k/(N-1).
inline SweepResult run_three_qubit_detuning_sweep(const ScenarioConfig& cfg) {
    cfg.check();
    const auto d1 = cfg.delta1_sweep.values();
    const StateVector psi0 = detail::three_qubit_initial(cfg);
    const int samples = cfg.samples_per_path;
    const Trajectory ref = detail::with_return_channel(three_qubit_reference(cfg, samples), psi0);

    const auto estimates = parallel_map<std::pair<PhaseEstimate, double>>(d1.size(), cfg.threads, [&](std::size_t k) {
        const auto rel = detail::relative_detunings(d1[k], cfg.delta2_mhz, cfg.delta3_mhz);
        const Trajectory act =
            detail::with_return_channel(detail::evolve_pieces(detail::three_qubit_pieces(cfg, rel, false), psi0, cfg, samples), psi0);
        return std::make_pair(phase_from_discrepancy(ref, act, 0, "on-resonant"), act.populations.back()[0]);
    });

    // dense reference for the rotation-angle view
    const Trajectory dense = detail::with_return_channel(three_qubit_reference(cfg, 401), psi0);
    std::vector<double> dense_p(dense.size());
    for (std::size_t k = 0; k < dense.size(); ++k) dense_p[k] = dense.populations[k][0];
    const double paths = static_cast<double>(detail::path_order.size());

    SweepResult res;
    res.axis_name = "delta1_mhz";
    res.axis_values = d1;
    res.series = {{"rotation_angle_rad", {}}, {"p_return_state1", {}}, {"p_return_on_resonant", {}},
                  {"phase_rad", {}},          {"phase_defined", {}},   {"discrepancy", {}}};
    const std::size_t n = d1.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double frac = n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 1.0;
        res.series[0].values.push_back(pi * frac);
        res.series[1].values.push_back(estimates[k].second);
        res.series[2].values.push_back(detail::interpolate(dense.axis, dense_p, paths * frac));
        res.series[3].values.push_back(std::abs(estimates[k].first.magnitude));
        res.series[4].values.push_back(estimates[k].first.defined ? 1.0 : 0.0);
        res.series[5].values.push_back(estimates[k].first.discrepancy);
        res.phase_estimates.push_back(estimates[k].first);
    }
    return res;
}

struct TimeEvolutionSet {
    std::vector<std::array<double, 3>> triples;  // triples[0] is the on-resonant reference
    std::vector<Trajectory> runs;                // return probability is stored as level 0
};

inline TimeEvolutionSet run_three_qubit_time_evolution(const ScenarioConfig& cfg) {
    cfg.check();
    if (cfg.triples.empty()) throw std::invalid_argument("three-qubit time evolution needs at least one triple");
    TimeEvolutionSet out;
    out.triples.push_back({0.0, 0.0, 0.0});
    out.triples.insert(out.triples.end(), cfg.triples.begin(), cfg.triples.end());
    const StateVector psi0 = detail::three_qubit_initial(cfg);
    out.runs = parallel_map<Trajectory>(out.triples.size(), cfg.threads, [&](std::size_t k) {
        const auto& t = out.triples[k];
        const auto rel = detail::relative_detunings(t[0], t[1], t[2]);
        return detail::with_return_channel(
            detail::evolve_pieces(detail::three_qubit_pieces(cfg, rel, true), psi0, cfg, cfg.samples_per_path), psi0);
    });
    return out;
}

/// Resonant |1> <-> |5> rotation (qubit 3) with a shaped pulse of peak rabi_mhz whose
/// Bloch angle is pi3_angle; the width follows from the envelope area.
inline Trajectory run_pi3_rotation(const ScenarioConfig& cfg) {
    cfg.check();
    const EnvelopeShape env{cfg.envelope};
    const double area = cfg.pi3_angle / (two_pi * cfg.rabi_mhz);  // µs
    const double width = area / envelope_area(env, 1.0);
    const double support = envelope_support(env, width);
    const double rabi = cfg.rabi_mhz;
    const HamiltonianFn h = [=](double t) {
        return qubit_drive(rabi * envelope_value(env, t, 0.5 * support, width), 0.0, 0.0, 2, 3);
    };
    EvolutionConfig ec;
    ec.t_end = support;
    ec.dt = cfg.dt_us > 0 ? std::min(cfg.dt_us, support) : 0.0;
    ec.record_stride = cfg.record_stride;
    ec.renormalize = cfg.renormalize;
    return evolve_schrodinger(h, StateVector::basis(8, 0), ec);
}

struct DarkSpectrum {
    Matrix hamiltonian;
    EigenSystem eigen;
    std::vector<bool> dark;
    std::vector<double> leakage;    // max population change of each dark state (0 for bright ones)
    std::vector<double> alignment;  // overlap with the parameterized |D>
};

inline DarkSpectrum run_dark_state_spectrum(const ScenarioConfig& cfg) {
    cfg.check();
    LevelSpec spec;
    spec.dim = 8;
    spec.delta1 = cfg.delta1_mhz;
    spec.delta2 = cfg.delta2_mhz;
    spec.delta3 = cfg.delta3_mhz;
    std::array<cplx, 6> rabi;
    for (int i = 0; i < 6; ++i) rabi[i] = cfg.interaction_rabi_mhz[i];
    DarkSpectrum out;
    out.hamiltonian = build_interaction_8(spec, rabi, HermiticityMode::hermitized);
    out.eigen = eig_hermitian(out.hamiltonian);
    const double scale = out.hamiltonian.max_abs();
    const StateVector d = dark_states({cfg.beta, cfg.varphi}).d;
    const Matrix h = out.hamiltonian;
    const double f = h.norm_inf();
    const auto n = out.eigen.values.size();
    out.dark.resize(n);
    out.leakage.assign(n, 0.0);
    out.alignment.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const StateVector v(out.eigen.vectors[k]);
        out.alignment[k] = dark_alignment(v, d);
        out.dark[k] = std::abs(out.eigen.values[k]) <= 1e-9 * scale;
        if (!out.dark[k]) continue;
        EvolutionConfig ec;
        ec.t_end = cfg.duration_us;
        ec.dt = cfg.dt_us > 0 ? std::min(cfg.dt_us, cfg.duration_us) : 0.0;
        ec.record_stride = cfg.record_stride;
        ec.renormalize = cfg.renormalize;
        const Trajectory tr = evolve_schrodinger([&h](double) { return h; }, v, ec, f);
        double leak = 0;
        for (const auto& pop : tr.populations)
            for (int i = 0; i < v.dim(); ++i) leak = std::max(leak, std::abs(pop[i] - std::norm(v[i])));
        out.leakage[k] = leak;
    }
    return out;
}

struct ResonantFidelity {
    double off_resonant = 1.0;  // averaged over the delta1 grid
    double on_resonant = 1.0;
};

/// State fidelity of the noisy three-qubit sequence against its noiseless twin.
inline ResonantFidelity compare_resonant_fidelity(const ScenarioConfig& cfg) {
    cfg.check();
    const auto d1 = cfg.delta1_sweep.values();
    ResonantFidelity r;
    r.on_resonant = detail::three_qubit_fidelity(cfg, {0.0, 0.0, 0.0});
    const auto f = parallel_map<double>(d1.size(), cfg.threads, [&](std::size_t k) {
        return detail::three_qubit_fidelity(cfg, detail::relative_detunings(d1[k], cfg.delta2_mhz, cfg.delta3_mhz));
    });
    double s = 0;
    for (double v : f) s += v;
    r.off_resonant = s / static_cast<double>(f.size());
    return r;
}

struct NoiseGridPoint {
    double t1_us, t2_us;
    ResonantFidelity fidelity;
};

/// compare_resonant_fidelity over every valid (t1, t2) pair of the grid; pairs with
/// t2 > 2 t1 are unphysical and skipped.
inline std::vector<NoiseGridPoint> noise_grid_fidelity(const ScenarioConfig& cfg) {
    cfg.check();
    std::vector<NoiseGridPoint> out;
    for (double t1 : cfg.noise_grid_us)
        for (double t2 : cfg.noise_grid_us) {
            if (t2 > 2 * t1) continue;
            ScenarioConfig c = cfg;
            c.noise.t1_us = t1;
            c.noise.t2_us = t2;
            c.noise.enabled = true;
            out.push_back({t1, t2, compare_resonant_fidelity(c)});
        }
    return out;
}

}  // namespace nvholo
