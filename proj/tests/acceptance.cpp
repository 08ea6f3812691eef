// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
#include "nvholo/io.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace nvholo;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rabi_p2(double rabi, double t) {
    const double s = std::sin(pi * rabi * t);
    return s * s;
}

double rabi_error(double span, double dt) {
    EvolutionConfig c;
    c.t_end = span;
    c.dt = dt;
    c.renormalize = false;
    const Matrix h = qubit_drive(15.0, 0.0, 0.0);
    const Trajectory tr = evolve_schrodinger([&](double) { return h; }, StateVector::basis(2, 0), c);
    double e = 0;
    for (std::size_t k = 0; k < tr.size(); ++k) e = std::max(e, std::abs(tr.populations[k][1] - rabi_p2(15.0, tr.times[k])));
    return e;
}

ScenarioConfig three_qubit(ScenarioId id) {
    ScenarioConfig c;
    c.id = id;
    c.delta2_mhz = 105.0;
    c.delta3_mhz = 450.0;
    return c;
}

void rabi_oracle(Outcome& o) {
    const auto t0 = Clock::now();
    const double base = recommended_dt(qubit_drive(15.0, 0.0, 0.0).norm_inf(), 0.2);
    const double err = rabi_error(0.2, base);
    const double e20 = rabi_error(0.2, 20 * base), e10 = rabi_error(0.2, 10 * base), e5 = rabi_error(0.2, 5 * base);
    const double secs = seconds_since(t0);
    o.detail << "max |dP2| = " << err << ", halving ratios " << e20 / e10 << ", " << e10 / e5 << ", " << secs << " s";
    o.require(err <= 1e-6, "analytic agreement");
    o.require(e20 / e10 >= 8 && e10 / e5 >= 8, "fourth-order convergence");
    o.require(secs < 1.0, "runtime");
}

void two_qubit_pi2(Outcome& o) {
    const auto t0 = Clock::now();
    ScenarioConfig c;
    c.id = ScenarioId::two_qubit_pi2;
    const Trajectory tr = run_two_qubit_pi2(c);
    const double secs = seconds_since(t0);
    const StateVector& f = tr.final_state();
    double mismatch = 0;
    for (const auto& s : tr.states) mismatch = std::max(mismatch, std::abs(std::abs(s[2]) - std::abs(s[3])));
    o.detail << "|amp1| = " << std::abs(f[0]) << ", |amp2| = " << std::abs(f[1]) << ", |amp3| = " << std::abs(f[2])
             << ", |amp4| = " << std::abs(f[3]) << ", max ||amp3|-|amp4|| = " << mismatch << ", " << secs << " s";
    const double r2 = 1 / std::sqrt(2.0);
    o.require(std::abs(std::abs(f[0]) - r2) <= 0.02 && std::abs(std::abs(f[1]) - r2) <= 0.02, "ground amplitudes");
    for (const StateVector* s : {&tr.states.front(), &f})
        o.require(std::abs((*s)[2]) <= 0.02 && std::abs((*s)[3]) <= 0.02, "excited amplitudes at the ends");
    o.require(mismatch <= 1e-6, "excited amplitudes equal");
    o.require(secs < 1.0, "runtime");
}

void pi3_rotation(Outcome& o) {
    ScenarioConfig c;
    c.id = ScenarioId::pi3;
    const Trajectory tr = run_pi3_rotation(c);
    const StateVector& f = tr.final_state();
    double excited = 0, drift = 0;
    for (int i : {1, 2, 3, 5, 6, 7}) excited += std::norm(f[i]);
    for (const auto& p : tr.populations) {
        double total = 0;
        for (double v : p) total += v;
        drift = std::max(drift, std::abs(total - 1.0));
    }
    o.detail << "|amp5| = " << std::abs(f[4]) << ", |amp1| = " << std::abs(f[0]) << ", other population = " << excited
             << ", norm drift = " << drift;
    o.require(std::abs(std::abs(f[4]) - 0.866) <= 0.02, "|amp5|");
    o.require(std::abs(std::abs(f[0]) - 0.5) <= 0.02, "|amp1|");
    o.require(excited <= 0.02, "excited manifold");
    o.require(drift <= 1e-6, "norm");
}

void on_resonant_sweep(Outcome& o) {
    ScenarioConfig c = three_qubit(ScenarioId::three_qubit_sweep);
    c.delta1_sweep = {0.0, 600.0, 600.0 / 49};  // 50 points
    const auto t0 = Clock::now();
    const SweepResult r = run_three_qubit_detuning_sweep(c);
    const double secs = seconds_since(t0);
    const auto& p = r.column("p_return_on_resonant");
    o.detail << r.axis_values.size() << " points, P1(0) = " << p.front() << ", P1(pi) = " << p.back() << ", " << secs
             << " s";
    o.require(r.axis_values.size() == 50, "grid size");
    o.require(std::abs(p.front() - 1.0) <= 0.01, "P1 at angle 0");
    o.require(p.back() <= 0.02, "P1 at angle pi");
    o.require(secs < 10.0, "runtime");
}

void phase_shape(Outcome& o) {
    const ScenarioConfig c = three_qubit(ScenarioId::three_qubit_sweep);
    const SweepResult r = run_three_qubit_detuning_sweep(c);
    const double step = c.delta1_sweep.step;
    const auto& ph = r.column("phase_rad");
    const auto& disc = r.column("discrepancy");
    const std::size_t peak = static_cast<std::size_t>(std::max_element(ph.begin(), ph.end()) - ph.begin());
    std::vector<double> minima;
    for (std::size_t k = 1; k + 1 < disc.size(); ++k)
        if (disc[k] < disc[k - 1] && disc[k] < disc[k + 1]) minima.push_back(r.axis_values[k]);
    bool dip = false;
    for (double m : minima) dip |= std::abs(m - 450.0) <= step;
    o.detail << "phase peak at " << r.axis_values[peak] << " MHz, discrepancy minima at";
    for (double m : minima) o.detail << " " << m;
    o.detail << " MHz";
    o.require(std::abs(r.axis_values[peak] - 300.0) <= step, "phase peak near 300 MHz");
    o.require(dip, "discrepancy minimum near 450 MHz");
}

void dark_states_suite(Outcome& o) {
    double worst = 0;
    int dark = 0;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-20, 20), a(0, 20);
    for (int trial = 0; trial < 20; ++trial) {
        ScenarioConfig c;
        c.id = ScenarioId::dark_states;
        if (trial > 0) {
            c.delta1_mhz = u(rng);
            c.delta2_mhz = u(rng);
            c.delta3_mhz = u(rng);
            for (auto& w : c.interaction_rabi_mhz) w = a(rng);
        }
        const DarkSpectrum s = run_dark_state_spectrum(c);
        for (std::size_t k = 0; k < s.dark.size(); ++k)
            if (s.dark[k]) {
                ++dark;
                worst = std::max(worst, s.leakage[k]);
            }
    }
    double invariance = 0;
    std::uniform_real_distribution<double> ang(-pi, pi);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ds = dark_states({ang(rng), ang(rng)});
        const Matrix h = holonomic_unitary(ang(rng), ds.d, orthogonal_partner(ds.d));
        CVec hd = h * ds.d.amps();
        hd.axpy(-1.0, ds.d.amps());
        invariance = std::max(invariance, std::sqrt(hd.norm2()));
    }
    o.detail << dark << " dark eigenvectors, max leakage = " << worst << ", max |U|D> - |D>| = " << invariance;
    o.require(dark > 0, "dark states found");
    o.require(worst <= 1e-6, "leakage");
    o.require(invariance <= 1e-12, "|D> invariant");
}

void fidelity_ordering(Outcome& o) {
    ScenarioConfig c = three_qubit(ScenarioId::fidelity_compare);
    c.noise.enabled = true;
    const auto t0 = Clock::now();
    const ResonantFidelity f = compare_resonant_fidelity(c);
    const auto grid = noise_grid_fidelity(c);
    double min_gap = 1.0;
    for (const auto& p : grid) min_gap = std::min(min_gap, p.fidelity.off_resonant - p.fidelity.on_resonant);
    o.detail << "t1 = " << c.noise.t1_us << " us, t2 = " << c.noise.t2_us << " us: off = " << f.off_resonant
             << ", on = " << f.on_resonant << "; " << grid.size() << " grid pairs, min(off - on) = " << min_gap << ", "
             << seconds_since(t0) << " s";
    o.require(f.off_resonant - f.on_resonant >= 0.05, "gap");
    o.require(std::abs(f.off_resonant - 0.80) <= 0.05, "off-resonant value");
    o.require(std::abs(f.on_resonant - 0.70) <= 0.05, "on-resonant value");
    o.require(!grid.empty() && min_gap > 0, "ordering across the grid");
}

void composite_vs_single(Outcome& o) {
    ScenarioConfig c;
    c.id = ScenarioId::composite;
    c.noise.enabled = true;
    const SweepResult r = run_composite_gate_scenario(c);
    const double comp = r.fidelities.at("composite_max_discrepancy"), single = r.fidelities.at("single_max_discrepancy");
    o.detail << "composite max = " << comp << ", single max = " << single;
    o.require(comp < single, "composite below single");
}

void property_suites(Outcome& o) {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1, 1);
    double herm = 0, unit = 0, trace = 0, min_eig = 1, period = 0;
    for (int trial = 0; trial < 100; ++trial) {
        LevelSpec s8;
        s8.dim = 8;
        for (auto& e : s8.energies_mhz) e = 50 * u(rng);
        PulseSet ps;
        for (int i = 0; i < 3; ++i) {
            ps.pump.push_back({20 * std::abs(u(rng)), 3 * u(rng), {EnvelopeKind::gaussian}, 0.5, 0.2, pi * u(rng)});
            ps.stokes.push_back({20 * std::abs(u(rng)), 3 * u(rng), {EnvelopeKind::sin_squared}, 0.5, 0.4, 0.0});
        }
        herm = std::max(herm, build_rotating_frame_8(s8, ps, 0.5 + 0.4 * u(rng)).hermiticity_error());
        LevelSpec s4;
        s4.dim = 4;
        s4.energies_mhz = {10 * u(rng), 0, 10, -10};
        PulseSet p4;
        p4.pump.push_back(ps.pump[0]);
        p4.stokes.push_back(ps.stokes[0]);
        herm = std::max(herm, build_rotating_frame_4(s4, p4, 0.5).hermiticity_error());
        std::array<cplx, 6> om;
        for (auto& w : om) w = cplx(20 * u(rng), 20 * u(rng));
        s8.delta1 = 50 * u(rng);
        herm = std::max(herm, build_interaction_8(s8, om, HermiticityMode::hermitized).hermiticity_error());

        GateParams g;
        g.theta = 4 * u(rng);
        g.phi = 4 * u(rng);
        g.lambda = 4 * u(rng);
        const auto ds = dark_states({pi * u(rng), pi * u(rng)});
        for (const Matrix& m : {single_qubit_unitary(g), holonomic_unitary(6 * u(rng), ds.d, orthogonal_partner(ds.d)),
                                axis_rotation(u(rng), u(rng), 4 * u(rng))})
            unit = std::max(unit, (m * m.adjoint() - Matrix::identity(m.dim())).max_abs());

        const double th = pi * u(rng), ph = pi * u(rng);
        const Vec3 a = rotation_axis(th, ph), b = rotation_axis(th + two_pi / 3, ph);
        period = std::max({period, std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
    }
    for (int dim : {2, 4, 8}) {
        NoiseModel n;
        n.enabled = true;
        n.t1_us = 0.5;
        n.t2_us = 0.3;
        const Matrix h = qubit_drive(15.0, 5.0, 0.2, 0, qubit_count(dim));
        StateVector psi = StateVector::basis(dim, dim - 1);
        EvolutionConfig c;
        c.t_end = 1.0;
        c.record_stride = 200;
        const MixedTrajectory tr = evolve_lindblad([&](double) { return h; }, outer(psi.amps(), psi.amps()), n, c);
        trace = std::max(trace, tr.max_trace_error);
        for (const Matrix& rho : tr.rhos)
            min_eig = std::min(min_eig, DensityMatrix(cplx(0.5) * (rho + rho.adjoint()), 1e-6).min_eigenvalue());
    }
    ScenarioConfig sc = three_qubit(ScenarioId::three_qubit_sweep);
    sc.delta1_sweep = {0, 600, 50};
    const std::string first = to_csv_text(sweep_table(run_three_qubit_detuning_sweep(sc)));
    sc.threads = 2;
    const std::string second = to_csv_text(sweep_table(run_three_qubit_detuning_sweep(sc)));

    o.detail << "hermiticity " << herm << ", unitarity " << unit << ", trace " << trace << ", min eigenvalue " << min_eig
             << ", periodicity " << period << ", csv identical " << (first == second ? "yes" : "no");
    o.require(herm <= 1e-12, "hermiticity");
    o.require(unit <= 1e-12, "unitarity");
    o.require(trace <= 1e-6, "trace");
    o.require(min_eig >= -1e-6, "positivity");
    o.require(period <= 1e-12, "axis periodicity");
    o.require(first == second, "determinism");
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
        {"Rabi oracle and convergence", rabi_oracle},
        {"two-qubit pi/2 transfer", two_qubit_pi2},
        {"pi/3 rotation", pi3_rotation},
        {"three-qubit on-resonant sweep", on_resonant_sweep},
        {"phase-vs-detuning shape", phase_shape},
        {"dark-state suite", dark_states_suite},
        {"fidelity ordering", fidelity_ordering},
        {"composite vs single discrepancy", composite_vs_single},
        {"property suites", property_suites},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        failed += !o.pass;
        std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
