#pragma once

#include "linalg.hpp"

#include <functional>
#include <limits>
#include <optional>

namespace nvholo {

struct EvolutionConfig {
    double t_start = 0.0;  // µs
    double t_end = 1.0;    // µs
    double dt = 0.0;       // µs; 0 selects the recommended step
    int record_stride = 1;
    bool renormalize = true;

    void check() const {
        if (!(t_end > t_start)) throw std::invalid_argument("evolution needs t_end > t_start");
        if (dt < 0 || dt > (t_end - t_start) * (1 + 1e-12)) throw std::invalid_argument("dt must lie in (0, t_end - t_start]");
        if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
    }
};

struct Trajectory {
    std::vector<double> times;  // µs
    std::vector<double> axis;   // sampling coordinate used for comparisons; equals times unless set otherwise
    std::vector<StateVector> states;
    std::vector<std::vector<double>> populations;  // populations[k][level]
    double max_norm_correction = 0.0;  // largest |1 - norm| removed by renormalization
    long steps = 0;

    std::size_t size() const { return times.size(); }
    const StateVector& final_state() const { return states.back(); }
};

struct NoiseModel {
    double t1_us = 100.0;
    double t2_us = 50.0;
    bool enabled = false;

    void check() const {
        if (!(t1_us > 0) || !(t2_us > 0)) throw std::invalid_argument("t1 and t2 must be positive");
        if (std::isfinite(t1_us) && std::isfinite(t2_us) && t2_us > 2 * t1_us)
            throw std::invalid_argument("t2 must not exceed 2*t1");
    }
    double damping_rate() const { return std::isfinite(t1_us) ? 1.0 / t1_us : 0.0; }
    double dephasing_rate() const {
        const double inv_t2 = std::isfinite(t2_us) ? 1.0 / t2_us : 0.0;
        return std::max(0.0, inv_t2 - 0.5 * damping_rate());
    }
};

struct MixedTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> populations;
    std::vector<Matrix> rhos;
    double max_trace_error = 0.0;

    const Matrix& final_rho() const { return rhos.back(); }
};

using HamiltonianFn = std::function<Matrix(double)>;

/// Largest angular frequency seen in H over [t0, t1] (row-sum bound, sampled).
inline double max_angular_frequency(const HamiltonianFn& h, double t0, double t1, int samples = 129) {
    double f = 0;
    for (int k = 0; k < samples; ++k) {
        const double t = samples == 1 ? t0 : t0 + (t1 - t0) * k / (samples - 1);
        f = std::max(f, h(t).norm_inf());
    }
    return f;
}

/// 1 / (200 f_max), capped at the span.
inline double recommended_dt(double f_max, double span) {
    if (f_max <= 0) return span;
    return std::min(span, 1.0 / (200.0 * f_max));
}

namespace detail {

inline long step_count(double span, double dt) {
    const long n = static_cast<long>(std::ceil(span / dt - 1e-9));
    return std::max(1L, n);
}

inline void check_hermitian_sample(const Matrix& h, double t) {
    const double tol = 1e-10 * std::max(1.0, h.max_abs());
    if (h.hermiticity_error() > tol)
        throw NumericalError("non-Hermitian Hamiltonian sample at t = " + std::to_string(t) + " us");
}

inline CVec schrodinger_rhs(const Matrix& h, const CVec& psi) {
    CVec d = h * psi;
    d *= cplx(0.0, -1.0);
    return d;
}

}  // namespace detail

/// Fixed-step RK4 for i dpsi/dt = H(t) psi.
inline Trajectory evolve_schrodinger(const HamiltonianFn& h, const StateVector& psi0, EvolutionConfig cfg,
                                     std::optional<double> f_max = std::nullopt) {
    cfg.check();
    const double span = cfg.t_end - cfg.t_start;
    if (cfg.dt == 0.0) cfg.dt = recommended_dt(f_max ? *f_max : max_angular_frequency(h, cfg.t_start, cfg.t_end), span);
    const long n = detail::step_count(span, cfg.dt);
    const double dt = span / n;

    Trajectory tr;
    // populations come from the raw amplitudes so any drift stays visible
    auto record = [&](double t, const CVec& v) {
        tr.times.push_back(t);
        tr.axis.push_back(t);
        std::vector<double> p(v.size());
        for (int i = 0; i < v.size(); ++i) p[i] = std::norm(v[i]);
        tr.populations.push_back(std::move(p));
        tr.states.emplace_back(v);
    };

    CVec psi = psi0.amps();
    record(cfg.t_start, psi);
    for (long k = 0; k < n; ++k) {
        const double t = cfg.t_start + k * dt;
        const Matrix h0 = h(t), hm = h(t + 0.5 * dt), h1 = h(t + dt);
        detail::check_hermitian_sample(h0, t);
        detail::check_hermitian_sample(hm, t + 0.5 * dt);
        const CVec k1 = detail::schrodinger_rhs(h0, psi);
        CVec y = psi;
        y.axpy(0.5 * dt, k1);
        const CVec k2 = detail::schrodinger_rhs(hm, y);
        y = psi;
        y.axpy(0.5 * dt, k2);
        const CVec k3 = detail::schrodinger_rhs(hm, y);
        y = psi;
        y.axpy(dt, k3);
        const CVec k4 = detail::schrodinger_rhs(h1, y);
        psi.axpy(dt / 6.0, k1);
        psi.axpy(dt / 3.0, k2);
        psi.axpy(dt / 3.0, k3);
        psi.axpy(dt / 6.0, k4);

        const double nrm = std::sqrt(psi.norm2());
        if (!std::isfinite(nrm) || std::abs(nrm - 1.0) > 1e-3)
            throw NumericalError("norm drift " + std::to_string(nrm - 1.0) + " exceeds 1e-3; reduce dt");
        if (cfg.renormalize) {
            tr.max_norm_correction = std::max(tr.max_norm_correction, std::abs(nrm - 1.0));
            psi *= 1.0 / nrm;
        }
        if ((k + 1) % cfg.record_stride == 0 || k + 1 == n) record(cfg.t_start + (k + 1) * dt, psi);
    }
    tr.steps = n;
    return tr;
}

namespace detail {

// Per-qubit amplitude damping (bit 1 -> 0) and pure dephasing, applied element-wise.
inline void add_dissipator(Matrix& out, const Matrix& rho, const NoiseModel& noise) {
    const int n = rho.dim();
    const int nq = qubit_count(n);
    const double g1 = noise.damping_rate(), gp = noise.dephasing_rate();
    for (int q = 0; q < nq; ++q) {
        const int b = 1 << q;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int bi = (i & b) ? 1 : 0, bj = (j & b) ? 1 : 0;
                cplx d = -0.5 * g1 * (bi + bj) * rho(i, j);
                if (!bi && !bj) d += g1 * rho(i | b, j | b);
                if (bi != bj) d -= gp * rho(i, j);
                out(i, j) += d;
            }
    }
}

inline Matrix lindblad_rhs(const Matrix& h, const Matrix& rho, const NoiseModel& noise) {
    Matrix d = commutator(h, rho);
    d *= cplx(0.0, -1.0);
    if (noise.enabled) add_dissipator(d, rho, noise);
    return d;
}

}  // namespace detail

/// Fixed-step RK4 on the density matrix, with the Lindblad channels of `noise` when enabled.
inline MixedTrajectory evolve_lindblad(const HamiltonianFn& h, const Matrix& rho0, const NoiseModel& noise,
                                       EvolutionConfig cfg, std::optional<double> f_max = std::nullopt) {
    cfg.check();
    noise.check();
    if (!valid_level_count(rho0.dim())) throw DimensionError("density matrix level count must be 2, 4 or 8");
    const double span = cfg.t_end - cfg.t_start;
    if (cfg.dt == 0.0) {
        double f = f_max ? *f_max : max_angular_frequency(h, cfg.t_start, cfg.t_end);
        if (noise.enabled) f = std::max(f, qubit_count(rho0.dim()) * (noise.damping_rate() + noise.dephasing_rate()));
        cfg.dt = recommended_dt(f, span);
    }
    const long n = detail::step_count(span, cfg.dt);
    const double dt = span / n;

    MixedTrajectory tr;
    auto record = [&](double t, const Matrix& r) {
        tr.times.push_back(t);
        std::vector<double> p(r.dim());
        for (int i = 0; i < r.dim(); ++i) p[i] = r(i, i).real();
        tr.populations.push_back(std::move(p));
        tr.rhos.push_back(r);
        tr.max_trace_error = std::max(tr.max_trace_error, std::abs(r.trace() - 1.0));
    };

    Matrix rho = rho0;
    record(cfg.t_start, rho);
    for (long k = 0; k < n; ++k) {
        const double t = cfg.t_start + k * dt;
        const Matrix h0 = h(t), hm = h(t + 0.5 * dt), h1 = h(t + dt);
        detail::check_hermitian_sample(h0, t);
        detail::check_hermitian_sample(hm, t + 0.5 * dt);
        const Matrix k1 = detail::lindblad_rhs(h0, rho, noise);
        Matrix y = rho;
        y.axpy(0.5 * dt, k1);
        const Matrix k2 = detail::lindblad_rhs(hm, y, noise);
        y = rho;
        y.axpy(0.5 * dt, k2);
        const Matrix k3 = detail::lindblad_rhs(hm, y, noise);
        y = rho;
        y.axpy(dt, k3);
        const Matrix k4 = detail::lindblad_rhs(h1, y, noise);
        rho.axpy(dt / 6.0, k1);
        rho.axpy(dt / 3.0, k2);
        rho.axpy(dt / 3.0, k3);
        rho.axpy(dt / 6.0, k4);
        const double tr_err = std::abs(rho.trace() - 1.0);
        if (!std::isfinite(tr_err) || tr_err > 1e-3) throw NumericalError("density-matrix trace drift exceeds 1e-3; reduce dt");
        if ((k + 1) % cfg.record_stride == 0 || k + 1 == n) record(cfg.t_start + (k + 1) * dt, rho);
    }
    return tr;
}

/// Max population difference between runs at dt and dt/2.
inline double convergence_check(const HamiltonianFn& h, const StateVector& psi0, EvolutionConfig cfg) {
    cfg.check();
    if (cfg.dt == 0.0) cfg.dt = recommended_dt(max_angular_frequency(h, cfg.t_start, cfg.t_end), cfg.t_end - cfg.t_start);
    const double span = cfg.t_end - cfg.t_start;
    cfg.dt = span / detail::step_count(span, cfg.dt);
    EvolutionConfig fine = cfg;
    fine.dt = 0.5 * cfg.dt;
    fine.record_stride = 2 * cfg.record_stride;
    const Trajectory a = evolve_schrodinger(h, psi0, cfg);
    const Trajectory b = evolve_schrodinger(h, psi0, fine);
    double m = 0;
    const std::size_t len = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < len; ++k)
        for (std::size_t i = 0; i < a.populations[k].size(); ++i)
            m = std::max(m, std::abs(a.populations[k][i] - b.populations[k][i]));
    return m;
}

}  // namespace nvholo
