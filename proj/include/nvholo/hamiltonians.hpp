#pragma once

#include "core.hpp"

namespace nvholo {

enum class EnvelopeKind { constant, gaussian, sin_squared };

struct EnvelopeShape {
    EnvelopeKind kind = EnvelopeKind::gaussian;
};

/// Envelope value in [0, 1].
/// constant and sin_squared occupy [t_center - t_width/2, t_center + t_width/2];
/// gaussian has standard deviation t_width and is cut at 4 widths.
inline double envelope_value(EnvelopeShape e, double t, double t_center, double t_width) {
    if (!(t_width > 0)) throw std::invalid_argument("envelope width must be positive");
    const double x = t - t_center;
    switch (e.kind) {
    case EnvelopeKind::constant:
        return std::abs(x) <= 0.5 * t_width ? 1.0 : 0.0;
    case EnvelopeKind::gaussian:
        return std::abs(x) <= 4.0 * t_width ? std::exp(-x * x / (2.0 * t_width * t_width)) : 0.0;
    case EnvelopeKind::sin_squared: {
        const double u = x + 0.5 * t_width;
        if (u < 0 || u > t_width) return 0.0;
        const double s = std::sin(pi * u / t_width);
        return s * s;
    }
    }
    return 0.0;
}

/// Integral of the envelope over its whole support (µs).
inline double envelope_area(EnvelopeShape e, double t_width) {
    switch (e.kind) {
    case EnvelopeKind::constant: return t_width;
    case EnvelopeKind::gaussian: return t_width * std::sqrt(two_pi) * std::erf(4.0 / std::sqrt(2.0));
    case EnvelopeKind::sin_squared: return 0.5 * t_width;
    }
    return 0.0;
}

/// Time span covered by the envelope support.
inline double envelope_support(EnvelopeShape e, double t_width) {
    return e.kind == EnvelopeKind::gaussian ? 8.0 * t_width : t_width;
}

struct PulseChannel {
    double rabi_mhz = 0.0;     // peak amplitude, linear MHz
    double carrier_mhz = 0.0;  // nu, linear MHz
    EnvelopeShape envelope{};
    double t_center = 0.0;  // µs
    double t_width = 1.0;   // µs
    double phase = 0.0;     // rad

    /// Complex drive Omega(t) e^{-i nu t} in angular units (rad/µs).
    cplx drive(double t) const {
        if (rabi_mhz < 0) throw std::invalid_argument("rabi amplitude must be non-negative");
        const double env = envelope_value(envelope, t, t_center, t_width);
        if (env == 0.0) return 0.0;
        return two_pi * rabi_mhz * env * std::polar(1.0, phase - two_pi * carrier_mhz * t);
    }
};

/// Pump and Stokes channels, indexed from 0 (channel P_1 is pump[0]).
struct PulseSet {
    std::vector<PulseChannel> pump;
    std::vector<PulseChannel> stokes;
};

struct LevelSpec {
    int dim = 8;
    std::vector<double> energies_mhz;  // omega_i, length dim
    double delta1 = 0.0, delta2 = 0.0, delta3 = 0.0;  // MHz

    void check(int want) const {
        if (dim != want) throw DimensionError("level spec has dim " + std::to_string(dim) + ", expected " + std::to_string(want));
        if (!energies_mhz.empty() && static_cast<int>(energies_mhz.size()) != dim)
            throw DimensionError("energies must list one value per level");
        for (double e : energies_mhz)
            if (!std::isfinite(e)) throw std::invalid_argument("non-finite level energy");
    }
    double energy(int i) const { return energies_mhz.empty() ? 0.0 : energies_mhz[i]; }
};

enum class HermiticityMode { literal, hermitized };

namespace detail {

inline void add_coupling(Matrix& h, int i, int j, cplx v) {
    h(i, j) += v;
    h(j, i) += std::conj(v);
}

inline const PulseChannel& channel(const std::vector<PulseChannel>& v, std::size_t k, const char* what) {
    if (k >= v.size()) throw std::invalid_argument(std::string("missing pulse channel ") + what + std::to_string(k + 1));
    return v[k];
}

}  // namespace detail

/// Three-qubit rotating-frame Hamiltonian (rad/µs) at time t.
inline Matrix build_rotating_frame_8(const LevelSpec& spec, const PulseSet& pulses, double t) {
    spec.check(8);
    Matrix h(8);
    for (int i = 0; i < 8; ++i) h(i, i) = two_pi * spec.energy(i);
    const cplx half_i(0.0, 0.5);
    const cplx p12 = detail::channel(pulses.pump, 0, "P").drive(t) - detail::channel(pulses.pump, 1, "P").drive(t);
    const cplx s12 = detail::channel(pulses.stokes, 0, "S").drive(t) - detail::channel(pulses.stokes, 1, "S").drive(t);
    const cplx p3 = detail::channel(pulses.pump, 2, "P").drive(t);
    const cplx s3 = detail::channel(pulses.stokes, 2, "S").drive(t);
    // levels are 0-based here: |1> -> 0, |7> -> 6
    detail::add_coupling(h, 0, 6, half_i * p12);
    detail::add_coupling(h, 0, 7, -half_i * p12);
    detail::add_coupling(h, 1, 6, -half_i * s12);
    detail::add_coupling(h, 1, 7, -half_i * s12);
    detail::add_coupling(h, 0, 2, half_i * p3);
    detail::add_coupling(h, 1, 3, -half_i * s3);
    return h;
}

/// Three-qubit interaction-picture Hamiltonian (rad/µs) from six Rabi amplitudes (MHz).
/// literal mode keeps the printed, non-Hermitian matrix; hermitized returns (M + M^dagger)/2.
inline Matrix build_interaction_8(const LevelSpec& spec, const std::array<cplx, 6>& rabi, HermiticityMode mode) {
    spec.check(8);
    const cplx i2(0.0, 0.5);
    const auto& o = rabi;
    Matrix m(8);
    m(0, 2) = i2 * o[0];
    m(0, 6) = i2 * o[1];
    m(0, 7) = i2 * o[2];
    m(1, 5) = -i2 * o[5];
    m(1, 6) = -i2 * o[4];
    m(1, 7) = -i2 * o[3];
    m(2, 0) = -i2 * std::conj(o[0]);
    m(2, 2) = spec.delta1;
    m(2, 6) = spec.delta1;
    m(5, 1) = i2 * std::conj(o[5]);
    m(5, 2) = spec.delta1;
    m(5, 5) = spec.delta1;
    m(6, 0) = -i2 * std::conj(o[1]);
    m(6, 1) = i2 * std::conj(o[4]);
    m(6, 6) = spec.delta2;
    m(7, 0) = -i2 * std::conj(o[2]);
    m(7, 1) = i2 * std::conj(o[3]);
    m(7, 7) = spec.delta3;
    m *= two_pi;
    if (mode == HermiticityMode::hermitized) {
        Matrix h = 0.5 * (m + m.adjoint());
        return h;
    }
    return m;
}

/// Two-qubit (four-level) rotating-frame Hamiltonian (rad/µs).
inline Matrix build_rotating_frame_4(const LevelSpec& spec, const PulseSet& pulses, double t) {
    spec.check(4);
    Matrix h(4);
    for (int i = 0; i < 4; ++i) h(i, i) = two_pi * spec.energy(i);
    const cplx half_i(0.0, 0.5);
    const cplx p = detail::channel(pulses.pump, 0, "p").drive(t) -
                   (pulses.pump.size() > 1 ? pulses.pump[1].drive(t) : cplx{});
    const cplx s = detail::channel(pulses.stokes, 0, "s").drive(t) -
                   (pulses.stokes.size() > 1 ? pulses.stokes[1].drive(t) : cplx{});
    detail::add_coupling(h, 0, 2, half_i * p);
    detail::add_coupling(h, 0, 3, -half_i * p);
    detail::add_coupling(h, 1, 2, -half_i * s);
    detail::add_coupling(h, 1, 3, -half_i * s);
    return h;
}

/// Two-qubit interaction-frame Hamiltonian (rad/µs); rabi = {p1, p2, s1, s2} in MHz.
inline Matrix build_interaction_4(const LevelSpec& spec, const std::array<cplx, 4>& rabi, HermiticityMode mode) {
    spec.check(4);
    const cplx i2(0.0, 0.5);
    const cplx p1 = rabi[0], p2 = rabi[1], s1 = rabi[2], s2 = rabi[3];
    Matrix m(4);
    m(0, 2) = i2 * p1;
    m(0, 3) = i2 * p2;
    m(1, 2) = -i2 * s1;
    m(1, 3) = -i2 * s2;
    m(2, 0) = -i2 * std::conj(p1);
    m(2, 1) = i2 * std::conj(s1);
    m(2, 2) = spec.delta1;
    m(3, 0) = -i2 * std::conj(p2);
    m(3, 1) = i2 * std::conj(s2);
    m(3, 3) = -spec.delta2;
    m *= two_pi;
    if (mode == HermiticityMode::hermitized) return 0.5 * (m + m.adjoint());
    return m;
}

/// Single-qubit drive 2 pi [ (Omega/2)(cos phi X + sin phi Y) + (Delta/2) Z ] lifted onto
/// one qubit of an n-qubit register.
inline Matrix qubit_drive(double rabi_mhz, double detuning_mhz, double phase, int qubit = 0, int nqubits = 1) {
    const Matrix h2 = (pi * rabi_mhz * std::cos(phase)) * pauli_x() + (pi * rabi_mhz * std::sin(phase)) * pauli_y() +
                      (pi * detuning_mhz) * pauli_z();
    return nqubits == 1 ? h2 : embed_qubit_op(h2, qubit, nqubits);
}

}  // namespace nvholo
