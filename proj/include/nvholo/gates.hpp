#pragma once

#include "linalg.hpp"

namespace nvholo {

struct GateParams {
    double theta = 0.0;
    double phi = 0.0;
    double lambda = 0.0;  // detuning / rabi
    double gamma = 0.0;   // loop phase
    double detuning_mhz = 0.0;
    double rabi_mhz = 15.0;

    static GateParams from_detuning(double theta, double phi, double detuning_mhz, double rabi_mhz) {
        if (!(rabi_mhz > 0)) throw std::invalid_argument("rabi must be positive to derive lambda");
        GateParams p;
        p.theta = theta;
        p.phi = phi;
        p.detuning_mhz = detuning_mhz;
        p.rabi_mhz = rabi_mhz;
        p.lambda = detuning_mhz / rabi_mhz;
        return p;
    }
};

struct DarkStateParams {
    double beta = 0.0;
    double varphi = 0.0;
};

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

/// n(theta, phi) = (sin 3theta cos 3phi, sin 3theta sin 3phi, cos 3theta)
inline Vec3 rotation_axis(double theta, double phi) {
    const double st = std::sin(3 * theta), ct = std::cos(3 * theta);
    return {st * std::cos(3 * phi), st * std::sin(3 * phi), ct};
}

struct DarkStates {
    StateVector d_prime;
    StateVector d_dprime;
    StateVector d;
};

inline DarkStates dark_states(const DarkStateParams& p) {
    const cplx a = std::sin(p.beta) * std::polar(1.0, -p.varphi);
    const cplx b = std::cos(p.beta) * std::polar(1.0, p.varphi);
    CVec v1(8), v2(8), v(8);
    v1[0] = a;
    v1[1] = b;
    v2[2] = a;
    v2[3] = b;
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < 8; ++i) v[i] = r * (v1[i] + v2[i]);
    return {StateVector(v1), StateVector(v2), StateVector(v)};
}

/// Orthogonal partner of |D> inside the {|1>,|2>,|3>,|4>} block: Gram-Schmidt applied
/// to the first basis ket there that is not parallel to |D>.
inline StateVector orthogonal_partner(const StateVector& d) {
    for (int k = 0; k < std::min(4, d.dim()); ++k) {
        CVec e(d.dim());
        e[k] = 1.0;
        const cplx ov = inner_product(d.amps(), e);
        e.axpy(-ov, d.amps());
        if (std::sqrt(e.norm2()) > 1e-8) return StateVector(e);
    }
    throw DimensionError("no orthogonal partner inside the dark-state block");
}

/// U = e^{i gamma/2}|D_orth><D_orth| + |D><D| + identity on the rest.
inline Matrix holonomic_unitary(double gamma, const StateVector& d, const StateVector& d_orth) {
    if (d.dim() != d_orth.dim()) throw DimensionError("holonomic_unitary: dimension mismatch");
    if (std::abs(inner_product(d, d_orth)) > 1e-10) throw std::invalid_argument("holonomic_unitary: states are not orthogonal");
    const Matrix po = outer(d_orth.amps(), d_orth.amps());
    Matrix u = Matrix::identity(d.dim()) - po;
    u.axpy(std::polar(1.0, gamma / 2), po);
    return u;
}

/// Rz(phi) Rx(theta) Rz(2 atan(lambda))
inline Matrix single_qubit_unitary(const GateParams& p) {
    return rz(p.phi) * rx(p.theta) * rz(2.0 * std::atan(p.lambda));
}

/// ops[n-1] ... ops[1] ops[0]: the first entry acts first.
inline Matrix concatenate_paths(const std::vector<Matrix>& ops) {
    if (ops.empty()) throw std::invalid_argument("concatenate_paths: empty sequence");
    Matrix r = ops.front();
    for (std::size_t k = 1; k < ops.size(); ++k) {
        if (ops[k].dim() != r.dim()) throw DimensionError("concatenate_paths: dimension mismatch");
        r = ops[k] * r;
    }
    return r;
}

/// Ordered (theta, phi) waypoints in the rotation-axis parameter space.
struct RotationPath {
    std::vector<std::pair<double, double>> waypoints;
    bool closed = false;

    void check() const {
        if (waypoints.empty()) throw std::invalid_argument("rotation path has no waypoints");
        if (closed) {
            const auto& a = waypoints.front();
            const auto& b = waypoints.back();
            if (std::abs(a.first - b.first) > 1e-12 || std::abs(a.second - b.second) > 1e-12)
                throw std::invalid_argument("closed rotation path must end on its first waypoint");
        }
    }
};

/// (s,0) -> (0,s) -> (-s,0) -> (0,-s) -> (s,0)
inline RotationPath diamond_path(double s) {
    return {{{s, 0.0}, {0.0, s}, {-s, 0.0}, {0.0, -s}, {s, 0.0}}, true};
}

/// exp(-i angle/2 n.sigma) for an axis given by rotation_axis(theta, phi).
inline Matrix axis_rotation(double theta, double phi, double angle) {
    const Vec3 n = rotation_axis(theta, phi);
    const Matrix ns = n.x * pauli_x() + n.y * pauli_y() + n.z * pauli_z();
    return std::cos(angle / 2) * Matrix::identity(2) + cplx(0.0, -std::sin(angle / 2)) * ns;
}

/// One rotation of `angle` about the axis of every waypoint, in path order.
/// The repeated end point of a closed path is not applied twice.
inline Matrix path_unitary(const RotationPath& path, double angle) {
    path.check();
    const std::size_t n = path.closed ? path.waypoints.size() - 1 : path.waypoints.size();
    std::vector<Matrix> ops;
    for (std::size_t k = 0; k < std::max<std::size_t>(n, 1); ++k)
        ops.push_back(axis_rotation(path.waypoints[k].first, path.waypoints[k].second, angle));
    return concatenate_paths(ops);
}

inline double dark_alignment(const StateVector& gate_dark, const StateVector& initial) {
    return fidelity(gate_dark, initial);
}

}  // namespace nvholo
