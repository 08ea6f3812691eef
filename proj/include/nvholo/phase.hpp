#pragma once

#include "evolution.hpp"

#include <string>

namespace nvholo {

struct PhaseEstimate {
    double magnitude = 0.0;    // arg<psi_ref(T)|psi_act(T)>, in (-pi, pi]
    double discrepancy = 0.0;  // max_t |P_ref - P_act| on the chosen level
    std::string reference_label;
    bool defined = true;  // false when the final overlap is below 1e-6
};

inline PhaseEstimate phase_from_discrepancy(const Trajectory& reference, const Trajectory& actual, int level,
                                            std::string label = "reference") {
    if (reference.size() != actual.size() || reference.size() == 0)
        throw std::invalid_argument("phase_from_discrepancy: sampling grids differ in length");
    for (std::size_t k = 0; k < reference.size(); ++k)
        if (std::abs(reference.axis[k] - actual.axis[k]) > 1e-12 * std::max(1.0, std::abs(reference.axis[k])))
            throw std::invalid_argument("phase_from_discrepancy: sampling grids differ");
    if (level < 0 || level >= reference.final_state().dim()) throw DimensionError("phase_from_discrepancy: level out of range");

    PhaseEstimate pe;
    pe.reference_label = std::move(label);
    for (std::size_t k = 0; k < reference.size(); ++k)
        pe.discrepancy = std::max(pe.discrepancy, std::abs(reference.populations[k][level] - actual.populations[k][level]));
    const cplx ov = inner_product(reference.final_state(), actual.final_state());
    if (std::abs(ov) < 1e-6) {
        pe.defined = false;
        pe.magnitude = 0.0;
    } else {
        pe.magnitude = std::arg(ov);
    }
    return pe;
}

struct EffectivePhaseMatrix {
    Matrix u;  // 2x2, columns are the images of |1> and |2>
    double unitarity_deviation = 0.0;
};

/// Operator on the {|1>,|2>} subspace built from two runs of the same path:
/// path_a starts in |1>, path_b in |2>.
inline EffectivePhaseMatrix effective_phase_matrix(const Trajectory& path_a, const Trajectory& path_b) {
    if (path_a.size() == 0 || path_b.size() == 0) throw std::invalid_argument("effective_phase_matrix: empty trajectory");
    if (std::abs(path_a.times.back() - path_b.times.back()) > 1e-12 ||
        std::abs(path_a.times.front() - path_b.times.front()) > 1e-12)
        throw std::invalid_argument("effective_phase_matrix: trajectories cover different durations");
    const StateVector& a0 = path_a.states.front();
    const StateVector& b0 = path_b.states.front();
    const double wa = std::norm(a0[0]) + std::norm(a0[1]);
    const double wb = std::norm(b0[0]) + std::norm(b0[1]);
    if (wa < 1e-12 || wb < 1e-12) throw std::invalid_argument("effective_phase_matrix: zero projection on the subspace");

    EffectivePhaseMatrix r;
    r.u = Matrix(2);
    const StateVector& af = path_a.final_state();
    const StateVector& bf = path_b.final_state();
    r.u(0, 0) = af[0];
    r.u(1, 0) = af[1];
    r.u(0, 1) = bf[0];
    r.u(1, 1) = bf[1];
    r.unitarity_deviation = r.u.unitarity_error();
    return r;
}

/// Printed reference matrix for the azimuthal three-qubit paths. Its rows have norm > 1,
/// so it is only ever compared against, never applied.
inline Matrix reference_phase_matrix() {
    return Matrix(2, {cplx(0.99, 0.47), cplx(-0.82, 0.12), cplx(0.93, 0.82), cplx(0.65, 0.33)});
}

struct ReferenceComparison {
    double max_entry_deviation = 0.0;
    bool within_tolerance = false;
    bool reference_unitary = false;
};

inline ReferenceComparison compare_with_reference(const Matrix& u, double tol = 0.35) {
    const Matrix ref = reference_phase_matrix();
    if (u.dim() != 2) throw DimensionError("compare_with_reference expects a 2x2 matrix");
    ReferenceComparison c;
    c.max_entry_deviation = (u - ref).max_abs();
    c.within_tolerance = c.max_entry_deviation <= tol;
    c.reference_unitary = ref.is_unitary(1e-10);
    return c;
}

}  // namespace nvholo
