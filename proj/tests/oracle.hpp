#pragma once

// Conversions to Eigen so results can be checked against an independent implementation.

#include "nvholo/core.hpp"

#include <Eigen/Dense>

#include <random>

namespace oracle {

using EMat = Eigen::MatrixXcd;

inline EMat to_eigen(const nvholo::Matrix& m) {
    EMat e(m.dim(), m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) e(i, j) = m(i, j);
    return e;
}

inline nvholo::Matrix from_eigen(const EMat& e) {
    nvholo::Matrix m(static_cast<int>(e.rows()));
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) m(i, j) = e(i, j);
    return m;
}

inline nvholo::Matrix random_matrix(int n, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    nvholo::Matrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = nvholo::cplx(g(rng), g(rng));
    return m;
}

inline nvholo::Matrix random_hermitian(int n, std::mt19937& rng, double scale = 1.0) {
    const nvholo::Matrix a = random_matrix(n, rng, scale);
    return nvholo::cplx(0.5) * (a + a.adjoint());
}

inline nvholo::StateVector random_state(int n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    nvholo::CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = nvholo::cplx(g(rng), g(rng));
    return nvholo::StateVector(v);
}

}  // namespace oracle
