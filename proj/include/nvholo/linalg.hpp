#pragma once

#include "core.hpp"

#include <numeric>
#include <utility>

namespace nvholo {

struct EigenSystem {
    std::vector<double> values;  // ascending
    std::vector<CVec> vectors;   // vectors[k] pairs with values[k]
};

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
inline EigenSystem eig_hermitian(const Matrix& m, double herm_tol = 1e-12) {
    const int n = m.dim();
    const double scale = std::max(1.0, m.max_abs());
    if (m.hermiticity_error() > herm_tol * scale) throw DimensionError("eig_hermitian: input is not Hermitian");

    Matrix a = m;
    Matrix v = Matrix::identity(n);
    for (int i = 0; i < n; ++i) a(i, i) = a(i, i).real();

    auto off = [&] {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s = std::max(s, std::abs(a(i, j)));
        return s;
    };

    constexpr double tol = 1e-12;
    for (int sweep = 0; sweep < 100 && off() > tol * 1e-3 * scale; ++sweep) {
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r < 1e-300) continue;
                const cplx ph = apq / r;  // e^{i alpha}
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const double th = 0.5 * std::atan2(2.0 * r, app - aqq);
                const double c = std::cos(th), s = std::sin(th);
                // columns of the 2x2 rotation: vp = (c, s e^{-i alpha}), vq = (-s, c e^{-i alpha})
                const cplx vpp = c, vqp = s * std::conj(ph), vpq = -s, vqq = c * std::conj(ph);
                for (int k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * vpp + akq * vqp;
                    a(k, q) = akp * vpq + akq * vqq;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(vpp) * apk + std::conj(vqp) * aqk;
                    a(q, k) = std::conj(vpq) * apk + std::conj(vqq) * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (int k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * vpp + vkq * vqp;
                    v(k, q) = vkp * vpq + vkq * vqq;
                }
            }
    }
    if (off() > tol * scale) throw NumericalError("eig_hermitian: Jacobi sweeps did not converge");

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) { return a(x, x).real() < a(y, y).real(); });

    EigenSystem es;
    for (int k : idx) {
        es.values.push_back(a(k, k).real());
        CVec col(n);
        for (int i = 0; i < n; ++i) col[i] = v(i, k);
        es.vectors.push_back(col);
    }
    return es;
}

/// Sum_k f(lambda_k) |v_k><v_k|
template <class F>
Matrix spectral_apply(const EigenSystem& es, F&& f) {
    const int n = es.vectors.front().size();
    Matrix r(n);
    for (std::size_t k = 0; k < es.values.size(); ++k) {
        const cplx fk = f(es.values[k]);
        const CVec& vk = es.vectors[k];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r(i, j) += fk * vk[i] * std::conj(vk[j]);
    }
    return r;
}

namespace detail {

inline double norm_1(const Matrix& m) {
    double best = 0;
    for (int j = 0; j < m.dim(); ++j) {
        double s = 0;
        for (int i = 0; i < m.dim(); ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

// Solve A X = B by Gaussian elimination with partial pivoting.
inline Matrix solve(Matrix a, Matrix b) {
    const int n = a.dim();
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        if (std::abs(a(piv, c)) == 0.0) throw NumericalError("singular Pade denominator");
        if (piv != c)
            for (int k = 0; k < n; ++k) {
                std::swap(a(c, k), a(piv, k));
                std::swap(b(c, k), b(piv, k));
            }
        for (int r = c + 1; r < n; ++r) {
            const cplx f = a(r, c) / a(c, c);
            if (f == cplx{}) continue;
            for (int k = c; k < n; ++k) a(r, k) -= f * a(c, k);
            for (int k = 0; k < n; ++k) b(r, k) -= f * b(c, k);
        }
    }
    Matrix x(n);
    for (int k = 0; k < n; ++k)
        for (int r = n - 1; r >= 0; --r) {
            cplx s = b(r, k);
            for (int j = r + 1; j < n; ++j) s -= a(r, j) * x(j, k);
            x(r, k) = s / a(r, r);
        }
    return x;
}

// Scaling and squaring with a diagonal [8/8] Pade approximant.
inline Matrix expm_pade(const Matrix& a) {
    const int n = a.dim();
    const double nrm = norm_1(a);
    int s = 0;
    if (nrm > 0.5) s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / 0.5))));
    Matrix x = (1.0 / std::ldexp(1.0, s)) * a;

    constexpr int q = 8;
    double c = 1.0;
    Matrix pw = Matrix::identity(n);
    Matrix num = Matrix::identity(n), den = Matrix::identity(n);
    for (int k = 1; k <= q; ++k) {
        c *= static_cast<double>(q - k + 1) / (k * (2.0 * q - k + 1));
        pw = pw * x;
        num.axpy(c, pw);
        den.axpy((k % 2 ? -c : c), pw);
    }
    Matrix e = solve(den, num);
    for (int k = 0; k < s; ++k) e = e * e;
    return e;
}

}  // namespace detail

/// exp(scale * m). Hermitian inputs go through the eigendecomposition.
inline Matrix matrix_exponential(const Matrix& m, cplx scale) {
    const double sc = std::max(1.0, m.max_abs());
    if (m.hermiticity_error() <= 1e-12 * sc) {
        const EigenSystem es = eig_hermitian(m);
        return spectral_apply(es, [&](double l) { return std::exp(scale * l); });
    }
    return detail::expm_pade(scale * m);
}

/// Density operator with checked invariants (Hermitian, unit trace, PSD up to tolerance).
class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(const Matrix& m, double tol = 1e-9) : m_(m) {
        if (!valid_level_count(m.dim())) throw DimensionError("density matrix level count must be 2, 4 or 8");
        if (m.hermiticity_error() > 1e-12) throw NumericalError("density matrix is not Hermitian");
        if (std::abs(m.trace() - 1.0) > tol) throw NumericalError("density matrix trace differs from 1");
        if (min_eigenvalue() < -1e-8) throw NumericalError("density matrix is not positive semidefinite");
    }
    static DensityMatrix pure(const StateVector& s) { return DensityMatrix(outer(s.amps(), s.amps())); }

    int dim() const { return m_.dim(); }
    const Matrix& matrix() const { return m_; }
    double population(int level) const { return m_(level, level).real(); }
    double expectation(const StateVector& s) const { return inner_product(s.amps(), m_ * s.amps()).real(); }
    double min_eigenvalue() const { return eig_hermitian(m_).values.front(); }

private:
    Matrix m_;
};

}  // namespace nvholo
