#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace nvholo {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr int max_dim = 8;

// Thrown for shape/argument problems (bad dims, out-of-range indices).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an evolution cannot be trusted (norm drift, non-Hermitian H).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool valid_level_count(int n) { return n == 2 || n == 4 || n == 8; }

inline int qubit_count(int dim) {
    switch (dim) {
    case 2: return 1;
    case 4: return 2;
    case 8: return 3;
    default: throw DimensionError("level count must be 2, 4 or 8, got " + std::to_string(dim));
    }
}

/// Unconstrained complex vector of length <= 8. Used as integrator workspace.
class CVec {
public:
    CVec() = default;
    explicit CVec(int n) : n_(n) {
        if (n < 1 || n > max_dim) throw DimensionError("vector length out of range");
    }
    CVec(std::initializer_list<cplx> v) : CVec(static_cast<int>(v.size())) {
        std::copy(v.begin(), v.end(), a_.begin());
    }

    int size() const { return n_; }
    cplx& operator[](int i) { return a_[i]; }
    const cplx& operator[](int i) const { return a_[i]; }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < n_; ++i) s += std::norm(a_[i]);
        return s;
    }

    CVec& operator+=(const CVec& o) {
        for (int i = 0; i < n_; ++i) a_[i] += o.a_[i];
        return *this;
    }
    CVec& operator*=(cplx s) {
        for (int i = 0; i < n_; ++i) a_[i] *= s;
        return *this;
    }
    // this += s * o
    void axpy(cplx s, const CVec& o) {
        for (int i = 0; i < n_; ++i) a_[i] += s * o.a_[i];
    }

private:
    int n_ = 0;
    std::array<cplx, max_dim> a_{};
};

/// Dense square complex matrix, dim <= 8, stored row-major inline.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n) : n_(n) {
        if (n < 1 || n > max_dim) throw DimensionError("matrix dimension out of range");
    }
    Matrix(int n, std::initializer_list<cplx> rowmajor) : Matrix(n) {
        if (static_cast<int>(rowmajor.size()) != n * n) throw DimensionError("initializer size mismatch");
        auto it = rowmajor.begin();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) (*this)(i, j) = *it++;
    }

    static Matrix identity(int n) {
        Matrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Matrix diagonal(const std::vector<cplx>& d) {
        Matrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n_; ++i) m(i, i) = d[i];
        return m;
    }

    int dim() const { return n_; }
    cplx& operator()(int i, int j) { return a_[i * max_dim + j]; }
    const cplx& operator()(int i, int j) const { return a_[i * max_dim + j]; }

    Matrix adjoint() const {
        Matrix r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(i, j) = std::conj((*this)(j, i));
        return r;
    }

    cplx trace() const {
        cplx s = 0;
        for (int i = 0; i < n_; ++i) s += (*this)(i, i);
        return s;
    }

    double max_abs() const {
        double m = 0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }

    // Largest absolute row sum; bounds the spectral radius.
    double norm_inf() const {
        double m = 0;
        for (int i = 0; i < n_; ++i) {
            double s = 0;
            for (int j = 0; j < n_; ++j) s += std::abs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }

    double hermiticity_error() const {
        double m = 0;
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return m;
    }
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() <= tol; }

    double unitarity_error() const;
    bool is_unitary(double tol = 1e-10) const { return unitarity_error() <= tol; }

    bool is_diagonal(double tol = 0.0) const {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if (i != j && std::abs((*this)(i, j)) > tol) return false;
        return true;
    }

    Matrix& operator+=(const Matrix& o) {
        check_same(o);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) += o(i, j);
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) -= o(i, j);
        return *this;
    }
    Matrix& operator*=(cplx s) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) *= s;
        return *this;
    }
    // this += s * o
    void axpy(cplx s, const Matrix& o) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) += s * o(i, j);
    }

    void check_same(const Matrix& o) const {
        if (o.n_ != n_) throw DimensionError("matrix dimension mismatch");
    }

private:
    int n_ = 0;
    std::array<cplx, max_dim * max_dim> a_{};
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(cplx s, Matrix a) { return a *= s; }

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    a.check_same(b);
    const int n = a.dim();
    Matrix r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (int j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

inline CVec operator*(const Matrix& a, const CVec& v) {
    if (a.dim() != v.size()) throw DimensionError("matrix-vector dimension mismatch");
    const int n = a.dim();
    CVec r(n);
    for (int i = 0; i < n; ++i) {
        cplx s = 0;
        for (int j = 0; j < n; ++j) s += a(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

inline double Matrix::unitarity_error() const {
    const Matrix p = adjoint() * (*this);
    double m = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m = std::max(m, std::abs(p(i, j) - (i == j ? 1.0 : 0.0)));
    return m;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline Matrix outer(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw DimensionError("outer product dimension mismatch");
    Matrix m(a.size());
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    const int n = a.dim() * b.dim();
    Matrix r(n);
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            for (int k = 0; k < b.dim(); ++k)
                for (int l = 0; l < b.dim(); ++l) r(i * b.dim() + k, j * b.dim() + l) = a(i, j) * b(k, l);
    return r;
}

/// Normalized state over 2, 4 or 8 levels. Level k (0-based) is the ket |k+1>,
/// and the bit pattern of k is the qubit register (qubit 0 = least significant bit).
class StateVector {
public:
    StateVector() = default;

    // Normalizes its input; rejects bad level counts and zero vectors.
    explicit StateVector(const CVec& v) : v_(v) {
        if (!valid_level_count(v.size())) throw DimensionError("state level count must be 2, 4 or 8");
        for (int i = 0; i < v.size(); ++i)
            if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
                throw NumericalError("non-finite amplitude");
        const double n = std::sqrt(v_.norm2());
        if (n == 0.0) throw NumericalError("zero state vector");
        v_ *= 1.0 / n;
    }
    StateVector(std::initializer_list<cplx> v) : StateVector(CVec(v)) {}

    static StateVector basis(int dim, int level) {
        if (level < 0 || level >= dim) throw DimensionError("basis level out of range");
        CVec v(dim);
        v[level] = 1.0;
        return StateVector(v);
    }

    int dim() const { return v_.size(); }
    const cplx& operator[](int i) const { return v_[i]; }
    const CVec& amps() const { return v_; }

private:
    CVec v_;
};

inline cplx inner_product(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw DimensionError("inner product dimension mismatch");
    cplx s = 0;
    for (int i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}
inline cplx inner_product(const StateVector& a, const StateVector& b) { return inner_product(a.amps(), b.amps()); }

inline double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner_product(a, b)); }

inline double partial_population(const StateVector& s, int level) {
    if (level < 0 || level >= s.dim()) throw DimensionError("population level out of range");
    return std::norm(s[level]);
}

inline StateVector apply(const Matrix& u, const StateVector& s) { return StateVector(u * s.amps()); }

// Pauli and rotation helpers on a single qubit.
inline Matrix pauli_x() { return Matrix(2, {0.0, 1.0, 1.0, 0.0}); }
inline Matrix pauli_y() { return Matrix(2, {0.0, cplx(0, -1), cplx(0, 1), 0.0}); }
inline Matrix pauli_z() { return Matrix(2, {1.0, 0.0, 0.0, -1.0}); }

inline Matrix rx(double a) {
    const double c = std::cos(a / 2), s = std::sin(a / 2);
    return Matrix(2, {c, cplx(0, -s), cplx(0, -s), c});
}
inline Matrix ry(double a) {
    const double c = std::cos(a / 2), s = std::sin(a / 2);
    return Matrix(2, {c, -s, s, c});
}
inline Matrix rz(double a) {
    return Matrix(2, {std::polar(1.0, -a / 2), 0.0, 0.0, std::polar(1.0, a / 2)});
}

/// Lifts a 2x2 operator on one qubit of an n-qubit register (qubit 0 = LSB).
inline Matrix embed_qubit_op(const Matrix& op, int qubit, int nqubits) {
    if (op.dim() != 2) throw DimensionError("embed_qubit_op expects a 2x2 operator");
    if (qubit < 0 || qubit >= nqubits || nqubits > 3) throw DimensionError("qubit index out of range");
    Matrix r = Matrix::identity(1);
    for (int q = nqubits - 1; q >= 0; --q) r = kron(r, q == qubit ? op : Matrix::identity(2));
    return r;
}

inline StateVector product_state(const std::vector<StateVector>& qubits) {
    // qubits[0] is the least significant bit
    CVec acc{1.0};
    for (int q = static_cast<int>(qubits.size()) - 1; q >= 0; --q) {
        const auto& s = qubits[q];
        if (s.dim() != 2) throw DimensionError("product_state expects single-qubit factors");
        CVec next(acc.size() * 2);
        for (int i = 0; i < acc.size(); ++i)
            for (int k = 0; k < 2; ++k) next[i * 2 + k] = acc[i] * s[k];
        acc = next;
    }
    return StateVector(acc);
}

}  // namespace nvholo
