#pragma once

// Dense complex linear algebra for small dimensions.
//
// Everything here targets d x d problems with d a small prime (d <= 31 or
// so), where a dependency-free cyclic Jacobi eigensolver is both simple and
// accurate.  Matrices are row-major std::complex<double>.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ubnob/rng.hpp"

namespace ubnob {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// ---------------------------------------------------------------------------
// Modular arithmetic over small primes
// ---------------------------------------------------------------------------

inline bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

// Inverse of a modulo prime p, via Fermat: a^(p-2) mod p.
inline int mod_inverse(int a, int p) {
    if (!is_prime(p)) throw std::invalid_argument("mod_inverse: modulus must be prime");
    a %= p;
    if (a < 0) a += p;
    if (a == 0) throw std::invalid_argument("mod_inverse: zero has no inverse");
    long long base = a, result = 1;
    int e = p - 2;
    while (e > 0) {
        if (e & 1) result = result * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return static_cast<int>(result);
}

// exp(2*pi*i*k/p).  The angle is reduced mod p first so large exponents do
// not lose precision in the multiplication by 2*pi.
inline cplx root_of_unity(int p, long long k) {
    if (p < 1) throw std::invalid_argument("root_of_unity: p must be positive");
    long long r = k % p;
    if (r < 0) r += p;
    // Quarter-turn arguments have exact values; sin(pi) etc. would otherwise
    // pick up ~1e-16 noise because pi is not representable.
    if (r == 0) return {1.0, 0.0};
    if (4 * r == p) return {0.0, 1.0};
    if (2 * r == p) return {-1.0, 0.0};
    if (4 * r == 3 * p) return {0.0, -1.0};
    const double angle = 2.0 * M_PI * static_cast<double>(r) / static_cast<double>(p);
    return {std::cos(angle), std::sin(angle)};
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

class Matrix {
public:
    Matrix() : dim_(0) {}
    explicit Matrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {
        if (dim < 1) throw std::invalid_argument("Matrix: dimension must be positive");
    }

    static Matrix identity(int dim) {
        Matrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return dim_; }

    cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

    Matrix& operator+=(const Matrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Matrix& operator*=(cplx c) {
        for (auto& v : a_) v *= c;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, cplx c) { return a *= c; }
    friend Matrix operator*(cplx c, Matrix a) { return a *= c; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        a.require_same_dim(b);
        const int n = a.dim_;
        Matrix out(n);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx(0.0)) continue;
                for (int j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
            }
        }
        return out;
    }

    Matrix adjoint() const {
        Matrix out(dim_);
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
        }
        return out;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    cvec apply(const cvec& v) const {
        if (static_cast<int>(v.size()) != dim_) throw std::invalid_argument("Matrix::apply: size mismatch");
        cvec out(dim_, cplx(0.0));
        for (int i = 0; i < dim_; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < dim_; ++j) acc += (*this)(i, j) * v[j];
            out[i] = acc;
        }
        return out;
    }

    double max_hermiticity_violation() const {
        double worst = 0.0;
        for (int i = 0; i < dim_; ++i) {
            for (int j = i; j < dim_; ++j) {
                worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
            }
        }
        return worst;
    }

    bool all_finite() const {
        for (const auto& v : a_) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        }
        return true;
    }

private:
    void require_same_dim(const Matrix& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("Matrix: dimension mismatch");
    }

    int dim_;
    std::vector<cplx> a_;
};

inline double frobenius_distance(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("frobenius_distance: dimension mismatch");
    return (a - b).frobenius_norm();
}

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

// <a|b> with the physics convention: conjugate-linear in the first slot.
inline cplx inner(const cvec& a, const cvec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner: size mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double vec_norm(const cvec& v) { return std::sqrt(std::abs(inner(v, v))); }

// m += coeff * |v><w|
inline void add_scaled_outer(Matrix& m, cplx coeff, const cvec& v, const cvec& w) {
    const int n = m.dim();
    if (static_cast<int>(v.size()) != n || static_cast<int>(w.size()) != n) {
        throw std::invalid_argument("add_scaled_outer: size mismatch");
    }
    for (int i = 0; i < n; ++i) {
        const cplx ci = coeff * v[i];
        for (int j = 0; j < n; ++j) m(i, j) += ci * std::conj(w[j]);
    }
}

inline Matrix projector(const cvec& v) {
    Matrix m(static_cast<int>(v.size()));
    add_scaled_outer(m, 1.0, v, v);
    return m;
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver (cyclic Jacobi with complex rotations)
// ---------------------------------------------------------------------------

struct EigenResult {
    std::vector<double> eigenvalues; // ascending
    Matrix eigenvectors;             // column k pairs with eigenvalues[k]
};

// Diagonalize a Hermitian matrix by cyclic Jacobi sweeps.  Each (i,j) step
// applies the unitary
//     U = [ c          -s*e^{i*beta} ]
//         [ s*e^{-i*beta}      c     ]
// with beta the phase of M(i,j), chosen to zero the pivot.  Convergence is
// quadratic; sweeps stop once the off-diagonal Frobenius mass drops below
// 1e-14 * max(1, ||M||_F).
inline EigenResult hermitian_eigen(const Matrix& m_in) {
    if (m_in.dim() < 1) throw std::invalid_argument("hermitian_eigen: empty matrix");
    if (m_in.max_hermiticity_violation() > 1e-10) {
        throw std::invalid_argument("hermitian_eigen: matrix is not Hermitian");
    }
    const int n = m_in.dim();

    // Work on an exactly Hermitian copy so rounding in the input cannot feed
    // the rotations an inconsistent pivot phase.
    Matrix m(n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = cplx(m_in(i, i).real(), 0.0);
        for (int j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (m_in(i, j) + std::conj(m_in(j, i)));
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }
    }
    Matrix v = Matrix::identity(n);

    const double stop = 1e-14 * std::max(1.0, m.frobenius_norm());
    const auto off_mass = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) s += 2.0 * std::norm(m(i, j));
        }
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && off_mass() > stop; ++sweep) {
        for (int i = 0; i < n - 1; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const cplx b = m(i, j);
                const double ab = std::abs(b);
                if (ab < 1e-300) continue;
                const cplx phase = b / ab; // e^{i*beta}
                const double tau = (m(i, i).real() - m(j, j).real()) / (2.0 * ab);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx sp = s * phase;

                // Row/column updates: M <- U^dagger M U, two-sided, O(n).
                for (int k = 0; k < n; ++k) {
                    const cplx mik = m(i, k);
                    const cplx mjk = m(j, k);
                    m(i, k) = c * mik + sp * mjk;
                    m(j, k) = -std::conj(sp) * mik + c * mjk;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx mki = m(k, i);
                    const cplx mkj = m(k, j);
                    m(k, i) = c * mki + std::conj(sp) * mkj;
                    m(k, j) = -sp * mki + c * mkj;
                    const cplx vki = v(k, i);
                    const cplx vkj = v(k, j);
                    v(k, i) = c * vki + std::conj(sp) * vkj;
                    v(k, j) = -sp * vki + c * vkj;
                }
                m(i, j) = std::conj(m(j, i)); // keep the pivot pair consistent
            }
        }
    }
    if (off_mass() > stop) throw std::runtime_error("hermitian_eigen: Jacobi did not converge");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return m(a, a).real() < m(b, b).real(); });

    EigenResult out{std::vector<double>(n), Matrix(n)};
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = m(order[k], order[k]).real();
        for (int r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

class DensityMatrix {
public:
    // Validating constructor: Hermitian, unit trace, positive semidefinite,
    // all within tol.  Used for externally supplied states.
    static DensityMatrix from_matrix(const Matrix& m, double tol = 1e-8) {
        if (!m.all_finite()) throw std::invalid_argument("density matrix: non-finite entry");
        if (m.max_hermiticity_violation() > tol) {
            throw std::invalid_argument("density matrix: not Hermitian");
        }
        if (std::abs(m.trace() - cplx(1.0)) > tol) {
            throw std::invalid_argument("density matrix: trace must be 1");
        }
        Matrix h = cplx(0.5) * (m + m.adjoint());
        const EigenResult eig = hermitian_eigen(h);
        if (eig.eigenvalues.front() < -tol) {
            throw std::invalid_argument("density matrix: negative eigenvalue");
        }
        return DensityMatrix(m);
    }

    // Trusted constructor for states built inside the library, where the
    // invariants hold by construction.
    static DensityMatrix trusted(const Matrix& m) { return DensityMatrix(m); }

    const Matrix& matrix() const { return m_; }
    int dim() const { return m_.dim(); }

private:
    explicit DensityMatrix(const Matrix& m) : m_(m) {}
    Matrix m_;
};

// Ginibre-induced random state: rho = G G^dagger / tr(G G^dagger) with G a
// p x p matrix of standard complex normals.  The product is assembled
// symmetrically, so Hermiticity is exact.
inline DensityMatrix random_density(int p, RngStream& rng) {
    if (p < 1) throw std::invalid_argument("random_density: dimension must be positive");
    Matrix g(p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) g(i, j) = rng.complex_normal();
    }
    Matrix rho(p);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < p; ++k) s += g(i, k) * std::conj(g(j, k));
            if (i == j) {
                rho(i, i) = cplx(s.real(), 0.0);
            } else {
                rho(i, j) = s;
                rho(j, i) = std::conj(s);
            }
        }
    }
    double tr = 0.0;
    for (int i = 0; i < p; ++i) tr += rho(i, i).real();
    rho *= cplx(1.0 / tr, 0.0);
    return DensityMatrix::trusted(rho);
}

} // namespace ubnob
