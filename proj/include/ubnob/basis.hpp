#pragma once

// Equally separated bases and their bi-orthogonal duals in prime dimension p.
//
// A basis {|psi_m>} is equally separated with parameter lambda when
//
//     <psi_m|psi_n> = (1 - lambda) delta_mn + lambda .
//
// Throughout, omega = exp(2 pi i / p) and the separation parameters are
//
//     mu  = (1 + (p-2) lambda) / ((1-lambda)(1 + (p-1) lambda))
//     nu  = -lambda / ((1-lambda)(1 + (p-1) lambda))
//     eta = nu / mu ,
//
// valid on lambda in (-1/(p-1), 1).  The dual basis
//
//     |phi_n> = sqrt(mu) |psi_n> + (nu / sqrt(mu)) sum_{m != n} |psi_m>
//
// satisfies <phi_m|psi_n> = delta_mn / sqrt(mu), and the pair
//
//     Z = sqrt(mu) sum_m omega^m |psi_m><phi_m|      (cyclic, non-unitary)
//     X = sqrt(mu) sum_m |psi_{m+1}><phi_m|          (unitary shift)
//
// obeys Z X = omega X Z, Z^p = X^p = 1.  Displaced families for
// s = 1..p-1 follow the Gauss-sum rule (2^{-1} is the inverse of 2 mod p)
//
//     |psi_n^s> = p^{-1/2} sum_m omega^{2^{-1} s m^2 + n m} |psi_m>   (p > 2)
//     |psi_n^s> = (|psi_0> + i (-1)^n |psi_1>) / sqrt(2)             (p = 2)
//
// and identically for the duals; each |psi_n^s> is an eigenvector of Z^s X
// with eigenvalue omega^{-n} e^{i phi_s}, where e^{i phi_s} = omega^{2^{-1} s}
// for odd p and i for p = 2.  The X eigenbasis
//
//     |psi_0^x> = sum_m |psi_m> / sqrt(p (1 + (p-1) lambda))
//     |psi_n^x> = sum_m omega^{n m} |psi_m> / sqrt(p (1 - lambda))
//
// is orthonormal and closes the set: at lambda = 0 the p+1 families reduce to
// the standard complete set of mutually unbiased bases.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ubnob/linalg.hpp"

namespace ubnob {

struct SeparationParams {
    int p = 0;
    double lambda = 0.0;
    double mu = 0.0;
    double nu = 0.0;
    double eta = 0.0;
};

// Family index convention: s in [0, p-1] walks the displaced chain (s = 0 is
// the seed basis, the Z eigenbasis); s = p marks the X eigenbasis.
struct Basis {
    int p = 0;
    int s = 0;
    std::vector<cvec> vectors;
};

inline SeparationParams separation_params(int p, double lambda) {
    if (!is_prime(p)) throw std::invalid_argument("separation_params: p must be prime");
    const double lo = -1.0 / (p - 1);
    if (!(lambda > lo && lambda < 1.0)) {
        throw std::domain_error("separation_params: lambda must lie in (-1/(p-1), 1)");
    }
    SeparationParams out;
    out.p = p;
    out.lambda = lambda;
    const double denom = (1.0 - lambda) * (1.0 + (p - 1) * lambda);
    out.mu = (1.0 + (p - 2) * lambda) / denom;
    out.nu = -lambda / denom;
    out.eta = out.nu / out.mu;
    out.nu += 0.0;  // normalize -0 at lambda = 0
    out.eta += 0.0;
    return out;
}

// Concrete embedding of the seed basis in C^p:
//
//     |psi_m> = p^{-1/2} [ sqrt(1 + (p-1) lambda) |e_0>
//                          + sqrt(1 - lambda) sum_{n>=1} omega^{-n m} |e_n> ] ,
//
// which reproduces the separation Gram matrix exactly and places the X
// eigenbasis on the computational frame.
inline Basis seed_basis(int p, double lambda) {
    separation_params(p, lambda); // domain validation
    Basis b;
    b.p = p;
    b.s = 0;
    b.vectors.assign(p, cvec(p));
    const double c0 = std::sqrt(1.0 + (p - 1) * lambda) / std::sqrt(static_cast<double>(p));
    const double c1 = std::sqrt(1.0 - lambda) / std::sqrt(static_cast<double>(p));
    for (int m = 0; m < p; ++m) {
        b.vectors[m][0] = c0;
        for (int n = 1; n < p; ++n) {
            b.vectors[m][n] = c1 * root_of_unity(p, -static_cast<long long>(n) * m);
        }
    }
    return b;
}

inline Matrix gram(const Basis& b) {
    const int p = b.p;
    Matrix g(p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) g(i, j) = inner(b.vectors[i], b.vectors[j]);
    }
    return g;
}

namespace detail {

inline void require_separation_gram(const Basis& b, const SeparationParams& sp, double tol,
                                    const char* who) {
    const Matrix g = gram(b);
    for (int i = 0; i < sp.p; ++i) {
        for (int j = 0; j < sp.p; ++j) {
            const double expected = (i == j) ? 1.0 : sp.lambda;
            if (std::abs(g(i, j) - cplx(expected)) > tol) {
                throw std::invalid_argument(std::string(who) +
                                            ": basis does not match the separation Gram matrix");
            }
        }
    }
}

inline void require_biorthogonal(const Basis& psi, const Basis& phi, const SeparationParams& sp,
                                 double tol, const char* who) {
    const double inv_sqrt_mu = 1.0 / std::sqrt(sp.mu);
    for (int m = 0; m < sp.p; ++m) {
        for (int n = 0; n < sp.p; ++n) {
            const cplx expected = (m == n) ? cplx(inv_sqrt_mu) : cplx(0.0);
            if (std::abs(inner(phi.vectors[m], psi.vectors[n]) - expected) > tol) {
                throw std::invalid_argument(std::string(who) + ": pair is not bi-orthogonal");
            }
        }
    }
}

} // namespace detail

inline Basis biorthogonal_dual(const Basis& psi, const SeparationParams& params) {
    if (psi.p != params.p) throw std::invalid_argument("biorthogonal_dual: dimension mismatch");
    detail::require_separation_gram(psi, params, 1e-8, "biorthogonal_dual");
    const int p = params.p;
    const double smu = std::sqrt(params.mu);
    const double off = params.nu / smu;
    Basis phi;
    phi.p = p;
    phi.s = psi.s;
    phi.vectors.assign(p, cvec(p, cplx(0.0)));
    for (int n = 0; n < p; ++n) {
        for (int m = 0; m < p; ++m) {
            const double coeff = (m == n) ? smu : off;
            for (int k = 0; k < p; ++k) phi.vectors[n][k] += coeff * psi.vectors[m][k];
        }
    }
    return phi;
}

inline Matrix op_Z(const Basis& psi, const Basis& phi, const SeparationParams& params) {
    detail::require_biorthogonal(psi, phi, params, 1e-8, "op_Z");
    const int p = params.p;
    Matrix z(p);
    const double smu = std::sqrt(params.mu);
    for (int m = 0; m < p; ++m) {
        add_scaled_outer(z, smu * root_of_unity(p, m), psi.vectors[m], phi.vectors[m]);
    }
    return z;
}

inline Matrix op_X(const Basis& psi, const Basis& phi, const SeparationParams& params) {
    detail::require_biorthogonal(psi, phi, params, 1e-8, "op_X");
    const int p = params.p;
    Matrix x(p);
    const double smu = std::sqrt(params.mu);
    for (int m = 0; m < p; ++m) {
        add_scaled_outer(x, cplx(smu), psi.vectors[(m + 1) % p], phi.vectors[m]);
    }
    return x;
}

namespace detail {

// Shared Gauss-sum recombination for a basis and its dual: the displaced
// family applies the same coefficient table to either vector set.
inline Basis displace(const Basis& src, const SeparationParams& params, int s) {
    const int p = params.p;
    if (src.p != p) throw std::invalid_argument("displaced basis: dimension mismatch");
    if (s < 1 || s > p - 1) {
        throw std::invalid_argument("displaced basis: s must lie in [1, p-1]");
    }
    Basis out;
    out.p = p;
    out.s = s;
    out.vectors.assign(p, cvec(p, cplx(0.0)));
    if (p == 2) {
        const double r = 1.0 / std::sqrt(2.0);
        for (int n = 0; n < 2; ++n) {
            const cplx phase = (n == 0) ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
            for (int k = 0; k < 2; ++k) {
                out.vectors[n][k] = r * (src.vectors[0][k] + phase * src.vectors[1][k]);
            }
        }
        return out;
    }
    const int inv2 = mod_inverse(2, p);
    const double r = 1.0 / std::sqrt(static_cast<double>(p));
    for (int n = 0; n < p; ++n) {
        for (int m = 0; m < p; ++m) {
            const long long e = static_cast<long long>(inv2) * s * m * m +
                                static_cast<long long>(n) * m;
            const cplx coeff = r * root_of_unity(p, e);
            for (int k = 0; k < p; ++k) out.vectors[n][k] += coeff * src.vectors[m][k];
        }
    }
    return out;
}

} // namespace detail

inline Basis displaced_basis(const Basis& seed, const SeparationParams& params, int s) {
    if (seed.s != 0) throw std::invalid_argument("displaced_basis: expected the seed basis");
    return detail::displace(seed, params, s);
}

inline Basis displaced_dual(const Basis& dual, const SeparationParams& params, int s) {
    if (dual.s != 0) throw std::invalid_argument("displaced_dual: expected the seed dual");
    return detail::displace(dual, params, s);
}

// Orthonormal eigenbasis of X.  The seed embedding is the inversion of the
// Fourier sums in the header note, so |psi_n^x> IS the computational frame:
// sum_m |psi_m> / sqrt(p (1+(p-1)lambda)) = |e_0> and
// sum_m omega^{nm} |psi_m> / sqrt(p (1-lambda)) = |e_n> hold exactly.
inline Basis x_eigenbasis(int p, double lambda) {
    separation_params(p, lambda); // domain validation
    Basis x;
    x.p = p;
    x.s = p;
    x.vectors.assign(p, cvec(p, cplx(0.0)));
    for (int n = 0; n < p; ++n) x.vectors[n][n] = 1.0;
    return x;
}

struct BasisFamily {
    SeparationParams params;
    std::vector<Basis> psi; // displaced chain, index s = 0..p-1
    std::vector<Basis> phi; // matching duals
    Basis x_basis;
    Matrix Z;
    Matrix X;
};

namespace detail {

// Eigenvalue of Z^s X on |psi_n^s>: omega^{-n} e^{i phi_s}.
inline cplx displaced_eigenvalue(int p, int s, int n) {
    const cplx phase = (p == 2) ? cplx(0.0, 1.0) : root_of_unity(p, mod_inverse(2, p) * static_cast<long long>(s));
    return phase * root_of_unity(p, -static_cast<long long>(n));
}

inline double displaced_eigen_residual(const BasisFamily& fam, int s, int n) {
    cvec w = fam.X.apply(fam.psi[s].vectors[n]);
    for (int k = 0; k < s; ++k) w = fam.Z.apply(w);
    const cplx ev = displaced_eigenvalue(fam.params.p, s, n);
    for (int k = 0; k < fam.params.p; ++k) w[k] -= ev * fam.psi[s].vectors[n][k];
    return vec_norm(w);
}

} // namespace detail

// Assemble every structure for (p, lambda) and self-check the operator
// algebra before returning.  The phase conventions above make each displaced
// family an eigenbasis of Z^s X.  Legitimate roundoff in these residuals
// grows with the dual normalization mu ~ (1-lambda)^{-1}, so the tolerance
// scales with mu; a residual far above that level means the convention was
// broken and the family is unusable, which is a hard error.
inline BasisFamily build_family(int p, double lambda) {
    BasisFamily fam;
    fam.params = separation_params(p, lambda);
    fam.psi.reserve(p);
    fam.phi.reserve(p);
    fam.psi.push_back(seed_basis(p, lambda));
    fam.phi.push_back(biorthogonal_dual(fam.psi[0], fam.params));
    fam.Z = op_Z(fam.psi[0], fam.phi[0], fam.params);
    fam.X = op_X(fam.psi[0], fam.phi[0], fam.params);
    for (int s = 1; s < p; ++s) {
        fam.psi.push_back(displaced_basis(fam.psi[0], fam.params, s));
        fam.phi.push_back(displaced_dual(fam.phi[0], fam.params, s));
    }
    fam.x_basis = x_eigenbasis(p, lambda);

    const double check_tol = 1e-12 * (100.0 + fam.params.mu);
    for (int n = 0; n < p; ++n) {
        cvec w = fam.Z.apply(fam.psi[0].vectors[n]);
        const cplx ev = root_of_unity(p, n);
        for (int k = 0; k < p; ++k) w[k] -= ev * fam.psi[0].vectors[n][k];
        if (vec_norm(w) > check_tol) {
            throw std::runtime_error("build_family: Z eigenbasis check failed");
        }
    }
    for (int s = 1; s < p; ++s) {
        for (int n = 0; n < p; ++n) {
            if (detail::displaced_eigen_residual(fam, s, n) > check_tol) {
                throw std::runtime_error("build_family: displaced eigenbasis check failed");
            }
        }
    }
    for (int n = 0; n < p; ++n) {
        cvec w = fam.X.apply(fam.x_basis.vectors[n]);
        const cplx ev = root_of_unity(p, -static_cast<long long>(n));
        for (int k = 0; k < p; ++k) w[k] -= ev * fam.x_basis.vectors[n][k];
        if (vec_norm(w) > check_tol) {
            throw std::runtime_error("build_family: X eigenbasis check failed");
        }
    }
    return fam;
}

} // namespace ubnob
