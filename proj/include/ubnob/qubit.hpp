#pragma once

// Dimension-two constructions: unbiased non-orthogonal basis pairs, the POVM
// condition, reconstruction, the SIC case, the third-basis search, and the
// correspondence with the prime-dimension family at p = 2.
//
// Normal form of a qubit basis here:
//
//     |xi_0^1> = (1, 0),   |xi_1^1> = (e^{i phi} cos theta, sin theta)
//
// with overlap modulus lambda_1 = |cos theta|.  A second basis
//
//     |xi_j^2> = (e^{i phi_j} cos theta_1, sin theta_1),  j = 0, 1
//
// is unbiased with the first (all four cross overlaps equal to r) iff
// cos theta_1 = r, phi_2 = 2 phi - phi_1, and the phase condition
//
//     cos(phi - phi_1) = (2r^2 - 1) / (2 r lambda_1)
//                        * sqrt((1 - lambda_1^2) / (1 - r^2))
//
// holds; its feasibility bound |cos(phi - phi_1)| <= 1 delimits the valid
// (theta, r) region.  The two separations then obey
// lambda_1^2 lambda_2^2 = (2r^2 - 1)^2, and the four projectors resolve
// 2*identity exactly when lambda_1^2 = lambda_2^2 = 1 - 2r^2 (possible for
// r <= 1/sqrt(2)); r^2 = 1/3 is the SIC-POVM configuration.

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ubnob/basis.hpp"
#include "ubnob/linalg.hpp"

namespace ubnob {

struct QubitParams {
    double theta = 0.0;
    double phi = 0.0;
    double phi1 = 0.0;
    double r = 0.0;

    double lambda1() const { return std::cos(theta); }
    double phi2() const { return 2.0 * phi - phi1; }
    double theta1() const { return std::acos(r); }
    // lambda_2^2 = 1 - sin^2(2 theta_1) sin^2(phi - phi_1)
    double lambda2_sq() const {
        const double s2 = std::sin(2.0 * theta1()) * std::sin(phi - phi1);
        return 1.0 - s2 * s2;
    }
};

struct QubitPair {
    Basis xi1;
    Basis xi2;
    QubitParams params;
};

struct QubitReconstruction {
    std::array<double, 4> q{};
    Matrix rho_hat;
};

struct ThirdBasisSearch {
    double grid_min = 0.0;    // best residual on the coarse grid
    double refined_min = 0.0; // after one 10x refinement pass around the best cell
    double theta = 0.0;       // refined argmin
    double phi_a = 0.0;
    double phi_b = 0.0;
};

inline Basis first_basis(double theta, double phi) {
    if (!(theta > 0.0 && theta < M_PI)) {
        throw std::domain_error("first_basis: theta in (0, pi) required (states parallel otherwise)");
    }
    // cos(theta) may be negative, so build e^{i phi} cos(theta) by product
    // rather than std::polar (which requires a non-negative magnitude).
    const cplx eip(std::cos(phi), std::sin(phi));
    Basis b;
    b.p = 2;
    b.s = 1;
    b.vectors = {{cplx(1.0), cplx(0.0)},
                 {eip * std::cos(theta), cplx(std::sin(theta))}};
    return b;
}

namespace detail {

// Partner construction with an explicit branch for phi_1 = phi ± arccos(·).
// The public entry point fixes the principal (+) branch; the mirrored branch
// realizes the index-aligned correspondence with the p = 2 dual family.
inline QubitPair unbiased_partner_branch(double theta, double phi, double r, int branch) {
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("unbiased_partner: r in (0, 1) required");
    const Basis xi1 = first_basis(theta, phi); // validates theta
    const double lambda1 = std::cos(theta);

    QubitParams params;
    params.theta = theta;
    params.phi = phi;
    params.r = r;

    if (std::abs(lambda1) < 1e-12) {
        // Orthogonal first basis: unbiasedness forces r = 1/sqrt(2) and
        // leaves both phases unconstrained; fix the convention phi_1 = 0,
        // phi_2 = pi (the standard second MUB).  The stored phi is rewritten
        // to pi/2 so the phi2() = 2 phi - phi1 bookkeeping reproduces the
        // output pair; the input phi had no effect on xi1 at theta = pi/2.
        if (std::abs(r - M_SQRT1_2) > 1e-9) {
            throw std::domain_error(
                "unbiased_partner: orthogonal first basis requires r = 1/sqrt(2)");
        }
        params.phi1 = 0.0;
        params.phi = M_PI / 2.0;
    } else {
        const double c = (2.0 * r * r - 1.0) / (2.0 * r * lambda1) *
                         std::sqrt((1.0 - lambda1 * lambda1) / (1.0 - r * r));
        if (std::abs(c) > 1.0 + 1e-12) {
            std::ostringstream msg;
            msg << "unbiased_partner: no solution, |cos(phi - phi_1)| = " << std::abs(c)
                << " exceeds 1";
            throw std::domain_error(msg.str());
        }
        const double clamped = std::min(1.0, std::max(-1.0, c));
        params.phi1 = phi + branch * std::acos(clamped);
    }

    const double ct1 = r;
    const double st1 = std::sqrt(1.0 - r * r);
    QubitPair pair;
    pair.xi1 = xi1;
    pair.xi2.p = 2;
    pair.xi2.s = 2;
    pair.xi2.vectors = {{std::polar(ct1, params.phi1), cplx(st1)},
                        {std::polar(ct1, params.phi2()), cplx(st1)}};
    pair.params = params;

    for (const cvec& a : pair.xi2.vectors) {
        for (const cvec& b : pair.xi1.vectors) {
            if (std::abs(std::abs(inner(a, b)) - r) > 1e-9) {
                throw std::runtime_error("unbiased_partner: unbiasedness self-check failed");
            }
        }
    }
    return pair;
}

} // namespace detail

inline QubitPair unbiased_partner(double theta, double phi, double r) {
    return detail::unbiased_partner_branch(theta, phi, r, +1);
}

// The pair whose four projectors resolve 2*identity:
// lambda_1 = lambda_2 = sqrt(1 - 2r^2), phase fixed by phi = 0.
inline QubitPair povm_pair(double r) {
    const double r2 = r * r;
    if (!(r2 > 0.0 && r2 < 0.5)) {
        throw std::domain_error("povm_pair: r^2 in (0, 1/2) required");
    }
    const double lambda1 = std::sqrt(1.0 - 2.0 * r2);
    QubitPair pair = detail::unbiased_partner_branch(std::acos(lambda1), 0.0, r, +1);

    Matrix sum(2);
    for (const Basis* b : {&pair.xi1, &pair.xi2}) {
        for (const cvec& v : b->vectors) add_scaled_outer(sum, cplx(1.0), v, v);
    }
    if (frobenius_distance(sum, cplx(2.0) * Matrix::identity(2)) > 1e-10) {
        throw std::runtime_error("povm_pair: identity resolution self-check failed");
    }
    return pair;
}

namespace detail {

inline std::array<const cvec*, 4> pair_states(const QubitPair& pair) {
    return {&pair.xi1.vectors[0], &pair.xi1.vectors[1],
            &pair.xi2.vectors[0], &pair.xi2.vectors[1]};
}

// Solve the real 4x4 system by Gaussian elimination with partial pivoting.
inline std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> a,
                                    std::array<double, 4> b) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int row = col + 1; row < 4; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
        }
        if (std::abs(a[piv][col]) < 1e-12) {
            throw std::domain_error("qubit_reconstruct: singular Gram system");
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (int row = col + 1; row < 4; ++row) {
            const double f = a[row][col] / a[col][col];
            for (int k = col; k < 4; ++k) a[row][k] -= f * a[col][k];
            b[row] -= f * b[col];
        }
    }
    std::array<double, 4> x{};
    for (int row = 3; row >= 0; --row) {
        double acc = b[row];
        for (int k = row + 1; k < 4; ++k) acc -= a[row][k] * x[k];
        x[row] = acc / a[row][row];
    }
    return x;
}

} // namespace detail

// Coefficients from the operator Gram system G q = probs with
// G_ab = |<xi_a|xi_b>|^2, then rho_hat = sum_a q_a |xi_a><xi_a|.
// probs ordering: (s=1 j=0, s=1 j=1, s=2 j=0, s=2 j=1).
inline QubitReconstruction qubit_reconstruct(const std::array<double, 4>& probs,
                                             const QubitPair& pair) {
    const auto states = detail::pair_states(pair);
    std::array<std::array<double, 4>, 4> g{};
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) g[a][b] = std::norm(inner(*states[a], *states[b]));
    }
    QubitReconstruction out;
    out.q = detail::solve4(g, probs);
    out.rho_hat = Matrix(2);
    for (int a = 0; a < 4; ++a) {
        add_scaled_outer(out.rho_hat, cplx(out.q[a]), *states[a], *states[a]);
    }
    return out;
}

// The reconstruction coefficients exactly as printed in the source (kept as
// a comparator; they fail the trace identity sum(q) = 1 by a uniform factor
// and are never used to reconstruct):
//
//   q_s0 = [(1-r^2) p_s0 - (1-3r^2) p_s1 - 2r^4] / (2r^2 (1-2r^2))
//
// and q_s1 with p_s0 <-> p_s1 swapped.
inline std::array<double, 4> printed_qkj(const std::array<double, 4>& probs, double r) {
    const double r2 = r * r;
    if (!(r2 > 0.0 && r2 < 0.5)) {
        throw std::domain_error("printed_qkj: r^2 in (0, 1/2) required");
    }
    const double denom = 2.0 * r2 * (1.0 - 2.0 * r2);
    const auto q = [&](double p0, double p1) {
        return ((1.0 - r2) * p0 - (1.0 - 3.0 * r2) * p1 - 2.0 * r2 * r2) / denom;
    };
    return {q(probs[0], probs[1]), q(probs[1], probs[0]),
            q(probs[2], probs[3]), q(probs[3], probs[2])};
}

// Trace-consistent SIC reconstruction at r^2 = 1/3:
// rho_hat = (3/2) sum_a p_a Pi_a - identity.
inline Matrix sic_reconstruct(const std::array<double, 4>& probs, const QubitPair& pair) {
    if (std::abs(pair.params.r * pair.params.r - 1.0 / 3.0) > 1e-9) {
        throw std::invalid_argument("sic_reconstruct: pair is not the SIC (r^2 = 1/3) configuration");
    }
    Matrix rho(2);
    const auto states = detail::pair_states(pair);
    for (int a = 0; a < 4; ++a) {
        add_scaled_outer(rho, cplx(1.5 * probs[a]), *states[a], *states[a]);
    }
    rho -= Matrix::identity(2);
    return rho;
}

// Brute-force evidence for the no-third-basis claim: scan candidate bases
//
//     zeta_0 = (e^{i phi_a} cos theta_3, sin theta_3)
//     zeta_1 = (e^{i phi_b} cos theta_3, sin theta_3)
//
// over a grid_density^3 grid and report the minimum over candidates of the
// max deviation of the eight cross overlaps from r, then refine once at 10x
// resolution around the best cell.  A minimum bounded away from zero that
// does not collapse under refinement indicates a genuine gap.
inline ThirdBasisSearch third_basis_search(const QubitPair& pair, int grid_density) {
    if (grid_density < 2) throw std::invalid_argument("third_basis_search: grid too small");
    if (std::abs(pair.params.lambda1()) < 1e-9) {
        throw std::domain_error(
            "third_basis_search: inapplicable for an orthogonal pair (a third MUB exists)");
    }
    const auto states = detail::pair_states(pair);
    const double r = pair.params.r;

    const auto residual = [&](double theta3, double phi_a, double phi_b) {
        const double c3 = std::cos(theta3); // may be negative
        const cplx top_a = cplx(std::cos(phi_a), std::sin(phi_a)) * c3;
        const cplx top_b = cplx(std::cos(phi_b), std::sin(phi_b)) * c3;
        const double s3 = std::sin(theta3);
        double worst = 0.0;
        for (const cvec* t : states) {
            const cplx ta = (*t)[0];
            const cplx tb = (*t)[1];
            const double ova = std::abs(std::conj(top_a) * ta + s3 * tb);
            const double ovb = std::abs(std::conj(top_b) * ta + s3 * tb);
            worst = std::max({worst, std::abs(ova - r), std::abs(ovb - r)});
        }
        return worst;
    };

    const int n = grid_density;
    const double dtheta = M_PI / n;
    const double dphi = 2.0 * M_PI / n;
    ThirdBasisSearch out;
    out.grid_min = 1e300;
    double best_theta = 0.0, best_a = 0.0, best_b = 0.0;
    for (int i = 0; i < n; ++i) {
        const double theta3 = dtheta * (i + 0.5);
        for (int j = 0; j < n; ++j) {
            const double phi_a = dphi * j;
            for (int k = 0; k < n; ++k) {
                const double res = residual(theta3, phi_a, dphi * k);
                if (res < out.grid_min) {
                    out.grid_min = res;
                    best_theta = theta3;
                    best_a = phi_a;
                    best_b = dphi * k;
                }
            }
        }
    }

    out.refined_min = out.grid_min;
    out.theta = best_theta;
    out.phi_a = best_a;
    out.phi_b = best_b;
    for (int i = -10; i <= 10; ++i) {
        const double theta3 = best_theta + i * dtheta / 10.0;
        if (!(theta3 > 0.0 && theta3 < M_PI)) continue;
        for (int j = -10; j <= 10; ++j) {
            for (int k = -10; k <= 10; ++k) {
                const double pa = best_a + j * dphi / 10.0;
                const double pb = best_b + k * dphi / 10.0;
                const double res = residual(theta3, pa, pb);
                if (res < out.refined_min) {
                    out.refined_min = res;
                    out.theta = theta3;
                    out.phi_a = pa;
                    out.phi_b = pb;
                }
            }
        }
    }
    return out;
}

// Agreement between the dimension-two pair and the p = 2 prime-dim family:
// with |xi_n^1> = |psi_n^0> (aligned by the global unitary U sending psi_0 to
// (1,0) and the Gram-Schmidt complement to (0,1)), the partner basis matches
// the dual displaced family, |xi_n^2> = |phi_n^1>, up to per-vector phases.
// Returns max_n over the phase-minimized vector distance.  The matching
// partner is the mirrored phi_1 branch; r^2 = 1/(2 mu) = (1 - lambda^2)/2.
inline double correspondence_check(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::domain_error("correspondence_check: lambda in (0, 1) required");
    }
    const BasisFamily fam = build_family(2, lambda);
    const double r = std::sqrt((1.0 - lambda * lambda) / 2.0);
    const QubitPair pair = detail::unbiased_partner_branch(std::acos(lambda), 0.0, r, -1);

    // U rows: <psi_0| and <u_1| with u_1 the normalized complement of psi_0.
    const cvec& psi0 = fam.psi[0].vectors[0];
    const cvec& psi1 = fam.psi[0].vectors[1];
    cvec u1(2);
    const double nrm = std::sqrt(1.0 - lambda * lambda);
    for (int k = 0; k < 2; ++k) u1[k] = (psi1[k] - lambda * psi0[k]) / nrm;
    Matrix u(2);
    for (int k = 0; k < 2; ++k) {
        u(0, k) = std::conj(psi0[k]);
        u(1, k) = std::conj(u1[k]);
    }

    double worst = 0.0;
    for (int n = 0; n < 2; ++n) {
        const cvec w = u.apply(fam.phi[1].vectors[n]);
        // Componentwise distance at the optimal phase: sqrt(2 - 2|<a|b>|)
        // cannot resolve agreement below sqrt(eps), this can.
        const cplx ov = inner(pair.xi2.vectors[n], w);
        const cplx phase = (std::abs(ov) > 0.0) ? ov / std::abs(ov) : cplx(1.0);
        cvec diff(2);
        for (int k = 0; k < 2; ++k) diff[k] = w[k] - phase * pair.xi2.vectors[n][k];
        worst = std::max(worst, vec_norm(diff));
    }
    return worst;
}

} // namespace ubnob
