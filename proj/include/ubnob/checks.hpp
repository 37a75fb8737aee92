#pragma once

// Structural verification of a basis family.
//
// Every identity the construction promises is checked numerically and
// reported as a named row: a measured violation, the tolerance it was held
// to, and a pass flag.  full_report() aggregates all rows; callers decide
// what to do with failures.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ubnob/basis.hpp"
#include "ubnob/linalg.hpp"

namespace ubnob {

struct CheckResult {
    std::string name;
    double value = 0.0;     // measured violation (or witness magnitude)
    double threshold = 0.0; // bound it was compared against
    bool pass = false;
};

struct VerificationReport {
    int p = 0;
    double lambda = 0.0;
    double tolerance = 0.0;
    std::vector<CheckResult> checks;
    bool overall_pass = false;
};

// Cross-family overlap statistics over the psi chain. For lambda = 0 every
// |<psi_m^t|psi_n^s>| equals 1/sqrt(p) (mutual unbiasedness); for lambda > 0
// the families break that uniformity.  For p >= 3 some pair spreads; at p = 2
// every cross overlap is the constant sqrt((1+lambda^2)/2), so the spread is
// exactly zero there and the departure from 1/sqrt(p) is the usable witness.
// Both statistics are reported.
struct MubWitness {
    int s = 0;                     // family indices of the widest-spread pair
    int t = 0;
    double overlap_min = 0.0;
    double overlap_max = 0.0;
    double spread = 0.0;           // overlap_max - overlap_min for that pair
    double max_dev_from_mub = 0.0; // max ||overlap| - 1/sqrt(p)| over all pairs
    bool mub_like = false;         // uniform marker: every overlap is 1/sqrt(p)
};

namespace detail {

// max_n || M v_n - eigenvalue_n v_n || for vectors of a basis.
inline double eigen_residual(const Matrix& m, const Basis& b,
                             const std::vector<cplx>& eigenvalues) {
    double worst = 0.0;
    for (int n = 0; n < b.p; ++n) {
        cvec w = m.apply(b.vectors[n]);
        for (int k = 0; k < b.p; ++k) w[k] -= eigenvalues[n] * b.vectors[n][k];
        worst = std::max(worst, vec_norm(w));
    }
    return worst;
}

// Identity decompositions, Eq forms for the basis chain and the dual chain:
//
//   1 = mu sum_n P(psi_n^s) - nu (1-lambda) sum_{n>=1} P(x_n)
//         + nu (p-1)(1 + (p-1) lambda) P(x_0)
//   1 = mu sum_n P(phi_n^s) - lambda (mu-nu) sum_{n>=1} P(x_n)
//         + lambda (p-1)(mu + (p-1) nu) P(x_0)
//
// Returns max_s || RHS - 1 ||_F for the requested chain.
inline double identity_violation(const BasisFamily& fam, bool dual_chain) {
    const SeparationParams& sp = fam.params;
    const int p = sp.p;
    const double c_tail = dual_chain ? -sp.lambda * (sp.mu - sp.nu) : -sp.nu * (1.0 - sp.lambda);
    const double c_head = dual_chain ? sp.lambda * (p - 1) * (sp.mu + (p - 1) * sp.nu)
                                     : sp.nu * (p - 1) * (1.0 + (p - 1) * sp.lambda);
    const Matrix ident = Matrix::identity(p);
    double worst = 0.0;
    for (int s = 0; s < p; ++s) {
        const Basis& chain = dual_chain ? fam.phi[s] : fam.psi[s];
        Matrix rhs(p);
        for (int n = 0; n < p; ++n) add_scaled_outer(rhs, cplx(sp.mu), chain.vectors[n], chain.vectors[n]);
        add_scaled_outer(rhs, cplx(c_head), fam.x_basis.vectors[0], fam.x_basis.vectors[0]);
        for (int n = 1; n < p; ++n) {
            add_scaled_outer(rhs, cplx(c_tail), fam.x_basis.vectors[n], fam.x_basis.vectors[n]);
        }
        worst = std::max(worst, frobenius_distance(rhs, ident));
    }
    return worst;
}

} // namespace detail

// Max deviation of |<phi_m^t|psi_n^s>|^2 from
//     delta_st delta_nm / mu + (1 - delta_st) / (mu p)
// over every s, t in the displaced chain (duals against bases).
inline CheckResult check_unbiasedness(const BasisFamily& fam, double tol) {
    const int p = fam.params.p;
    const double inv_mu = 1.0 / fam.params.mu;
    const double inv_mup = inv_mu / p;
    double worst = 0.0;
    for (int t = 0; t < p; ++t) {
        for (int s = 0; s < p; ++s) {
            for (int m = 0; m < p; ++m) {
                for (int n = 0; n < p; ++n) {
                    const double got = std::norm(inner(fam.phi[t].vectors[m], fam.psi[s].vectors[n]));
                    const double want = (s == t) ? (m == n ? inv_mu : 0.0) : inv_mup;
                    worst = std::max(worst, std::abs(got - want));
                }
            }
        }
    }
    return {"unbiasedness", worst, tol, worst < tol};
}

// Both identity decompositions across every family; reports the larger of
// the two worst-case violations.
inline CheckResult check_identity_decompositions(const BasisFamily& fam, double tol) {
    const double v = std::max(detail::identity_violation(fam, false),
                              detail::identity_violation(fam, true));
    return {"identity_decompositions", v, tol, v < tol};
}

// Algebra of the generalized Pauli pair: commutation, cyclicity, unitarity.
inline std::vector<CheckResult> check_dual_pair(const BasisFamily& fam, double tol) {
    const int p = fam.params.p;
    const Matrix ident = Matrix::identity(p);
    const cplx omega = root_of_unity(p, 1);

    std::vector<CheckResult> rows;
    const double comm = frobenius_distance(fam.Z * fam.X, omega * (fam.X * fam.Z));
    rows.push_back({"zx_commutation", comm, tol, comm < tol});

    Matrix zp = fam.Z;
    for (int k = 1; k < p; ++k) zp = zp * fam.Z;
    const double zc = frobenius_distance(zp, ident);
    rows.push_back({"z_cyclic", zc, tol, zc < tol});

    Matrix xp = fam.X;
    for (int k = 1; k < p; ++k) xp = xp * fam.X;
    const double xc = frobenius_distance(xp, ident);
    rows.push_back({"x_cyclic", xc, tol, xc < tol});

    const double xu = frobenius_distance(fam.X * fam.X.adjoint(), ident);
    rows.push_back({"x_unitary", xu, tol, xu < tol});
    return rows;
}

// Scan every unordered pair of distinct psi families for non-uniform cross
// overlaps.
inline MubWitness witness_not_mub(const BasisFamily& fam) {
    const int p = fam.params.p;
    const double mub = 1.0 / std::sqrt(static_cast<double>(p));
    MubWitness w;
    w.overlap_min = 1.0;
    bool first = true;
    for (int a = 0; a < p; ++a) {
        for (int b = a + 1; b < p; ++b) {
            const Basis& fa = fam.psi[a];
            const Basis& fb = fam.psi[b];
            double lo = 2.0, hi = 0.0;
            for (int m = 0; m < p; ++m) {
                for (int n = 0; n < p; ++n) {
                    const double ov = std::abs(inner(fa.vectors[m], fb.vectors[n]));
                    lo = std::min(lo, ov);
                    hi = std::max(hi, ov);
                    w.max_dev_from_mub = std::max(w.max_dev_from_mub, std::abs(ov - mub));
                }
            }
            if (first || hi - lo > w.spread) {
                first = false;
                w.s = fa.s;
                w.t = fb.s;
                w.spread = hi - lo;
                w.overlap_min = lo;
                w.overlap_max = hi;
            }
        }
    }
    w.mub_like = w.max_dev_from_mub < 1e-9;
    return w;
}

// Everything at once.  Structural rows are held to `tol`; the witness row is
// regime-dependent: at lambda = 0 the overlaps must be uniform within tol,
// at lambda > 0 the families must demonstrably fail mutual unbiasedness --
// max(spread, deviation from 1/sqrt(p)) must *exceed* 1e-6, and `pass`
// reflects that reversed direction.
inline VerificationReport full_report(const BasisFamily& fam, double tol) {
    const SeparationParams& sp = fam.params;
    const int p = sp.p;
    VerificationReport rep;
    rep.p = p;
    rep.lambda = sp.lambda;
    rep.tolerance = tol;
    auto row = [&](const std::string& name, double v) {
        rep.checks.push_back({name, v, tol, v < tol});
    };

    // Separation Gram law, in modulus so the Gauss-sum phases of the
    // displaced families cancel out: |<v_m|v_n>| = delta + (1-delta)|c|.
    double gram_psi = 0.0, gram_phi = 0.0;
    for (int s = 0; s < p; ++s) {
        const Matrix gp = gram(fam.psi[s]);
        const Matrix gf = gram(fam.phi[s]);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                const double want_p = (i == j) ? 1.0 : std::abs(sp.lambda);
                const double want_f = (i == j) ? 1.0 : std::abs(sp.eta);
                gram_psi = std::max(gram_psi, std::abs(std::abs(gp(i, j)) - want_p));
                gram_phi = std::max(gram_phi, std::abs(std::abs(gf(i, j)) - want_f));
            }
        }
    }
    row("gram_psi", gram_psi);
    row("gram_phi", gram_phi);

    double biorth = 0.0;
    const double inv_smu = 1.0 / std::sqrt(sp.mu);
    for (int s = 0; s < p; ++s) {
        for (int m = 0; m < p; ++m) {
            for (int n = 0; n < p; ++n) {
                const cplx want = (m == n) ? cplx(inv_smu) : cplx(0.0);
                biorth = std::max(biorth,
                                  std::abs(inner(fam.phi[s].vectors[m], fam.psi[s].vectors[n]) - want));
            }
        }
    }
    row("biorthogonality", biorth);

    double xortho = 0.0;
    const Matrix gx = gram(fam.x_basis);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            xortho = std::max(xortho, std::abs(gx(i, j) - cplx(i == j ? 1.0 : 0.0)));
        }
    }
    row("x_orthonormal", xortho);

    {
        std::vector<cplx> evs(p);
        for (int n = 0; n < p; ++n) evs[n] = root_of_unity(p, n);
        row("z_eigenbasis", detail::eigen_residual(fam.Z, fam.psi[0], evs));
        for (int n = 0; n < p; ++n) evs[n] = root_of_unity(p, -static_cast<long long>(n));
        row("x_eigenbasis", detail::eigen_residual(fam.X, fam.x_basis, evs));
    }

    double displaced = 0.0;
    for (int s = 1; s < p; ++s) {
        for (int n = 0; n < p; ++n) {
            displaced = std::max(displaced, detail::displaced_eigen_residual(fam, s, n));
        }
    }
    row("displaced_eigenbases", displaced);

    double shift_psi = 0.0, shift_phi = 0.0;
    {
        cvec vp = fam.psi[0].vectors[0];
        cvec vf = fam.phi[0].vectors[0];
        for (int n = 1; n < p; ++n) {
            vp = fam.X.apply(vp);
            vf = fam.X.apply(vf);
            cvec dp = vp, df = vf;
            for (int k = 0; k < p; ++k) {
                dp[k] -= fam.psi[0].vectors[n][k];
                df[k] -= fam.phi[0].vectors[n][k];
            }
            shift_psi = std::max(shift_psi, vec_norm(dp));
            shift_phi = std::max(shift_phi, vec_norm(df));
        }
    }
    row("shift_psi", shift_psi);
    row("shift_phi", shift_phi);

    for (const CheckResult& r : check_dual_pair(fam, tol)) rep.checks.push_back(r);
    rep.checks.push_back(check_unbiasedness(fam, tol));
    rep.checks.push_back(check_identity_decompositions(fam, tol));

    const MubWitness w = witness_not_mub(fam);
    if (std::abs(sp.lambda) < 1e-12) {
        rep.checks.push_back({"mub_overlap_uniformity", w.max_dev_from_mub, tol,
                              w.max_dev_from_mub < tol});
    } else {
        const double evidence = std::max(w.spread, w.max_dev_from_mub);
        rep.checks.push_back({"not_mub_witness", evidence, 1e-6, evidence > 1e-6});
    }

    rep.overall_pass = true;
    for (const CheckResult& r : rep.checks) rep.overall_pass = rep.overall_pass && r.pass;
    return rep;
}

} // namespace ubnob
