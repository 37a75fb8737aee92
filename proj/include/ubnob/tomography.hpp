#pragma once

// State tomography in the p+1 measurement bases.
//
// Exact Born tables, the probability sum rule, the optimal linear
// reconstruction, its lambda = 0 (MUB) limit, shot-noise sampling, the
// lambda -> 1 diagnostic, and the error-scaling sweep.  The reconstruction is
// optimal in the sense that each expansion coefficient of rho-hat depends on
// exactly one measured probability, so single-measurement errors never mix
// across coefficients.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ubnob/basis.hpp"
#include "ubnob/linalg.hpp"
#include "ubnob/rng.hpp"

namespace ubnob {

struct ProbabilityTable {
    int p = 0;
    std::vector<double> p_sn; // p*p, row s = basis, column n = outcome
    std::vector<double> p_x;  // length p

    double at(int s, int n) const { return p_sn[static_cast<std::size_t>(s) * p + n]; }
    double& at(int s, int n) { return p_sn[static_cast<std::size_t>(s) * p + n]; }
};

struct SweepResult {
    std::vector<double> lambda_grid;
    std::vector<double> rms_error; // per lambda: mean Frobenius error over trials
    double fitted_slope = 0.0;     // log(rms_error) vs log(1 - lambda)
    std::uint64_t shots = 0;
    int trials = 0;
    std::uint64_t seed = 0;
};

struct LimitDiagnostic {
    int p = 0;
    std::vector<double> alpha_sn; // p*p estimates at the last lambda
    std::vector<double> lambda_sequence;
    std::vector<double> convergence_deltas; // max_sn |alpha(k+1) - alpha(k)|
};

namespace detail {

inline double born_value(const Matrix& rho, const cvec& v) {
    const cvec rv = rho.apply(v);
    const cplx val = inner(v, rv);
    // Hermitian rho against a fixed vector: imaginary residue is pure
    // rounding; clamp it and pin the probability into [0, 1].
    double q = val.real();
    if (q < 0.0) q = 0.0;
    if (q > 1.0) q = 1.0;
    return q;
}

} // namespace detail

inline ProbabilityTable born_probabilities(const DensityMatrix& rho, const BasisFamily& family) {
    const int p = family.params.p;
    if (rho.dim() != p) throw std::invalid_argument("born_probabilities: dimension mismatch");
    ProbabilityTable t;
    t.p = p;
    t.p_sn.resize(static_cast<std::size_t>(p) * p);
    t.p_x.resize(p);
    for (int s = 0; s < p; ++s) {
        for (int n = 0; n < p; ++n) {
            t.at(s, n) = detail::born_value(rho.matrix(), family.psi[s].vectors[n]);
        }
    }
    for (int n = 0; n < p; ++n) {
        t.p_x[n] = detail::born_value(rho.matrix(), family.x_basis.vectors[n]);
    }
    return t;
}

// Max over s of | sum_n p_sn - [(1-lambda) + p lambda p_x0] |.
inline double sum_rule(const ProbabilityTable& table, double lambda) {
    const int p = table.p;
    const double expected = (1.0 - lambda) + p * lambda * table.p_x[0];
    double worst = 0.0;
    for (int s = 0; s < p; ++s) {
        double sum = 0.0;
        for (int n = 0; n < p; ++n) sum += table.at(s, n);
        worst = std::max(worst, std::abs(sum - expected));
    }
    return worst;
}

// Optimal linear reconstruction:
//
//   rho-hat = mu sum_{s,n} p_sn |phi_n^s><phi_n^s|
//           + (1-lambda)/(1+(p-1)lambda) (p_x0 - 1) |psi_0^x><psi_0^x|
//           + sum_{n>=1} (p_xn - p_x0 p lambda/(1-lambda) - 1) |psi_n^x><psi_n^x|
//
// Exact tables reproduce rho; noisy tables may produce a non-physical
// Hermitian matrix (see project_to_physical).
inline Matrix reconstruct(const ProbabilityTable& table, const BasisFamily& family) {
    const SeparationParams& sp = family.params;
    const int p = sp.p;
    if (table.p != p) throw std::invalid_argument("reconstruct: dimension mismatch");
    if (sp.lambda > 1.0 - 1e-6) {
        // mu ~ (1-lambda)^{-1}: beyond this the cancellations exceed double
        // precision; limit_alpha is the tool for the near-singular regime.
        throw std::domain_error("reconstruct: lambda too close to 1");
    }
    Matrix rho(p);
    for (int s = 0; s < p; ++s) {
        for (int n = 0; n < p; ++n) {
            add_scaled_outer(rho, cplx(sp.mu * table.at(s, n)),
                             family.phi[s].vectors[n], family.phi[s].vectors[n]);
        }
    }
    const double head = (1.0 - sp.lambda) / (1.0 + (p - 1) * sp.lambda) * (table.p_x[0] - 1.0);
    add_scaled_outer(rho, cplx(head), family.x_basis.vectors[0], family.x_basis.vectors[0]);
    const double drift = table.p_x[0] * p * sp.lambda / (1.0 - sp.lambda);
    for (int n = 1; n < p; ++n) {
        add_scaled_outer(rho, cplx(table.p_x[n] - drift - 1.0),
                         family.x_basis.vectors[n], family.x_basis.vectors[n]);
    }
    return rho;
}

// The lambda = 0 limit: rho-hat = sum_{s=0}^{p} sum_n p_sn P(psi_n^s) - I,
// with s = p denoting the x basis.
inline Matrix reconstruct_mub_limit(const ProbabilityTable& table, const BasisFamily& family) {
    const int p = family.params.p;
    if (table.p != p) throw std::invalid_argument("reconstruct_mub_limit: dimension mismatch");
    if (std::abs(family.params.lambda) > 1e-12) {
        throw std::invalid_argument("reconstruct_mub_limit: family must have lambda = 0");
    }
    Matrix rho(p);
    for (int s = 0; s < p; ++s) {
        for (int n = 0; n < p; ++n) {
            add_scaled_outer(rho, cplx(table.at(s, n)),
                             family.psi[s].vectors[n], family.psi[s].vectors[n]);
        }
    }
    for (int n = 0; n < p; ++n) {
        add_scaled_outer(rho, cplx(table.p_x[n]), family.x_basis.vectors[n],
                         family.x_basis.vectors[n]);
    }
    rho -= Matrix::identity(p);
    return rho;
}

// Shot noise.  Each displaced-basis probability is an independently repeated
// yes/no experiment (binomial per entry); the x row is a genuine projective
// measurement, sampled as one multinomial.
inline ProbabilityTable sample_table(const ProbabilityTable& table, std::uint64_t shots,
                                     RngStream& rng) {
    if (shots < 1) throw std::invalid_argument("sample_table: shots must be >= 1");
    ProbabilityTable noisy = table;
    const double inv = 1.0 / static_cast<double>(shots);
    for (double& q : noisy.p_sn) {
        q = static_cast<double>(rng.binomial(shots, q)) * inv;
    }
    const std::vector<std::uint64_t> counts = rng.multinomial(shots, table.p_x);
    for (int n = 0; n < table.p; ++n) noisy.p_x[n] = static_cast<double>(counts[n]) * inv;
    return noisy;
}

// Clip-and-rescale projection onto physical states.
inline DensityMatrix project_to_physical(const Matrix& m) {
    if (m.max_hermiticity_violation() > 1e-8) {
        throw std::invalid_argument("project_to_physical: input is not Hermitian");
    }
    const int p = m.dim();
    Matrix h = cplx(0.5) * (m + m.adjoint());
    const EigenResult eig = hermitian_eigen(h);
    double total = 0.0;
    std::vector<double> clipped(p);
    for (int k = 0; k < p; ++k) {
        clipped[k] = std::max(0.0, eig.eigenvalues[k]);
        total += clipped[k];
    }
    if (!(total > 0.0)) throw std::domain_error("project_to_physical: no positive eigenvalue mass");
    Matrix out(p);
    for (int k = 0; k < p; ++k) {
        if (clipped[k] == 0.0) continue;
        cvec v(p);
        for (int r = 0; r < p; ++r) v[r] = eig.eigenvectors(r, k);
        add_scaled_outer(out, cplx(clipped[k] / total), v, v);
    }
    Matrix sym = cplx(0.5) * (out + out.adjoint());
    return DensityMatrix::trusted(sym);
}

// lambda -> 1 diagnostic of Eq-level cancellation: the probabilities behave
// as p_sn = lambda p_x0 + sqrt(1-lambda) alpha_sn + O(1-lambda), so the
// estimates (p_sn - lambda p_x0)/sqrt(1-lambda) converge as lambda climbs.
inline LimitDiagnostic limit_alpha(const DensityMatrix& rho, int p,
                                   const std::vector<double>& lambda_sequence) {
    if (rho.dim() != p) throw std::invalid_argument("limit_alpha: dimension mismatch");
    if (lambda_sequence.empty()) throw std::invalid_argument("limit_alpha: empty lambda sequence");
    for (std::size_t k = 0; k < lambda_sequence.size(); ++k) {
        if (lambda_sequence[k] >= 1.0) throw std::domain_error("limit_alpha: lambda must be < 1");
        if (k > 0 && lambda_sequence[k] <= lambda_sequence[k - 1]) {
            throw std::invalid_argument("limit_alpha: lambda sequence must increase");
        }
    }
    LimitDiagnostic diag;
    diag.p = p;
    diag.lambda_sequence = lambda_sequence;
    std::vector<double> prev;
    for (double lambda : lambda_sequence) {
        const BasisFamily fam = build_family(p, lambda);
        const ProbabilityTable t = born_probabilities(rho, fam);
        const double scale = 1.0 / std::sqrt(1.0 - lambda);
        std::vector<double> alpha(static_cast<std::size_t>(p) * p);
        for (int s = 0; s < p; ++s) {
            for (int n = 0; n < p; ++n) {
                alpha[static_cast<std::size_t>(s) * p + n] =
                    (t.at(s, n) - lambda * t.p_x[0]) * scale;
            }
        }
        if (!prev.empty()) {
            double delta = 0.0;
            for (std::size_t k = 0; k < alpha.size(); ++k) {
                delta = std::max(delta, std::abs(alpha[k] - prev[k]));
            }
            diag.convergence_deltas.push_back(delta);
        }
        prev = std::move(alpha);
    }
    diag.alpha_sn = std::move(prev);
    return diag;
}

// Monte Carlo error scaling.  Per (lambda, trial) cell: fresh random state,
// exact table, sampled table, raw (unprojected) reconstruction error.  The
// per-cell stream is a fixed mix of (seed, lambda index, trial index), so
// results are independent of evaluation order and bit-stable given the seed.
inline SweepResult noise_sweep(int p, const std::vector<double>& lambda_grid,
                               std::uint64_t shots, int trials, std::uint64_t seed) {
    if (lambda_grid.size() < 2) throw std::domain_error("noise_sweep: slope needs >= 2 grid points");
    if (trials < 2) throw std::invalid_argument("noise_sweep: trials must be >= 2");
    if (shots < 1) throw std::invalid_argument("noise_sweep: shots must be >= 1");
    bool all_equal = true;
    for (double lam : lambda_grid) {
        separation_params(p, lam); // domain validation
        if (lam > 1.0 - 1e-6) throw std::domain_error("noise_sweep: lambda too close to 1");
        all_equal = all_equal && lam == lambda_grid.front();
    }
    if (all_equal) throw std::domain_error("noise_sweep: degenerate lambda grid");

    SweepResult res;
    res.lambda_grid = lambda_grid;
    res.shots = shots;
    res.trials = trials;
    res.seed = seed;
    res.rms_error.reserve(lambda_grid.size());
    for (std::size_t li = 0; li < lambda_grid.size(); ++li) {
        const BasisFamily fam = build_family(p, lambda_grid[li]);
        double acc = 0.0;
        for (int ti = 0; ti < trials; ++ti) {
            RngStream stream(mix64(mix64(seed, li), static_cast<std::uint64_t>(ti)));
            const DensityMatrix rho = random_density(p, stream);
            const ProbabilityTable exact = born_probabilities(rho, fam);
            const ProbabilityTable noisy = sample_table(exact, shots, stream);
            acc += frobenius_distance(reconstruct(noisy, fam), rho.matrix());
        }
        res.rms_error.push_back(acc / trials);
    }

    // Least-squares slope of log(error) against log(1 - lambda).
    const std::size_t n = lambda_grid.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log(1.0 - lambda_grid[i]);
        ys[i] = std::log(res.rms_error[i]);
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    res.fitted_slope = sxy / sxx;
    return res;
}

} // namespace ubnob
