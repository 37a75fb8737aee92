#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ubnob/basis.hpp"
#include "ubnob/rng.hpp"
#include "ubnob/tomography.hpp"

using namespace ubnob;

namespace {

DensityMatrix maximally_mixed(int p) {
    Matrix m(p);
    for (int k = 0; k < p; ++k) m(k, k) = 1.0 / p;
    return DensityMatrix::trusted(m);
}

DensityMatrix computational_state(int p, int n) {
    Matrix m(p);
    m(n, n) = 1.0;
    return DensityMatrix::trusted(m);
}

} // namespace

TEST_CASE("born probabilities: maximally mixed state is flat") {
    for (int p : {2, 5}) {
        const BasisFamily fam = build_family(p, 0.45);
        const ProbabilityTable t = born_probabilities(maximally_mixed(p), fam);
        for (int s = 0; s < p; ++s) {
            for (int n = 0; n < p; ++n) REQUIRE(std::abs(t.at(s, n) - 1.0 / p) < 1e-13);
        }
        for (int n = 0; n < p; ++n) REQUIRE(std::abs(t.p_x[n] - 1.0 / p) < 1e-13);
    }
}

TEST_CASE("born probabilities: x-basis eigenstate reads out exactly") {
    const BasisFamily fam = build_family(3, 0.6);
    const ProbabilityTable t = born_probabilities(computational_state(3, 0), fam);
    REQUIRE(t.p_x[0] == 1.0);
    REQUIRE(t.p_x[1] == 0.0);
    REQUIRE(t.p_x[2] == 0.0);
}

TEST_CASE("born probabilities: x row is normalized for a random state") {
    RngStream rng(7);
    const DensityMatrix rho = random_density(3, rng);
    const BasisFamily fam = build_family(3, 0.4);
    const ProbabilityTable t = born_probabilities(rho, fam);
    double sum = 0.0;
    for (double q : t.p_x) {
        REQUIRE(q >= 0.0);
        REQUIRE(q <= 1.0);
        sum += q;
    }
    REQUIRE(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("born probabilities: dimension mismatch throws") {
    const BasisFamily fam = build_family(3, 0.4);
    REQUIRE_THROWS_AS(born_probabilities(maximally_mixed(2), fam), std::invalid_argument);
}

TEST_CASE("sum rule at hand-computed points") {
    SECTION("maximally mixed: violation zero") {
        const BasisFamily fam = build_family(3, 0.5);
        const ProbabilityTable t = born_probabilities(maximally_mixed(3), fam);
        REQUIRE(sum_rule(t, 0.5) < 1e-13);
        // Each row sums to (1-lambda) + lambda = 1.
        for (int s = 0; s < 3; ++s) {
            double sum = 0.0;
            for (int n = 0; n < 3; ++n) sum += t.at(s, n);
            REQUIRE(std::abs(sum - 1.0) < 1e-13);
        }
    }

    SECTION("p=3, lambda=0.7, p_x0 = 0.4: each row sums to 1.14") {
        Matrix m(3);
        m(0, 0) = 0.4;
        m(1, 1) = 0.35;
        m(2, 2) = 0.25;
        const DensityMatrix rho = DensityMatrix::trusted(m);
        const BasisFamily fam = build_family(3, 0.7);
        const ProbabilityTable t = born_probabilities(rho, fam);
        REQUIRE(t.p_x[0] == 0.4);
        for (int s = 0; s < 3; ++s) {
            double sum = 0.0;
            for (int n = 0; n < 3; ++n) sum += t.at(s, n);
            REQUIRE(std::abs(sum - 1.14) < 1e-12);
        }
        REQUIRE(sum_rule(t, 0.7) < 1e-12);
    }

    SECTION("lambda = 0: every row sums to 1") {
        RngStream rng(3);
        const DensityMatrix rho = random_density(5, rng);
        const BasisFamily fam = build_family(5, 0.0);
        const ProbabilityTable t = born_probabilities(rho, fam);
        for (int s = 0; s < 5; ++s) {
            double sum = 0.0;
            for (int n = 0; n < 5; ++n) sum += t.at(s, n);
            REQUIRE(std::abs(sum - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("sum rule holds to 1e-11 across the round-trip grid") {
    RngStream rng(2718);
    for (int p : {2, 3, 5, 7}) {
        for (double lambda : {0.0, 0.3, 0.6, 0.9, 0.99}) {
            const BasisFamily fam = build_family(p, lambda);
            for (int t = 0; t < 5; ++t) {
                const DensityMatrix rho = random_density(p, rng);
                REQUIRE(sum_rule(born_probabilities(rho, fam), lambda) < 1e-11);
            }
        }
    }
}

TEST_CASE("reconstruct: maximally mixed state at (2, 0.5) with hand trace bookkeeping") {
    const BasisFamily fam = build_family(2, 0.5);
    const DensityMatrix rho = maximally_mixed(2);
    const ProbabilityTable t = born_probabilities(rho, fam);
    const Matrix rec = reconstruct(t, fam);
    REQUIRE(frobenius_distance(rec, rho.matrix()) < 1e-12);

    // Trace contributions of the three terms: 8/3 - 1/6 - 3/2 = 1.
    const SeparationParams& sp = fam.params;
    double term_phi = 0.0;
    for (int s = 0; s < 2; ++s) {
        for (int n = 0; n < 2; ++n) term_phi += sp.mu * t.at(s, n);
    }
    const double term_head =
        (1.0 - sp.lambda) / (1.0 + sp.lambda) * (t.p_x[0] - 1.0);
    const double term_tail = t.p_x[1] - t.p_x[0] * 2.0 * sp.lambda / (1.0 - sp.lambda) - 1.0;
    REQUIRE(std::abs(term_phi - 8.0 / 3.0) < 1e-12);
    REQUIRE(std::abs(term_head - (-1.0 / 6.0)) < 1e-12);
    REQUIRE(std::abs(term_tail - (-1.5)) < 1e-12);
    REQUIRE(std::abs(term_phi + term_head + term_tail - 1.0) < 1e-12);
    REQUIRE(std::abs(rec.trace() - cplx(1.0)) < 1e-12);
}

TEST_CASE("reconstruct: seeded round trip at (5, 0.8)") {
    RngStream rng(11);
    const DensityMatrix rho = random_density(5, rng);
    const BasisFamily fam = build_family(5, 0.8);
    const Matrix rec = reconstruct(born_probabilities(rho, fam), fam);
    REQUIRE(frobenius_distance(rec, rho.matrix()) < 1e-10);
}

TEST_CASE("reconstruct: exact round trip over the (p, lambda) grid") {
    RngStream rng(314);
    for (int p : {2, 3, 5, 7}) {
        for (double lambda : {0.0, 0.3, 0.6, 0.9, 0.99}) {
            const BasisFamily fam = build_family(p, lambda);
            for (int t = 0; t < 3; ++t) {
                const DensityMatrix rho = random_density(p, rng);
                const Matrix rec = reconstruct(born_probabilities(rho, fam), fam);
                INFO("p=" << p << " lambda=" << lambda);
                REQUIRE(frobenius_distance(rec, rho.matrix()) < 1e-9);
                REQUIRE(std::abs(rec.trace() - cplx(1.0)) < 1e-10);
            }
        }
    }
}

TEST_CASE("reconstruct is affine in the probability table") {
    const BasisFamily fam = build_family(3, 0.6);
    RngStream rng(55);
    const DensityMatrix r1 = random_density(3, rng);
    const DensityMatrix r2 = random_density(3, rng);
    const ProbabilityTable t1 = born_probabilities(r1, fam);
    const ProbabilityTable t2 = born_probabilities(r2, fam);
    for (double a : {0.0, 0.3, 1.0}) {
        ProbabilityTable mix = t1;
        for (std::size_t k = 0; k < mix.p_sn.size(); ++k) {
            mix.p_sn[k] = a * t1.p_sn[k] + (1.0 - a) * t2.p_sn[k];
        }
        for (std::size_t k = 0; k < mix.p_x.size(); ++k) {
            mix.p_x[k] = a * t1.p_x[k] + (1.0 - a) * t2.p_x[k];
        }
        const Matrix lhs = reconstruct(mix, fam);
        const Matrix rhs = cplx(a) * reconstruct(t1, fam) + cplx(1.0 - a) * reconstruct(t2, fam);
        REQUIRE(frobenius_distance(lhs, rhs) < 1e-11);
    }
}

TEST_CASE("optimality: a single p_sn moves exactly one frame coefficient") {
    const BasisFamily fam = build_family(3, 0.55);
    const DensityMatrix rho = maximally_mixed(3);
    const ProbabilityTable base = born_probabilities(rho, fam);
    const Matrix rec0 = reconstruct(base, fam);
    const double eps = 1e-4;

    // Perturbing p_sn changes only the mu * p_sn coefficient of P(phi_n^s).
    ProbabilityTable bumped = base;
    bumped.at(1, 2) += eps;
    Matrix delta = reconstruct(bumped, fam) - rec0;
    Matrix expected(3);
    add_scaled_outer(expected, cplx(fam.params.mu * eps), fam.phi[1].vectors[2],
                     fam.phi[1].vectors[2]);
    REQUIRE(frobenius_distance(delta, expected) < 1e-12);

    // Perturbing p_x[n], n >= 1, changes only the P(x_n) coefficient.
    ProbabilityTable bx = base;
    bx.p_x[2] += eps;
    delta = reconstruct(bx, fam) - rec0;
    Matrix expected_x(3);
    add_scaled_outer(expected_x, cplx(eps), fam.x_basis.vectors[2], fam.x_basis.vectors[2]);
    REQUIRE(frobenius_distance(delta, expected_x) < 1e-12);
}

TEST_CASE("reconstruct matches the MUB-limit formula at lambda = 0") {
    RngStream rng(77);
    for (int p : {2, 3, 5}) {
        const BasisFamily fam = build_family(p, 0.0);
        for (int t = 0; t < 4; ++t) {
            const DensityMatrix rho = random_density(p, rng);
            const ProbabilityTable table = born_probabilities(rho, fam);
            const Matrix a = reconstruct(table, fam);
            const Matrix b = reconstruct_mub_limit(table, fam);
            REQUIRE(frobenius_distance(a, b) < 1e-12);
            REQUIRE(frobenius_distance(b, rho.matrix()) < 1e-11);
        }
    }
}

TEST_CASE("reconstruct_mub_limit basics and guards") {
    const BasisFamily fam = build_family(3, 0.0);
    const ProbabilityTable flat = born_probabilities(maximally_mixed(3), fam);
    REQUIRE(frobenius_distance(reconstruct_mub_limit(flat, fam), maximally_mixed(3).matrix()) <
            1e-12);

    const BasisFamily skew = build_family(3, 0.4);
    const ProbabilityTable t = born_probabilities(maximally_mixed(3), skew);
    REQUIRE_THROWS_AS(reconstruct_mub_limit(t, skew), std::invalid_argument);
}

TEST_CASE("reconstruct guards the near-singular regime") {
    const BasisFamily fam = build_family(3, 1.0 - 1e-7);
    const ProbabilityTable t = born_probabilities(maximally_mixed(3), fam);
    REQUIRE_THROWS_AS(reconstruct(t, fam), std::domain_error);
}

TEST_CASE("sample_table: degenerate probabilities are preserved, noise concentrates") {
    const BasisFamily fam = build_family(3, 0.5);
    const ProbabilityTable exact = born_probabilities(computational_state(3, 0), fam);
    REQUIRE(exact.p_x[0] == 1.0);
    REQUIRE(exact.p_x[1] == 0.0);

    RngStream rng(1);
    const ProbabilityTable noisy = sample_table(exact, 1000000, rng);
    REQUIRE(noisy.p_x[0] == 1.0); // certain outcomes stay certain
    REQUIRE(noisy.p_x[1] == 0.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < exact.p_sn.size(); ++k) {
        worst = std::max(worst, std::abs(noisy.p_sn[k] - exact.p_sn[k]));
    }
    REQUIRE(worst < 5e-3);

    double xsum = 0.0;
    for (double q : noisy.p_x) xsum += q;
    REQUIRE(xsum == 1.0); // multinomial conserves the shot count exactly

    REQUIRE_THROWS_AS(sample_table(exact, 0, rng), std::invalid_argument);
}

TEST_CASE("sample_table is deterministic given the stream") {
    const BasisFamily fam = build_family(2, 0.3);
    const ProbabilityTable exact = born_probabilities(maximally_mixed(2), fam);
    RngStream a(42), b(42);
    const ProbabilityTable na = sample_table(exact, 5000, a);
    const ProbabilityTable nb = sample_table(exact, 5000, b);
    REQUIRE(na.p_sn == nb.p_sn);
    REQUIRE(na.p_x == nb.p_x);
}

TEST_CASE("project_to_physical clip-and-rescale examples") {
    Matrix a(2);
    a(0, 0) = 1.2;
    a(1, 1) = -0.2;
    const Matrix pa = project_to_physical(a).matrix();
    REQUIRE(std::abs(pa(0, 0) - cplx(1.0)) < 1e-12);
    REQUIRE(std::abs(pa(1, 1) - cplx(0.0)) < 1e-12);

    Matrix b(2);
    b(0, 0) = 0.9;
    b(1, 1) = 0.3;
    const Matrix pb = project_to_physical(b).matrix();
    REQUIRE(std::abs(pb(0, 0) - cplx(0.75)) < 1e-12);
    REQUIRE(std::abs(pb(1, 1) - cplx(0.25)) < 1e-12);

    // Valid states are fixed points.
    RngStream rng(5);
    const DensityMatrix rho = random_density(3, rng);
    REQUIRE(frobenius_distance(project_to_physical(rho.matrix()).matrix(), rho.matrix()) < 1e-12);

    Matrix non_herm(2);
    non_herm(0, 1) = 0.5;
    REQUIRE_THROWS_AS(project_to_physical(non_herm), std::invalid_argument);

    Matrix hopeless(2);
    hopeless(0, 0) = -1.0;
    hopeless(1, 1) = -0.5;
    REQUIRE_THROWS_AS(project_to_physical(hopeless), std::domain_error);
}

TEST_CASE("limit_alpha converges along lambda = 1 - 2^-k") {
    std::vector<double> seq;
    for (int k = 4; k <= 12; ++k) seq.push_back(1.0 - std::pow(2.0, -k));

    SECTION("x eigenstate") {
        const LimitDiagnostic d = limit_alpha(computational_state(3, 0), 3, seq);
        REQUIRE(d.convergence_deltas.size() == seq.size() - 1);
        for (std::size_t k = 1; k < d.convergence_deltas.size(); ++k) {
            REQUIRE(d.convergence_deltas[k] < d.convergence_deltas[k - 1]);
        }
        for (double a : d.alpha_sn) REQUIRE(std::isfinite(a));
    }

    SECTION("maximally mixed state stays bounded with shrinking deltas") {
        const LimitDiagnostic d = limit_alpha(maximally_mixed(3), 3, seq);
        for (std::size_t k = 1; k < d.convergence_deltas.size(); ++k) {
            REQUIRE(d.convergence_deltas[k] < d.convergence_deltas[k - 1]);
        }
        for (double a : d.alpha_sn) REQUIRE(std::abs(a) < 10.0);
    }

    SECTION("reconstruction still cancels at lambda = 1 - 2^-12") {
        RngStream rng(8);
        const DensityMatrix rho = random_density(3, rng);
        const double lambda = 1.0 - std::pow(2.0, -12);
        const BasisFamily fam = build_family(3, lambda);
        const Matrix rec = reconstruct(born_probabilities(rho, fam), fam);
        REQUIRE(frobenius_distance(rec, rho.matrix()) < 1e-8);
    }

    SECTION("guards") {
        REQUIRE_THROWS_AS(limit_alpha(maximally_mixed(3), 3, {0.5, 1.0}), std::domain_error);
        REQUIRE_THROWS_AS(limit_alpha(maximally_mixed(3), 3, {0.9, 0.5}), std::invalid_argument);
        REQUIRE_THROWS_AS(limit_alpha(maximally_mixed(3), 3, {}), std::invalid_argument);
        REQUIRE_THROWS_AS(limit_alpha(maximally_mixed(2), 3, {0.5, 0.9}), std::invalid_argument);
    }
}

TEST_CASE("noise_sweep: determinism and error scaling") {
    const std::vector<double> grid = {0.9, 0.95, 0.98, 0.99};

    const SweepResult a = noise_sweep(3, grid, 5000, 20, 7);
    const SweepResult b = noise_sweep(3, grid, 5000, 20, 7);
    REQUIRE(a.rms_error == b.rms_error); // bit-identical
    REQUIRE(a.fitted_slope == b.fitted_slope);

    const SweepResult c = noise_sweep(3, grid, 5000, 20, 8);
    REQUIRE(a.rms_error != c.rms_error);

    INFO("fitted slope = " << a.fitted_slope);
    REQUIRE(a.fitted_slope > -1.5);
    REQUIRE(a.fitted_slope < -0.6);

    // Errors grow monotonically toward lambda = 1 on this grid.
    for (std::size_t i = 1; i < a.rms_error.size(); ++i) {
        REQUIRE(a.rms_error[i] > a.rms_error[i - 1]);
    }
}

TEST_CASE("noise_sweep input guards") {
    REQUIRE_THROWS_AS(noise_sweep(3, {0.5}, 100, 5, 1), std::domain_error);
    REQUIRE_THROWS_AS(noise_sweep(3, {0.5, 0.5, 0.5}, 100, 5, 1), std::domain_error);
    REQUIRE_THROWS_AS(noise_sweep(3, {0.5, 0.6}, 100, 1, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(noise_sweep(3, {0.5, 0.6}, 0, 5, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(noise_sweep(3, {0.5, 0.9999995}, 100, 5, 1), std::domain_error);
    REQUIRE_THROWS_AS(noise_sweep(4, {0.5, 0.6}, 100, 5, 1), std::invalid_argument);
}
