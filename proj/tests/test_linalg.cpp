#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "ubnob/linalg.hpp"
#include "ubnob/rng.hpp"

using namespace ubnob;

TEST_CASE("is_prime classifies small integers") {
    for (int p : {2, 3, 5, 7, 11, 13, 31}) REQUIRE(is_prime(p));
    for (int n : {0, 1, 4, 6, 9, 15, 21, 25}) REQUIRE_FALSE(is_prime(n));
}

TEST_CASE("mod_inverse against hand values and the defining identity") {
    REQUIRE(mod_inverse(2, 3) == 2);
    REQUIRE(mod_inverse(2, 5) == 3);
    REQUIRE(mod_inverse(2, 7) == 4);
    REQUIRE(mod_inverse(3, 7) == 5);
    for (int p : {2, 3, 5, 7, 11}) {
        for (int a = 1; a < p; ++a) {
            const int inv = mod_inverse(a, p);
            REQUIRE(inv >= 1);
            REQUIRE(inv < p);
            REQUIRE((a * inv) % p == 1);
        }
    }
    REQUIRE_THROWS_AS(mod_inverse(2, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(mod_inverse(0, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(mod_inverse(5, 5), std::invalid_argument);
}

TEST_CASE("root_of_unity hits exact angles") {
    const cplx w31 = root_of_unity(3, 1);
    REQUIRE(std::abs(w31.real() - (-0.5)) < 1e-15);
    REQUIRE(std::abs(w31.imag() - std::sqrt(3.0) / 2.0) < 1e-15);
    REQUIRE(root_of_unity(2, 1) == cplx(-1.0, 0.0));
    REQUIRE(root_of_unity(5, 7) == root_of_unity(5, 2)); // exponent reduced mod p
    REQUIRE(root_of_unity(7, -1) == root_of_unity(7, 6));

    for (int p : {3, 5, 7, 11}) {
        cplx sum = 0.0;
        for (int k = 0; k < p; ++k) sum += root_of_unity(p, k);
        REQUIRE(std::abs(sum) < 1e-14);
        for (int k = 0; k < p; ++k) REQUIRE(std::abs(std::abs(root_of_unity(p, k)) - 1.0) < 1e-15);
    }
}

TEST_CASE("matrix arithmetic matches a hand-computed product") {
    Matrix a(2), b(2);
    a(0, 0) = cplx(1, 1);
    a(0, 1) = cplx(0, 2);
    a(1, 0) = cplx(3, 0);
    a(1, 1) = cplx(1, -1);
    b(0, 0) = cplx(2, 0);
    b(0, 1) = cplx(0, 1);
    b(1, 0) = cplx(1, 1);
    b(1, 1) = cplx(0, 0);

    const Matrix c = a * b;
    // Row 0: (1+i)*2 + 2i*(1+i) = 2+2i + 2i-2 = 4i ; (1+i)*i = -1+i
    REQUIRE(std::abs(c(0, 0) - cplx(0, 4)) < 1e-15);
    REQUIRE(std::abs(c(0, 1) - cplx(-1, 1)) < 1e-15);
    // Row 1: 3*2 + (1-i)(1+i) = 6 + 2 = 8 ; 3*i = 3i
    REQUIRE(std::abs(c(1, 0) - cplx(8, 0)) < 1e-15);
    REQUIRE(std::abs(c(1, 1) - cplx(0, 3)) < 1e-15);

    const Matrix d = a + b - b;
    REQUIRE(frobenius_distance(d, a) < 1e-15);

    const Matrix s = cplx(0, 1) * a;
    REQUIRE(std::abs(s(1, 1) - cplx(1, 1)) < 1e-15);

    REQUIRE(std::abs(a.trace() - cplx(2, 0)) < 1e-15);
    const Matrix at = a.adjoint();
    REQUIRE(std::abs(at(0, 1) - std::conj(a(1, 0))) < 1e-15);
    REQUIRE(std::abs(at(1, 0) - std::conj(a(0, 1))) < 1e-15);
}

TEST_CASE("inner conjugates the first slot") {
    const cvec x = {cplx(0, 1), cplx(0)};
    const cvec y = {cplx(1), cplx(0)};
    REQUIRE(std::abs(inner(x, y) - cplx(0, -1)) < 1e-15);
    REQUIRE(std::abs(inner(y, x) - cplx(0, 1)) < 1e-15);
}

TEST_CASE("apply agrees with explicit matrix-vector arithmetic") {
    Matrix m(2);
    m(0, 0) = cplx(1, 0);
    m(0, 1) = cplx(0, 1);
    m(1, 0) = cplx(2, 0);
    m(1, 1) = cplx(0, 0);
    const cvec v = {cplx(1, 1), cplx(3, 0)};
    const cvec w = m.apply(v);
    REQUIRE(std::abs(w[0] - (cplx(1, 1) + cplx(0, 1) * cplx(3, 0))) < 1e-15);
    REQUIRE(std::abs(w[1] - cplx(2, 2)) < 1e-15);
}

TEST_CASE("projector is idempotent with unit trace") {
    const double n = 2.0; // |1+i|^2 + |-i|^2 + |1|^2 = 4
    const cvec v = {cplx(1, 1) / n, cplx(0, -1) / n, cplx(1, 0) / n, cplx(0, 0)};
    const Matrix p = projector(v);
    REQUIRE(frobenius_distance(p * p, p) < 1e-15);
    REQUIRE(std::abs(p.trace() - cplx(1.0)) < 1e-15);
    REQUIRE(p.max_hermiticity_violation() < 1e-16);
}

TEST_CASE("frobenius_distance of orthogonal projectors") {
    Matrix a(2), b(2);
    a(0, 0) = 1.0;
    b(1, 1) = 1.0;
    REQUIRE(std::abs(frobenius_distance(a, b) - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("eigensolve: diagonal matrix is returned sorted") {
    Matrix m(2);
    m(0, 0) = 0.0;
    m(1, 1) = 2.0;
    const EigenResult e = hermitian_eigen(m);
    REQUIRE(std::abs(e.eigenvalues[0] - 0.0) < 1e-15);
    REQUIRE(std::abs(e.eigenvalues[1] - 2.0) < 1e-15);
    REQUIRE(std::abs(std::abs(e.eigenvectors(0, 0)) - 1.0) < 1e-15);
    REQUIRE(std::abs(std::abs(e.eigenvectors(1, 1)) - 1.0) < 1e-15);
}

TEST_CASE("eigensolve: Pauli-x-like matrix") {
    Matrix m(2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    const EigenResult e = hermitian_eigen(m);
    REQUIRE(std::abs(e.eigenvalues[0] - (-1.0)) < 1e-14);
    REQUIRE(std::abs(e.eigenvalues[1] - 1.0) < 1e-14);
    // +1 eigenvector is (1,1)/sqrt(2) up to phase.
    const cvec plus = {cplx(M_SQRT1_2), cplx(M_SQRT1_2)};
    cvec col = {e.eigenvectors(0, 1), e.eigenvectors(1, 1)};
    REQUIRE(std::abs(std::abs(inner(plus, col)) - 1.0) < 1e-14);
}

TEST_CASE("eigensolve: complex Hermitian 2x2 with known spectrum") {
    // [[2, i], [-i, 2]] has eigenvalues 2 -+ 1.
    Matrix m(2);
    m(0, 0) = 2.0;
    m(1, 1) = 2.0;
    m(0, 1) = cplx(0, 1);
    m(1, 0) = cplx(0, -1);
    const EigenResult e = hermitian_eigen(m);
    REQUIRE(std::abs(e.eigenvalues[0] - 1.0) < 1e-14);
    REQUIRE(std::abs(e.eigenvalues[1] - 3.0) < 1e-14);
}

TEST_CASE("eigensolve reconstruction and orthonormality on random Hermitian matrices") {
    RngStream rng(2024);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 10); // 2..11
        Matrix g(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
        }
        const Matrix h = cplx(0.5) * (g + g.adjoint());
        const EigenResult e = hermitian_eigen(h);

        Matrix rebuilt(n);
        for (int k = 0; k < n; ++k) {
            cvec col(n);
            for (int i = 0; i < n; ++i) col[i] = e.eigenvectors(i, k);
            add_scaled_outer(rebuilt, e.eigenvalues[k], col, col);
        }
        REQUIRE(frobenius_distance(rebuilt, h) < 1e-9);
        REQUIRE(frobenius_distance(e.eigenvectors.adjoint() * e.eigenvectors,
                                   Matrix::identity(n)) < 1e-12);
        for (int k = 1; k < n; ++k) REQUIRE(e.eigenvalues[k] >= e.eigenvalues[k - 1]);
    }
}

TEST_CASE("eigensolve rejects non-Hermitian input") {
    Matrix m(2);
    m(0, 1) = 1.0; // m(1,0) left at 0
    REQUIRE_THROWS_AS(hermitian_eigen(m), std::invalid_argument);
}

TEST_CASE("density-matrix validation accepts physical and rejects broken inputs") {
    Matrix ok(2);
    ok(0, 0) = 0.75;
    ok(1, 1) = 0.25;
    ok(0, 1) = cplx(0.1, 0.2);
    ok(1, 0) = cplx(0.1, -0.2);
    REQUIRE_NOTHROW(DensityMatrix::from_matrix(ok));

    Matrix bad_trace(2);
    bad_trace(0, 0) = 0.9;
    bad_trace(1, 1) = 0.3;
    REQUIRE_THROWS_AS(DensityMatrix::from_matrix(bad_trace), std::invalid_argument);

    Matrix negative(2);
    negative(0, 0) = 1.2;
    negative(1, 1) = -0.2;
    REQUIRE_THROWS_AS(DensityMatrix::from_matrix(negative), std::invalid_argument);

    Matrix non_herm(2);
    non_herm(0, 0) = 0.5;
    non_herm(1, 1) = 0.5;
    non_herm(0, 1) = cplx(0.3, 0.0);
    non_herm(1, 0) = cplx(0.0, 0.3);
    REQUIRE_THROWS_AS(DensityMatrix::from_matrix(non_herm), std::invalid_argument);

    // Tiny negative eigenvalue within tolerance is accepted.
    Matrix eps(2);
    eps(0, 0) = 1.0 + 1e-9;
    eps(1, 1) = -1e-9;
    REQUIRE_NOTHROW(DensityMatrix::from_matrix(eps));
}

TEST_CASE("random_density invariants over seeded draws") {
    for (int p : {2, 3, 5, 7}) {
        RngStream rng(mix64(1234, static_cast<std::uint64_t>(p)));
        for (int t = 0; t < 100; ++t) {
            const DensityMatrix rho = random_density(p, rng);
            const Matrix& m = rho.matrix();
            REQUIRE(m.dim() == p);
            REQUIRE(m.max_hermiticity_violation() < 1e-15);
            REQUIRE(std::abs(m.trace() - cplx(1.0)) < 1e-12);
            const EigenResult e = hermitian_eigen(m);
            REQUIRE(e.eigenvalues.front() > -1e-12);
            double purity = 0.0;
            for (double ev : e.eigenvalues) purity += ev * ev;
            REQUIRE(purity <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("random_density is deterministic in the seed") {
    RngStream a(7), b(7), c(8);
    const Matrix ma = random_density(3, a).matrix();
    const Matrix mb = random_density(3, b).matrix();
    const Matrix mc = random_density(3, c).matrix();
    REQUIRE(frobenius_distance(ma, mb) == 0.0);
    REQUIRE(frobenius_distance(ma, mc) > 1e-3);
}
