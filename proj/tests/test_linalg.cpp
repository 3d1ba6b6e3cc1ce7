#include <doctest.h>

#include <vector>

#include "helpers.hpp"
#include "qce/fft.hpp"
#include "qce/linalg.hpp"

using namespace qce;

TEST_CASE("eigh returns orthonormal eigenvectors for large matrices")
{
    // Regression: some LAPACK builds return wrong vectors from the divide and
    // conquer driver at this size while the eigenvalues stay correct.
    for (int n : {40, 600}) {
        const CMat h = test::random_hermitian(n);
        const auto eig = linalg::eigh(h);
        CAPTURE(n);
        CHECK(max_abs(h * eig.vectors - eig.vectors * eig.values.asDiagonal()) < 1e-10 * n);
        CHECK(max_abs(eig.vectors.adjoint() * eig.vectors - CMat::Identity(n, n)) < 1e-10);
        Eigen::SelfAdjointEigenSolver<CMat> ref(h, Eigen::EigenvaluesOnly);
        CHECK(max_abs(eig.values - ref.eigenvalues()) < 1e-9 * n);
    }
}

TEST_CASE("eigh_lowest agrees with the full solve")
{
    const CMat h = test::random_hermitian(120);
    const auto full = linalg::eigh(h);
    const auto low = linalg::eigh_lowest(h, 10);
    CHECK(max_abs(low.values - full.values.head(10)) < 1e-10);
    CHECK(max_abs(h * low.vectors - low.vectors * low.values.asDiagonal()) < 1e-9);
    CHECK_THROWS_AS(linalg::eigh_lowest(h, 0), DomainError);
}

TEST_CASE("expi_hermitian is exp(-i s h)")
{
    const CMat h = test::random_hermitian(12);
    const CMat u = linalg::expi_hermitian(h, 0.4);
    CHECK(max_abs(u - test::reference_propagator(h, 0.4)) < 1e-12);
    CHECK(linalg::unitarity_residual(u) < 1e-12);
}

TEST_CASE("dft matches the defining sum and idft inverts it")
{
    const int n = 24;
    const CVec x = test::random_state(n);
    const CVec y = dft(x);
    for (int k = 0; k < n; ++k) {
        cplx s = 0;
        for (int j = 0; j < n; ++j) s += x(j) * std::exp(-2.0 * pi * I * double(j * k) / double(n));
        CHECK(std::abs(y(k) - s) < 1e-12);
    }
    CHECK(max_abs(idft(y) - x) < 1e-14);
}

TEST_CASE("batched plan transforms each interleaved sequence")
{
    const int n = 16, count = 3;
    std::vector<cplx> data(n * count);
    std::vector<CVec> seqs;
    for (int s = 0; s < count; ++s) {
        seqs.push_back(test::random_state(n));
        for (int k = 0; k < n; ++k) data[k * count + s] = seqs[s](k);
    }
    const FftPlan plan(n, count);
    plan.forward(data);
    for (int s = 0; s < count; ++s) {
        const CVec ref = dft(seqs[s]);
        for (int k = 0; k < n; ++k) CHECK(std::abs(data[k * count + s] - ref(k)) < 1e-12);
    }
    plan.inverse(data);
    for (int s = 0; s < count; ++s)
        for (int k = 0; k < n; ++k) CHECK(std::abs(data[k * count + s] - seqs[s](k)) < 1e-14);
}
