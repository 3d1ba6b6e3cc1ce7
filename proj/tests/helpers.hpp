#pragma once

#include <cmath>
#include <random>

#include "qce/types.hpp"

namespace qce::test {

inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20240517);
    return gen;
}

inline CVec random_state(Eigen::Index n)
{
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& x : v) x = {g(rng()), g(rng())};
    return v / v.norm();
}

inline CMat random_hermitian(Eigen::Index n)
{
    std::normal_distribution<double> g;
    CMat a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {g(rng()), g(rng())};
    return (a + a.adjoint()) / 2.0;
}

// Haar-ish unitary from the QR factor of a Gaussian matrix.
inline CMat random_unitary(Eigen::Index n)
{
    std::normal_distribution<double> g;
    CMat a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {g(rng()), g(rng())};
    Eigen::HouseholderQR<CMat> qr(a);
    return qr.householderQ() * CMat::Identity(n, n);
}

// exp(-i t h) through Eigen's own Hermitian solver, independent of the LAPACK path.
inline CMat reference_propagator(const CMat& h, double t)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    const CVec ph = (-I * t * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// Reduced state of the second factor by explicit summation over the first.
inline CMat brute_reduce_second(const CVec& psi, int d1, int d2)
{
    CMat rho = CMat::Zero(d2, d2);
    for (int a = 0; a < d2; ++a)
        for (int b = 0; b < d2; ++b)
            for (int i = 0; i < d1; ++i) rho(a, b) += psi(i * d2 + a) * std::conj(psi(i * d2 + b));
    return rho;
}

inline CMat brute_reduce_first(const CVec& psi, int d1, int d2)
{
    CMat rho = CMat::Zero(d1, d1);
    for (int i = 0; i < d1; ++i)
        for (int k = 0; k < d1; ++k)
            for (int a = 0; a < d2; ++a) rho(i, k) += psi(i * d2 + a) * std::conj(psi(k * d2 + a));
    return rho;
}

} // namespace qce::test
