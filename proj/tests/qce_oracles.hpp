#pragma once

#include <vector>

#include "qce/types.hpp"

// Brute-force N-qubit constructions used as independent references.
namespace qce::test {

inline double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// |j, m> (index k = j - m) -> equal superposition of the bit strings with k ones,
/// qubit 0 the most significant bit and |0> = spin up.
inline CVec embed_symmetric(const CVec& sym, int n)
{
    CVec out = CVec::Zero(Eigen::Index(1) << n);
    for (Eigen::Index s = 0; s < out.size(); ++s) {
        const int k = __builtin_popcountll(static_cast<unsigned long long>(s));
        out(s) = sym(k) / std::sqrt(binomial(n, k));
    }
    return out;
}

/// Sum over qubits of sigma_a / 2 (a = 0, 1, 2 for x, y, z) as a dense 2^n matrix.
inline CMat collective(int n, int a)
{
    const Eigen::Index dim = Eigen::Index(1) << n;
    CMat out = CMat::Zero(dim, dim);
    for (int q = 0; q < n; ++q) {
        const Eigen::Index bit = Eigen::Index(1) << (n - 1 - q);
        for (Eigen::Index s = 0; s < dim; ++s) {
            const bool down = (s & bit) != 0;
            if (a == 2) out(s, s) += down ? -0.5 : 0.5;
            else {
                const Eigen::Index t = s ^ bit;
                // sigma_y: <up|sigma_y|down> = -i, <down|sigma_y|up> = i.
                out(t, s) += a == 0 ? cplx(0.5) : (down ? cplx(0, -0.5) : cplx(0, 0.5));
            }
        }
    }
    return out;
}

/// Reduced state of qubits 0 and 1 by summing over the other n - 2.
inline CMat brute_two_qubit_rdm(const CVec& psi, int n)
{
    const Eigen::Index rest = Eigen::Index(1) << (n - 2);
    CMat rho = CMat::Zero(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (Eigen::Index r = 0; r < rest; ++r) rho(a, b) += psi(a * rest + r) * std::conj(psi(b * rest + r));
    return rho;
}

} // namespace qce::test
