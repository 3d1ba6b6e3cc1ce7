#include "qce/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>
#include <vector>

namespace qce::linalg {

namespace {

lapack_complex_double* as_lapack(cplx* p)
{
    return reinterpret_cast<lapack_complex_double*>(p);
}

} // namespace

HermitianEigen eigh(const CMat& h)
{
    require(h.rows() == h.cols(), "eigh: matrix must be square");
    const auto n = static_cast<lapack_int>(h.rows());
    if (n == 0) return {Vec(0), CMat(0, 0)};
    // zheevr rather than zheevd: some OpenBLAS builds return wrong zheevd
    // eigenvectors above a few hundred rows.
    CMat a = h;
    lapack_int found = 0;
    HermitianEigen out{Vec(n), CMat(n, n)};
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, 'V', 'A', 'L', n, as_lapack(a.data()), n, 0.0, 0.0, 0, 0, 0.0,
        &found, out.values.data(), as_lapack(out.vectors.data()), n, isuppz.data());
    if (info != 0 || found != n)
        throw ConvergenceError("zheevr failed with info=" + std::to_string(info));
    return out;
}

HermitianEigen eigh_lowest(const CMat& h, int count)
{
    require(h.rows() == h.cols(), "eigh_lowest: matrix must be square");
    const auto n = static_cast<lapack_int>(h.rows());
    require(count >= 1 && count <= n, "eigh_lowest: count out of range");
    if (count == n) return eigh(h);

    CMat a = h;
    lapack_int found = 0;
    Vec w(n);
    CMat z(n, count);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(count));
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', n, as_lapack(a.data()), n, 0.0, 0.0, 1,
        count, 0.0, &found, w.data(), as_lapack(z.data()), n, isuppz.data());
    if (info != 0 || found != count)
        throw ConvergenceError("zheevr failed with info=" + std::to_string(info));
    return {w.head(count), z};
}

CMat expi_hermitian(const CMat& h, double scale)
{
    const auto eig = eigh(h);
    const CVec phases = (-I * scale * eig.values.cast<cplx>()).array().exp();
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

double hermiticity_residual(const CMat& h)
{
    return max_abs(h - h.adjoint());
}

double unitarity_residual(const CMat& u)
{
    return max_abs(u.adjoint() * u - CMat::Identity(u.cols(), u.cols()));
}

} // namespace qce::linalg
