#pragma once

#include "qce/types.hpp"

namespace qce::linalg {

struct HermitianEigen {
    Vec values;    // ascending
    CMat vectors;  // columns orthonormal
};

/// Full eigendecomposition of a Hermitian matrix (LAPACK MRRR).
/// Only the lower triangle is read.
HermitianEigen eigh(const CMat& h);

/// Lowest `count` eigenpairs of a Hermitian matrix (LAPACK MRRR).
HermitianEigen eigh_lowest(const CMat& h, int count);

/// exp(-i * scale * h) for Hermitian h, through its spectral decomposition.
CMat expi_hermitian(const CMat& h, double scale);

double hermiticity_residual(const CMat& h);
double unitarity_residual(const CMat& u);

} // namespace qce::linalg
