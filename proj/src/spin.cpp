#include "qce/spin.hpp"

#include <cmath>

#include "qce/linalg.hpp"

namespace qce {

SpinSpace::SpinSpace(double f)
{
    const double twice = 2.0 * f;
    const double rounded = std::round(twice);
    require(std::abs(twice - rounded) < 1e-12, "spin quantum number must be a half-integer");
    require(rounded >= 1.0, "spin quantum number must be at least 1/2");
    two_f_ = static_cast<int>(rounded);
}

SpinSpace SpinSpace::from_twice(int two_f)
{
    require(two_f >= 1, "spin quantum number must be at least 1/2");
    return SpinSpace(two_f, 0);
}

CMat SpinOperators::along(const Axis& axis) const
{
    return axis[0] * fx + axis[1] * fy + axis[2] * fz;
}

SpinOperators build_spin_operators(const SpinSpace& space)
{
    const int d = space.dim();
    const double f = space.f();
    CMat raise = CMat::Zero(d, d);
    CMat fz = CMat::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = space.m(k);
        fz(k, k) = m;
        // F+ |m> = sqrt(F(F+1) - m(m+1)) |m+1>, and |m+1> sits at index k-1.
        if (k > 0) raise(k - 1, k) = std::sqrt(f * (f + 1.0) - m * (m + 1.0));
    }
    const CMat lower = raise.adjoint();
    return SpinOperators{space, 0.5 * (raise + lower), (raise - lower) / (2.0 * I), fz};
}

CMat rotation_operator(const SpinOperators& ops, const Axis& axis, double angle)
{
    const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    require(std::abs(norm - 1.0) <= 1e-12, "rotation axis must be a unit vector");
    return linalg::expi_hermitian(ops.along(axis), angle);
}

Axis bloch_direction(double theta, double phi)
{
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

CVec spin_coherent_state(const SpinOperators& ops, double theta, double phi)
{
    require(theta >= 0.0 && theta <= pi, "theta must lie in [0, pi]");
    CVec top = CVec::Zero(ops.space.dim());
    top(0) = 1.0;
    if (theta == 0.0) return top;
    const Axis axis{-std::sin(phi), std::cos(phi), 0.0};
    return rotation_operator(ops, axis, theta) * top;
}

double expectation(const CMat& op, const CVec& psi)
{
    return psi.dot(op * psi).real();
}

Axis bloch_vector(const SpinOperators& ops, const CVec& psi)
{
    const double f = ops.space.f();
    return {expectation(ops.fx, psi) / f, expectation(ops.fy, psi) / f,
            expectation(ops.fz, psi) / f};
}

} // namespace qce
