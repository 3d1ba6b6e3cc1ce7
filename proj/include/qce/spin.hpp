#pragma once

#include <array>

#include "qce/types.hpp"

namespace qce {

/// Irreducible spin-F space. Stored as 2F so half-integers are exact.
class SpinSpace {
public:
    /// Rejects F that is not a positive multiple of 1/2.
    explicit SpinSpace(double f);
    static SpinSpace from_twice(int two_f);

    double f() const { return 0.5 * two_f_; }
    int twice_f() const { return two_f_; }
    int dim() const { return two_f_ + 1; }

    /// Magnetic quantum number of basis index k (k = 0 is m = +F).
    double m(int k) const { return f() - k; }

    bool operator==(const SpinSpace&) const = default;

private:
    explicit SpinSpace(int two_f, int) : two_f_(two_f) {}
    int two_f_;
};

using Axis = std::array<double, 3>;

/// Angular momentum matrices in the |F,m> basis, m = F ... -F, units of hbar.
struct SpinOperators {
    SpinSpace space;
    CMat fx, fy, fz;

    /// axis . F
    CMat along(const Axis& axis) const;
};

SpinOperators build_spin_operators(const SpinSpace& space);

/// exp(-i angle (axis . F)); the axis must be a unit vector.
CMat rotation_operator(const SpinOperators& ops, const Axis& axis, double angle);

/// |F,F> rotated so that <n.F> = F for n = (sin t cos p, sin t sin p, cos t).
CVec spin_coherent_state(const SpinOperators& ops, double theta, double phi);

Axis bloch_direction(double theta, double phi);

/// Expectation <psi|op|psi> for a normalized state.
double expectation(const CMat& op, const CVec& psi);

/// Bloch vector <F>/F of a normalized spin state.
Axis bloch_vector(const SpinOperators& ops, const CVec& psi);

} // namespace qce
