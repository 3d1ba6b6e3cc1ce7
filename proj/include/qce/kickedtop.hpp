#pragma once

#include <array>
#include <string>
#include <vector>

#include "qce/spin.hpp"
#include "qce/types.hpp"

// Quantum kicked top: H = (kappa / 2 j tau) J_z^2 + p J_y sum_n delta(t - n tau),
// with one-period Floquet operator F = exp(-i kappa J_z^2 / 2j) exp(-i p J_y).
// A spin-j top is the symmetric subspace of N = 2j qubits.
namespace qce::qkt {

using Vec3 = std::array<double, 3>;

struct KickedTopParams {
    double kappa = 3.0;
    double p_rot = pi / 2.0;
    double tau = 1.0;
    double j = 25.0;

    void validate() const;
    int qubits() const { return static_cast<int>(std::lround(2.0 * j)); }
};

CMat floquet_operator(const KickedTopParams& params);

/// Classical map: rotate about y by p_rot, then about z by kappa * n_z'.
Vec3 classical_kick_map(const Vec3& n, const KickedTopParams& params);
/// 3x3 derivative of the map (extended off the sphere by the same formula).
Eigen::Matrix3d kick_map_jacobian(const Vec3& n, const KickedTopParams& params);

enum class Stability { elliptic, hyperbolic, parabolic };
std::string to_string(Stability s);

struct FixedPoint {
    Vec3 n;
    double theta = 0.0;
    double phi = 0.0;
    Stability stability = Stability::parabolic;
    std::array<cplx, 2> multipliers;  // eigenvalues of the tangent map
    double residual = 0.0;            // |map(n) - n|
};

struct FixedPointSearch {
    std::vector<FixedPoint> points;  // distinct, ordered by (phi, theta)
    int failed_seeds = 0;
    std::vector<std::string> failures;
};

/// Newton iteration on the sphere from a seeds x seeds (theta, phi) grid.
FixedPointSearch find_fixed_points(const KickedTopParams& params, int seeds = 20);

/// Map-iterate Lyapunov exponent (per kick) by shadow-trajectory renormalization.
double map_lyapunov(const Vec3& n0, const KickedTopParams& params, int iterations = 2000,
                    double d0 = 1e-8);

Vec3 direction(double theta, double phi);
std::pair<double, double> angles(const Vec3& n);

/// Regular initial direction: the elliptic fixed point with the smallest phi.
FixedPoint regular_fixed_point(const KickedTopParams& params);

struct ChaoticSeed {
    double theta = 0.0;
    double phi = 0.0;
    double lyapunov = 0.0;
};

/// Chaotic initial direction: the point of the 20 x 20 grid
/// theta in [0.05, pi - 0.05], phi = -pi + 2 pi k / 20 with the largest map
/// Lyapunov exponent. Throws if that exponent is not above 0.1.
ChaoticSeed chaotic_seed(const KickedTopParams& params);

/// Two-qubit reduced density matrix of a symmetric N-qubit state given in the
/// |j, m> basis (m = j ... -j), from collective moments. Basis |00>, |01>,
/// |10>, |11> with |0> = spin up.
CMat two_qubit_rdm(const CVec& state, int n_qubits);

/// Husimi function |<theta, phi|psi>|^2 using closed-form coherent amplitudes.
double husimi(const CVec& state, double theta, double phi);
/// Direction of the Husimi maximum (grid search, then local refinement).
Vec3 husimi_peak(const CVec& state);

} // namespace qce::qkt
