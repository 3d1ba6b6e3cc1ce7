#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "qce/spin.hpp"
#include "qce/types.hpp"

// Atom in a one-dimensional magneto-optical lattice: a spin-F atom whose
// center-of-mass motion couples to its spin through a position-dependent
// effective magnetic field.
//
// Units: hbar = 1, k = 1, M = 1/2, so the recoil energy E_R = 1, the lattice
// wavelength is 2*pi, the potential period is pi (lambda/2) and time is
// tau = E_R t / hbar. Positions are reported as z/lambda and momenta as p/(hbar k).
namespace qce::amol {

inline constexpr double hbar = 1.0;
inline constexpr double wave_number = 1.0;
inline constexpr double mass = 0.5;
inline constexpr double recoil_energy = hbar * hbar * wave_number * wave_number / (2.0 * mass);
inline constexpr double wavelength = 2.0 * pi / wave_number;

inline double to_lambda(double z) { return z / wavelength; }
inline double from_lambda(double z_over_lambda) { return z_over_lambda * wavelength; }

/// How the magnetic coupling scales with the spin operator:
/// `normalized` uses F/|F| (s = 1/F), `full` uses F itself (s = 1).
enum class SpinScale { normalized, full };

struct AmolParams {
    double v1 = 160.0;                       // single-beam light shift, E_R
    double theta_l = 80.0 * pi / 180.0;      // relative polarization angle, rad
    double bx = 12.0;                        // mu_B B_x, E_R
    double f = 4.0;                          // hyperfine spin
    SpinScale spin_scale = SpinScale::full;

    void validate() const;

    /// (4/3) V1 cos(theta_L): amplitude of the scalar cos(2kz) lattice.
    double lattice_amplitude() const;
    /// (2/3) V1 sin(theta_L): amplitude of the sin(2kz) e_z field.
    double field_amplitude() const;
    /// Prefactor s multiplying B_eff . F.
    double coupling_scale() const;
};

struct LatticeGrid {
    int n_points = 256;
    int n_periods = 1;

    void validate() const;
    double length() const { return n_periods * pi / wave_number; }
    double spacing() const { return length() / n_points; }
    double position(int i) const { return i * spacing(); }
    /// Momentum of DFT bin i (standard FFT ordering, Nyquist bin negative).
    double momentum(int i) const;
    Vec positions() const;
    Vec momenta() const;
};

/// Pure state on motion (x) spin, motion index major:
/// amplitudes[i * spin_dim + a] is position i, spin basis state a.
struct CompositeState {
    CVec amplitudes;
    int motion_dim = 0;
    int spin_dim = 0;

    void validate() const;
};

/// Grid Hamiltonian of the lattice, kinetic term exact in the DFT basis.
/// Throws if the grid is too coarse to resolve the deepest well's ground state.
CMat build_hamiltonian(const AmolParams& params, const LatticeGrid& grid);

/// Symmetry-adapted isometries for the parity (z -> -z) x exp(-i pi F_x),
/// which commutes with the Hamiltonian. Columns of the sectors together form
/// an orthonormal basis of the full space.
std::vector<Eigen::SparseMatrix<cplx>> parity_sectors(const LatticeGrid& grid,
                                                      const SpinOperators& ops);

/// Scalar potential for fixed F_z eigenvalue m (E_R).
Vec diabatic_potential(const AmolParams& params, const LatticeGrid& grid, double m);

/// Position (z/lambda, in [-1/4, 1/4)) of the minimum of the diabatic well m.
double diabatic_well_minimum(const AmolParams& params, double m);

/// Kinetic matrix p^2/2M on the grid (real symmetric, circulant).
Mat kinetic_matrix(const LatticeGrid& grid);

struct ScalarGroundState {
    CVec psi;
    double energy;
};

/// Ground state of p^2/2M + U(z) on the grid; rejects a flat potential.
ScalarGroundState scalar_ground_state(const LatticeGrid& grid, const Vec& potential);

/// Minimum-uncertainty Gaussian centered at (z0, p0) with position spread
/// `width` (all in lambda / hbar k units), periodic on the grid.
CVec motional_gaussian_state(const LatticeGrid& grid, double z0, double p0, double width);

/// Ground state of the diabatic potential for spin projection m, translated by
/// `shift` (z/lambda).
CVec diabatic_ground_state(const AmolParams& params, const LatticeGrid& grid, double m,
                           double shift);

/// Band-limited translation by `shift` (z/lambda) on the periodic grid.
CVec translate(const LatticeGrid& grid, const CVec& psi, double shift);

/// Multiply by exp(i p0 z); p0 must be a grid momentum.
CVec boost(const LatticeGrid& grid, const CVec& psi, double p0);

CompositeState initial_product_state(const CVec& motional, const CVec& spin);

struct MotionalMoments {
    double center;    // circular mean, z/lambda
    double spread_z;  // z/lambda
    double mean_p;    // hbar k
    double spread_p;  // hbar k
};

MotionalMoments motional_moments(const LatticeGrid& grid, const CVec& psi);
/// Moments of the motional marginal of a composite state.
MotionalMoments motional_moments(const LatticeGrid& grid, const CompositeState& state);

/// Phase-space point of an initial condition: (z/lambda, p/hbar k, theta, phi).
struct PhasePoint {
    double z = 0.0;
    double p = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

enum class MotionalPrep { gaussian, diabatic };

struct PrepOptions {
    MotionalPrep method = MotionalPrep::gaussian;
    double width = 0.07;   // z/lambda, Gaussian only
    double well_m = 4.0;   // diabatic only: which F_z well is cooled
};

/// Product of a motional wave packet centered at (z, p) and the spin
/// coherent state along (theta, phi).
CompositeState prepare_state(const AmolParams& params, const LatticeGrid& grid,
                             const PhasePoint& at, const PrepOptions& prep = {});

} // namespace qce::amol
