#pragma once

#include <array>
#include <string>
#include <vector>

#include "qce/amol.hpp"

// Classical limit of the lattice atom: a point particle (z, p) carrying a
// magnetic moment along the unit vector n = F/|F|, in the same effective field.
// Positions are in model units (1/k), momenta in hbar k, time in hbar/E_R.
namespace qce::amol {

using Vec3 = std::array<double, 3>;

struct ClassicalState {
    double z = 0.0;
    double p = 0.0;
    Vec3 n{0.0, 0.0, 1.0};
};

/// (z/lambda, p/hbar k, theta, phi) <-> state.
ClassicalState to_classical(const PhasePoint& point);
PhasePoint to_phase_point(const ClassicalState& state);

/// E = p^2/2M + (4/3)V1 cos(theta_L) cos 2z + s F [(2/3)V1 sin(theta_L) sin 2z n_z + B_x n_x].
double classical_energy(const ClassicalState& state, const AmolParams& params);

/// Time derivatives; the `n` slot holds dn/dt = s B(z) x n.
ClassicalState derivatives(const ClassicalState& state, const AmolParams& params);

/// Largest precession rate s |B(z)| over z.
double max_precession_rate(const AmolParams& params);

/// Lowest classical energy (p = 0, moment anti-aligned with the local field).
double minimum_energy(const AmolParams& params);

/// Composition order of the splitting integrator (2, 4, 6 or 8).
struct IntegratorOptions {
    double dt = 1e-3;
    int order = 6;
};

/// Advance by t (negative t integrates backward). Each step composes the exact
/// drift and exact kick flows, so |n| is preserved without renormalization.
/// Throws DomainError if dt resolves the precession with fewer than 20 steps.
ClassicalState propagate(const ClassicalState& state, const AmolParams& params, double t,
                         const IntegratorOptions& options = {});

struct Trajectory {
    std::vector<double> times;
    std::vector<ClassicalState> states;
};

/// Samples at t = 0, sample_dt, 2 sample_dt, ... up to t_final.
Trajectory integrate(const ClassicalState& state, const AmolParams& params, double t_final,
                     double sample_dt, const IntegratorOptions& options = {});

enum class SectionVariable {
    mu_y,  // mu_y = -n_y (the moment is antiparallel to F)
    p
};

struct SectionDef {
    SectionVariable variable = SectionVariable::mu_y;
    int direction = +1;  // required sign of the crossing derivative
};

struct SectionPoint {
    PhasePoint point;
    double time = 0.0;
};

struct SectionResult {
    std::vector<SectionPoint> points;
    bool complete = true;  // false when the time budget ran out first
    std::string warning;
};

SectionResult poincare_section(const ClassicalState& ic, const AmolParams& params,
                               const SectionDef& section, int n_crossings, double t_max,
                               const IntegratorOptions& options = {});

/// Largest Lyapunov exponent by shadow-trajectory renormalization every
/// `renorm_interval`, in 1/tau. Distances use the Euclidean norm in (z, p, n).
double lyapunov_estimate(const ClassicalState& ic, const AmolParams& params, double t_total,
                         const IntegratorOptions& options = {}, double renorm_interval = 1.0,
                         double d0 = 1e-8);

enum class Coordinate { z, p, theta, phi };

/// Solve for one coordinate of `base` (in its PhasePoint units) so the energy
/// equals `energy`, by bisection on [lo, hi]. Throws when the bracket holds no root.
PhasePoint seed_on_shell(const AmolParams& params, PhasePoint base, Coordinate coordinate,
                         double energy, double lo, double hi);

} // namespace qce::amol
