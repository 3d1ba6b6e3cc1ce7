#include "qce/kickedtop.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace qce::qkt {

void KickedTopParams::validate() const
{
    require(std::isfinite(kappa) && std::isfinite(p_rot), "kicked top: kappa and p_rot must be finite");
    require(tau > 0.0, "kicked top: tau must be positive");
    require(j >= 1.0 && std::abs(2.0 * j - std::round(2.0 * j)) < 1e-12,
            "kicked top: j must be a half-integer >= 1");
}

CMat floquet_operator(const KickedTopParams& params)
{
    params.validate();
    const SpinOperators ops = build_spin_operators(SpinSpace(params.j));
    const CMat rotation = rotation_operator(ops, {0.0, 1.0, 0.0}, params.p_rot);
    const int dim = ops.space.dim();
    CVec torsion(dim);
    for (int k = 0; k < dim; ++k) {
        const double m = ops.space.m(k);
        torsion(k) = std::exp(-I * params.kappa * m * m / (2.0 * params.j));
    }
    return torsion.asDiagonal() * rotation;
}

namespace {

Vec3 rotate_y(const Vec3& n, double a)
{
    return {n[0] * std::cos(a) + n[2] * std::sin(a), n[1], -n[0] * std::sin(a) + n[2] * std::cos(a)};
}

Vec3 rotate_z(const Vec3& n, double a)
{
    return {n[0] * std::cos(a) - n[1] * std::sin(a), n[0] * std::sin(a) + n[1] * std::cos(a), n[2]};
}

double norm(const Vec3& v)
{
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

Vec3 normalized(const Vec3& v)
{
    const double r = norm(v);
    return {v[0] / r, v[1] / r, v[2] / r};
}

Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Eigen::Vector3d as_eigen(const Vec3& v)
{
    return {v[0], v[1], v[2]};
}

// Orthonormal basis of the tangent plane at n.
std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_basis(const Vec3& n)
{
    const Eigen::Vector3d v = as_eigen(n);
    Eigen::Vector3d ref = std::abs(v.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    const Eigen::Vector3d e1 = (ref - ref.dot(v) * v).normalized();
    return {e1, v.cross(e1)};
}

Eigen::Matrix2d tangent_map(const Vec3& n, const KickedTopParams& params)
{
    const Eigen::Matrix3d jac = kick_map_jacobian(n, params);
    const auto [e1, e2] = tangent_basis(n);
    const auto [f1, f2] = tangent_basis(classical_kick_map(n, params));
    Eigen::Matrix2d m;
    m << f1.dot(jac * e1), f1.dot(jac * e2), f2.dot(jac * e1), f2.dot(jac * e2);
    return m;
}

} // namespace

Vec3 direction(double theta, double phi)
{
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

std::pair<double, double> angles(const Vec3& n)
{
    return {std::acos(std::clamp(n[2], -1.0, 1.0)), std::atan2(n[1], n[0])};
}

std::string to_string(Stability s)
{
    switch (s) {
    case Stability::elliptic: return "elliptic";
    case Stability::hyperbolic: return "hyperbolic";
    case Stability::parabolic: return "parabolic";
    }
    return "unknown";
}

Vec3 classical_kick_map(const Vec3& n, const KickedTopParams& params)
{
    const Vec3 r = rotate_y(n, params.p_rot);
    return rotate_z(r, params.kappa * r[2]);
}

Eigen::Matrix3d kick_map_jacobian(const Vec3& n, const KickedTopParams& params)
{
    const Vec3 r = rotate_y(n, params.p_rot);
    const double a = params.kappa * r[2];
    const double c = std::cos(a);
    const double s = std::sin(a);
    Eigen::Matrix3d rz;
    rz << c, -s, 0, s, c, 0, 0, 0, 1;
    const double cp = std::cos(params.p_rot);
    const double sp = std::sin(params.p_rot);
    Eigen::Matrix3d ry;
    ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
    const Vec3 out = rotate_z(r, a);
    const Eigen::Vector3d swirl = as_eigen(cross({0.0, 0.0, 1.0}, out));
    Eigen::Matrix3d d_torsion = rz;
    d_torsion.col(2) += params.kappa * swirl;
    return d_torsion * ry;
}

FixedPointSearch find_fixed_points(const KickedTopParams& params, int seeds)
{
    params.validate();
    require(seeds >= 2, "find_fixed_points: need at least a 2 x 2 seed grid");
    FixedPointSearch out;
    for (int a = 0; a < seeds; ++a)
        for (int b = 0; b < seeds; ++b) {
            const double theta = pi * (a + 0.5) / seeds;
            const double phi = -pi + 2.0 * pi * b / seeds;
            Vec3 n = direction(theta, phi);
            double residual = 1.0;
            bool singular = false;
            for (int it = 0; it < 60; ++it) {
                const Vec3 image = classical_kick_map(n, params);
                const Vec3 diff{image[0] - n[0], image[1] - n[1], image[2] - n[2]};
                residual = norm(diff);
                if (residual < 1e-13) break;
                const Eigen::Matrix3d jac = kick_map_jacobian(n, params);
                const auto [e1, e2] = tangent_basis(n);
                Eigen::Matrix<double, 3, 2> t;
                t.col(0) = e1;
                t.col(1) = e2;
                // Least-squares Newton step in the tangent plane: (J - 1) T d = -(F(n) - n).
                const Eigen::Matrix<double, 3, 2> a_mat = (jac - Eigen::Matrix3d::Identity()) * t;
                Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(a_mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
                if (svd.singularValues()(1) < 1e-12) {
                    singular = true;
                    break;
                }
                const Eigen::Vector2d d = svd.solve(-as_eigen(diff));
                const Eigen::Vector3d step = t * d;
                const double len = step.norm();
                const double scale = len > 0.5 ? 0.5 / len : 1.0;
                n = normalized({n[0] + scale * step.x(), n[1] + scale * step.y(), n[2] + scale * step.z()});
            }
            if (singular || residual > 1e-10) {
                ++out.failed_seeds;
                out.failures.push_back("seed (" + std::to_string(theta) + ", " + std::to_string(phi) +
                                       "): " + (singular ? "singular tangent map" : "no convergence"));
                continue;
            }
            const bool known = std::any_of(out.points.begin(), out.points.end(), [&](const FixedPoint& f) {
                return norm({f.n[0] - n[0], f.n[1] - n[1], f.n[2] - n[2]}) < 1e-6;
            });
            if (known) continue;
            FixedPoint fp;
            fp.n = n;
            std::tie(fp.theta, fp.phi) = angles(n);
            fp.residual = residual;
            const Eigen::Matrix2d m = tangent_map(n, params);
            Eigen::EigenSolver<Eigen::Matrix2d> es(m);
            fp.multipliers = {es.eigenvalues()(0), es.eigenvalues()(1)};
            const double trace = m.trace();
            if (std::abs(std::abs(trace) - 2.0) < 1e-9) fp.stability = Stability::parabolic;
            else fp.stability = std::abs(trace) < 2.0 ? Stability::elliptic : Stability::hyperbolic;
            out.points.push_back(fp);
        }
    std::sort(out.points.begin(), out.points.end(), [](const FixedPoint& x, const FixedPoint& y) {
        return x.phi != y.phi ? x.phi < y.phi : x.theta < y.theta;
    });
    return out;
}

double map_lyapunov(const Vec3& n0, const KickedTopParams& params, int iterations, double d0)
{
    require(iterations >= 1 && d0 > 0.0, "map_lyapunov: iterations and d0 must be positive");
    Vec3 x = normalized(n0);
    Vec3 e = cross(x, {0.3, 0.5, 0.7});
    if (norm(e) < 1e-8) e = cross(x, {0.0, 1.0, 0.0});
    e = normalized(e);
    Vec3 y = normalized({x[0] + d0 * e[0], x[1] + d0 * e[1], x[2] + d0 * e[2]});
    double sum = 0.0;
    for (int k = 0; k < iterations; ++k) {
        x = classical_kick_map(x, params);
        y = classical_kick_map(y, params);
        const Vec3 delta{y[0] - x[0], y[1] - x[1], y[2] - x[2]};
        const double d = norm(delta);
        if (!(d > 0.0)) throw ConvergenceError("map_lyapunov: trajectories merged");
        sum += std::log(d / d0);
        y = normalized({x[0] + delta[0] * d0 / d, x[1] + delta[1] * d0 / d, x[2] + delta[2] * d0 / d});
    }
    return sum / iterations;
}

FixedPoint regular_fixed_point(const KickedTopParams& params)
{
    const auto search = find_fixed_points(params);
    for (const auto& fp : search.points)
        if (fp.stability == Stability::elliptic) return fp;
    throw ConvergenceError("no elliptic fixed point found");
}

ChaoticSeed chaotic_seed(const KickedTopParams& params)
{
    params.validate();
    ChaoticSeed best{0.0, 0.0, -1.0};
    constexpr int n = 20;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double theta = 0.05 + (pi - 0.1) * a / (n - 1);
            const double phi = -pi + 2.0 * pi * b / n;
            const double l = map_lyapunov(direction(theta, phi), params);
            if (l > best.lyapunov) best = {theta, phi, l};
        }
    if (best.lyapunov <= 0.1)
        throw ConvergenceError("no chaotic seed: largest map Lyapunov exponent " +
                               std::to_string(best.lyapunov));
    return best;
}

CMat two_qubit_rdm(const CVec& state, int n_qubits)
{
    require(n_qubits >= 2, "two_qubit_rdm: at least two qubits are required");
    require(state.size() == n_qubits + 1, "two_qubit_rdm: state is not in the symmetric subspace");
    const SpinOperators ops = build_spin_operators(SpinSpace::from_twice(n_qubits));
    const std::array<const CMat*, 3> j{&ops.fx, &ops.fy, &ops.fz};
    const double nq = n_qubits;

    // Pauli matrices in the (up, down) basis.
    std::array<Eigen::Matrix2cd, 4> sigma;
    sigma[0] = Eigen::Matrix2cd::Identity();
    sigma[1] << 0, 1, 1, 0;
    sigma[2] << 0, -I, I, 0;
    sigma[3] << 1, 0, 0, -1;

    std::array<std::array<double, 4>, 4> t{};
    t[0][0] = 1.0;
    std::array<CVec, 3> jpsi;
    for (int a = 0; a < 3; ++a) jpsi[static_cast<std::size_t>(a)] = *j[static_cast<std::size_t>(a)] * state;
    for (int a = 0; a < 3; ++a) {
        const double mean = state.dot(jpsi[static_cast<std::size_t>(a)]).real();
        t[static_cast<std::size_t>(a + 1)][0] = t[0][static_cast<std::size_t>(a + 1)] = 2.0 * mean / nq;
    }
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            // <{J_a, J_b}> = 2 Re <J_a psi | J_b psi>
            const double anti = 2.0 * jpsi[static_cast<std::size_t>(a)].dot(jpsi[static_cast<std::size_t>(b)]).real();
            const double v = (2.0 * anti - (a == b ? nq : 0.0)) / (nq * (nq - 1.0));
            t[static_cast<std::size_t>(a + 1)][static_cast<std::size_t>(b + 1)] = v;
            t[static_cast<std::size_t>(b + 1)][static_cast<std::size_t>(a + 1)] = v;
        }

    CMat rho = CMat::Zero(4, 4);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            if (t[a][b] == 0.0) continue;
            Eigen::Matrix4cd kron;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) kron.block<2, 2>(2 * r, 2 * c) = sigma[a](r, c) * sigma[b];
            rho += 0.25 * t[a][b] * kron;
        }
    return rho;
}

namespace {

// <j, m|theta, phi> for m = j - k, k = 0 ... 2j, up to a global phase.
CVec coherent_amplitudes(int two_j, double theta, double phi)
{
    CVec amp(two_j + 1);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    for (int k = 0; k <= two_j; ++k) {
        const double log_binom = std::lgamma(two_j + 1.0) - std::lgamma(k + 1.0) - std::lgamma(two_j - k + 1.0);
        // c^(j+m) s^(j-m) with j + m = 2j - k, j - m = k
        double mag;
        if ((c == 0.0 && two_j - k > 0) || (s == 0.0 && k > 0)) mag = 0.0;
        else
            mag = std::exp(0.5 * log_binom + (two_j - k) * std::log(std::max(c, 1e-300)) +
                           k * std::log(std::max(s, 1e-300)));
        amp(k) = mag * std::exp(I * (phi * k));
    }
    return amp;
}

} // namespace

double husimi(const CVec& state, double theta, double phi)
{
    require(state.size() >= 2, "husimi: state too small");
    const CVec amp = coherent_amplitudes(static_cast<int>(state.size()) - 1, theta, phi);
    return std::norm(amp.dot(state));
}

Vec3 husimi_peak(const CVec& state)
{
    constexpr int nt = 64;
    constexpr int np = 128;
    double best_t = 0.0;
    double best_p = 0.0;
    double best = -1.0;
    for (int a = 0; a <= nt; ++a)
        for (int b = 0; b < np; ++b) {
            const double t = pi * a / nt;
            const double p = -pi + 2.0 * pi * b / np;
            const double q = husimi(state, t, p);
            if (q > best) {
                best = q;
                best_t = t;
                best_p = p;
            }
        }
    double step = pi / nt;
    while (step > 1e-8) {
        bool moved = false;
        for (auto [dt, dp] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
            const double t = std::clamp(best_t + dt, 0.0, pi);
            const double q = husimi(state, t, best_p + dp);
            if (q > best) {
                best = q;
                best_t = t;
                best_p += dp;
                moved = true;
            }
        }
        if (!moved) step *= 0.5;
    }
    return direction(best_t, best_p);
}

} // namespace qce::qkt
