#include "qce/amol.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "qce/fft.hpp"
#include "qce/linalg.hpp"

namespace qce::amol {

namespace {

bool is_power_of_two(int n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

// Wrap x into [-period/2, period/2).
double wrap(double x, double period)
{
    return x - period * std::floor(x / period + 0.5);
}

} // namespace

void AmolParams::validate() const
{
    require(v1 > 0.0, "V1 must be positive");
    require(theta_l > 0.0 && theta_l < pi / 2.0, "theta_L must lie in (0, pi/2)");
    require(bx >= 0.0, "mu_B B_x must be non-negative");
    SpinSpace{f};
}

double AmolParams::lattice_amplitude() const
{
    return 4.0 / 3.0 * v1 * std::cos(theta_l);
}

double AmolParams::field_amplitude() const
{
    return 2.0 / 3.0 * v1 * std::sin(theta_l);
}

double AmolParams::coupling_scale() const
{
    return spin_scale == SpinScale::normalized ? 1.0 / f : 1.0;
}

void LatticeGrid::validate() const
{
    require(is_power_of_two(n_points), "n_points must be a power of two");
    require(n_points >= 64, "n_points must be at least 64");
    require(n_periods >= 1, "n_periods must be at least 1");
}

double LatticeGrid::momentum(int i) const
{
    const int k = i < n_points / 2 ? i : i - n_points;
    return 2.0 * pi / length() * k;
}

Vec LatticeGrid::positions() const
{
    Vec z(n_points);
    for (int i = 0; i < n_points; ++i) z(i) = position(i);
    return z;
}

Vec LatticeGrid::momenta() const
{
    Vec p(n_points);
    for (int i = 0; i < n_points; ++i) p(i) = momentum(i);
    return p;
}

void CompositeState::validate() const
{
    require(motion_dim >= 1 && spin_dim >= 1, "composite state dims must be positive");
    require(amplitudes.size() == static_cast<Eigen::Index>(motion_dim) * spin_dim,
            "composite state length does not match its dims");
    require(std::abs(amplitudes.norm() - 1.0) <= 1e-10, "composite state must be normalized");
}

Mat kinetic_matrix(const LatticeGrid& grid)
{
    grid.validate();
    const int n = grid.n_points;
    CVec p2(n);
    for (int i = 0; i < n; ++i) p2(i) = grid.momentum(i) * grid.momentum(i) / (2.0 * mass);
    // Row i of the circulant is (1/n) sum_k p_k^2 exp(i p_k (z_i - z_j)).
    const CVec kernel = idft(p2);
    Vec row(n);
    for (int k = 0; k < n; ++k) row(k) = 0.5 * (kernel(k).real() + kernel((n - k) % n).real());
    Mat t(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t(i, j) = row(((i - j) % n + n) % n);
    return t;
}

Vec diabatic_potential(const AmolParams& params, const LatticeGrid& grid, double m)
{
    const Vec z = grid.positions();
    const double a = params.lattice_amplitude();
    const double b = params.coupling_scale() * m * params.field_amplitude();
    return (a * (2.0 * z).array().cos() + b * (2.0 * z).array().sin()).matrix();
}

double diabatic_well_minimum(const AmolParams& params, double m)
{
    // a cos 2z + b sin 2z = A cos(2z - delta); minimum where 2z - delta = pi.
    const double a = params.lattice_amplitude();
    const double b = params.coupling_scale() * m * params.field_amplitude();
    const double delta = std::atan2(b, a);
    return to_lambda(wrap(0.5 * (pi + delta), pi / wave_number));
}

CMat build_hamiltonian(const AmolParams& params, const LatticeGrid& grid)
{
    params.validate();
    grid.validate();

    // Harmonic width of the deepest diabatic well: U ~ -A + 2A x^2 gives
    // omega = sqrt(8A) and sigma = omega^(-1/2) with M = 1/2.
    const double s = params.coupling_scale();
    const double deepest = std::hypot(params.lattice_amplitude(), s * params.f * params.field_amplitude());
    const double sigma = std::pow(8.0 * deepest, -0.25);
    if (sigma < 4.0 * grid.spacing())
        throw DomainError("grid too coarse: ground-state width " + std::to_string(sigma) +
                          " is below four grid spacings");

    const SpinOperators ops = build_spin_operators(SpinSpace{params.f});
    const int ds = ops.space.dim();
    const int n = grid.n_points;
    const Mat t = kinetic_matrix(grid);
    const Vec z = grid.positions();

    CMat h = CMat::Zero(static_cast<Eigen::Index>(n) * ds, static_cast<Eigen::Index>(n) * ds);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < ds; ++a) h(i * ds + a, j * ds + a) = t(i, j);

    const CMat fx = s * params.bx * ops.fx;
    for (int i = 0; i < n; ++i) {
        const double scalar = params.lattice_amplitude() * std::cos(2.0 * z(i));
        const double bz = s * params.field_amplitude() * std::sin(2.0 * z(i));
        CMat local = fx + bz * ops.fz;
        local.diagonal().array() += scalar;
        h.block(i * ds, i * ds, ds, ds) += local;
    }
    return h;
}

std::vector<Eigen::SparseMatrix<cplx>> parity_sectors(const LatticeGrid& grid,
                                                      const SpinOperators& ops)
{
    grid.validate();
    const int n = grid.n_points;
    const int ds = ops.space.dim();
    const Eigen::Index dim = static_cast<Eigen::Index>(n) * ds;

    // exp(-i pi F_x) is diagonal in the F_x eigenbasis with phases exp(-i pi mu).
    Eigen::SelfAdjointEigenSolver<CMat> fx(ops.fx);
    const CMat& w = fx.eigenvectors();

    // Spatial parity i -> n - i: each entry lists (site, weight) pairs and its sign.
    struct SpatialVector {
        std::vector<std::pair<int, double>> sites;
        int sign;
    };
    std::vector<SpatialVector> spatial;
    spatial.push_back({{{0, 1.0}}, +1});
    spatial.push_back({{{n / 2, 1.0}}, +1});
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 1; i < n / 2; ++i) {
        spatial.push_back({{{i, r}, {n - i, r}}, +1});
        spatial.push_back({{{i, r}, {n - i, -r}}, -1});
    }

    // Group columns by the total parity eigenvalue, rounded so that +-1 (or
    // +-i for half-integer F) map to stable keys.
    using Key = std::pair<long, long>;
    std::map<Key, std::vector<Eigen::Triplet<cplx>>> triplets;
    std::map<Key, Eigen::Index> columns;
    for (const auto& sv : spatial) {
        for (int mu = 0; mu < ds; ++mu) {
            const cplx eigenvalue =
                static_cast<double>(sv.sign) * std::exp(-I * pi * fx.eigenvalues()(mu));
            const Key key{std::lround(eigenvalue.real() * 1e6), std::lround(eigenvalue.imag() * 1e6)};
            auto& col = columns[key];
            for (const auto& [site, weight] : sv.sites)
                for (int a = 0; a < ds; ++a)
                    if (std::abs(w(a, mu)) > 0.0)
                        triplets[key].emplace_back(static_cast<Eigen::Index>(site) * ds + a, col,
                                                   weight * w(a, mu));
            ++col;
        }
    }

    std::vector<Eigen::SparseMatrix<cplx>> sectors;
    for (auto& [key, trip] : triplets) {
        Eigen::SparseMatrix<cplx> q(dim, columns[key]);
        q.setFromTriplets(trip.begin(), trip.end());
        sectors.push_back(std::move(q));
    }
    return sectors;
}

ScalarGroundState scalar_ground_state(const LatticeGrid& grid, const Vec& potential)
{
    require(potential.size() == grid.n_points, "potential length must match the grid");
    const double range = potential.maxCoeff() - potential.minCoeff();
    if (range <= 1e-9 * (1.0 + potential.cwiseAbs().maxCoeff()))
        throw DomainError("diabatic potential is flat: no bound ground state");

    Mat h = kinetic_matrix(grid);
    h.diagonal() += potential;
    Eigen::SelfAdjointEigenSolver<Mat> eig(h);
    Vec g = eig.eigenvectors().col(0);
    Eigen::Index peak;
    g.cwiseAbs().maxCoeff(&peak);
    if (g(peak) < 0.0) g = -g;
    return {g.cast<cplx>(), eig.eigenvalues()(0)};
}

CVec translate(const LatticeGrid& grid, const CVec& psi, double shift)
{
    require(psi.size() == grid.n_points, "state length must match the grid");
    CVec spectrum = dft(psi);
    const double dz = from_lambda(shift);
    for (int i = 0; i < grid.n_points; ++i) spectrum(i) *= std::exp(-I * grid.momentum(i) * dz);
    CVec out = idft(spectrum);
    return out / out.norm();
}

CVec boost(const LatticeGrid& grid, const CVec& psi, double p0)
{
    require(psi.size() == grid.n_points, "state length must match the grid");
    const double bins = p0 * grid.length() / (2.0 * pi);
    require(std::abs(bins - std::round(bins)) < 1e-9,
            "momentum boost must be a multiple of the grid momentum spacing");
    CVec out = psi;
    for (int i = 0; i < grid.n_points; ++i) out(i) *= std::exp(I * p0 * grid.position(i));
    return out;
}

CVec motional_gaussian_state(const LatticeGrid& grid, double z0, double p0, double width)
{
    grid.validate();
    require(width > 0.0, "width must be positive");
    const double sigma = from_lambda(width);
    if (sigma < 4.0 * grid.spacing())
        throw DomainError("wave packet width is below four grid spacings");
    // Sampled in momentum space so the packet is exactly periodic on the grid.
    const double zc = from_lambda(z0);
    CVec spectrum(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) {
        const double dp = grid.momentum(i) - p0;
        spectrum(i) = std::exp(-dp * dp * sigma * sigma) * std::exp(-I * grid.momentum(i) * zc);
    }
    CVec psi = idft(spectrum);
    return psi / psi.norm();
}

CVec diabatic_ground_state(const AmolParams& params, const LatticeGrid& grid, double m,
                           double shift)
{
    params.validate();
    grid.validate();
    const SpinSpace space{params.f};
    const double k = space.f() - m;
    require(std::abs(k - std::round(k)) < 1e-12 && k >= -1e-12 && k <= space.twice_f() + 1e-12,
            "spin projection m must be one of F, F-1, ..., -F");
    const auto ground = scalar_ground_state(grid, diabatic_potential(params, grid, m));
    if (shift == 0.0) return ground.psi;
    return translate(grid, ground.psi, shift);
}

CompositeState initial_product_state(const CVec& motional, const CVec& spin)
{
    require(motional.size() > 0 && spin.size() > 0, "product state factors must be non-empty");
    require(std::abs(motional.norm() - 1.0) <= 1e-10, "motional state must be normalized");
    require(std::abs(spin.norm() - 1.0) <= 1e-10, "spin state must be normalized");
    const auto nm = static_cast<int>(motional.size());
    const auto ns = static_cast<int>(spin.size());
    CompositeState out{CVec(static_cast<Eigen::Index>(nm) * ns), nm, ns};
    for (int i = 0; i < nm; ++i) out.amplitudes.segment(i * ns, ns) = motional(i) * spin;
    return out;
}

MotionalMoments motional_moments(const LatticeGrid& grid, const CVec& psi)
{
    require(psi.size() == grid.n_points, "state length must match the grid");
    const Vec prob = psi.cwiseAbs2() / psi.squaredNorm();
    const double length = grid.length();

    cplx phasor{0.0, 0.0};
    for (int i = 0; i < grid.n_points; ++i)
        phasor += prob(i) * std::exp(I * (2.0 * pi * grid.position(i) / length));
    const double center = wrap(std::arg(phasor) * length / (2.0 * pi), length);

    double var_z = 0.0;
    for (int i = 0; i < grid.n_points; ++i) {
        const double dz = wrap(grid.position(i) - center, length);
        var_z += prob(i) * dz * dz;
    }

    const Vec pprob = dft(psi).cwiseAbs2() / dft(psi).squaredNorm();
    double mean_p = 0.0;
    double mean_p2 = 0.0;
    for (int i = 0; i < grid.n_points; ++i) {
        mean_p += pprob(i) * grid.momentum(i);
        mean_p2 += pprob(i) * grid.momentum(i) * grid.momentum(i);
    }
    return {to_lambda(center), to_lambda(std::sqrt(var_z)), mean_p / wave_number,
            std::sqrt(std::max(0.0, mean_p2 - mean_p * mean_p)) / wave_number};
}

MotionalMoments motional_moments(const LatticeGrid& grid, const CompositeState& state)
{
    require(state.motion_dim == grid.n_points, "state does not live on this grid");
    // Moments of the marginal: combine spin components incoherently.
    MotionalMoments acc{0.0, 0.0, 0.0, 0.0};
    cplx phasor{0.0, 0.0};
    double var_z = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    const double length = grid.length();
    const double total = state.amplitudes.squaredNorm();
    std::vector<CVec> components;
    for (int a = 0; a < state.spin_dim; ++a) {
        CVec c(grid.n_points);
        for (int i = 0; i < grid.n_points; ++i) c(i) = state.amplitudes(i * state.spin_dim + a);
        components.push_back(std::move(c));
    }
    for (const auto& c : components)
        for (int i = 0; i < grid.n_points; ++i)
            phasor += std::norm(c(i)) / total * std::exp(I * (2.0 * pi * grid.position(i) / length));
    const double center = wrap(std::arg(phasor) * length / (2.0 * pi), length);
    for (const auto& c : components) {
        const CVec ck = dft(c);
        const double weight = c.squaredNorm() / total;
        const double knorm = ck.squaredNorm();
        for (int i = 0; i < grid.n_points; ++i) {
            const double dz = wrap(grid.position(i) - center, length);
            var_z += std::norm(c(i)) / total * dz * dz;
            if (knorm > 0.0) {
                const double w = weight * std::norm(ck(i)) / knorm;
                p1 += w * grid.momentum(i);
                p2 += w * grid.momentum(i) * grid.momentum(i);
            }
        }
    }
    acc.center = to_lambda(center);
    acc.spread_z = to_lambda(std::sqrt(var_z));
    acc.mean_p = p1 / wave_number;
    acc.spread_p = std::sqrt(std::max(0.0, p2 - p1 * p1)) / wave_number;
    return acc;
}

CompositeState prepare_state(const AmolParams& params, const LatticeGrid& grid,
                             const PhasePoint& at, const PrepOptions& prep)
{
    params.validate();
    grid.validate();
    CVec motional;
    if (prep.method == MotionalPrep::gaussian) {
        motional = motional_gaussian_state(grid, at.z, at.p, prep.width);
    } else {
        // Cool into the chosen well, then shift the lattice so the packet sits at z.
        const double shift = at.z - diabatic_well_minimum(params, prep.well_m);
        motional = diabatic_ground_state(params, grid, prep.well_m, shift);
        if (at.p != 0.0) motional = boost(grid, motional, at.p * wave_number);
    }
    const SpinOperators ops = build_spin_operators(SpinSpace{params.f});
    return initial_product_state(motional, spin_coherent_state(ops, at.theta, at.phi));
}

} // namespace qce::amol
