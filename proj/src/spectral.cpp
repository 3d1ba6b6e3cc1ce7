#include "qce/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include "qce/linalg.hpp"
#include "qce/spin.hpp"

namespace qce {

std::string to_string(SpectrumKind kind)
{
    return kind == SpectrumKind::hamiltonian ? "hamiltonian" : "floquet";
}

CMat SpectralDecomposition::reconstruct() const
{
    CVec lambda(size());
    for (Eigen::Index i = 0; i < size(); ++i)
        lambda(i) = kind == SpectrumKind::hamiltonian ? cplx(eigenvalues(i))
                                                      : std::exp(-I * eigenvalues(i));
    return eigenvectors * lambda.asDiagonal() * eigenvectors.adjoint();
}

namespace {

struct Block {
    Vec values;
    CMat vectors;  // in the full space
};

Block diagonalize_block(const CMat& h, const CVec* reference, const DecomposeOptions& options,
                        const std::function<CMat(const CMat&)>& lift,
                        std::vector<std::string>& warnings, bool& complete)
{
    const Eigen::Index n = h.rows();
    if (n <= options.max_dense_dim) {
        auto eig = linalg::eigh(h);
        return {std::move(eig.values), lift(eig.vectors)};
    }
    require(reference != nullptr,
            "partial spectrum extraction above max_dense_dim needs a reference state");
    complete = false;
    const CVec& psi = *reference;
    const double target = psi.squaredNorm();
    Eigen::Index count = std::min<Eigen::Index>(n, 256);
    for (;;) {
        auto eig = linalg::eigh_lowest(h, static_cast<int>(count));
        CMat full = lift(eig.vectors);
        const double captured = (full.adjoint() * psi).squaredNorm();
        if (captured >= target * (1.0 - options.capture_tol) || count == n) {
            const double missing = std::max(0.0, target - captured);
            warnings.push_back("partial spectrum: " + std::to_string(count) + " of " +
                               std::to_string(n) + " states, uncaptured population " +
                               std::to_string(missing));
            return {std::move(eig.values), std::move(full)};
        }
        count = std::min(n, 2 * count);
    }
}

SpectralDecomposition merge(SpectrumKind kind, std::vector<Block>& blocks, Eigen::Index dim)
{
    struct Entry {
        double value;
        std::size_t block;
        Eigen::Index col;
    };
    std::vector<Entry> entries;
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (Eigen::Index c = 0; c < blocks[b].values.size(); ++c)
            entries.push_back({blocks[b].values(c), b, c});
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& x, const Entry& y) { return x.value < y.value; });

    SpectralDecomposition out;
    out.kind = kind;
    out.eigenvalues.resize(static_cast<Eigen::Index>(entries.size()));
    out.eigenvectors.resize(dim, static_cast<Eigen::Index>(entries.size()));
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& e = entries[k];
        out.eigenvalues(static_cast<Eigen::Index>(k)) = e.value;
        out.eigenvectors.col(static_cast<Eigen::Index>(k)) = blocks[e.block].vectors.col(e.col);
    }
    return out;
}

double fold_phase(double phi)
{
    phi = std::remainder(phi, 2.0 * pi);
    return phi <= -pi ? phi + 2.0 * pi : phi;
}

} // namespace

SpectralDecomposition decompose(const CMat& op, SpectrumKind kind, const DecomposeOptions& options)
{
    require(op.rows() == op.cols(), "decompose: operator must be square");
    const Eigen::Index dim = op.rows();
    const double scale = std::max(1.0, max_abs(op));

    if (kind == SpectrumKind::floquet) {
        require(linalg::unitarity_residual(op) <= options.tolerance * std::max<double>(1.0, dim),
                "decompose: Floquet operator is not unitary");
        // The Schur vectors of a normal matrix are an orthonormal eigenbasis,
        // also inside degenerate eigenspaces.
        Eigen::ComplexSchur<CMat> schur(op);
        require(schur.info() == Eigen::Success, "decompose: Schur factorization failed");
        const CMat& t = schur.matrixT();
        std::vector<Block> blocks(1);
        blocks[0].values.resize(dim);
        for (Eigen::Index i = 0; i < dim; ++i) blocks[0].values(i) = fold_phase(-std::arg(t(i, i)));
        blocks[0].vectors = schur.matrixU();
        auto out = merge(kind, blocks, dim);
        const double off = max_abs(CMat(t.triangularView<Eigen::StrictlyUpper>()));
        if (off > 1e-8) out.warnings.push_back("Floquet Schur form not diagonal: " + std::to_string(off));
        return out;
    }

    require(linalg::hermiticity_residual(op) <= options.tolerance * scale,
            "decompose: Hamiltonian is not Hermitian");

    SpectralDecomposition result;
    std::vector<std::string> warnings;
    bool complete = true;
    std::vector<Block> blocks;
    if (options.sectors.empty()) {
        blocks.push_back(diagonalize_block(op, options.reference, options,
                                           [](const CMat& v) { return v; }, warnings, complete));
    } else {
        Eigen::Index covered = 0;
        for (const auto& q : options.sectors) {
            require(q.rows() == dim, "decompose: sector isometry has the wrong row count");
            covered += q.cols();
            const CMat hq = op * q;
            const CMat block = q.adjoint() * hq;
            blocks.push_back(diagonalize_block(
                block, options.reference, options,
                [&q](const CMat& v) { return CMat(q * v); }, warnings, complete));
        }
        require(covered == dim, "decompose: sectors do not span the space");
    }
    result = merge(kind, blocks, dim);
    result.complete = complete;
    result.warnings = std::move(warnings);
    return result;
}

std::vector<int> SupportSpectrum::dominant(int count) const
{
    std::vector<int> idx(static_cast<std::size_t>(populations.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [this](int a, int b) { return populations(a) > populations(b); });
    idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(std::max(0, count))));
    return idx;
}

std::vector<std::pair<double, double>> SupportSpectrum::aggregated(double tol) const
{
    std::vector<std::pair<double, double>> out;
    Eigen::Index start = 0;
    while (start < eigenvalues.size()) {
        Eigen::Index end = start + 1;
        while (end < eigenvalues.size() && eigenvalues(end) - eigenvalues(end - 1) < tol) ++end;
        const auto n = end - start;
        out.emplace_back(eigenvalues.segment(start, n).mean(), populations.segment(start, n).sum());
        start = end;
    }
    return out;
}

SupportSpectrum support_spectrum(const SpectralDecomposition& decomp, const CVec& psi0)
{
    require(psi0.size() == decomp.dim(), "support_spectrum: state dimension mismatch");
    return {decomp.eigenvalues, (decomp.eigenvectors.adjoint() * psi0).cwiseAbs2()};
}

namespace {

void check_time(const SpectralDecomposition& decomp, double t)
{
    if (decomp.kind == SpectrumKind::floquet)
        require(t == std::round(t), "Floquet evolution needs an integer kick count");
}

CVec phases(const SpectralDecomposition& decomp, double t)
{
    return (-I * t * decomp.eigenvalues.cast<cplx>()).array().exp();
}

} // namespace

CVec evolve(const SpectralDecomposition& decomp, const CVec& psi, double t)
{
    require(psi.size() == decomp.dim(), "evolve: state dimension mismatch");
    check_time(decomp, t);
    const CVec c = decomp.eigenvectors.adjoint() * psi;
    return decomp.eigenvectors * phases(decomp, t).cwiseProduct(c);
}

CVec truncated_evolution(const SpectralDecomposition& decomp, const CVec& psi,
                         std::span<const int> kept, double t, bool renormalize)
{
    require(!kept.empty(), "truncated_evolution: no eigenstates kept");
    require(psi.size() == decomp.dim(), "truncated_evolution: state dimension mismatch");
    check_time(decomp, t);
    CVec out = CVec::Zero(psi.size());
    for (int k : kept) {
        require(k >= 0 && k < decomp.size(), "truncated_evolution: index out of range");
        const auto v = decomp.eigenvectors.col(k);
        out += std::exp(-I * decomp.eigenvalues(k) * t) * v.dot(psi) * v;
    }
    if (renormalize && out.norm() > 0.0) out /= out.norm();
    return out;
}

CMat Propagator::evolve_many(const CVec& psi0, std::span<const double> times) const
{
    CMat out(dim(), static_cast<Eigen::Index>(times.size()));
    for (std::size_t k = 0; k < times.size(); ++k)
        out.col(static_cast<Eigen::Index>(k)) = evolve(psi0, times[k]);
    return out;
}

SpectralPropagator::SpectralPropagator(std::shared_ptr<const SpectralDecomposition> decomp)
    : decomp_(std::move(decomp))
{
    require(decomp_ != nullptr, "SpectralPropagator: null decomposition");
}

SpectralPropagator::SpectralPropagator(std::shared_ptr<const SpectralDecomposition> decomp,
                                       std::vector<int> kept, bool renormalize)
    : decomp_(std::move(decomp)), kept_(std::move(kept)), renormalize_(renormalize)
{
    require(decomp_ != nullptr, "SpectralPropagator: null decomposition");
    require(!kept_.empty(), "SpectralPropagator: no eigenstates kept");
    for (int k : kept_) require(k >= 0 && k < decomp_->size(), "SpectralPropagator: index out of range");
}

CVec SpectralPropagator::evolve(const CVec& psi0, double t) const
{
    const double times[1] = {t};
    return evolve_many(psi0, times).col(0);
}

CMat SpectralPropagator::evolve_many(const CVec& psi0, std::span<const double> times) const
{
    const auto& d = *decomp_;
    require(psi0.size() == d.dim(), "SpectralPropagator: state dimension mismatch");
    for (double t : times) check_time(d, t);

    CVec c = d.eigenvectors.adjoint() * psi0;
    if (!kept_.empty()) {
        CVec masked = CVec::Zero(c.size());
        for (int k : kept_) masked(k) = c(k);
        c = masked;
    }

    // Drop eigenstates whose combined population is below 1e-30; their
    // amplitude contribution is at the 1e-15 level.
    std::vector<int> order(static_cast<std::size_t>(c.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&c](int a, int b) { return std::norm(c(a)) < std::norm(c(b)); });
    double dropped = 0.0;
    std::size_t first_kept = 0;
    while (first_kept < order.size() && dropped + std::norm(c(order[first_kept])) <= 1e-30)
        dropped += std::norm(c(order[first_kept++]));
    std::vector<int> support(order.begin() + static_cast<std::ptrdiff_t>(first_kept), order.end());
    std::sort(support.begin(), support.end());

    const auto k = static_cast<Eigen::Index>(support.size());
    CMat basis(d.dim(), k);
    CVec coeff(k);
    Vec freq(k);
    for (Eigen::Index s = 0; s < k; ++s) {
        basis.col(s) = d.eigenvectors.col(support[static_cast<std::size_t>(s)]);
        coeff(s) = c(support[static_cast<std::size_t>(s)]);
        freq(s) = d.eigenvalues(support[static_cast<std::size_t>(s)]);
    }

    const auto nt = static_cast<Eigen::Index>(times.size());
    CMat out(d.dim(), nt);
    constexpr Eigen::Index block = 256;
    for (Eigen::Index start = 0; start < nt; start += block) {
        const Eigen::Index len = std::min(block, nt - start);
        CMat amp(k, len);
        for (Eigen::Index b = 0; b < len; ++b) {
            const double t = times[static_cast<std::size_t>(start + b)];
            for (Eigen::Index s = 0; s < k; ++s) amp(s, b) = coeff(s) * std::exp(-I * freq(s) * t);
        }
        out.middleCols(start, len).noalias() = basis * amp;
    }
    if (renormalize_)
        for (Eigen::Index b = 0; b < nt; ++b)
            if (out.col(b).norm() > 0.0) out.col(b).normalize();
    return out;
}

double EntropyCoefficients::entropy(double t) const
{
    return 1.0 - purity(t).real();
}

cplx EntropyCoefficients::purity(double t) const
{
    cplx sum{0.0, 0.0};
    for (const auto& term : terms) sum += term.coefficient * std::exp(-I * term.frequency * t);
    return sum;
}

EntropyCoefficients entropy_reconstruction_coefficients(const SpectralDecomposition& decomp,
                                                        const CVec& psi0,
                                                        std::span<const int> retained,
                                                        std::pair<int, int> dims,
                                                        bool renormalize, std::size_t max_terms)
{
    const auto [d1, d2] = dims;
    require(static_cast<Eigen::Index>(d1) * d2 == decomp.dim(),
            "entropy coefficients: dims do not match the decomposition");
    require(psi0.size() == decomp.dim(), "entropy coefficients: state dimension mismatch");
    require(!retained.empty(), "entropy coefficients: no retained eigenstates");
    const std::size_t r = retained.size();
    const std::size_t nterms = r * r * r * r;
    if (nterms > max_terms)
        throw DomainError("entropy coefficients: " + std::to_string(nterms) +
                          " terms exceed the budget of " + std::to_string(max_terms));
    if (nterms > 10'000)
        spdlog::warn("entropy coefficient table has {} entries", nterms);

    // rho_ij = c_i c_j^* restricted to the retained set.
    CVec c(static_cast<Eigen::Index>(r));
    for (std::size_t a = 0; a < r; ++a) {
        const int k = retained[a];
        require(k >= 0 && k < decomp.size(), "entropy coefficients: index out of range");
        c(static_cast<Eigen::Index>(a)) = decomp.eigenvectors.col(k).dot(psi0);
    }
    if (renormalize) c /= c.norm();

    // G_ij[m,n] = sum_p <u_p v_m|phi_i><phi_j|u_p v_n>: the partial trace of
    // |phi_i><phi_j| over subsystem 1, as a d2 x d2 matrix.
    std::vector<CMat> g(r * r);
    for (std::size_t a = 0; a < r; ++a) {
        const CVec vi = decomp.eigenvectors.col(retained[a]);
        const Eigen::Map<const CMat> bi(vi.data(), d2, d1);
        for (std::size_t b = 0; b < r; ++b) {
            const CVec vj = decomp.eigenvectors.col(retained[b]);
            const Eigen::Map<const CMat> bj(vj.data(), d2, d1);
            g[a * r + b] = bi * bj.adjoint();
        }
    }

    EntropyCoefficients out;
    out.retained.assign(retained.begin(), retained.end());
    out.terms.reserve(nterms);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            const cplx rho_ij = c(static_cast<Eigen::Index>(i)) * std::conj(c(static_cast<Eigen::Index>(j)));
            const CMat& gij = g[i * r + j];
            for (std::size_t k = 0; k < r; ++k)
                for (std::size_t l = 0; l < r; ++l) {
                    const cplx rho_kl =
                        c(static_cast<Eigen::Index>(k)) * std::conj(c(static_cast<Eigen::Index>(l)));
                    // Tr(G_ij G_kl) = sum_mn G_ij[m,n] G_kl[n,m]
                    const cplx trace = gij.cwiseProduct(g[k * r + l].transpose()).sum();
                    const double freq = decomp.eigenvalues(retained[i]) - decomp.eigenvalues(retained[j]) +
                                        decomp.eigenvalues(retained[k]) - decomp.eigenvalues(retained[l]);
                    out.terms.push_back({retained[i], retained[j], retained[k], retained[l],
                                         rho_ij * rho_kl * trace, freq});
                }
        }
    return out;
}

double default_gap_tolerance(SpectrumKind kind)
{
    return kind == SpectrumKind::floquet ? 1e-2 : 0.5;
}

std::vector<NearDegeneratePair> near_degenerate_pairs(const SpectralDecomposition& decomp,
                                                      double gap_tol, std::span<const int> subset)
{
    std::vector<int> idx;
    if (subset.empty()) {
        idx.resize(static_cast<std::size_t>(decomp.size()));
        std::iota(idx.begin(), idx.end(), 0);
    } else {
        idx.assign(subset.begin(), subset.end());
    }
    std::stable_sort(idx.begin(), idx.end(), [&decomp](int a, int b) {
        return decomp.eigenvalues(a) < decomp.eigenvalues(b);
    });

    std::vector<NearDegeneratePair> out;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
        const double gap = decomp.eigenvalues(idx[k + 1]) - decomp.eigenvalues(idx[k]);
        if (gap < gap_tol) out.push_back({idx[k], idx[k + 1], gap});
    }
    if (decomp.kind == SpectrumKind::floquet && idx.size() >= 3) {
        const double gap = 2.0 * pi - (decomp.eigenvalues(idx.back()) - decomp.eigenvalues(idx.front()));
        if (gap < gap_tol) out.push_back({idx.back(), idx.front(), gap});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.gap < b.gap; });
    return out;
}

SupportStructure analyze_support(const SpectralDecomposition& decomp, const SupportSpectrum& support,
                                 int top, double gap_tol)
{
    require(top >= 1, "analyze_support: top must be positive");
    SupportStructure out;
    out.dominant = support.dominant(top);
    for (int i : out.dominant) out.population += support.populations(i);

    std::vector<bool> used(static_cast<std::size_t>(decomp.size()), false);
    for (const auto& pair : near_degenerate_pairs(decomp, gap_tol, out.dominant)) {
        if (used[static_cast<std::size_t>(pair.first)] || used[static_cast<std::size_t>(pair.second)]) continue;
        used[static_cast<std::size_t>(pair.first)] = used[static_cast<std::size_t>(pair.second)] = true;
        out.pairs.push_back(pair);
        out.max_pair_gap = std::max(out.max_pair_gap, pair.gap);
    }

    const bool circular = decomp.kind == SpectrumKind::floquet;
    std::vector<double> peaks;
    for (const auto& pair : out.pairs) {
        double a = decomp.eigenvalues(pair.first);
        double b = decomp.eigenvalues(pair.second);
        if (circular && std::abs(a - b) > pi) b += a > b ? 2.0 * pi : -2.0 * pi;
        peaks.push_back(0.5 * (a + b));
    }
    for (int i : out.dominant)
        if (!used[static_cast<std::size_t>(i)]) peaks.push_back(decomp.eigenvalues(i));
    if (circular)
        for (auto& x : peaks) x = fold_phase(x);
    std::sort(peaks.begin(), peaks.end());
    out.min_peak_spacing = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < peaks.size(); ++k)
        out.min_peak_spacing = std::min(out.min_peak_spacing, peaks[k + 1] - peaks[k]);
    if (circular && peaks.size() >= 2)
        out.min_peak_spacing = std::min(out.min_peak_spacing, 2.0 * pi - (peaks.back() - peaks.front()));
    if (!std::isfinite(out.min_peak_spacing)) out.min_peak_spacing = 0.0;
    out.gap_ratio = out.min_peak_spacing > 0.0 ? out.max_pair_gap / out.min_peak_spacing
                                               : std::numeric_limits<double>::infinity();

    double best = -1.0;
    for (const auto& pair : near_degenerate_pairs(decomp, gap_tol, out.dominant)) {
        if (pair.gap <= 1e-8) continue;
        const double w = support.populations(pair.first) + support.populations(pair.second);
        if (w > best) {
            best = w;
            out.dominant_pair_gap = pair.gap;
        }
    }
    return out;
}

namespace {

std::vector<CMat> lattice_potentials(const amol::AmolParams& params, const amol::LatticeGrid& grid)
{
    params.validate();
    grid.validate();
    const SpinOperators ops = build_spin_operators(SpinSpace{params.f});
    const double s = params.coupling_scale();
    std::vector<CMat> out;
    out.reserve(static_cast<std::size_t>(grid.n_points));
    for (int i = 0; i < grid.n_points; ++i) {
        const double z = grid.position(i);
        CMat v = s * params.bx * ops.fx + s * params.field_amplitude() * std::sin(2.0 * z) * ops.fz;
        v.diagonal().array() += params.lattice_amplitude() * std::cos(2.0 * z);
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace

SplitOperatorPropagator::SplitOperatorPropagator(const amol::AmolParams& params,
                                                 const amol::LatticeGrid& grid, double dt)
    : SplitOperatorPropagator(grid, lattice_potentials(params, grid), dt)
{
}

SplitOperatorPropagator::SplitOperatorPropagator(const amol::LatticeGrid& grid,
                                                 std::vector<CMat> local_potentials, double dt)
    : grid_(grid),
      spin_dim_(local_potentials.empty() ? 0 : static_cast<int>(local_potentials.front().rows())),
      dt_(dt),
      potentials_(std::move(local_potentials)),
      kinetic_(grid.n_points),
      plan_(grid.n_points, std::max(1, spin_dim_))
{
    grid_.validate();
    require(static_cast<int>(potentials_.size()) == grid_.n_points,
            "split operator: one local potential per grid point is required");
    require(dt > 0.0, "split operator: dt must be positive");
    double spread = 0.0;
    for (const auto& v : potentials_) {
        require(v.rows() == spin_dim_ && v.cols() == spin_dim_, "split operator: inconsistent local dims");
        spread = std::max(spread, v.cwiseAbs().rowwise().sum().maxCoeff());
    }
    // A step must not wind the local potential phase by more than one radian.
    if (dt * spread > 1.0)
        throw DomainError("split operator: dt too large for the potential (dt*|V| = " +
                          std::to_string(dt * spread) + ")");
    for (int i = 0; i < grid_.n_points; ++i)
        kinetic_(i) = grid_.momentum(i) * grid_.momentum(i) / (2.0 * amol::mass);
}

Eigen::Index SplitOperatorPropagator::dim() const
{
    return static_cast<Eigen::Index>(grid_.n_points) * spin_dim_;
}

void SplitOperatorPropagator::apply_local(CVec& psi, const std::vector<CMat>& factors) const
{
    for (int i = 0; i < grid_.n_points; ++i) {
        auto seg = psi.segment(static_cast<Eigen::Index>(i) * spin_dim_, spin_dim_);
        seg = (factors[static_cast<std::size_t>(i)] * seg).eval();
    }
}

void SplitOperatorPropagator::apply_kinetic(CVec& psi, double h) const
{
    std::span<cplx> data(psi.data(), static_cast<std::size_t>(psi.size()));
    plan_.forward(data);
    for (int i = 0; i < grid_.n_points; ++i) {
        const cplx phase = std::exp(-I * kinetic_(i) * h);
        for (int a = 0; a < spin_dim_; ++a) psi(static_cast<Eigen::Index>(i) * spin_dim_ + a) *= phase;
    }
    plan_.inverse(data);
}

void SplitOperatorPropagator::advance(CVec& psi, double t) const
{
    if (t == 0.0) return;
    const auto steps = static_cast<long>(std::ceil(std::abs(t) / dt_ - 1e-9));
    const double h = t / static_cast<double>(steps);
    std::vector<CMat> half;
    std::vector<CMat> full;
    half.reserve(potentials_.size());
    full.reserve(potentials_.size());
    for (const auto& v : potentials_) {
        half.push_back(linalg::expi_hermitian(v, 0.5 * h));
        full.push_back(linalg::expi_hermitian(v, h));
    }
    apply_local(psi, half);
    for (long s = 0; s < steps; ++s) {
        apply_kinetic(psi, h);
        apply_local(psi, s + 1 == steps ? half : full);
    }
}

CVec SplitOperatorPropagator::evolve(const CVec& psi0, double t) const
{
    require(psi0.size() == dim(), "split operator: state dimension mismatch");
    CVec psi = psi0;
    advance(psi, t);
    return psi;
}

CMat SplitOperatorPropagator::evolve_many(const CVec& psi0, std::span<const double> times) const
{
    require(psi0.size() == dim(), "split operator: state dimension mismatch");
    CMat out(dim(), static_cast<Eigen::Index>(times.size()));
    CVec psi = psi0;
    double now = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < now) {
            psi = psi0;
            now = 0.0;
        }
        advance(psi, times[k] - now);
        now = times[k];
        out.col(static_cast<Eigen::Index>(k)) = psi;
    }
    return out;
}

CVec split_operator_propagate(const amol::AmolParams& params, const amol::LatticeGrid& grid,
                              const CVec& state, double t, double dt)
{
    return SplitOperatorPropagator(params, grid, dt).evolve(state, t);
}

} // namespace qce
