#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "qce/amol.hpp"
#include "qce/fft.hpp"
#include "qce/types.hpp"

namespace qce {

enum class SpectrumKind {
    hamiltonian,  // eigenvalues are energies E_i = hbar omega_i
    floquet       // eigenvalues are eigenphases phi_m in (-pi, pi], F|m> = exp(-i phi_m)|m>
};

std::string to_string(SpectrumKind kind);

/// Eigenbasis of a Hamiltonian or Floquet operator. Eigenvalues are sorted
/// ascending; `complete` is false when only the low-lying part of a large
/// spectrum was extracted.
struct SpectralDecomposition {
    SpectrumKind kind = SpectrumKind::hamiltonian;
    Vec eigenvalues;
    CMat eigenvectors;
    bool complete = true;
    std::vector<std::string> warnings;

    Eigen::Index dim() const { return eigenvectors.rows(); }
    Eigen::Index size() const { return eigenvalues.size(); }
    /// Operator rebuilt from the spectrum (H, or F for the Floquet kind).
    CMat reconstruct() const;
};

struct DecomposeOptions {
    /// Symmetry sectors (isometries whose columns jointly span the space); the
    /// operator is diagonalized block by block.
    std::vector<Eigen::SparseMatrix<cplx>> sectors;
    /// Blocks larger than this are not fully diagonalized; the lowest states
    /// are extracted until `reference` is captured to within `capture_tol`.
    Eigen::Index max_dense_dim = 4096;
    const CVec* reference = nullptr;
    double capture_tol = 1e-6;
    /// Relative Hermiticity / unitarity tolerance for accepting the input.
    double tolerance = 1e-10;
};

SpectralDecomposition decompose(const CMat& op, SpectrumKind kind, const DecomposeOptions& options = {});

struct SupportSpectrum {
    Vec eigenvalues;
    Vec populations;  // rho_ii = |<phi_i|psi0>|^2, ordered like the eigenvalues

    double total() const { return populations.sum(); }
    /// Indices of the `count` most populated eigenstates, by decreasing weight.
    std::vector<int> dominant(int count) const;
    /// Population summed over clusters of eigenvalues closer than `tol`
    /// (degenerate subspaces), as (mean eigenvalue, population) pairs.
    std::vector<std::pair<double, double>> aggregated(double tol) const;
};

SupportSpectrum support_spectrum(const SpectralDecomposition& decomp, const CVec& psi0);

/// Exact propagation in the eigenbasis. For the Floquet kind `t` counts kicks
/// and must be an integer.
CVec evolve(const SpectralDecomposition& decomp, const CVec& psi, double t);

/// Projection of psi onto the kept eigenvectors, evolved; optionally renormalized.
CVec truncated_evolution(const SpectralDecomposition& decomp, const CVec& psi,
                         std::span<const int> kept, double t, bool renormalize = false);

/// Common interface for anything that maps an initial state to later states.
class Propagator {
public:
    virtual ~Propagator() = default;
    virtual Eigen::Index dim() const = 0;
    virtual CVec evolve(const CVec& psi0, double t) const = 0;
    /// Column k is the state at times[k].
    virtual CMat evolve_many(const CVec& psi0, std::span<const double> times) const;
};

/// Propagation through a (possibly truncated) eigenbasis. Time samples are
/// evaluated in blocks as dense products over the populated eigenstates.
class SpectralPropagator final : public Propagator {
public:
    explicit SpectralPropagator(std::shared_ptr<const SpectralDecomposition> decomp);
    /// Restrict to the listed eigenstates (truncated evolution).
    SpectralPropagator(std::shared_ptr<const SpectralDecomposition> decomp, std::vector<int> kept,
                       bool renormalize);

    Eigen::Index dim() const override { return decomp_->dim(); }
    CVec evolve(const CVec& psi0, double t) const override;
    CMat evolve_many(const CVec& psi0, std::span<const double> times) const override;

private:
    std::shared_ptr<const SpectralDecomposition> decomp_;
    std::vector<int> kept_;
    bool renormalize_ = false;
};

/// One term of S(t) = 1 - sum C_ijkl exp(-i (w_ij + w_kl) t).
struct EntropyTerm {
    int i, j, k, l;
    cplx coefficient;
    double frequency;  // w_i - w_j + w_k - w_l
};

struct EntropyCoefficients {
    std::vector<int> retained;
    std::vector<EntropyTerm> terms;

    double entropy(double t) const;
    /// Purity sum before taking the real part; its imaginary part should vanish.
    cplx purity(double t) const;
};

/// Coefficients over the retained eigenstates for a bipartition dims = (d1, d2)
/// with subsystem 1 index major. Throws when |retained|^4 exceeds `max_terms`.
EntropyCoefficients entropy_reconstruction_coefficients(const SpectralDecomposition& decomp,
                                                        const CVec& psi0,
                                                        std::span<const int> retained,
                                                        std::pair<int, int> dims,
                                                        bool renormalize = false,
                                                        std::size_t max_terms = 1'000'000);

struct NearDegeneratePair {
    int first, second;  // indices into the decomposition
    double gap;
};

/// Adjacent eigenvalue pairs closer than gap_tol, sorted by gap. When `subset`
/// is non-empty only pairs adjacent within the subset are considered. Floquet
/// phases are compared on the circle.
std::vector<NearDegeneratePair> near_degenerate_pairs(const SpectralDecomposition& decomp,
                                                      double gap_tol,
                                                      std::span<const int> subset = {});

/// Default gap tolerances: 1e-2 rad for eigenphases, 0.5 E_R for energies.
double default_gap_tolerance(SpectrumKind kind);

/// Pair structure of the most populated eigenstates.
struct SupportStructure {
    std::vector<int> dominant;               // by decreasing population
    double population = 0.0;                 // carried by `dominant`
    std::vector<NearDegeneratePair> pairs;   // disjoint, closest first
    double max_pair_gap = 0.0;
    /// Smallest spacing between peaks, where a pair counts as one peak at its mean.
    double min_peak_spacing = 0.0;
    double gap_ratio = 0.0;                  // max_pair_gap / min_peak_spacing
    /// Gap of the most populated pair that is not exactly degenerate (gap > 1e-8), or 0.
    double dominant_pair_gap = 0.0;
};

SupportStructure analyze_support(const SpectralDecomposition& decomp, const SupportSpectrum& support,
                                 int top, double gap_tol);

/// Second-order (Strang) kinetic/potential splitting for the lattice, with the
/// spin-mixing potential exponentiated exactly at every grid point.
class SplitOperatorPropagator final : public Propagator {
public:
    SplitOperatorPropagator(const amol::AmolParams& params, const amol::LatticeGrid& grid, double dt);
    /// Arbitrary local (spin-space) potentials, one Hermitian matrix per grid point.
    SplitOperatorPropagator(const amol::LatticeGrid& grid, std::vector<CMat> local_potentials,
                            double dt);

    Eigen::Index dim() const override;
    CVec evolve(const CVec& psi0, double t) const override;
    CMat evolve_many(const CVec& psi0, std::span<const double> times) const override;
    double dt() const { return dt_; }

private:
    void advance(CVec& psi, double t) const;
    void apply_local(CVec& psi, const std::vector<CMat>& factors) const;
    void apply_kinetic(CVec& psi, double h) const;

    amol::LatticeGrid grid_;
    int spin_dim_;
    double dt_;
    std::vector<CMat> potentials_;
    Vec kinetic_;
    FftPlan plan_;
};

/// Convenience wrapper: propagate `state` for time t with step dt.
CVec split_operator_propagate(const amol::AmolParams& params, const amol::LatticeGrid& grid,
                              const CVec& state, double t, double dt);

} // namespace qce
