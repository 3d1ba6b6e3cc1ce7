#pragma once

#include <memory>
#include <span>

#include "qce/types.hpp"

namespace qce {

/// In-place complex DFT over `count` interleaved sequences of length `n`
/// (element k of sequence s lives at data[k * stride + s]). The inverse is
/// normalized by 1/n so forward followed by inverse is the identity.
class FftPlan {
public:
    FftPlan(int n, int count = 1);
    ~FftPlan();
    FftPlan(FftPlan&&) noexcept;
    FftPlan& operator=(FftPlan&&) noexcept;
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    int size() const { return n_; }
    int count() const { return count_; }

    void forward(std::span<cplx> data) const;
    void inverse(std::span<cplx> data) const;

private:
    struct Plans;
    int n_;
    int count_;
    std::unique_ptr<Plans> plans_;
};

/// Unnormalized forward DFT of a single sequence.
CVec dft(const CVec& x);
/// Normalized inverse DFT of a single sequence.
CVec idft(const CVec& x);

/// |DFT| of a real sequence, bins 0..n/2.
Vec real_dft_magnitude(std::span<const double> x);

} // namespace qce
