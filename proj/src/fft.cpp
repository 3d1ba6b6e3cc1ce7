#include "qce/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace qce {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(cplx* p)
{
    return reinterpret_cast<fftw_complex*>(p);
}

} // namespace

struct FftPlan::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    ~Plans()
    {
        std::lock_guard lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
    }
};

FftPlan::FftPlan(int n, int count) : n_(n), count_(count), plans_(std::make_unique<Plans>())
{
    require(n >= 1 && count >= 1, "FftPlan: sizes must be positive");
    std::vector<cplx> scratch(static_cast<std::size_t>(n) * count);
    int dims[1] = {n};
    std::lock_guard lock(planner_mutex());
    // FFTW_ESTIMATE keeps the plans (and therefore the output bits) independent
    // of timing measurements.
    plans_->fwd = fftw_plan_many_dft(1, dims, count, as_fftw(scratch.data()), nullptr, count, 1,
                                     as_fftw(scratch.data()), nullptr, count, 1, FFTW_FORWARD,
                                     FFTW_ESTIMATE);
    plans_->inv = fftw_plan_many_dft(1, dims, count, as_fftw(scratch.data()), nullptr, count, 1,
                                     as_fftw(scratch.data()), nullptr, count, 1, FFTW_BACKWARD,
                                     FFTW_ESTIMATE);
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::forward(std::span<cplx> data) const
{
    require(data.size() == static_cast<std::size_t>(n_) * count_, "FftPlan: buffer size mismatch");
    fftw_execute_dft(plans_->fwd, as_fftw(data.data()), as_fftw(data.data()));
}

void FftPlan::inverse(std::span<cplx> data) const
{
    require(data.size() == static_cast<std::size_t>(n_) * count_, "FftPlan: buffer size mismatch");
    fftw_execute_dft(plans_->inv, as_fftw(data.data()), as_fftw(data.data()));
    const double scale = 1.0 / n_;
    for (auto& v : data) v *= scale;
}

CVec dft(const CVec& x)
{
    CVec out = x;
    FftPlan(static_cast<int>(x.size())).forward({out.data(), static_cast<std::size_t>(out.size())});
    return out;
}

CVec idft(const CVec& x)
{
    CVec out = x;
    FftPlan(static_cast<int>(x.size())).inverse({out.data(), static_cast<std::size_t>(out.size())});
    return out;
}

Vec real_dft_magnitude(std::span<const double> x)
{
    const int n = static_cast<int>(x.size());
    require(n >= 1, "real_dft_magnitude: empty input");
    std::vector<double> in(x.begin(), x.end());
    std::vector<cplx> out(static_cast<std::size_t>(n / 2 + 1));
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(n, in.data(), as_fftw(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    Vec mag(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) mag(static_cast<Eigen::Index>(k)) = std::abs(out[k]);
    return mag;
}

} // namespace qce
