#include "qce/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include "qce/fft.hpp"
#include "qce/threads.hpp"

namespace qce {

namespace {

void check_dims(Dims dims, Eigen::Index total, int keep)
{
    require(dims.first >= 1 && dims.second >= 1, "partial_trace: dimensions must be positive");
    require(static_cast<Eigen::Index>(dims.first) * dims.second == total,
            "partial_trace: d1 * d2 does not match the state dimension");
    require(keep == 0 || keep == 1, "partial_trace: keep must be 0 or 1");
}

} // namespace

CMat partial_trace(const CVec& psi, Dims dims, int keep)
{
    check_dims(dims, psi.size(), keep);
    const auto [d1, d2] = dims;
    // m(i2, i1) = psi[i1 * d2 + i2]
    const Eigen::Map<const CMat> m(psi.data(), d2, d1);
    if (keep == 1) return m * m.adjoint();
    return m.transpose() * m.conjugate();
}

CMat partial_trace(const CMat& rho, Dims dims, int keep)
{
    require(rho.rows() == rho.cols(), "partial_trace: density matrix must be square");
    check_dims(dims, rho.rows(), keep);
    const auto [d1, d2] = dims;
    if (keep == 0) {
        CMat out = CMat::Zero(d1, d1);
        for (int a = 0; a < d1; ++a)
            for (int b = 0; b < d1; ++b) out(a, b) = rho.block(a * d2, b * d2, d2, d2).trace();
        return out;
    }
    CMat out = CMat::Zero(d2, d2);
    for (int c = 0; c < d1; ++c) out += rho.block(c * d2, c * d2, d2, d2);
    return out;
}

CMat clamp_negative_eigenvalues(const CMat& rho, double tol)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(rho);
    Vec w = es.eigenvalues();
    if (w.minCoeff() >= 0.0) return rho;
    if (w.minCoeff() < -tol)
        spdlog::warn("reduced density matrix eigenvalue {:.3e} below -{:.0e}", w.minCoeff(), tol);
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) < 0.0 && w(i) >= -tol) w(i) = 0.0;
    return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

double purity(const CMat& rho)
{
    require(rho.rows() == rho.cols(), "purity: matrix must be square");
    // Tr(rho^2) = sum |rho_ab|^2 for Hermitian rho.
    return rho.cwiseAbs2().sum();
}

double linear_entropy(const CMat& rho)
{
    require(rho.rows() == rho.cols() && rho.rows() >= 1, "linear_entropy: matrix must be square");
    const double trace = rho.trace().real();
    require(std::abs(trace - 1.0) < 1e-8, "linear_entropy: density matrix trace is not 1");
    const double d = static_cast<double>(rho.rows());
    const double s = 1.0 - purity(rho);
    const double upper = 1.0 - 1.0 / d;
    if (s < -1e-9 || s > upper + 1e-9)
        spdlog::warn("linear entropy {:.12f} clamped to [0, {:.6f}]", s, upper);
    return std::clamp(s, 0.0, upper);
}

std::vector<double> uniform_times(double t0, double t1, double dt)
{
    require(dt > 0.0 && t1 >= t0, "uniform_times: need dt > 0 and t1 >= t0");
    const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = t0 + static_cast<double>(i) * dt;
    return out;
}

EntropySeries entropy_series(const Propagator& propagator, const CVec& psi0,
                             std::span<const double> times, Dims dims, int keep)
{
    check_dims(dims, propagator.dim(), keep);
    auto out = entropy_series(propagator, psi0, times,
                              [dims, keep](const CVec& psi) { return partial_trace(psi, dims, keep); });
    out.dims = dims;
    out.keep = keep;
    return out;
}

EntropySeries entropy_series(const Propagator& propagator, const CVec& psi0,
                             std::span<const double> times, const Reducer& reduce)
{
    require(psi0.size() == propagator.dim(), "entropy_series: state does not match the propagator");
    EntropySeries out;
    out.times.assign(times.begin(), times.end());
    out.values.assign(times.size(), 0.0);

    // Fixed chunk boundaries keep every value independent of the worker count.
    constexpr std::size_t chunk = 256;
    const std::size_t nchunks = (times.size() + chunk - 1) / chunk;
    parallel_for(nchunks, [&](std::size_t c) {
        const std::size_t begin = c * chunk;
        const std::size_t len = std::min(chunk, times.size() - begin);
        const CMat states = propagator.evolve_many(psi0, times.subspan(begin, len));
        for (std::size_t k = 0; k < len; ++k)
            out.values[begin + k] =
                linear_entropy(clamp_negative_eigenvalues(reduce(states.col(static_cast<Eigen::Index>(k)))));
    });
    return out;
}

PowerSpectrum power_spectrum(const EntropySeries& series, Window window, int zero_pad)
{
    const std::size_t n = series.values.size();
    require(n >= 2 && series.times.size() == n, "power_spectrum: need at least two samples");
    require(zero_pad >= 1, "power_spectrum: zero_pad must be at least 1");
    const double dt = (series.times.back() - series.times.front()) / static_cast<double>(n - 1);
    require(dt > 0.0, "power_spectrum: times must increase");
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(series.times[i] - series.times[i - 1] - dt) > 1e-6 * dt)
            throw DomainError("power_spectrum: sampling is not uniform");

    const double mean = std::accumulate(series.values.begin(), series.values.end(), 0.0) /
                        static_cast<double>(n);
    PowerSpectrum out;
    out.fft_length = static_cast<int>(n) * zero_pad;
    std::vector<double> x(static_cast<std::size_t>(out.fft_length), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        if (window == Window::hann)
            w = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(n - 1));
        x[i] = w * (series.values[i] - mean);
        out.signal_energy += x[i] * x[i];
    }
    const Vec mag = real_dft_magnitude(x);
    out.frequencies.resize(static_cast<std::size_t>(mag.size()));
    out.magnitudes.resize(static_cast<std::size_t>(mag.size()));
    for (Eigen::Index k = 0; k < mag.size(); ++k) {
        out.frequencies[static_cast<std::size_t>(k)] =
            2.0 * pi * static_cast<double>(k) / (out.fft_length * dt);
        out.magnitudes[static_cast<std::size_t>(k)] = mag(k);
    }
    return out;
}

double spectral_flatness(const PowerSpectrum& spectrum)
{
    require(spectrum.magnitudes.size() >= 2, "spectral_flatness: empty spectrum");
    double log_sum = 0.0;
    double sum = 0.0;
    const std::size_t count = spectrum.magnitudes.size() - 1;
    for (std::size_t k = 1; k < spectrum.magnitudes.size(); ++k) {
        const double m = spectrum.magnitudes[k];
        if (m <= 0.0) return 0.0;
        log_sum += std::log(m);
        sum += m;
    }
    const double arithmetic = sum / static_cast<double>(count);
    return std::exp(log_sum / static_cast<double>(count)) / arithmetic;
}

std::vector<double> autocorrelation(std::span<const double> values)
{
    const std::size_t n = values.size();
    require(n >= 2, "autocorrelation: need at least two samples");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = values[i] - mean;
    std::vector<double> out(n, 0.0);
    for (std::size_t lag = 0; lag < n; ++lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += x[i] * x[i + lag];
        out[lag] = s;
    }
    if (out[0] <= 0.0) return std::vector<double>(n, 0.0);
    const double norm = out[0];
    for (auto& v : out) v /= norm;
    return out;
}

double secondary_autocorrelation_peak(std::span<const double> values)
{
    const auto ac = autocorrelation(values);
    std::size_t i = 1;
    while (i + 1 < ac.size() && ac[i + 1] <= ac[i]) ++i;
    if (i + 1 >= ac.size()) return 0.0;
    // Only lags up to half the record carry enough overlap to be meaningful.
    const std::size_t stop = std::max(i + 1, ac.size() / 2);
    return *std::max_element(ac.begin() + static_cast<std::ptrdiff_t>(i),
                             ac.begin() + static_cast<std::ptrdiff_t>(stop));
}

std::string to_string(RiseModel model)
{
    return model == RiseModel::quadratic ? "quadratic" : "exponential";
}

double RiseFit::param(const std::string& name) const
{
    for (const auto& [key, value] : params)
        if (key == name) return value;
    throw DomainError("RiseFit: no parameter named " + name);
}

RiseFit fit_initial_rise(const EntropySeries& series, RiseModel model, TimeWindow window)
{
    require(series.times.size() == series.values.size(), "fit_initial_rise: malformed series");
    require(window.end > window.begin, "fit_initial_rise: empty window");
    std::vector<double> t;
    std::vector<double> s;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double ti = series.times[i];
        if (ti >= window.begin && ti <= window.end && ti > 0.0 && series.values[i] > 0.0) {
            t.push_back(ti);
            s.push_back(series.values[i]);
        }
    }
    if (t.size() < 5)
        throw DomainError("fit_initial_rise: window holds " + std::to_string(t.size()) +
                          " usable points, at least 5 are needed");
    const auto n = t.size();

    RiseFit fit;
    fit.model = model;
    fit.window = window;
    fit.n_points = static_cast<int>(n);
    std::vector<double> predicted(n);
    int k = 0;
    if (model == RiseModel::quadratic) {
        // S = c t^2 with c = sum(S t^2) / sum(t^4); t0 = c^(-1/2).
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += s[i] * t[i] * t[i];
            den += std::pow(t[i], 4);
        }
        const double c = num / den;
        require(c > 0.0, "fit_initial_rise: non-positive quadratic coefficient");
        fit.params = {{"t0", 1.0 / std::sqrt(c)}};
        for (std::size_t i = 0; i < n; ++i) predicted[i] = c * t[i] * t[i];
        k = 1;
    } else {
        // log S = log A + r t
        Eigen::MatrixXd a(static_cast<Eigen::Index>(n), 2);
        Vec b(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            a(static_cast<Eigen::Index>(i), 0) = 1.0;
            a(static_cast<Eigen::Index>(i), 1) = t[i];
            b(static_cast<Eigen::Index>(i)) = std::log(s[i]);
        }
        const Vec coef = a.colPivHouseholderQr().solve(b);
        fit.params = {{"rate", coef(1)}, {"prefactor", std::exp(coef(0))}};
        for (std::size_t i = 0; i < n; ++i) predicted[i] = std::exp(coef(0) + coef(1) * t[i]);
        k = 2;
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += std::pow((predicted[i] - s[i]) / s[i], 2);
    fit.residual = std::sqrt(ss / static_cast<double>(static_cast<int>(n) - k));
    return fit;
}

RiseComparison compare_rise_models(const EntropySeries& series, TimeWindow window)
{
    RiseComparison out{fit_initial_rise(series, RiseModel::quadratic, window),
                       fit_initial_rise(series, RiseModel::exponential, window),
                       RiseModel::quadratic};
    if (out.exponential.residual < out.quadratic.residual) out.preferred = RiseModel::exponential;
    return out;
}

namespace {

std::size_t first_local_max(const EntropySeries& series)
{
    const auto& v = series.values;
    require(v.size() >= 3, "rise window: series too short");
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] > v[i - 1] && v[i + 1] < v[i]) return i;
    return v.size() - 1;
}

} // namespace

TimeWindow default_rise_window(const EntropySeries& series, double fraction)
{
    require(fraction > 0.0 && fraction <= 1.0, "default_rise_window: fraction must be in (0, 1]");
    const std::size_t peak = first_local_max(series);
    const double threshold = fraction * series.values[peak];
    std::size_t end = peak;
    for (std::size_t i = 0; i <= peak; ++i)
        if (series.values[i] >= threshold) {
            end = i;
            break;
        }
    return {series.times.front(), series.times[end]};
}

TimeWindow pre_saturation_window(const EntropySeries& series)
{
    const std::size_t peak = first_local_max(series);
    auto it = std::find_if(series.times.begin(), series.times.end(), [](double t) { return t > 0.0; });
    require(it != series.times.end(), "pre_saturation_window: no positive times");
    return {*it, series.times[peak]};
}

} // namespace qce
