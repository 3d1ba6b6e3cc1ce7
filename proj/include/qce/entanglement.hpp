#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qce/spectral.hpp"
#include "qce/types.hpp"

namespace qce {

/// Subsystem dimensions (d1, d2); composite index = i1 * d2 + i2.
using Dims = std::pair<int, int>;

/// Reduced state of subsystem `keep` (0 or 1) of a pure state.
CMat partial_trace(const CVec& psi, Dims dims, int keep);
/// Reduced state of subsystem `keep` of a density matrix.
CMat partial_trace(const CMat& rho, Dims dims, int keep);

/// Eigenvalues below zero but above -tol are set to zero; larger negative
/// excursions are kept and logged.
CMat clamp_negative_eigenvalues(const CMat& rho, double tol = 1e-10);

double purity(const CMat& rho);

/// S = 1 - Tr(rho^2), clamped to [0, 1 - 1/d]. Requires unit trace.
double linear_entropy(const CMat& rho);

struct EntropySeries {
    std::vector<double> times;
    std::vector<double> values;
    Dims dims{0, 0};
    int keep = 1;
    std::string model;          // "amol" or "qkt"
    std::string initial_state;  // free-form descriptor
    std::string time_units;     // header comment value
};

/// Maps a (normalized) state to the reduced density matrix whose linear entropy is wanted.
using Reducer = std::function<CMat(const CVec&)>;

EntropySeries entropy_series(const Propagator& propagator, const CVec& psi0,
                             std::span<const double> times, Dims dims, int keep);
EntropySeries entropy_series(const Propagator& propagator, const CVec& psi0,
                             std::span<const double> times, const Reducer& reduce);

/// Evenly spaced samples t0, t0 + dt, ..., up to and including t1.
std::vector<double> uniform_times(double t0, double t1, double dt);

enum class Window { none, hann };

struct PowerSpectrum {
    std::vector<double> frequencies;  // angular frequency, rad per time unit
    std::vector<double> magnitudes;   // |DFT| of the windowed, mean-subtracted, padded signal
    double signal_energy = 0.0;       // sum of squared windowed samples
    int fft_length = 0;
};

/// Throws on non-uniform sampling or fewer than two samples.
PowerSpectrum power_spectrum(const EntropySeries& series, Window window = Window::hann,
                             int zero_pad = 4);

/// Geometric over arithmetic mean of the magnitudes, DC bin excluded.
double spectral_flatness(const PowerSpectrum& spectrum);

/// Normalized autocorrelation of the mean-subtracted values (lag 0 = 1).
std::vector<double> autocorrelation(std::span<const double> values);
/// Largest autocorrelation value after its first local minimum.
double secondary_autocorrelation_peak(std::span<const double> values);

enum class RiseModel { quadratic, exponential };
std::string to_string(RiseModel model);

struct TimeWindow {
    double begin = 0.0;
    double end = 0.0;
};

struct RiseFit {
    RiseModel model = RiseModel::quadratic;
    /// quadratic: {t0}; exponential: {rate, prefactor}, S = prefactor * exp(rate t).
    std::vector<std::pair<std::string, double>> params;
    /// Relative RMS residual with a degrees-of-freedom correction,
    /// sqrt(sum((fit - S) / S)^2 / (n - k)).
    double residual = 0.0;
    TimeWindow window;
    int n_points = 0;

    double param(const std::string& name) const;
};

/// Fit on samples with t in the window, t > 0 and S > 0. Needs at least 5 points.
RiseFit fit_initial_rise(const EntropySeries& series, RiseModel model, TimeWindow window);

struct RiseComparison {
    RiseFit quadratic;
    RiseFit exponential;
    RiseModel preferred = RiseModel::quadratic;
};

RiseComparison compare_rise_models(const EntropySeries& series, TimeWindow window);

/// From the first sample until S first reaches `fraction` of its first local maximum.
TimeWindow default_rise_window(const EntropySeries& series, double fraction = 0.2);
/// From the first sample with t > 0 up to the first local maximum.
TimeWindow pre_saturation_window(const EntropySeries& series);

} // namespace qce
