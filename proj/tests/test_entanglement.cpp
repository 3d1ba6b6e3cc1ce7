#include <doctest.h>

#include <memory>

#include "helpers.hpp"
#include "qce/entanglement.hpp"
#include "qce/threads.hpp"

using namespace qce;

namespace {

EntropySeries synthetic_series(double dt, int n, const std::function<double(double)>& f)
{
    EntropySeries s;
    for (int i = 0; i < n; ++i) {
        s.times.push_back(i * dt);
        s.values.push_back(f(i * dt));
    }
    return s;
}

CMat random_local_unitary(int d1, int d2)
{
    const CMat a = test::random_unitary(d1);
    const CMat b = test::random_unitary(d2);
    CMat out(d1 * d2, d1 * d2);
    for (int i = 0; i < d1; ++i)
        for (int k = 0; k < d1; ++k) out.block(i * d2, k * d2, d2, d2) = a(i, k) * b;
    return out;
}

} // namespace

TEST_CASE("partial traces agree with explicit summation")
{
    const CVec psi = test::random_state(15);
    CHECK(max_abs(partial_trace(psi, {3, 5}, 1) - test::brute_reduce_second(psi, 3, 5)) < 1e-14);
    CHECK(max_abs(partial_trace(psi, {3, 5}, 0) - test::brute_reduce_first(psi, 3, 5)) < 1e-14);
    const CMat rho = psi * psi.adjoint();
    CHECK(max_abs(partial_trace(rho, {3, 5}, 1) - partial_trace(psi, {3, 5}, 1)) < 1e-14);
    CHECK(max_abs(partial_trace(rho, {3, 5}, 0) - partial_trace(psi, {3, 5}, 0)) < 1e-14);
    CHECK_THROWS_AS(partial_trace(psi, {4, 4}, 1), DomainError);
    CHECK_THROWS_AS(partial_trace(psi, {3, 5}, 2), DomainError);
}

TEST_CASE("linear entropy of reference states")
{
    CVec product = CVec::Zero(4);
    product(0) = 1.0;
    CHECK(linear_entropy(partial_trace(product, {2, 2}, 1)) == 0.0);

    CVec bell = CVec::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    CHECK(linear_entropy(partial_trace(bell, {2, 2}, 1)) == doctest::Approx(0.5).epsilon(1e-14));

    for (int d : {3, 9}) {
        CVec maxent = CVec::Zero(d * d);
        for (int i = 0; i < d; ++i) maxent(i * d + i) = 1.0 / std::sqrt(double(d));
        CHECK(linear_entropy(partial_trace(maxent, {d, d}, 0)) ==
              doctest::Approx(1.0 - 1.0 / d).epsilon(1e-14));
    }
    CHECK_THROWS_AS(linear_entropy(CMat::Identity(2, 2)), DomainError);
}

TEST_CASE("Schmidt symmetry: both reductions share their purity")
{
    for (int trial = 0; trial < 20; ++trial) {
        const CVec psi = test::random_state(4 * 9);
        const double p0 = purity(partial_trace(psi, {4, 9}, 0));
        const double p1 = purity(partial_trace(psi, {4, 9}, 1));
        CHECK(std::abs(p0 - p1) < 1e-12);
        const double s = linear_entropy(partial_trace(psi, {4, 9}, 1));
        CHECK(s >= 0.0);
        CHECK(s <= 1.0 - 1.0 / 9.0);
    }
}

TEST_CASE("local unitaries leave the entropy unchanged")
{
    for (int trial = 0; trial < 10; ++trial) {
        const CVec psi = test::random_state(3 * 5);
        const CVec moved = random_local_unitary(3, 5) * psi;
        CHECK(std::abs(linear_entropy(partial_trace(psi, {3, 5}, 1)) -
                       linear_entropy(partial_trace(moved, {3, 5}, 1))) < 1e-12);
    }
}

TEST_CASE("tiny negative eigenvalues are clamped")
{
    CMat rho = CMat::Zero(2, 2);
    rho(0, 0) = 1.0 + 1e-12;
    rho(1, 1) = -1e-12;
    const CMat c = clamp_negative_eigenvalues(rho);
    CHECK(c(1, 1).real() == 0.0);
    CHECK(c(0, 0).real() == doctest::Approx(1.0));
    const CMat pos = CMat::Identity(2, 2) / 2.0;
    CHECK(clamp_negative_eigenvalues(pos) == pos);
}

TEST_CASE("entropy series is independent of the worker count")
{
    const CMat h = test::random_hermitian(12);
    auto d = std::make_shared<SpectralDecomposition>(decompose(h, SpectrumKind::hamiltonian));
    const SpectralPropagator prop(d);
    const CVec psi = test::random_state(12);
    const auto times = uniform_times(0.0, 50.0, 0.01);
    set_thread_count(1);
    const auto a = entropy_series(prop, psi, times, {3, 4}, 1);
    set_thread_count(4);
    const auto b = entropy_series(prop, psi, times, {3, 4}, 1);
    configure_threads_from_env();
    CHECK(a.values == b.values);
    CHECK(a.times.size() == 5001);
    CHECK(a.dims == Dims{3, 4});
    for (std::size_t k = 0; k < a.times.size(); k += 500) {
        const CVec psi_t = evolve(*d, psi, a.times[k]);
        CHECK(a.values[k] == doctest::Approx(1.0 - purity(test::brute_reduce_second(psi_t, 3, 4))).epsilon(1e-12));
    }
}

TEST_CASE("parallel_for rethrows task failures")
{
    CHECK_THROWS_AS(parallel_for(16, [](std::size_t i) {
                        if (i == 7) throw DomainError("boom");
                    }),
                    DomainError);
    std::vector<int> hits(100, 0);
    parallel_for(100, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST_CASE("uniform_times includes the end point")
{
    const auto t = uniform_times(0.0, 1.0, 0.1);
    CHECK(t.size() == 11);
    CHECK(t.back() == doctest::Approx(1.0));
    CHECK_THROWS_AS(uniform_times(0.0, 1.0, 0.0), DomainError);
}

TEST_CASE("power spectrum peaks at the signal frequency")
{
    const double omega = 3.0;
    const auto s = synthetic_series(0.01, 4000, [&](double t) { return 0.3 + 0.1 * std::sin(omega * t); });
    const auto ps = power_spectrum(s, Window::hann, 4);
    CHECK(ps.fft_length == 16000);
    const auto peak = std::max_element(ps.magnitudes.begin(), ps.magnitudes.end()) - ps.magnitudes.begin();
    const double bin = 2.0 * pi / (ps.fft_length * 0.01);
    CHECK(std::abs(ps.frequencies[static_cast<std::size_t>(peak)] - omega) <= bin);
    CHECK(ps.magnitudes[0] < 1e-2 * ps.magnitudes[static_cast<std::size_t>(peak)]);
}

TEST_CASE("flatness separates noise from a pure tone")
{
    std::normal_distribution<double> g;
    std::vector<double> noise(2048);
    for (auto& x : noise) x = g(test::rng());
    int i = 0;
    const auto white = synthetic_series(1.0, 2048, [&](double) { return noise[static_cast<std::size_t>(i++)]; });
    const auto tone = synthetic_series(1.0, 2048, [](double t) { return std::sin(0.5 * t); });
    const double fw = spectral_flatness(power_spectrum(white, Window::none, 1));
    const double ft = spectral_flatness(power_spectrum(tone, Window::hann, 4));
    CHECK(fw > 0.5);
    CHECK(ft < 0.2);
    CHECK(fw > ft);
}

TEST_CASE("non-uniform sampling is rejected")
{
    EntropySeries s;
    s.times = {0.0, 0.1, 0.3, 0.4};
    s.values = {0.0, 0.1, 0.2, 0.3};
    CHECK_THROWS_AS(power_spectrum(s), DomainError);
}

TEST_CASE("autocorrelation of a periodic signal")
{
    std::vector<double> v(400);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::cos(2.0 * pi * double(k) / 50.0);
    const auto ac = autocorrelation(v);
    CHECK(ac[0] == doctest::Approx(1.0));
    CHECK(ac[25] < -0.8);
    CHECK(secondary_autocorrelation_peak(v) > 0.8);
    std::vector<double> ramp(100);
    for (std::size_t k = 0; k < ramp.size(); ++k) ramp[k] = double(k);
    CHECK(secondary_autocorrelation_peak(ramp) < 0.5);
}

TEST_CASE("quadratic rise is recovered and preferred")
{
    const auto s = synthetic_series(0.0005, 101, [](double t) { return std::pow(t / 0.01, 2); });
    const auto cmp = compare_rise_models(s, {0.0, 0.00501});
    CHECK(cmp.preferred == RiseModel::quadratic);
    CHECK(cmp.quadratic.param("t0") == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(cmp.quadratic.residual < 1e-12);
    CHECK(cmp.quadratic.n_points == 10);
    CHECK_THROWS_AS(cmp.quadratic.param("rate"), DomainError);
}

TEST_CASE("exponential rise is recovered and preferred")
{
    const auto s = synthetic_series(1.0, 30, [](double t) { return 1e-3 * std::exp(0.4 * t); });
    const auto cmp = compare_rise_models(s, {1.0, 12.0});
    CHECK(cmp.preferred == RiseModel::exponential);
    CHECK(cmp.exponential.param("rate") == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(cmp.exponential.param("prefactor") == doctest::Approx(1e-3).epsilon(1e-10));
    CHECK_THROWS_AS(fit_initial_rise(s, RiseModel::quadratic, {1.0, 3.0}), DomainError);
}

TEST_CASE("rise windows")
{
    // Rises to a first maximum of 0.5 at t = 1, then dips.
    const auto s = synthetic_series(0.01, 300, [](double t) { return 0.5 * std::sin(pi * t / 2.0) * std::sin(pi * t / 2.0); });
    const auto w = default_rise_window(s, 0.2);
    CHECK(w.begin == 0.0);
    // 0.5 sin^2(pi t / 2) reaches 0.1 at t = (2 / pi) asin(sqrt(0.2)).
    CHECK(w.end == doctest::Approx(2.0 / pi * std::asin(std::sqrt(0.2))).epsilon(0.02));
    const auto p = pre_saturation_window(s);
    CHECK(p.begin == doctest::Approx(0.01));
    CHECK(p.end == doctest::Approx(1.0));
}
