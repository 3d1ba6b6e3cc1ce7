#include <doctest.h>

#include "helpers.hpp"
#include "qce/linalg.hpp"
#include "qce/spin.hpp"

using namespace qce;

namespace {

CMat comm(const CMat& a, const CMat& b) { return a * b - b * a; }

} // namespace

TEST_CASE("su(2) commutation relations hold for F = 1/2 ... 25")
{
    for (int two_f = 1; two_f <= 50; ++two_f) {
        const auto ops = build_spin_operators(SpinSpace::from_twice(two_f));
        CAPTURE(two_f);
        CHECK(max_abs(comm(ops.fx, ops.fy) - I * ops.fz) < 1e-12 * std::max(1, two_f));
        CHECK(max_abs(comm(ops.fy, ops.fz) - I * ops.fx) < 1e-12 * std::max(1, two_f));
        CHECK(max_abs(comm(ops.fz, ops.fx) - I * ops.fy) < 1e-12 * std::max(1, two_f));
        const double f = 0.5 * two_f;
        const CMat casimir = ops.fx * ops.fx + ops.fy * ops.fy + ops.fz * ops.fz;
        CHECK(max_abs(casimir - f * (f + 1) * CMat::Identity(two_f + 1, two_f + 1)) < 1e-10 * f * f);
    }
}

TEST_CASE("basis ordering puts m = +F first")
{
    const SpinSpace s(4.0);
    CHECK(s.dim() == 9);
    CHECK(s.m(0) == 4.0);
    CHECK(s.m(8) == -4.0);
    const auto ops = build_spin_operators(s);
    CHECK(ops.fz(0, 0).real() == doctest::Approx(4.0));
}

TEST_CASE("spin space rejects non half-integers")
{
    CHECK_THROWS_AS(SpinSpace(0.3), DomainError);
    CHECK_THROWS_AS(SpinSpace(0.0), DomainError);
    CHECK_THROWS_AS(SpinSpace(-1.0), DomainError);
    CHECK_NOTHROW(SpinSpace(2.5));
}

TEST_CASE("coherent states point along their direction with minimal variance")
{
    const auto ops = build_spin_operators(SpinSpace(4.0));
    for (double theta : {0.0, 0.3, 1.27, pi / 2, 2.9, pi}) {
        for (double phi : {-2.0, 0.0, 0.7, 3.0}) {
            const CVec psi = spin_coherent_state(ops, theta, phi);
            const Axis n = bloch_direction(theta, phi);
            const Axis b = bloch_vector(ops, psi);
            CAPTURE(theta);
            CAPTURE(phi);
            for (int k = 0; k < 3; ++k) CHECK(b[k] == doctest::Approx(n[k]).epsilon(1e-12));
            // <(n.F)^2> - <n.F>^2 = 0 and the transverse variances are F/2.
            const CMat nf = ops.along(n);
            CHECK(std::abs(expectation(nf * nf, psi) - 16.0) < 1e-10);
            const Axis e1{std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
                          -std::sin(theta)};
            const CMat t1 = ops.along(e1);
            CHECK(expectation(t1 * t1, psi) == doctest::Approx(2.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("rotations are unitary and a 2 pi turn gives (-1)^(2F)")
{
    for (int two_f : {1, 2, 3, 8}) {
        const auto ops = build_spin_operators(SpinSpace::from_twice(two_f));
        const Axis axis{0.6, 0.0, 0.8};
        const CMat r = rotation_operator(ops, axis, 1.234);
        CHECK(linalg::unitarity_residual(r) < 1e-12);
        const CMat full = rotation_operator(ops, axis, 2 * pi);
        const double sign = two_f % 2 == 0 ? 1.0 : -1.0;
        CHECK(max_abs(full - sign * CMat::Identity(two_f + 1, two_f + 1)) < 1e-11);
    }
}

TEST_CASE("rotation matches an independent matrix exponential")
{
    const auto ops = build_spin_operators(SpinSpace(2.5));
    const Axis axis{0.0, 1.0, 0.0};
    const CMat expected = test::reference_propagator(ops.fy, 0.77);
    CHECK(max_abs(rotation_operator(ops, axis, 0.77) - expected) < 1e-12);
    CHECK_THROWS_AS(rotation_operator(ops, Axis{1.0, 1.0, 0.0}, 0.1), DomainError);
}
