#include "qce/amol_classical.hpp"

#include <algorithm>
#include <cmath>

namespace qce::amol {

namespace {

Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Effective field (B_x, 0, b sin 2z) in energy units.
Vec3 field(const AmolParams& params, double z)
{
    return {params.bx, 0.0, params.field_amplitude() * std::sin(2.0 * z)};
}

// Spin-term prefactor s F multiplying B . n in the energy.
double moment_scale(const AmolParams& params)
{
    return params.coupling_scale() * params.f;
}

// Substep weights of the symmetric second-order map, raised to `order` by
// recursive triple jumps.
std::vector<double> composition_weights(int order)
{
    require(order == 2 || order == 4 || order == 6 || order == 8,
            "classical integrator: order must be 2, 4, 6 or 8");
    std::vector<double> w{1.0};
    for (int k = 2; k < order; k += 2) {
        const double root = std::pow(2.0, 1.0 / (k + 1));
        const double outer = 1.0 / (2.0 - root);
        const double inner = -root * outer;
        std::vector<double> next;
        for (double f : {outer, inner, outer})
            for (double x : w) next.push_back(f * x);
        w = std::move(next);
    }
    return w;
}

// Exact flow of p^2/2M for time h.
void drift(ClassicalState& s, double h)
{
    s.z += s.p / mass * h;
}

// Exact flow of the potential at fixed z for time h: n precesses about B(z)
// and p picks up the time-integrated force.
void kick(ClassicalState& s, const AmolParams& params, double h)
{
    const double sc = params.coupling_scale();
    const double b = params.field_amplitude();
    const double a = params.lattice_amplitude();
    const double c2 = std::cos(2.0 * s.z);
    const double s2 = std::sin(2.0 * s.z);
    const Vec3 bf = field(params, s.z);
    const double bnorm = std::sqrt(dot(bf, bf));
    const double omega = sc * bnorm;

    double nz_integral = 0.0;
    if (bnorm == 0.0) {
        nz_integral = s.n[2] * h;
    } else {
        const Vec3 u{bf[0] / bnorm, bf[1] / bnorm, bf[2] / bnorm};
        const double un = dot(u, s.n);
        const Vec3 perp{s.n[0] - un * u[0], s.n[1] - un * u[1], s.n[2] - un * u[2]};
        const Vec3 side = cross(u, s.n);
        const double x = omega * h;
        double sin_term;
        double cos_term;
        if (std::abs(x) < 1e-4) {
            sin_term = h * (1.0 - x * x / 6.0);
            cos_term = 0.5 * omega * h * h * (1.0 - x * x / 12.0);
        } else {
            sin_term = std::sin(x) / omega;
            cos_term = (1.0 - std::cos(x)) / omega;
        }
        nz_integral = u[2] * un * h + perp[2] * sin_term + side[2] * cos_term;
        const double cx = std::cos(x);
        const double sx = std::sin(x);
        for (int i = 0; i < 3; ++i) s.n[static_cast<std::size_t>(i)] = un * u[static_cast<std::size_t>(i)] +
                                                                      perp[static_cast<std::size_t>(i)] * cx +
                                                                      side[static_cast<std::size_t>(i)] * sx;
    }
    s.p += 2.0 * a * s2 * h - 2.0 * moment_scale(params) * b * c2 * nz_integral;
}

void composed_step(ClassicalState& s, const AmolParams& params, const std::vector<double>& w, double h)
{
    double pending = 0.5 * w.front() * h;
    for (std::size_t i = 0; i < w.size(); ++i) {
        kick(s, params, pending);
        drift(s, w[i] * h);
        pending = 0.5 * w[i] * h + (i + 1 < w.size() ? 0.5 * w[i + 1] * h : 0.0);
    }
    kick(s, params, pending);
}

void check_step(const AmolParams& params, double dt)
{
    require(dt > 0.0 && std::isfinite(dt), "classical integrator: dt must be positive");
    const double rate = max_precession_rate(params);
    if (rate > 0.0 && dt > 2.0 * pi / (20.0 * rate))
        throw DomainError("classical integrator: dt = " + std::to_string(dt) +
                          " gives fewer than 20 steps per precession period");
}

double section_value(const ClassicalState& s, SectionVariable v)
{
    return v == SectionVariable::mu_y ? -s.n[1] : s.p;
}

double section_rate(const ClassicalState& s, const AmolParams& params, SectionVariable v)
{
    const ClassicalState d = derivatives(s, params);
    return v == SectionVariable::mu_y ? -d.n[1] : d.p;
}

} // namespace

ClassicalState to_classical(const PhasePoint& point)
{
    require(point.theta >= 0.0 && point.theta <= pi, "to_classical: theta must lie in [0, pi]");
    return {from_lambda(point.z), point.p,
            {std::sin(point.theta) * std::cos(point.phi), std::sin(point.theta) * std::sin(point.phi),
             std::cos(point.theta)}};
}

PhasePoint to_phase_point(const ClassicalState& state)
{
    const double nz = std::clamp(state.n[2], -1.0, 1.0);
    return {to_lambda(state.z), state.p, std::acos(nz), std::atan2(state.n[1], state.n[0])};
}

double classical_energy(const ClassicalState& state, const AmolParams& params)
{
    const Vec3 bf = field(params, state.z);
    return state.p * state.p / (2.0 * mass) + params.lattice_amplitude() * std::cos(2.0 * state.z) +
           moment_scale(params) * dot(bf, state.n);
}

ClassicalState derivatives(const ClassicalState& state, const AmolParams& params)
{
    const double b = params.field_amplitude();
    const Vec3 bf = field(params, state.z);
    const Vec3 torque = cross(bf, state.n);
    const double sc = params.coupling_scale();
    ClassicalState d;
    d.z = state.p / mass;
    d.p = 2.0 * params.lattice_amplitude() * std::sin(2.0 * state.z) -
          2.0 * moment_scale(params) * b * std::cos(2.0 * state.z) * state.n[2];
    d.n = {sc * torque[0], sc * torque[1], sc * torque[2]};
    return d;
}

double max_precession_rate(const AmolParams& params)
{
    return params.coupling_scale() * std::hypot(params.field_amplitude(), params.bx);
}

double minimum_energy(const AmolParams& params)
{
    // E(z) = a cos 2z - sF |B(z)| depends on z through 2z only; scan then polish.
    const double a = params.lattice_amplitude();
    const double b = params.field_amplitude();
    const double g = moment_scale(params);
    auto e = [&](double x) { return a * std::cos(x) - g * std::hypot(b * std::sin(x), params.bx); };
    constexpr int n = 4096;
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (e(2.0 * pi * i / n) < e(2.0 * pi * best / n)) best = i;
    double lo = 2.0 * pi * (best - 1) / n;
    double hi = 2.0 * pi * (best + 1) / n;
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double m1 = hi - ratio * (hi - lo);
        const double m2 = lo + ratio * (hi - lo);
        if (e(m1) < e(m2)) hi = m2;
        else lo = m1;
    }
    return e(0.5 * (lo + hi));
}

ClassicalState propagate(const ClassicalState& state, const AmolParams& params, double t,
                         const IntegratorOptions& options)
{
    params.validate();
    check_step(params, options.dt);
    const auto w = composition_weights(options.order);
    ClassicalState s = state;
    if (t == 0.0) return s;
    const auto steps = static_cast<long>(std::ceil(std::abs(t) / options.dt - 1e-9));
    const double h = t / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) composed_step(s, params, w, h);
    return s;
}

Trajectory integrate(const ClassicalState& state, const AmolParams& params, double t_final,
                     double sample_dt, const IntegratorOptions& options)
{
    params.validate();
    check_step(params, options.dt);
    require(sample_dt > 0.0, "integrate: sample_dt must be positive");
    const auto w = composition_weights(options.order);
    const double sign = t_final < 0.0 ? -1.0 : 1.0;
    const auto samples = static_cast<long>(std::floor(std::abs(t_final) / sample_dt + 1e-9));
    // Whole steps per sample interval so every sample lands on a step boundary.
    const auto per_sample = static_cast<long>(std::ceil(sample_dt / options.dt - 1e-9));
    const double h = sign * sample_dt / static_cast<double>(per_sample);

    Trajectory out;
    out.times.reserve(static_cast<std::size_t>(samples + 1));
    out.states.reserve(static_cast<std::size_t>(samples + 1));
    ClassicalState s = state;
    out.times.push_back(0.0);
    out.states.push_back(s);
    for (long k = 1; k <= samples; ++k) {
        for (long i = 0; i < per_sample; ++i) composed_step(s, params, w, h);
        out.times.push_back(sign * static_cast<double>(k) * sample_dt);
        out.states.push_back(s);
    }
    return out;
}

SectionResult poincare_section(const ClassicalState& ic, const AmolParams& params,
                               const SectionDef& section, int n_crossings, double t_max,
                               const IntegratorOptions& options)
{
    params.validate();
    check_step(params, options.dt);
    require(n_crossings >= 1, "poincare_section: n_crossings must be at least 1");
    require(section.direction == 1 || section.direction == -1, "poincare_section: direction must be +1 or -1");
    require(t_max > 0.0, "poincare_section: t_max must be positive");
    const auto w = composition_weights(options.order);
    const double h = options.dt;
    const auto var = section.variable;
    const double dir = section.direction;

    SectionResult out;
    ClassicalState s = ic;
    double t = 0.0;
    if (std::abs(section_value(s, var)) < 1e-12 && dir * section_rate(s, params, var) > 0.0)
        out.points.push_back({to_phase_point(s), 0.0});

    while (static_cast<int>(out.points.size()) < n_crossings) {
        if (t >= t_max) {
            out.complete = false;
            out.warning = "time budget exhausted after " + std::to_string(out.points.size()) + " of " +
                          std::to_string(n_crossings) + " crossings";
            break;
        }
        ClassicalState next = s;
        composed_step(next, params, w, h);
        const double g0 = dir * section_value(s, var);
        const double g1 = dir * section_value(next, var);
        if (g0 < 0.0 && g1 >= 0.0) {
            // Bisection on the sub-step duration.
            double lo = 0.0;
            double hi = h;
            ClassicalState hit = next;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                ClassicalState trial = s;
                composed_step(trial, params, w, mid);
                const double g = dir * section_value(trial, var);
                hit = trial;
                if (std::abs(g) < 1e-12 || hi - lo < 1e-15) {
                    lo = hi = mid;
                    break;
                }
                if (g < 0.0) lo = mid;
                else hi = mid;
            }
            if (std::abs(section_value(hit, var)) > 1e-9)
                throw ConvergenceError("poincare_section: crossing refinement did not converge");
            out.points.push_back({to_phase_point(hit), t + lo});
        }
        s = next;
        t += h;
    }
    return out;
}

double lyapunov_estimate(const ClassicalState& ic, const AmolParams& params, double t_total,
                         const IntegratorOptions& options, double renorm_interval, double d0)
{
    require(t_total > 0.0 && renorm_interval > 0.0 && d0 > 0.0,
            "lyapunov_estimate: times and d0 must be positive");
    params.validate();
    check_step(params, options.dt);
    const auto w = composition_weights(options.order);
    const auto per_interval = static_cast<long>(std::ceil(renorm_interval / options.dt - 1e-9));
    const double h = renorm_interval / static_cast<double>(per_interval);
    const auto intervals = static_cast<long>(std::round(t_total / renorm_interval));
    require(intervals >= 1, "lyapunov_estimate: t_total shorter than one renormalization interval");

    // Initial offset: equal parts along z, p and the polar direction of n.
    ClassicalState ref = ic;
    const double nz = std::clamp(ic.n[2], -1.0, 1.0);
    const double st = std::sqrt(std::max(0.0, 1.0 - nz * nz));
    Vec3 e_theta = st > 1e-12 ? Vec3{ic.n[0] * nz / st, ic.n[1] * nz / st, -st} : Vec3{1.0, 0.0, 0.0};
    const double c = d0 / std::sqrt(3.0);
    ClassicalState shadow = ic;
    shadow.z += c;
    shadow.p += c;
    for (int i = 0; i < 3; ++i) shadow.n[static_cast<std::size_t>(i)] += c * e_theta[static_cast<std::size_t>(i)];
    const double norm = std::sqrt(dot(shadow.n, shadow.n));
    for (auto& v : shadow.n) v /= norm;

    double log_sum = 0.0;
    for (long k = 0; k < intervals; ++k) {
        for (long i = 0; i < per_interval; ++i) {
            composed_step(ref, params, w, h);
            composed_step(shadow, params, w, h);
        }
        std::array<double, 5> delta{shadow.z - ref.z, shadow.p - ref.p, shadow.n[0] - ref.n[0],
                                    shadow.n[1] - ref.n[1], shadow.n[2] - ref.n[2]};
        double d = 0.0;
        for (double v : delta) d += v * v;
        d = std::sqrt(d);
        if (!(d > 0.0) || !std::isfinite(d))
            throw ConvergenceError("lyapunov_estimate: degenerate separation");
        log_sum += std::log(d / d0);
        const double f = d0 / d;
        shadow.z = ref.z + f * delta[0];
        shadow.p = ref.p + f * delta[1];
        for (int i = 0; i < 3; ++i)
            shadow.n[static_cast<std::size_t>(i)] = ref.n[static_cast<std::size_t>(i)] + f * delta[static_cast<std::size_t>(i + 2)];
        const double nn = std::sqrt(dot(shadow.n, shadow.n));
        for (auto& v : shadow.n) v /= nn;
    }
    return log_sum / (static_cast<double>(intervals) * renorm_interval);
}

PhasePoint seed_on_shell(const AmolParams& params, PhasePoint base, Coordinate coordinate,
                         double energy, double lo, double hi)
{
    require(hi > lo, "seed_on_shell: empty bracket");
    auto with = [&](double x) {
        PhasePoint q = base;
        switch (coordinate) {
        case Coordinate::z: q.z = x; break;
        case Coordinate::p: q.p = x; break;
        case Coordinate::theta: q.theta = x; break;
        case Coordinate::phi: q.phi = x; break;
        }
        return q;
    };
    auto f = [&](double x) { return classical_energy(to_classical(with(x)), params) - energy; };
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return with(lo);
    if (fhi == 0.0) return with(hi);
    if ((flo < 0.0) == (fhi < 0.0))
        throw DomainError("seed_on_shell: energy " + std::to_string(energy) + " not bracketed");
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return with(0.5 * (lo + hi));
}

} // namespace qce::amol
