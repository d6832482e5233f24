#include "gradecho/builtins.hpp"
#include "gradecho/metrics.hpp"
#include "gradecho/solver.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace gradecho;

namespace {

Scenario cheap(double xi = 2000.0, double zeta = 1000.0, double flip_gain = -1.0)
{
    Scenario s = builtins::linear_gradient(xi, zeta, flip_gain, 0.16, 0.3);
    s.grid.nz = 129;
    return s;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double max_abs(const std::vector<cplx>& a)
{
    double m = 0.0;
    for (auto v : a)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST_CASE("output is linear in the probe amplitude, including its phase")
{
    const Scenario s = cheap();
    const FieldRecord a = integrate(s);
    for (cplx k : {cplx(3.0, 0.0), cplx(0.0, 1.0), std::polar(0.25, -2.1)}) {
        CAPTURE(k);
        Scenario t = s;
        t.probe.amplitude *= k;
        const FieldRecord b = integrate(t);
        std::vector<cplx> scaled(a.probe_out.size());
        std::transform(a.probe_out.begin(), a.probe_out.end(), scaled.begin(), [&](cplx v) { return k * v; });
        CHECK(max_abs_diff(b.probe_out, scaled) <= 1e-12 * max_abs(scaled));
    }
}

TEST_CASE("reversing the sign of the control leaves the probe unchanged")
{
    Scenario s = cheap();
    s.outputs.coherences = true;
    s.outputs.snapshot_stride = 500;
    const FieldRecord a = integrate(s);
    Scenario t = s;
    t.profile = t.profile.scaled(-1.0);
    const FieldRecord b = integrate(t);
    CHECK(max_abs_diff(a.probe_out, b.probe_out) <= 1e-10 * max_abs(a.probe_out));
    CHECK(max_abs_diff(a.rho31, b.rho31) <= 1e-10 * max_abs(a.rho31));
    std::vector<cplx> neg(b.rho21.size());
    std::transform(b.rho21.begin(), b.rho21.end(), neg.begin(), [](cplx v) { return -v; });
    CHECK(max_abs_diff(a.rho21, neg) <= 1e-10 * max_abs(a.rho21));
}

TEST_CASE("no output before the probe arrives")
{
    for (const char* name : {"fig4b", "fig2a-beta1", "oracle-ats"}) {
        CAPTURE(name);
        Scenario s = *builtins::scenario(name);
        if (s.grid.nz == 0)
            s.grid.nz = 257;
        const FieldRecord r = integrate(s);
        const double edge = s.probe.leading_edge(1e-10);
        double early = 0.0;
        for (std::size_t i = 0; i < r.samples() && r.times[i] < edge; ++i)
            early = std::max(early, std::abs(r.probe_out[i]));
        CHECK(early <= 1e-10 * s.probe.peak_abs());
    }
}

TEST_CASE("efficiency stays in [0, 1] across random media")
{
    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<double> log_xi(std::log(100.0), std::log(8000.0));
    std::uniform_real_distribution<double> log_zeta(std::log(200.0), std::log(4000.0));
    std::uniform_real_distribution<double> gain(-2.0, -0.5);
    for (int i = 0; i < 8; ++i) {
        const Scenario s = cheap(std::exp(log_xi(rng)), std::exp(log_zeta(rng)), gain(rng));
        CAPTURE(s.medium.xi);
        const FieldRecord r = integrate(s);
        const auto m = metrics::compute_echo_metrics(r, metrics::protocol_for(s));
        CHECK(m.efficiency_R >= 0.0);
        CHECK(m.efficiency_R <= 1.0);
        CHECK(m.fidelity >= 0.0);
        CHECK(m.fidelity <= 1.0);
    }
}

TEST_CASE("output energy never exceeds input energy")
{
    const Scenario s = cheap(500.0, 300.0);
    const FieldRecord r = integrate(s);
    double e_in = 0.0, e_out = 0.0;
    for (std::size_t i = 1; i < r.samples(); ++i) {
        const double h = r.times[i] - r.times[i - 1];
        e_in += 0.5 * h * (std::norm(r.probe_in[i]) + std::norm(r.probe_in[i - 1]));
        e_out += 0.5 * h * (std::norm(r.probe_out[i]) + std::norm(r.probe_out[i - 1]));
    }
    CHECK(e_out < e_in);
}

TEST_CASE("refinement converges monotonically")
{
    Scenario s = cheap();
    s.grid.nz = 65;
    s.grid.dt = 2e-4;
    SolverOptions opts;
    opts.enforce_resolution = false;
    const ConvergenceReport c = convergence_check(s, 2, opts);
    REQUIRE(c.errors.size() == 2);
    CHECK(c.monotone);
    CHECK(c.errors[1] < c.errors[0]);
}
