#include "gradecho/errors.hpp"
#include "gradecho/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gradecho;
using namespace gradecho::metrics;

namespace {

std::vector<double> grid(double t_end, std::size_t n)
{
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

cplx gauss(double t, double t0, double k, cplx amp = 1.0)
{
    const double u = (t - t0) / k;
    return amp * std::exp(-u * u);
}

/// Input at t = 0.05, output = sqrt(R) * input delayed to 0.25 with width k_out.
FieldRecord synthetic(double R, double k_out = 0.005, cplx phase = 1.0)
{
    FieldRecord r;
    r.times = grid(0.4, 8001);
    for (double t : r.times) {
        r.probe_in.push_back(gauss(t, 0.05, 0.005));
        r.probe_out.push_back(gauss(t, 0.25, k_out, std::sqrt(R * 0.005 / k_out) * phase));
    }
    return r;
}

} // namespace

TEST_CASE("fwhm of a Gaussian intensity")
{
    const auto t = grid(1.0, 20001);
    std::vector<double> I;
    for (double x : t)
        I.push_back(std::norm(gauss(x, 0.4, 0.02)));
    CHECK(fwhm(t, I) == doctest::Approx(0.02 * std::sqrt(2.0 * std::log(2.0))).epsilon(1e-5));
}

TEST_CASE("fwhm clamps one-sided decays and rejects ambiguous traces")
{
    const auto t = grid(1.0, 1001);
    std::vector<double> decay;
    for (double x : t)
        decay.push_back(std::exp(-x / 0.1));
    CHECK(fwhm(t, decay) == doctest::Approx(0.1 * std::log(2.0)).epsilon(1e-4));

    std::vector<double> twin;
    for (double x : t)
        twin.push_back(std::norm(gauss(x, 0.3, 0.02)) + 0.9 * std::norm(gauss(x, 0.7, 0.02)));
    CHECK_THROWS_AS(fwhm(t, twin), MetricError);

    std::vector<double> small_side;
    for (double x : t)
        small_side.push_back(std::norm(gauss(x, 0.3, 0.02)) + 0.5 * std::norm(gauss(x, 0.7, 0.02)));
    CHECK(fwhm(t, small_side) == doctest::Approx(0.02 * std::sqrt(2.0 * std::log(2.0))).epsilon(1e-3));

    CHECK_THROWS_AS(fwhm(t, std::vector<double>(t.size(), 0.0)), MetricError);
    CHECK_THROWS_AS(fwhm(std::vector<double>{0.0}, std::vector<double>{1.0}), MetricError);
}

TEST_CASE("echo detection")
{
    const FieldRecord r = synthetic(0.8);
    const EchoPeak p = detect_echo(r, 0.16);
    REQUIRE(p.found);
    CHECK(p.time == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(p.value == doctest::Approx(0.8).epsilon(1e-6));
    CHECK_THROWS_AS(detect_echo(r, 0.4), DomainError);
    CHECK_FALSE(detect_echo(synthetic(0.0), 0.16).found);
}

TEST_CASE("storage efficiency")
{
    CHECK(storage_efficiency(synthetic(0.8), 0.16).value == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(storage_efficiency(synthetic(0.8, 0.0025), 0.16).value == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(storage_efficiency(synthetic(0.0), 0.16).value == 0.0);
    CHECK(storage_efficiency(synthetic(0.5), 0.16).truncated_at == 0.4);
    // A cut through the output pulse keeps only the part after it.
    CHECK(storage_efficiency(synthetic(0.5), 0.25).value == doctest::Approx(0.25).epsilon(1e-6));
    CHECK_THROWS_AS(storage_efficiency(synthetic(0.5), 0.5), DomainError);
}

TEST_CASE("classical fidelity")
{
    const FieldRecord same = synthetic(0.64, 0.005, std::polar(1.0, 0.7));
    const Fidelity f = classical_fidelity(same.times, same.probe_in, same.probe_out);
    CHECK(f.normalized == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f.overlap == doctest::Approx(0.64).epsilon(1e-9));
    CHECK(f.best_delay == doctest::Approx(0.2).epsilon(1e-9));

    // Width mismatch: |<g_a, g_b>|^2 / (|g_a|^2 |g_b|^2) = 2 k_a k_b / (k_a^2 + k_b^2).
    const FieldRecord narrow = synthetic(1.0, 0.0025);
    const Fidelity g = classical_fidelity(narrow.times, narrow.probe_in, narrow.probe_out);
    CHECK(g.normalized == doctest::Approx(2.0 * 0.005 * 0.0025 / (0.005 * 0.005 + 0.0025 * 0.0025)).epsilon(1e-6));

    FidelityOptions window;
    window.max_delay = 0.1;
    CHECK(classical_fidelity(same.times, same.probe_in, same.probe_out, window).normalized < 1e-6);

    CHECK_THROWS_AS(classical_fidelity(same.times, same.probe_in, std::vector<cplx>(same.times.size())),
                    MetricError);
}

TEST_CASE("fidelity on a non-uniform time axis")
{
    std::vector<double> t;
    for (int i = 0; i <= 4000; ++i)
        t.push_back(0.4 * std::pow(i / 4000.0, 1.1));
    std::vector<cplx> a, b;
    for (double x : t) {
        a.push_back(gauss(x, 0.1, 0.01));
        b.push_back(gauss(x, 0.3, 0.01, cplx(0.0, 0.5)));
    }
    const Fidelity f = classical_fidelity(t, a, b);
    CHECK(f.normalized == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(f.best_delay == doctest::Approx(0.2).epsilon(1e-3));
}

TEST_CASE("EIT baseline")
{
    CHECK(eit_baseline(2000.0).value == doctest::Approx(1.0 - 2.9 / 2000.0));
    CHECK_FALSE(eit_baseline(2000.0).flagged);
    CHECK(eit_baseline(2.9).flagged);
    CHECK(eit_baseline(1.0).value == 0.0);
}

TEST_CASE("feasibility arithmetic")
{
    const FeasibilityInput in;
    const auto g = feasibility(in, Geometry::GaussianBeam);
    // r = L / sqrt(b^2 - 1)
    CHECK(g.rayleigh_um == doctest::Approx(5e4 / std::sqrt(1e6 - 1.0)));
    CHECK(g.intensity_w_cm2 == doctest::Approx(1e-17 * std::pow(1000.0 / 26.24e-9, 2)));
    CHECK(g.spot_um2 == doctest::Approx(0.78 * g.rayleigh_um));
    CHECK(g.power_w == doctest::Approx(0.5 * g.intensity_w_cm2 * g.spot_um2 * 1e-8));

    const auto p = feasibility(in, Geometry::Perpendicular);
    CHECK(p.spot_um2 == doctest::Approx(std::numbers::pi * 5e4 * 5e4 / std::log(1000.0)));
    CHECK(p.rayleigh_um == 0.0);

    FeasibilityInput bad;
    bad.b = 1.0;
    CHECK_THROWS_AS(feasibility(bad, Geometry::GaussianBeam), DomainError);
    bad = {};
    bad.lifetime_s = 0.0;
    CHECK_THROWS_AS(feasibility(bad, Geometry::Perpendicular), DomainError);
}

TEST_CASE("aggregate echo metrics")
{
    const FieldRecord r = synthetic(0.8);
    Protocol p{0.16, 0.16};
    const EchoMetrics m = compute_echo_metrics(r, p);
    CHECK(m.echo_detected);
    CHECK(m.efficiency_R == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(m.echo_fwhm == doctest::Approx(m.input_fwhm).epsilon(1e-6));
    CHECK(m.input_peak_time == doctest::Approx(0.05));
    CHECK(m.fidelity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.fidelity_overlap == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(m.delay_bandwidth == doctest::Approx(0.2 / m.echo_fwhm).epsilon(1e-6));
    CHECK(dispersion_flag(m) == false);

    const EchoMetrics wide = compute_echo_metrics(synthetic(0.8, 0.0075), p);
    CHECK(dispersion_flag(wide) == true);

    const EchoMetrics none = compute_echo_metrics(synthetic(0.0), p);
    CHECK_FALSE(none.echo_detected);
    CHECK_FALSE(dispersion_flag(none).has_value());
    CHECK_THROWS_AS(delay_bandwidth(none), MetricError);
    CHECK_FALSE(none.note.empty());
}

TEST_CASE("protocol defaults")
{
    Scenario s;
    s.probe.t0 = 0.05;
    s.probe.kappa = 0.005;
    s.schedule = ControlSchedule({{0.0, 1.0}, {0.1, -1.0}, {0.2, 1.0}});
    Protocol p = protocol_for(s);
    CHECK(p.echo_after == 0.2);
    CHECK(p.efficiency_cut == 0.2);

    s.schedule = ControlSchedule::constant(1.0);
    p = protocol_for(s);
    CHECK(p.echo_after == doctest::Approx(0.065));

    s.outputs.efficiency_cut = 0.07;
    s.outputs.echo_after = 0.09;
    p = protocol_for(s);
    CHECK(p.efficiency_cut == 0.07);
    CHECK(p.echo_after == 0.09);
}
