#include "gradecho/errors.hpp"
#include "gradecho/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gradecho;

TEST_CASE("spatial profiles")
{
    const auto g = SpatialProfile::gaussian_beam(10.0, 0.5, 0.2);
    CHECK(g.value(0.5, 1.0) == 10.0);
    CHECK(g.value(0.7, 1.0) == doctest::Approx(10.0 / std::sqrt(2.0)));
    CHECK(g.value(1.4, 2.0) == doctest::Approx(10.0 / std::sqrt(2.0)));
    CHECK(g.argmax_abs(2.0) == 1.0);
    CHECK(g.max_abs(1.0) == 10.0);
    CHECK(g.kind_name() == "gaussian_beam");

    const auto l = SpatialProfile::linear(1000.0);
    CHECK(l.value(0.0, 1.0) == 0.0);
    CHECK(l.value(0.25, 1.0) == 250.0);
    CHECK(l.max_abs(1.0) == 1000.0);
    CHECK(l.scaled(0.5).value(1.0, 1.0) == 500.0);

    const auto u = SpatialProfile::uniform(-0.3);
    CHECK(u.value(0.9, 1.0) == -0.3);
    CHECK(u.max_abs(1.0) == 0.3);
}

TEST_CASE("evaluate_control multiplies gain and profile and checks its domain")
{
    const auto p = SpatialProfile::linear(100.0);
    const ControlSchedule s({{0.0, 1.0}, {0.16, -2.0}});
    CHECK(evaluate_control(p, s, 0.1, 0.5) == 50.0);
    CHECK(evaluate_control(p, s, 0.16, 0.5) == -100.0);
    CHECK(evaluate_control(p, s, 0.2, 1.0) == -200.0);
    CHECK_THROWS_AS(evaluate_control(p, s, 0.1, 1.5), DomainError);
    CHECK_THROWS_AS(evaluate_control(p, s, 0.1, -0.1), DomainError);
    CHECK_THROWS_AS(evaluate_control(p, s, -1.0, 0.5), DomainError);
}

TEST_CASE("schedule gains, flips and breakpoints")
{
    const ControlSchedule s({{0.0, 4.0}, {1.0, -1.0}, {4.5, 4.0}, {6.5, -8.0}});
    CHECK(s.gain(0.5) == 4.0);
    CHECK(s.gain(1.0) == -1.0);
    CHECK(s.gain(7.0) == -8.0);
    CHECK(s.max_abs_gain() == 8.0);
    CHECK(s.flip_times() == std::vector<double>{1.0, 4.5, 6.5});
    CHECK(s.breakpoints() == std::vector<double>{1.0, 4.5, 6.5});
    CHECK(s.integral(0.0, 2.0) == doctest::Approx(3.0));
    CHECK(s.integral(2.0, 2.0) == 0.0);

    const ControlSchedule same_sign({{0.0, 1.0}, {1.0, 3.0}});
    CHECK(same_sign.flip_times().empty());
}

TEST_CASE("ramped schedule integral matches quadrature")
{
    const ControlSchedule s({{0.0, 1.0}, {0.3, -2.0}, {0.6, 0.5}}, 0.05);
    CHECK(s.gain(0.3) == doctest::Approx(1.0));
    CHECK(s.gain(0.325) == doctest::Approx(-0.5));
    CHECK(s.gain(0.35) == doctest::Approx(-2.0));
    CHECK(s.breakpoints() == std::vector<double>{0.3, 0.35, 0.6, 0.65});

    // Composite Simpson on a fine grid as the reference.
    auto simpson = [&](double a, double b) {
        const int n = 20000;
        const double h = (b - a) / n;
        double sum = s.gain(a) + s.gain(b);
        for (int i = 1; i < n; ++i)
            sum += (i % 2 ? 4.0 : 2.0) * s.gain(a + i * h);
        return sum * h / 3.0;
    };
    for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{0.31, 0.34}, std::pair{0.2, 0.62}})
        CHECK(s.integral(a, b) == doctest::Approx(simpson(a, b)).epsilon(1e-7));
}

TEST_CASE("schedule checks")
{
    CHECK_THROWS_AS(ControlSchedule(std::vector<ScheduleSegment>{}).check(), ConfigError);
    CHECK_THROWS_AS(ControlSchedule({{0.1, 1.0}}).check(), ConfigError);
    CHECK_THROWS_AS(ControlSchedule({{0.0, 1.0}, {0.5, 2.0}, {0.5, 3.0}}).check(), ConfigError);
    CHECK_THROWS_AS(ControlSchedule({{0.0, 1.0}, {0.5, 2.0}, {0.55, 3.0}}, 0.1).check(), ConfigError);
    CHECK_NOTHROW(ControlSchedule({{0.0, 1.0}, {0.5, -1.0}}, 0.1).check());
}

TEST_CASE("probe shapes")
{
    ProbePulse g{cplx(2.0, 0.0), 1.0, 0.1, ProbeShape::Gaussian};
    CHECK(g.value(1.0) == cplx(2.0, 0.0));
    CHECK(std::abs(g.value(1.1)) == doctest::Approx(2.0 * std::exp(-1.0)));
    CHECK(g.area().real() == doctest::Approx(2.0 * 0.1 * std::sqrt(std::numbers::pi)));
    CHECK(g.leading_edge(1e-10) == doctest::Approx(1.0 - 0.1 * std::sqrt(std::log(1e10))));

    ProbePulse d{cplx(0.0, 1.0), 0.5, 1e-3, ProbeShape::RegularizedDelta};
    CHECK(d.area() == cplx(0.0, 1.0));
    double sum = 0.0;
    for (int i = -10000; i <= 10000; ++i)
        sum += d.value(0.5 + i * 1e-6).imag() * 1e-6;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.peak_abs() == doctest::Approx(1.0 / (1e-3 * std::sqrt(std::numbers::pi))));
}

namespace {

Scenario base()
{
    Scenario s;
    s.medium.xi = 2000;
    s.profile = SpatialProfile::linear(1000);
    s.schedule = ControlSchedule({{0.0, 1.0}, {0.16, -1.0}});
    s.probe.kappa = 0.005;
    s.probe.t0 = 0.048;
    s.grid.t_end = 0.4;
    return s;
}

} // namespace

TEST_CASE("default grid resolution")
{
    Scenario s = base();
    GridSpec g = resolve_grid(s);
    CHECK(g.nz == kDefaultNz);
    CHECK(g.dt == doctest::Approx(1e-4));
    CHECK(g.record_stride == 1);

    s.schedule = ControlSchedule({{0.0, 1.0}, {0.16, -20.0}});
    CHECK(resolve_grid(s).dt == doctest::Approx(0.1 / 20000.0));

    s.grid.t_end = 40.0;
    g = resolve_grid(s);
    CHECK(std::ceil(40.0 / g.dt) / static_cast<double>(g.record_stride) <= kMaxRecordSamples);
}

TEST_CASE("validation codes")
{
    CHECK(validate_scenario(base()).ok());
    CHECK(validate_scenario(base()).has("broadband_ordering"));
    CHECK(validate_scenario(base()).has("decay_window"));

    Scenario s = base();
    s.probe.kappa = -1.0;
    CHECK(validate_scenario(s).has("probe.kappa"));

    s = base();
    s.medium.xi = -1.0;
    CHECK(validate_scenario(s).has("medium"));

    s = base();
    s.grid.dt = 1e-3;
    const auto r = validate_scenario(s);
    CHECK(r.has("grid.control_resolution"));
    CHECK(r.has("grid.probe_resolution"));
    CHECK(r.errors() == 2);
    CHECK(r.summary().find("grid.control_resolution") != std::string::npos);

    s = base();
    s.grid.t_end = 0.0;
    CHECK(validate_scenario(s).has("grid.t_end"));

    s = base();
    s.grid.nz = 1;
    CHECK(validate_scenario(s).has("grid.nz"));

    s = base();
    s.profile = SpatialProfile::gaussian_beam(1.0, 0.5, 0.0);
    CHECK(validate_scenario(s).has("profile"));

    s = base();
    s.schedule.set_ramp_time(0.01);
    CHECK(validate_scenario(s).has("ramp_time"));

    // kappa^-1 > max|Omega_c| > Gamma and a short window: no warnings.
    s = base();
    s.profile = SpatialProfile::linear(10.0);
    s.grid.t_end = 0.09;
    s.schedule = ControlSchedule({{0.0, 1.0}, {0.06, -1.0}});
    CHECK(validate_scenario(s).issues.empty());
}

TEST_CASE("time-scaling map")
{
    Scenario s = base();
    s.outputs.efficiency_cut = 0.065;
    s.schedule.set_ramp_time(1e-4);
    const Scenario t = scale_scenario(s, 0.1);
    CHECK(t.medium.xi == doctest::Approx(200.0));
    CHECK(t.schedule.segments()[1].t_start == doctest::Approx(1.6));
    CHECK(t.schedule.segments()[1].gain == doctest::Approx(-0.1));
    CHECK(t.schedule.ramp_time() == doctest::Approx(1e-3));
    CHECK(t.probe.kappa == doctest::Approx(0.05));
    CHECK(t.probe.t0 == doctest::Approx(0.48));
    CHECK(t.grid.t_end == doctest::Approx(4.0));
    CHECK(*t.outputs.efficiency_cut == doctest::Approx(0.65));
    CHECK(t.max_control() * t.probe.kappa == doctest::Approx(s.max_control() * s.probe.kappa));
    CHECK(t.probe.peak_abs() == doctest::Approx(s.probe.peak_abs()));

    s.probe.shape = ProbeShape::RegularizedDelta;
    CHECK(scale_scenario(s, 0.1).probe.peak_abs() == doctest::Approx(s.probe.peak_abs()));
    CHECK_THROWS_AS(scale_scenario(s, 0.0), DomainError);
    CHECK_THROWS_AS(scale_scenario(s, -2.0), DomainError);

    CHECK(scale_scenario(scale_scenario(s, 4.0), 0.25) == s);
}

TEST_CASE("coupling keeps the unit rate when decay is switched off")
{
    MediumParams m;
    m.xi = 20.0;
    CHECK(m.eta() == 10.0);
    m.gamma_decay = 0.0;
    CHECK(m.eta() == 10.0);
    m.length = 2.0;
    CHECK(m.eta() == 5.0);
}
