#include "gradecho/builtins.hpp"

namespace gradecho::builtins {

namespace {

constexpr double kUtau = 1e-6;

} // namespace

Scenario focused_beam(double beta)
{
    Scenario s;
    s.name = "focused-beam";
    s.medium.xi = 1e6;
    s.profile = SpatialProfile::gaussian_beam(1e7 * beta, 0.5, 0.2);
    s.probe.kappa = 5e-9;
    s.probe.t0 = 6.0 * s.probe.kappa;
    s.schedule = ControlSchedule::constant(1.0);
    s.grid.t_end = 2.0 * kUtau;
    return s;
}

Scenario linear_gradient(double xi, double zeta, double flip_gain, double flip_time, double t_end)
{
    Scenario s;
    s.name = "linear-gradient";
    s.medium.xi = xi;
    s.profile = SpatialProfile::linear(zeta);
    s.probe.kappa = 5e-3;
    s.probe.t0 = 0.048;
    s.schedule = ControlSchedule({{0.0, 1.0}, {flip_time, flip_gain}});
    s.grid.t_end = t_end;
    s.outputs.efficiency_cut = 0.065;
    s.outputs.echo_after = flip_time;
    return s;
}

Scenario oracle(double omega_c, double xi)
{
    Scenario s;
    s.name = omega_c == 0.0 ? "oracle-two-level" : "oracle-ats";
    s.medium.xi = xi;
    s.profile = SpatialProfile::uniform(omega_c);
    s.probe.shape = ProbeShape::RegularizedDelta;
    s.probe.kappa = 1e-3;
    s.probe.t0 = 6.0 * s.probe.kappa;
    s.schedule = ControlSchedule::constant(1.0);
    s.grid.t_end = s.probe.t0 + 10.0;
    s.outputs.coherences = true;
    s.outputs.echo_after = s.probe.t0 + 0.5;
    s.outputs.efficiency_cut = s.probe.t0 + 0.5;
    return s;
}

const std::vector<std::string>& scenario_names()
{
    static const std::vector<std::string> n{"fig2a-beta1", "fig2a-beta2", "fig2a-beta4", "fig2b", "fig3a",
                                            "fig3b", "fig4b", "fig4c", "oracle-ats", "oracle-two-level"};
    return n;
}

std::optional<Scenario> scenario(const std::string& name)
{
    if (name.starts_with("fig2a-beta")) {
        const std::string b = name.substr(10);
        if (b != "1" && b != "2" && b != "4")
            return std::nullopt;
        Scenario s = focused_beam(std::stod(b));
        s.name = name;
        s.notes = "forward signal, no control flip; focus at 0.5 L";
        return s;
    }
    if (name == "fig2b") {
        Scenario s = focused_beam(2.0);
        s.name = name;
        s.notes = "pi phase flip of the control at 1.8 utau; focus at 0.5 L";
        s.schedule = ControlSchedule({{0.0, 1.0}, {1.8 * kUtau, -1.0}});
        s.grid.t_end = 5.0 * kUtau;
        s.outputs.echo_after = 1.8 * kUtau;
        s.outputs.efficiency_cut = 1.8 * kUtau;
        return s;
    }
    if (name == "fig3a" || name == "fig3b") {
        Scenario s = focused_beam(1.0);
        s.name = "fig3a";
        s.notes = "switch sequence 4, -1, 4, -8; probe arrival t0 = 0.55 utau inferred from phase-area "
                  "cancellation at the first echo (2.8 utau), not a given parameter; focus at 0.5 L";
        s.probe.t0 = 0.55 * kUtau;
        s.schedule = ControlSchedule(
            {{0.0, 4.0}, {1.0 * kUtau, -1.0}, {4.5 * kUtau, 4.0}, {6.5 * kUtau, -8.0}});
        s.grid.t_end = 8.0 * kUtau;
        s.outputs.echo_after = 1.0 * kUtau;
        s.outputs.efficiency_cut = 1.0 * kUtau;
        if (name == "fig3b") {
            s = scale_scenario(s, 1e-5);
            s.name = name;
            s.notes = "fig3a mapped by the time-scaling symmetry with factor 1e-5 (xi = 10, "
                      "peak control 4e-5 x 1e7 Gamma); spontaneous decay is no longer negligible";
        }
        return s;
    }
    if (name == "fig4b" || name == "fig4c") {
        const double gain = name == "fig4b" ? -1.0 : -2.0;
        Scenario s = linear_gradient(2000.0, 1000.0, gain, 0.16, 0.4);
        s.name = name;
        s.notes = gain == -1.0 ? "linear gradient, flip to -1 at 0.16 tau"
                               : "linear gradient, flip to -2 at 0.16 tau (doubled rephasing rate)";
        return s;
    }
    if (name == "oracle-ats")
        return oracle(0.3, 20.0);
    if (name == "oracle-two-level")
        return oracle(0.0, 20.0);
    return std::nullopt;
}

const std::vector<std::string>& sweep_names()
{
    static const std::vector<std::string> n{"fig4a-coarse"};
    return n;
}

std::optional<SweepSpec> sweep(const std::string& name)
{
    if (name != "fig4a-coarse")
        return std::nullopt;
    SweepSpec spec;
    spec.base = linear_gradient(2000.0, 1000.0, -1.0, 0.065, 0.25);
    spec.base.name = name;
    spec.base.notes = "efficiency contour protocol: flip and cut at 0.065 tau";
    spec.axes = {{"medium.xi", {500.0, 1000.0, 2000.0, 4000.0, 8000.0}},
                 {"control.profile.zeta", {250.0, 500.0, 1000.0, 2000.0, 4000.0}}};
    spec.metrics = {"efficiency_R", "echo_peak_time", "echo_fwhm", "input_fwhm", "fidelity"};
    spec.workers = 1;
    return spec;
}

} // namespace gradecho::builtins
