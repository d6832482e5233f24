#include "gradecho/model.hpp"

#include "gradecho/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gradecho {

void MediumParams::check() const
{
    if (!(gamma_decay >= 0.0) || !std::isfinite(gamma_decay))
        throw ConfigError("medium.gamma_decay must be finite and >= 0");
    if (!(gamma_ground >= 0.0) || !std::isfinite(gamma_ground))
        throw ConfigError("medium.gamma_ground must be finite and >= 0");
    if (!(xi >= 0.0) || !std::isfinite(xi))
        throw ConfigError("medium.xi must be finite and >= 0");
    if (!(length > 0.0) || !std::isfinite(length))
        throw ConfigError("medium.length must be > 0");
    if (!std::isfinite(delta_p) || !std::isfinite(delta_c))
        throw ConfigError("medium detunings must be finite");
}

double SpatialProfile::value(double z, double length) const noexcept
{
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, UniformProfile>) {
                return p.b;
            } else if constexpr (std::is_same_v<T, GaussianBeamProfile>) {
                const double u = (z / length - p.z_focus) / p.rayleigh;
                return p.b / std::sqrt(1.0 + u * u);
            } else {
                return p.zeta * z / length;
            }
        },
        kind_);
}

double SpatialProfile::argmax_abs(double length) const noexcept
{
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, UniformProfile>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, GaussianBeamProfile>) {
                return std::clamp(p.z_focus, 0.0, 1.0) * length;
            } else {
                return length;
            }
        },
        kind_);
}

double SpatialProfile::max_abs(double length) const noexcept
{
    return std::abs(value(argmax_abs(length), length));
}

SpatialProfile SpatialProfile::scaled(double factor) const
{
    SpatialProfile out = *this;
    std::visit(
        [&](auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LinearProfile>)
                p.zeta *= factor;
            else
                p.b *= factor;
        },
        out.kind_);
    return out;
}

std::string SpatialProfile::kind_name() const
{
    switch (kind_.index()) {
    case 0: return "uniform";
    case 1: return "gaussian_beam";
    default: return "linear";
    }
}

void ControlSchedule::check() const
{
    if (segments_.empty())
        throw ConfigError("control.schedule has no segments");
    if (segments_.front().t_start != 0.0)
        throw ConfigError("control.schedule: first segment must start at t = 0");
    if (!(ramp_time_ >= 0.0) || !std::isfinite(ramp_time_))
        throw ConfigError("control.schedule.ramp_time must be >= 0");
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        if (!std::isfinite(segments_[k].gain) || !std::isfinite(segments_[k].t_start))
            throw ConfigError("control.schedule: non-finite segment");
        if (k > 0 && !(segments_[k].t_start > segments_[k - 1].t_start)) {
            std::ostringstream os;
            os << "control.schedule: segment " << k << " starts at " << segments_[k].t_start
               << " which is not after segment " << k - 1 << " at " << segments_[k - 1].t_start;
            throw ConfigError(os.str());
        }
        if (k > 0 && k + 1 < segments_.size() &&
            segments_[k].t_start + ramp_time_ > segments_[k + 1].t_start)
            throw ConfigError("control.schedule: ramp overlaps the next segment");
    }
}

double ControlSchedule::gain(double t) const noexcept
{
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const ScheduleSegment& s) { return v < s.t_start; });
    if (it == segments_.begin())
        return segments_.front().gain;
    const auto k = static_cast<std::size_t>(std::distance(segments_.begin(), it) - 1);
    if (k == 0 || ramp_time_ <= 0.0)
        return segments_[k].gain;
    const double u = t - segments_[k].t_start;
    if (u >= ramp_time_)
        return segments_[k].gain;
    const double g0 = segments_[k - 1].gain;
    const double dg = segments_[k].gain - g0;
    return g0 + dg * 0.5 * (1.0 - std::cos(std::numbers::pi * u / ramp_time_));
}

double ControlSchedule::integral(double a, double b) const noexcept
{
    if (b <= a)
        return 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const double s = (k == 0) ? -1e300 : segments_[k].t_start;
        const double e = (k + 1 < segments_.size()) ? segments_[k + 1].t_start : 1e300;
        const double lo = std::max(a, s);
        const double hi = std::min(b, e);
        if (hi <= lo)
            continue;
        const double g = segments_[k].gain;
        if (k == 0 || ramp_time_ <= 0.0) {
            total += g * (hi - lo);
            continue;
        }
        const double ramp_end = s + ramp_time_;
        const double rlo = lo;
        const double rhi = std::min(hi, ramp_end);
        if (rhi > rlo) {
            const double g0 = segments_[k - 1].gain;
            const double dg = g - g0;
            const double u1 = rlo - s;
            const double u2 = rhi - s;
            const double w = std::numbers::pi / ramp_time_;
            total += g0 * (u2 - u1) +
                     0.5 * dg * ((u2 - u1) - (std::sin(w * u2) - std::sin(w * u1)) / w);
        }
        const double clo = std::max(lo, ramp_end);
        if (hi > clo)
            total += g * (hi - clo);
    }
    return total;
}

double ControlSchedule::max_abs_gain() const noexcept
{
    double m = 0.0;
    for (const auto& s : segments_)
        m = std::max(m, std::abs(s.gain));
    return m;
}

std::vector<double> ControlSchedule::flip_times() const
{
    std::vector<double> out;
    for (std::size_t k = 1; k < segments_.size(); ++k)
        if (segments_[k].gain * segments_[k - 1].gain < 0.0)
            out.push_back(segments_[k].t_start);
    return out;
}

std::vector<double> ControlSchedule::breakpoints() const
{
    std::vector<double> out;
    for (std::size_t k = 1; k < segments_.size(); ++k) {
        out.push_back(segments_[k].t_start);
        if (ramp_time_ > 0.0)
            out.push_back(segments_[k].t_start + ramp_time_);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

cplx ProbePulse::value(double t) const noexcept
{
    const double u = (t - t0) / kappa;
    const double env = std::exp(-u * u);
    if (shape == ProbeShape::RegularizedDelta)
        return amplitude * (env / (kappa * std::sqrt(std::numbers::pi)));
    return amplitude * env;
}

cplx ProbePulse::area() const noexcept
{
    if (shape == ProbeShape::RegularizedDelta)
        return amplitude;
    return amplitude * (kappa * std::sqrt(std::numbers::pi));
}

double ProbePulse::peak_abs() const noexcept
{
    return std::abs(value(t0));
}

double ProbePulse::leading_edge(double fraction) const noexcept
{
    return t0 - kappa * std::sqrt(std::log(1.0 / fraction));
}

double Scenario::max_control() const noexcept
{
    return schedule.max_abs_gain() * profile.max_abs(medium.length);
}

double evaluate_control(const SpatialProfile& profile, const ControlSchedule& schedule, double t,
                        double z, double length)
{
    if (!(z >= 0.0 && z <= length)) {
        std::ostringstream os;
        os << "evaluate_control: z = " << z << " outside [0, " << length << "]";
        throw DomainError(os.str());
    }
    if (!(t >= 0.0))
        throw DomainError("evaluate_control: t must be >= 0");
    return schedule.gain(t) * profile.value(z, length);
}

bool ValidationReport::ok() const noexcept
{
    return errors() == 0;
}

std::size_t ValidationReport::warnings() const noexcept
{
    return static_cast<std::size_t>(std::count_if(
        issues.begin(), issues.end(), [](const Issue& i) { return i.severity == Severity::Warning; }));
}

std::size_t ValidationReport::errors() const noexcept
{
    return issues.size() - warnings();
}

bool ValidationReport::has(const std::string& code) const noexcept
{
    return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
}

std::string ValidationReport::summary() const
{
    std::ostringstream os;
    for (const auto& i : issues)
        os << (i.severity == Severity::Error ? "error" : "warning") << " [" << i.code << "] "
           << i.message << '\n';
    return os.str();
}

GridSpec resolve_grid(const Scenario& s)
{
    GridSpec g = s.grid;
    if (g.nz == 0)
        g.nz = kDefaultNz;
    if (g.dt <= 0.0) {
        double dt = s.probe.kappa / kStepsPerKappa;
        const double omax = s.max_control();
        if (omax > 0.0)
            dt = std::min(dt, kMaxPhasePerStep / omax);
        g.dt = dt;
    }
    if (g.record_stride == 0) {
        const double steps = g.t_end > 0.0 ? std::ceil(g.t_end / g.dt) : 1.0;
        g.record_stride = static_cast<std::size_t>(
            std::max(1.0, std::ceil(steps / static_cast<double>(kMaxRecordSamples))));
    }
    return g;
}

namespace {

void add(ValidationReport& r, Severity sev, std::string code, std::string msg)
{
    r.issues.push_back({sev, std::move(code), std::move(msg)});
}

} // namespace

ValidationReport validate_scenario(const Scenario& s)
{
    ValidationReport r;
    try {
        s.medium.check();
    } catch (const ConfigError& e) {
        add(r, Severity::Error, "medium", e.what());
    }
    try {
        s.schedule.check();
    } catch (const ConfigError& e) {
        add(r, Severity::Error, "schedule", e.what());
    }
    if (!(s.probe.kappa > 0.0))
        add(r, Severity::Error, "probe.kappa", "probe.kappa must be > 0");
    if (auto* g = std::get_if<GaussianBeamProfile>(&s.profile.kind()); g && !(g->rayleigh > 0.0))
        add(r, Severity::Error, "profile", "gaussian_beam rayleigh must be > 0");
    if (!r.ok())
        return r;

    const GridSpec g = resolve_grid(s);
    const double omax = s.max_control();
    if (g.nz < 2)
        add(r, Severity::Error, "grid.nz", "grid.nz must be >= 2");
    if (!(g.t_end > g.dt))
        add(r, Severity::Error, "grid.t_end", "grid.t_end must exceed dt");
    // Relative slack keeps round-tripped default grids from tripping the bound.
    constexpr double slack = 1.0 + 1e-9;
    if (g.dt * omax > kMaxPhasePerStep * slack) {
        std::ostringstream os;
        os << "dt * max|Omega_c| = " << g.dt * omax << " exceeds " << kMaxPhasePerStep;
        add(r, Severity::Error, "grid.control_resolution", os.str());
    }
    if (g.dt > s.probe.kappa / kStepsPerKappa * slack) {
        std::ostringstream os;
        os << "dt = " << g.dt << " exceeds kappa/" << kStepsPerKappa << " = "
           << s.probe.kappa / kStepsPerKappa;
        add(r, Severity::Error, "grid.probe_resolution", os.str());
    }

    const double bandwidth = 1.0 / s.probe.kappa;
    if (!(bandwidth > omax && omax > s.medium.gamma_decay)) {
        std::ostringstream os;
        os << "broadband ordering kappa^-1 > max|Omega_c| > Gamma violated: kappa^-1 = "
           << bandwidth << ", max|Omega_c| = " << omax << ", Gamma = " << s.medium.gamma_decay;
        add(r, Severity::Warning, "broadband_ordering", os.str());
    }
    if (s.schedule.ramp_time() > 0.0 && omax > 0.0 && s.schedule.ramp_time() > 1.0 / omax) {
        std::ostringstream os;
        os << "ramp time " << s.schedule.ramp_time() << " exceeds tau/b = " << 1.0 / omax;
        add(r, Severity::Warning, "ramp_time", os.str());
    }
    if (s.medium.gamma_decay * g.t_end >= 0.1) {
        std::ostringstream os;
        os << "simulated window Gamma*t_end = " << s.medium.gamma_decay * g.t_end
           << " is not short compared to tau; spontaneous decay is significant";
        add(r, Severity::Warning, "decay_window", os.str());
    }
    return r;
}

Scenario scale_scenario(const Scenario& s, double factor)
{
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw DomainError("scale_scenario: factor must be > 0");
    Scenario out = s;
    for (auto& seg : out.schedule.segments()) {
        seg.gain *= factor;
        seg.t_start /= factor;
    }
    out.schedule.set_ramp_time(s.schedule.ramp_time() / factor);
    out.medium.xi *= factor;
    out.probe.t0 /= factor;
    out.probe.kappa /= factor;
    // Keep the boundary peak fixed so the map is exact for both shapes.
    if (out.probe.shape == ProbeShape::RegularizedDelta)
        out.probe.amplitude /= factor;
    out.grid.t_end /= factor;
    out.grid.dt /= factor;
    if (out.outputs.efficiency_cut)
        *out.outputs.efficiency_cut /= factor;
    if (out.outputs.echo_after)
        *out.outputs.echo_after /= factor;
    return out;
}

} // namespace gradecho
