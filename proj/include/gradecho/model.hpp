#pragma once

// Domain types for the gradient-echo simulator.
//
// Unit system: rates are in units of Gamma0 = 1/tau (tau = excited-state
// lifetime), times in tau, positions in medium lengths. Control amplitudes are
// absolute rates, so MediumParams::gamma_decay may be set to zero without
// changing what a profile amplitude means.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gradecho {

using cplx = std::complex<double>;

struct MediumParams {
    double gamma_decay = 1.0;  // Gamma, decay rate of |3>
    double gamma_ground = 0.0; // ground-state decoherence
    double delta_p = 0.0;      // probe detuning
    double delta_c = 0.0;      // control detuning
    double xi = 0.0;           // optical depth
    double length = 1.0;       // L

    /// Propagation coupling eta = Gamma0 * xi / (2 L) with Gamma0 = 1, the
    /// unit rate. gamma_decay only damps rho31, so it can be switched off
    /// without removing the coupling.
    double eta() const noexcept { return xi / (2.0 * length); }

    /// Throws ConfigError unless gamma_decay >= 0, xi >= 0 and length > 0.
    void check() const;

    bool operator==(const MediumParams&) const = default;
};

struct UniformProfile {
    double b = 0.0;
    bool operator==(const UniformProfile&) const = default;
};

/// b / sqrt(1 + ((z - z_focus) / rayleigh)^2); z_focus and rayleigh are fractions of L.
struct GaussianBeamProfile {
    double b = 0.0;
    double z_focus = 1.0;
    double rayleigh = 0.2;
    bool operator==(const GaussianBeamProfile&) const = default;
};

/// zeta * z / L
struct LinearProfile {
    double zeta = 0.0;
    bool operator==(const LinearProfile&) const = default;
};

class SpatialProfile {
public:
    using Kind = std::variant<UniformProfile, GaussianBeamProfile, LinearProfile>;

    SpatialProfile() = default;
    SpatialProfile(Kind kind) : kind_(kind) {}

    static SpatialProfile uniform(double b) { return {UniformProfile{b}}; }
    static SpatialProfile gaussian_beam(double b, double z_focus, double rayleigh)
    {
        return {GaussianBeamProfile{b, z_focus, rayleigh}};
    }
    static SpatialProfile linear(double zeta) { return {LinearProfile{zeta}}; }

    /// Profile value at absolute position z in a medium of the given length.
    /// No domain check; see evaluate_control for the checked entry point.
    double value(double z, double length) const noexcept;

    /// Position of max |profile| on [0, length].
    double argmax_abs(double length) const noexcept;
    double max_abs(double length) const noexcept;

    /// Multiplies the amplitude parameter (b or zeta).
    SpatialProfile scaled(double factor) const;

    const Kind& kind() const noexcept { return kind_; }
    Kind& kind() noexcept { return kind_; }
    std::string kind_name() const;

    bool operator==(const SpatialProfile&) const = default;

private:
    Kind kind_{UniformProfile{}};
};

struct ScheduleSegment {
    double t_start = 0.0;
    double gain = 1.0;
    bool operator==(const ScheduleSegment&) const = default;
};

/// Piecewise temporal gain applied to the spatial profile. A sign change of
/// the gain is the pi phase flip of the control field. With ramp_time > 0
/// each transition is a cosine half-wave that starts at the segment start.
class ControlSchedule {
public:
    ControlSchedule() = default;
    ControlSchedule(std::vector<ScheduleSegment> segments, double ramp_time = 0.0)
        : segments_(std::move(segments)), ramp_time_(ramp_time) {}

    static ControlSchedule constant(double gain) { return ControlSchedule({{0.0, gain}}); }

    /// Throws ConfigError on empty schedule, first start != 0,
    /// non-increasing start times, negative or overlapping ramps.
    void check() const;

    double gain(double t) const noexcept;
    /// Exact integral of gain over [a, b] (a <= b).
    double integral(double a, double b) const noexcept;
    double max_abs_gain() const noexcept;

    /// Start times of segments whose gain has the opposite sign of the previous one.
    std::vector<double> flip_times() const;
    /// Times at which the gain is not smooth (segment starts and ramp ends), sorted, > 0.
    std::vector<double> breakpoints() const;

    const std::vector<ScheduleSegment>& segments() const noexcept { return segments_; }
    std::vector<ScheduleSegment>& segments() noexcept { return segments_; }
    double ramp_time() const noexcept { return ramp_time_; }
    void set_ramp_time(double r) noexcept { ramp_time_ = r; }

    bool operator==(const ControlSchedule&) const = default;

private:
    std::vector<ScheduleSegment> segments_{{0.0, 1.0}};
    double ramp_time_ = 0.0;
};

enum class ProbeShape { Gaussian, RegularizedDelta };

/// Boundary envelope Omega_p(t, 0).
///
/// Gaussian:         amplitude * exp(-((t - t0) / kappa)^2)
/// RegularizedDelta: the same Gaussian normalized to unit area, so the
///                   boundary approximates amplitude * delta(t - t0).
struct ProbePulse {
    cplx amplitude{1.0, 0.0};
    double t0 = 0.0;
    double kappa = 1.0;
    ProbeShape shape = ProbeShape::Gaussian;

    cplx value(double t) const noexcept;
    /// Weight of the equivalent delta pulse, i.e. the time integral of value().
    cplx area() const noexcept;
    double peak_abs() const noexcept;
    /// Earliest time at which |value| reaches `fraction` of its peak.
    double leading_edge(double fraction = 1e-10) const noexcept;

    bool operator==(const ProbePulse&) const = default;
};

/// Spatial/temporal discretization. Zero means "choose the default".
struct GridSpec {
    std::size_t nz = 0;
    double dt = 0.0;
    double t_end = 0.0;
    std::size_t record_stride = 0;
    bool operator==(const GridSpec&) const = default;
};

inline constexpr std::size_t kDefaultNz = 1024;
inline constexpr double kMaxPhasePerStep = 0.1;   // dt * max|Omega_c|
inline constexpr double kStepsPerKappa = 20.0;    // dt <= kappa / 20
inline constexpr std::size_t kMaxRecordSamples = 100000;

struct OutputSpec {
    bool coherences = false;
    std::size_t snapshot_stride = 0; // in steps; 0 -> about 200 snapshots
    std::size_t z_stride = 0;        // 0 -> about 256 z samples
    std::optional<double> efficiency_cut;
    std::optional<double> echo_after;
    bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
    std::string name = "custom";
    std::string notes;
    MediumParams medium;
    SpatialProfile profile;
    ControlSchedule schedule;
    ProbePulse probe;
    GridSpec grid;
    OutputSpec outputs;

    /// max over t and z of |Omega_c(t, z)|.
    double max_control() const noexcept;

    bool operator==(const Scenario&) const = default;
};

/// Omega_c(t, z) = gain(t) * profile(z). Throws DomainError if z is outside
/// [0, length] or t < 0.
double evaluate_control(const SpatialProfile& profile, const ControlSchedule& schedule,
                        double t, double z, double length = 1.0);

enum class Severity { Warning, Error };

struct Issue {
    Severity severity;
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Issue> issues;

    bool ok() const noexcept;
    std::size_t warnings() const noexcept;
    std::size_t errors() const noexcept;
    bool has(const std::string& code) const noexcept;
    std::string summary() const;
};

/// Grid with every defaulted field resolved.
GridSpec resolve_grid(const Scenario& s);

/// Structural problems and grid under-resolution are errors; violations of
/// the broadband ordering, ramp constraint and decay-time window are warnings.
ValidationReport validate_scenario(const Scenario& s);

/// Time-scaling map: control gains and xi multiplied by factor, every time
/// (t0, kappa, schedule, ramp, t_end, dt, metric cut times) divided by it.
/// The boundary peak of the probe is preserved.
/// Throws DomainError unless factor > 0.
Scenario scale_scenario(const Scenario& s, double factor);

} // namespace gradecho
