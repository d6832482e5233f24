#pragma once

// Scalar diagnostics of a FieldRecord. All time integrals use the trapezoidal
// rule on the recorded samples; t_end stands in for an infinite upper limit.

#include "gradecho/solver.hpp"

#include <optional>
#include <span>
#include <string>

namespace gradecho::metrics {

/// Full width at half maximum of an intensity trace, with linear
/// interpolation of the half-maximum crossings. A side with no crossing is
/// clamped to the end of the trace (one-sided decays). Throws MetricError if
/// the trace has no positive peak or a secondary lobe exceeds 80% of the
/// peak.
double fwhm(std::span<const double> t, std::span<const double> intensity);

struct EchoPeak {
    bool found = false;
    double time = 0.0;
    double value = 0.0; // intensity at the interpolated peak
    std::size_t index = 0;
};

/// Global maximum of |probe_out|^2 for t > after, refined by a parabola
/// through the neighbouring samples. No echo when nothing exceeds
/// threshold * max|probe_in|^2. Throws DomainError if after >= t_end.
EchoPeak detect_echo(const FieldRecord& rec, double after, double threshold = 1e-10);

struct Efficiency {
    double value = 0.0;
    double truncated_at = 0.0; // upper integration limit actually used
};

/// integral_{t_cut}^{t_end} |out|^2 dt / integral_0^{t_end} |in|^2 dt.
Efficiency storage_efficiency(const FieldRecord& rec, double t_cut);

struct FidelityOptions {
    /// Delay search window (out relative to in); unbounded by default.
    double min_delay = -1e300;
    double max_delay = 1e300;
};

struct Fidelity {
    double normalized = 0.0; // max |<out, in(.-d)>|^2 / (|in|^2 |out|^2)
    double overlap = 0.0;    // max |<out, in(.-d)>|^2 / |in|^4 (includes amplitude loss)
    double best_delay = 0.0;
};

/// Delay-optimized classical fidelity between two traces sampled at the
/// same times `t`. Traces are resampled onto a uniform grid and correlated
/// by FFT. Throws MetricError for zero-energy traces.
Fidelity classical_fidelity(std::span<const double> t, std::span<const cplx> in_trace,
                            std::span<const cplx> out_trace, const FidelityOptions& opts = {});

struct EitBaseline {
    double value = 0.0;
    bool flagged = false; // xi <= 2.9: formula gives no positive efficiency
};

/// Optimal EIT retrieval efficiency 1 - 2.9 / xi.
EitBaseline eit_baseline(double xi);

enum class Geometry { GaussianBeam, Perpendicular };

struct FeasibilityInput {
    double b = 1000.0;           // peak Rabi frequency in units of Gamma
    double length_cm = 5.0;      // medium length
    double wavelength_nm = 780.0;
    double lifetime_s = 26.24e-9; // excited-state lifetime tau (87Rb D2 by default)
    /// Focal intensity c eps0 |E_c|^2 = coefficient * (b / tau)^2 in W s^2 / cm^2,
    /// from a dipole moment of 1e-29 C m.
    double intensity_coefficient = 1e-17;
};

struct FeasibilityReport {
    Geometry geometry = Geometry::GaussianBeam;
    double rayleigh_um = 0.0;      // r from b / sqrt(1 + (L/r)^2) = 1
    double intensity_w_cm2 = 0.0;  // c eps0 |E_c|^2
    double spot_um2 = 0.0;         // lambda r (Gaussian) or pi L^2 / ln b (perpendicular)
    double power_w = 0.0;          // K = 1/2 c eps0 |E_c|^2 * spot
};

/// Throws DomainError for b <= 1.
FeasibilityReport feasibility(const FeasibilityInput& in, Geometry g);

struct EchoMetrics {
    bool echo_detected = false;
    double echo_peak_time = 0.0;
    double echo_peak_value = 0.0;
    double echo_fwhm = 0.0;
    double input_peak_time = 0.0;
    double input_fwhm = 0.0;
    double efficiency_R = 0.0;
    double efficiency_truncated_at = 0.0;
    double fidelity = 0.0;
    double fidelity_overlap = 0.0;
    double delay_bandwidth = 0.0;
    std::string note;
};

/// (echo peak time - input peak time) / echo FWHM. Throws MetricError when
/// no echo was detected.
double delay_bandwidth(const EchoMetrics& m);

struct Protocol {
    double efficiency_cut = 0.0; // t_cut for storage_efficiency
    double echo_after = 0.0;     // search start for detect_echo and the echo window
};

/// Protocol from the scenario outputs; missing values default to the last
/// control flip, or the end of the input pulse if there is none.
Protocol protocol_for(const Scenario& s);

/// All metrics for one run. Echo-dependent fields stay zero when no echo is
/// found; the fidelity compares probe_in with probe_out restricted to
/// t > echo_after.
EchoMetrics compute_echo_metrics(const FieldRecord& rec, const Protocol& p);

/// Echo FWHM more than 25% above the input FWHM. Empty when no echo.
std::optional<bool> dispersion_flag(const EchoMetrics& m);

} // namespace gradecho::metrics
