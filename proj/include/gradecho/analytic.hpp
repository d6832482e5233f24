#pragma once

// Closed-form weak-probe solutions for a broadband (delta-like) probe and a
// constant or piecewise control, their phase-area generalization, the
// first-order scattering signal, and the phase-area echo-time predictor.

#include "gradecho/model.hpp"

#include <optional>
#include <vector>

namespace gradecho::analytic {

struct AnalyticParams {
    double omega_c = 0.0;     // constant control Rabi frequency
    double eta_z = 0.0;       // eta * z
    double gamma_decay = 1.0; // Gamma
    cplx probe_amp{1.0, 0.0}; // delta-pulse weight Omega_p0

    /// probe bandwidth > Gamma > Omega_c; advisory only.
    bool in_validity_regime(double probe_bandwidth) const noexcept;
};

double bessel_j0(double x);
double bessel_j1(double x);

/// i (Omega_p0 / 8) J0(sqrt(eta z T)) exp(-Gamma T / 4) cos(Omega_c T / 2).
/// Throws DomainError for T < 0.
cplx rho31_closed(const AnalyticParams& p, double T);

/// -(Omega_p0 / 8) J0(sqrt(eta z T)) exp(-Gamma T / 4) sin(Omega_c T / 2).
cplx rho21_closed(const AnalyticParams& p, double T);

/// Same forms with Omega_c T / 2 replaced by an accumulated phase angle
/// (see phase_area) for time-dependent real controls.
cplx rho31_closed_area(const AnalyticParams& p, double T, double angle);
cplx rho21_closed_area(const AnalyticParams& p, double T, double angle);

struct ProbeTail {
    /// Omega_p(T, z) / Omega_p0 without the forward delta(T) term.
    cplx tail;
    /// The forward delta(T) component, carried as a flag only.
    bool has_forward_delta = true;
};

/// -(1/4) sqrt(eta z / T) J1(sqrt(eta z T)) exp(-Gamma T / 4) cos(Omega_c T / 2).
/// Throws DomainError for T <= 0 (the prefactor is singular at T = 0).
ProbeTail probe_closed(const AnalyticParams& p, double T);
ProbeTail probe_closed_area(const AnalyticParams& p, double T, double angle);

/// (1/2) integral_{t0}^{t} Omega_c(t', z) dt', exact for piecewise schedules
/// (ramps are integrated in closed form). Throws DomainError if t < t0.
double phase_area(const ControlSchedule& schedule, const SpatialProfile& profile, double z,
                  double t0, double t, double length = 1.0);

/// Earliest t after the last flip with phase_area(t) = 0 at z_ref
/// (default: focus of the profile), found by bisection on each linear piece.
/// Empty if there is no flip or no zero crossing before t_end.
std::optional<double> predict_echo_time(const ControlSchedule& schedule,
                                        const SpatialProfile& profile, double t0, double t_end,
                                        std::optional<double> z_ref = std::nullopt,
                                        double length = 1.0);

/// Every zero crossing of the phase area in (t0, t_end], in order. For a
/// schedule with several flips this is the predicted echo train.
std::vector<double> echo_train(const ControlSchedule& schedule, double t0, double t_end);

/// |integral_0^L cos(Omega_c(z) T / 2) dz|^2 / L^2 by composite Simpson with
/// nquad intervals (nquad >= 16, rounded up to even). Throws DomainError
/// for T < 0 or nquad < 16.
double first_order_signal(const SpatialProfile& profile, double T, int nquad, double length = 1.0);

} // namespace gradecho::analytic
