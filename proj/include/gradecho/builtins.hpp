#pragma once

// Named reference scenarios and sweeps.

#include "gradecho/sweep.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gradecho::builtins {

/// fig2a-beta1, fig2a-beta2, fig2a-beta4, fig2b, fig3a, fig3b, fig4b, fig4c,
/// oracle-ats, oracle-two-level.
const std::vector<std::string>& scenario_names();
std::optional<Scenario> scenario(const std::string& name);

/// fig4a-coarse.
const std::vector<std::string>& sweep_names();
std::optional<SweepSpec> sweep(const std::string& name);

/// Gaussian-beam profile, xi = 1e6, b = 1e7 beta, kappa = 5e-9, focus at 0.5 L.
Scenario focused_beam(double beta);

/// Linear profile, kappa = 5e-3, one flip to `flip_gain` at `flip_time`.
Scenario linear_gradient(double xi, double zeta, double flip_gain, double flip_time, double t_end);

/// Constant uniform control omega_c, regularized-delta probe (kappa = 1e-3)
/// arriving at t0 = 6 kappa, coherences recorded, t_end = t0 + 10.
Scenario oracle(double omega_c, double xi);

} // namespace gradecho::builtins
