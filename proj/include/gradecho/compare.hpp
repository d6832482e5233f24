#pragma once

// Solver output against the closed-form weak-probe solutions.

#include "gradecho/analytic.hpp"
#include "gradecho/solver.hpp"

#include <vector>

namespace gradecho {

struct ClosedFormComparison {
    double z = 0.0;        // recorded node used for the coherences
    bool in_validity = false;
    double t_min = 0.5;    // window in T = t - t0
    double t_max = 10.0;

    std::vector<double> T; // snapshot times in the window
    std::vector<cplx> rho31_solver, rho31_closed;
    std::vector<cplx> rho21_solver, rho21_closed;

    std::vector<double> T_tail; // record times in the window
    std::vector<cplx> tail_solver, tail_closed;

    double residual_rho31 = 0.0; // relative L2, closed form as reference
    double residual_rho21 = 0.0;
    double residual_tail = 0.0;
};

/// Requires a uniform control with a constant schedule and a record with
/// coherence snapshots. The delta weight is probe.area(); the tail is taken
/// at z = L. Throws DomainError otherwise.
ClosedFormComparison compare_closed_form(const Scenario& s, const FieldRecord& rec, double z_fraction,
                                         double t_min = 0.5, double t_max = 10.0);

} // namespace gradecho
