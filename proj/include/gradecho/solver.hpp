#pragma once

#include "gradecho/kernels.hpp"
#include "gradecho/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace gradecho {

struct SolverOptions {
    kernels::Policy kernel = kernels::Policy::Serial;
    /// Refuse grids that violate the resolution rules of validate_scenario.
    bool enforce_resolution = true;
    /// Abort when any |rho| exceeds this (weak-probe normalization, |Omega_p0| ~ 1).
    double divergence_limit = 10.0;
    /// Upper bound on nz * steps.
    double max_work = 4e11;
    /// Refinement level k: 2^k times the steps per interval, (nz - 1) 2^k + 1
    /// z nodes, and 2^k times the record stride, so records of different levels
    /// share their sample times.
    int refinement = 0;
};

/// Output of one integration.
///
/// Probe traces are sampled every `grid.record_stride` steps plus the final
/// step. Coherence snapshots are stored row-major, one row of `z.size()`
/// values per entry of `snapshot_times`.
struct FieldRecord {
    std::string scenario_name;
    GridSpec grid;     // resolved grid actually used
    double length = 1.0;
    std::size_t steps = 0;

    std::vector<double> times;
    std::vector<cplx> probe_in;
    std::vector<cplx> probe_out;

    std::vector<double> snapshot_times;
    std::vector<double> z;
    std::vector<cplx> rho31;
    std::vector<cplx> rho21;

    std::size_t samples() const noexcept { return times.size(); }
    std::vector<double> intensity_out() const;
    std::vector<double> intensity_in() const;

    /// Index of the recorded z node nearest to zq.
    std::size_t nearest_z(double zq) const;
    cplx rho31_at(std::size_t snapshot, std::size_t iz) const { return rho31[snapshot * z.size() + iz]; }
    cplx rho21_at(std::size_t snapshot, std::size_t iz) const { return rho21[snapshot * z.size() + iz]; }
};

/// Integrates the Maxwell-Bloch system in the retarded frame:
///   d rho31/dT = -(Gamma/2 + i dp) rho31 + (i/2) Omega_c rho21 + (i/2) Omega_p
///   d rho21/dT = (i(dc - dp) - gamma) rho21 + (i/2) Omega_c rho31
///   d Omega_p/dz = i eta rho31
/// by classical RK4 in time; at every stage Omega_p(z) is rebuilt from the
/// boundary value by cumulative trapezoidal quadrature. Steps are aligned to
/// schedule breakpoints.
///
/// Throws ConfigError for invalid scenarios, DivergenceError on runaway or
/// non-finite coherences, ResourceError when the work budget is exceeded.
FieldRecord integrate(const Scenario& s, const SolverOptions& opts = {});

struct ConvergenceReport {
    std::vector<GridSpec> grids;
    /// Relative L2 difference of probe_out between consecutive levels.
    std::vector<double> errors;
    bool monotone = false;
    std::string note;
};

/// Runs levels 0..refinements (refinements >= 1) and compares consecutive
/// levels on the shared sample times. A level that diverges contributes an
/// infinite error.
ConvergenceReport convergence_check(const Scenario& s, int refinements, SolverOptions opts = {});

/// Relative L2 distance ||a - b|| / ||b||.
double relative_l2(std::span<const cplx> a, std::span<const cplx> b);

} // namespace gradecho
