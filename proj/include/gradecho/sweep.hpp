#pragma once

// Parameter-grid execution with an append-only JSONL checkpoint.

#include "gradecho/config.hpp"
#include "gradecho/metrics.hpp"
#include "gradecho/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gradecho {

struct SweepSpec {
    Scenario base;
    std::vector<SweepAxis> axes;
    /// Metric names written to the table; empty selects default_sweep_metrics().
    std::vector<std::string> metrics;
    int workers = 1;
    /// Empty disables checkpointing.
    std::string checkpoint;
    SolverOptions solver;
};

const std::vector<std::string>& default_sweep_metrics();
const std::vector<std::string>& known_metrics();
double metric_value(const metrics::EchoMetrics& m, const std::string& name);

/// Sets the scenario field addressed by `path`. Paths:
///   medium.{xi,length,gamma_decay,gamma_ground,delta_p,delta_c}
///   control.profile.{b,zeta,z_focus,rayleigh}
///   control.schedule.gain[i], control.schedule.t_start[i], control.schedule.ramp_time
///   probe.{t0,kappa}, grid.{nz,dt,t_end}, outputs.{efficiency_cut,echo_after}
/// Throws ConfigError if the path does not resolve on this scenario.
void set_parameter(Scenario& s, const std::string& path, double value);

/// Throws ConfigError for empty or duplicate axes, empty value lists,
/// unresolvable paths, unknown metrics, or workers < 1.
void check_sweep(const SweepSpec& spec);

struct SweepPoint {
    std::size_t index = 0;
    std::vector<double> coords; // one value per axis
    bool ok = false;
    std::string error;
    metrics::EchoMetrics metrics;
    std::optional<bool> dispersion;
};

struct SweepTable {
    std::vector<std::string> axis_paths;
    std::vector<std::size_t> shape;
    std::vector<std::string> metric_names;
    std::string spec_hash;
    /// Indexed by grid point; the last axis varies fastest.
    std::vector<SweepPoint> points;
    std::size_t computed = 0; // points integrated in this call
    std::size_t resumed = 0;  // points loaded from the checkpoint
    double wall_seconds = 0.0;

    bool complete() const noexcept;
};

struct SweepRunOptions {
    /// Reuse matching records from an existing checkpoint.
    bool resume = true;
    /// Stop after this many newly computed points (simulates an interrupt).
    std::optional<std::size_t> max_new_points;
};

/// Hash of the canonical base scenario, axes and metric list (not of the
/// worker count or checkpoint path).
std::string sweep_hash(const SweepSpec& spec);

/// Scenario for one grid point.
Scenario sweep_point_scenario(const SweepSpec& spec, std::size_t index);

/// Runs every pending grid point. Points are independent and use the serial
/// kernels, so the table does not depend on the worker count or on the
/// completion order. A checkpoint written for a different spec hash is an
/// error rather than being overwritten.
SweepTable run_sweep(const SweepSpec& spec, const SweepRunOptions& opts = {});

/// Long-format CSV, one row per point:
/// index, <axis paths>, status, <metrics>, dispersion_flag, error.
std::string sweep_csv(const SweepTable& t);

} // namespace gradecho
