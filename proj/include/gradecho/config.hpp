#pragma once

// Scenario and sweep config files.
//
// INI-style text: `[section]` headers, `key = value` lines, `#` or `;`
// comments. Times carry a unit suffix (`tau` or `utau` = 1e-6 tau), rates carry
// `gamma`. Dimensionless values (xi, length, gains, z fractions, counts) are
// bare numbers.
//
//   [scenario]        name, notes
//   [medium]          xi (required), length, gamma_decay, gamma_ground, delta_p, delta_c
//   [probe]           t0, kappa (required), amplitude = re[, im], shape = gaussian | regularized_delta
//   [control.profile] kind (required) = uniform | gaussian_beam | linear;
//                     b (uniform, gaussian_beam), zeta (linear), z_focus, rayleigh
//   [control.schedule] segment = <t_start>, <gain> (repeated, in order), ramp_time
//   [grid]            t_end (required), nz, dt, record_stride
//   [outputs]         coherences, snapshot_stride, z_stride, efficiency_cut, echo_after
//   [sweep]           axis = <path>: v1, v2, ... (repeated), metrics = a, b, ..., workers, checkpoint

#include "gradecho/model.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gradecho {

struct SweepAxis {
    std::string path;
    std::vector<double> values;
    bool operator==(const SweepAxis&) const = default;
};

/// Raw [sweep] section; validated by the sweep module.
struct SweepSection {
    std::vector<SweepAxis> axes;
    std::vector<std::string> metrics;
    int workers = 1;
    std::string checkpoint;
    bool operator==(const SweepSection&) const = default;
};

struct ParsedConfig {
    Scenario scenario;
    std::optional<SweepSection> sweep;
};

/// Throws ConfigError("<source>:<line>: <field>: <reason>") on malformed
/// input, unknown sections or keys, missing unit suffixes or required fields.
ParsedConfig parse_config(std::string_view text, const std::string& source = "<config>");
ParsedConfig load_config(const std::string& path);

/// Canonical text; parse_config(serialize_scenario(s)).scenario == s.
/// Numbers use 17 significant digits.
std::string serialize_scenario(const Scenario& s);
std::string serialize_sweep(const SweepSection& sweep);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::uint64_t fnv1a(std::string_view bytes);

/// Applies "nz=...,dt=...[utau|tau]" grid overrides. Throws ConfigError.
void apply_grid_override(Scenario& s, std::string_view spec);

/// Parses "<number> <unit>" where unit must be one of `allowed`
/// (empty string for dimensionless). Returns the value in tau or Gamma.
double parse_quantity(std::string_view text, std::string_view field,
                      const std::vector<std::string_view>& allowed);

} // namespace gradecho
