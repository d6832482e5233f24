#pragma once

// Per-step kernels of the method-of-lines integrator.
//
// Two implementations share one interface: `serial` is the reference and
// `omp` is the OpenMP version. The OpenMP prefix sum uses a fixed block size,
// so its result does not depend on the number of threads; it differs from the
// serial sum only by reassociation.

#include "gradecho/model.hpp"

#include <span>

namespace gradecho::kernels {

struct BlochCoefficients {
    cplx decay31;  // -(Gamma/2 + i delta_p)
    cplx decay21;  // i(delta_c - delta_p) - gamma_ground
    cplx coupling; // i eta
    double dz = 0.0;
};

BlochCoefficients make_coefficients(const MediumParams& m, double dz);

inline constexpr std::size_t kScanBlock = 256;

namespace serial {

/// field[j] = boundary + coupling * trapz(r31[0..j]).
void propagate_field(cplx boundary, cplx coupling, double dz, std::span<const cplx> r31,
                     std::span<cplx> field);

/// Right-hand side of the two Bloch equations at every z.
void bloch_derivative(const BlochCoefficients& c, double gain, std::span<const double> profile,
                      std::span<const cplx> field, std::span<const cplx> r31,
                      std::span<const cplx> r21, std::span<cplx> d31, std::span<cplx> d21);

/// out = y + h * k
void stage(std::span<const cplx> y, std::span<const cplx> k, double h, std::span<cplx> out);

/// y += h/6 (k1 + 2 k2 + 2 k3 + k4)
void rk4_combine(std::span<cplx> y, std::span<const cplx> k1, std::span<const cplx> k2,
                 std::span<const cplx> k3, std::span<const cplx> k4, double h);

/// max |y|, or +inf if any entry is non-finite.
double max_abs(std::span<const cplx> y);

} // namespace serial

namespace omp {

void propagate_field(cplx boundary, cplx coupling, double dz, std::span<const cplx> r31,
                     std::span<cplx> field);
void bloch_derivative(const BlochCoefficients& c, double gain, std::span<const double> profile,
                      std::span<const cplx> field, std::span<const cplx> r31,
                      std::span<const cplx> r21, std::span<cplx> d31, std::span<cplx> d21);
void stage(std::span<const cplx> y, std::span<const cplx> k, double h, std::span<cplx> out);
void rk4_combine(std::span<cplx> y, std::span<const cplx> k1, std::span<const cplx> k2,
                 std::span<const cplx> k3, std::span<const cplx> k4, double h);
double max_abs(std::span<const cplx> y);

} // namespace omp

enum class Policy { Serial, OpenMP };

struct KernelSet {
    decltype(&serial::propagate_field) propagate_field;
    decltype(&serial::bloch_derivative) bloch_derivative;
    decltype(&serial::stage) stage;
    decltype(&serial::rk4_combine) rk4_combine;
    decltype(&serial::max_abs) max_abs;
};

KernelSet select(Policy p) noexcept;

} // namespace gradecho::kernels
