#include "gradecho/kernels.hpp"

#include <cmath>
#include <limits>

namespace gradecho::kernels {

BlochCoefficients make_coefficients(const MediumParams& m, double dz)
{
    BlochCoefficients c;
    c.decay31 = cplx(-0.5 * m.gamma_decay, -m.delta_p);
    c.decay21 = cplx(-m.gamma_ground, m.delta_c - m.delta_p);
    c.coupling = cplx(0.0, m.eta());
    c.dz = dz;
    return c;
}

namespace serial {

void propagate_field(cplx boundary, cplx coupling, double dz, std::span<const cplx> r31,
                     std::span<cplx> field)
{
    const std::size_t n = r31.size();
    if (n == 0)
        return;
    const double half = 0.5 * dz;
    cplx acc{0.0, 0.0};
    field[0] = boundary;
    for (std::size_t j = 1; j < n; ++j) {
        acc += (r31[j - 1] + r31[j]) * half;
        field[j] = boundary + coupling * acc;
    }
}

void bloch_derivative(const BlochCoefficients& c, double gain, std::span<const double> profile,
                      std::span<const cplx> field, std::span<const cplx> r31,
                      std::span<const cplx> r21, std::span<cplx> d31, std::span<cplx> d21)
{
    const std::size_t n = r31.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double half_rabi = 0.5 * gain * profile[j];
        const cplx a = r31[j];
        const cplx b = r21[j];
        // (i/2) Omega_c rho21 + (i/2) Omega_p
        d31[j] = c.decay31 * a + cplx(-half_rabi * b.imag(), half_rabi * b.real()) +
                 cplx(-0.5 * field[j].imag(), 0.5 * field[j].real());
        d21[j] = c.decay21 * b + cplx(-half_rabi * a.imag(), half_rabi * a.real());
    }
}

void stage(std::span<const cplx> y, std::span<const cplx> k, double h, std::span<cplx> out)
{
    for (std::size_t j = 0; j < y.size(); ++j)
        out[j] = y[j] + h * k[j];
}

void rk4_combine(std::span<cplx> y, std::span<const cplx> k1, std::span<const cplx> k2,
                 std::span<const cplx> k3, std::span<const cplx> k4, double h)
{
    const double w = h / 6.0;
    for (std::size_t j = 0; j < y.size(); ++j)
        y[j] += w * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
}

double max_abs(std::span<const cplx> y)
{
    double m2 = 0.0;
    for (const auto& v : y) {
        const double a = std::norm(v);
        if (!std::isfinite(a))
            return std::numeric_limits<double>::infinity();
        m2 = a > m2 ? a : m2;
    }
    return std::sqrt(m2);
}

} // namespace serial

KernelSet select(Policy p) noexcept
{
    if (p == Policy::OpenMP)
        return {&omp::propagate_field, &omp::bloch_derivative, &omp::stage, &omp::rk4_combine,
                &omp::max_abs};
    return {&serial::propagate_field, &serial::bloch_derivative, &serial::stage,
            &serial::rk4_combine, &serial::max_abs};
}

} // namespace gradecho::kernels
