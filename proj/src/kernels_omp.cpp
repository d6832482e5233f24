#include "gradecho/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace gradecho::kernels::omp {

namespace {
// Below this size the OpenMP regions run on one thread; the arithmetic is identical.
constexpr std::size_t kParallelMin = 2048;
} // namespace

void propagate_field(cplx boundary, cplx coupling, double dz, std::span<const cplx> r31,
                     std::span<cplx> field)
{
    const std::size_t n = r31.size();
    if (n == 0)
        return;
    field[0] = boundary;
    if (n == 1)
        return;

    const double half = 0.5 * dz;
    const std::size_t m = n - 1; // number of trapezoid increments
    const std::size_t nblocks = (m + kScanBlock - 1) / kScanBlock;
    std::vector<cplx> block_sum(nblocks);
    const auto nb = static_cast<long>(nblocks);

#pragma omp parallel for schedule(static) if (n >= kParallelMin)
    for (long b = 0; b < nb; ++b) {
        const std::size_t lo = 1 + static_cast<std::size_t>(b) * kScanBlock;
        const std::size_t hi = std::min(n, lo + kScanBlock);
        cplx acc{0.0, 0.0};
        for (std::size_t j = lo; j < hi; ++j)
            acc += (r31[j - 1] + r31[j]) * half;
        block_sum[static_cast<std::size_t>(b)] = acc;
    }

    cplx running{0.0, 0.0};
    for (auto& s : block_sum) {
        const cplx next = running + s;
        s = running;
        running = next;
    }

#pragma omp parallel for schedule(static) if (n >= kParallelMin)
    for (long b = 0; b < nb; ++b) {
        const std::size_t lo = 1 + static_cast<std::size_t>(b) * kScanBlock;
        const std::size_t hi = std::min(n, lo + kScanBlock);
        cplx acc = block_sum[static_cast<std::size_t>(b)];
        for (std::size_t j = lo; j < hi; ++j) {
            acc += (r31[j - 1] + r31[j]) * half;
            field[j] = boundary + coupling * acc;
        }
    }
}

void bloch_derivative(const BlochCoefficients& c, double gain, std::span<const double> profile,
                      std::span<const cplx> field, std::span<const cplx> r31,
                      std::span<const cplx> r21, std::span<cplx> d31, std::span<cplx> d21)
{
    const auto n = static_cast<long>(r31.size());
#pragma omp parallel for schedule(static) if (n >= static_cast<long>(kParallelMin))
    for (long i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i);
        const double half_rabi = 0.5 * gain * profile[j];
        const cplx a = r31[j];
        const cplx b = r21[j];
        d31[j] = c.decay31 * a + cplx(-half_rabi * b.imag(), half_rabi * b.real()) +
                 cplx(-0.5 * field[j].imag(), 0.5 * field[j].real());
        d21[j] = c.decay21 * b + cplx(-half_rabi * a.imag(), half_rabi * a.real());
    }
}

void stage(std::span<const cplx> y, std::span<const cplx> k, double h, std::span<cplx> out)
{
    const auto n = static_cast<long>(y.size());
#pragma omp parallel for schedule(static) if (n >= static_cast<long>(kParallelMin))
    for (long i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i);
        out[j] = y[j] + h * k[j];
    }
}

void rk4_combine(std::span<cplx> y, std::span<const cplx> k1, std::span<const cplx> k2,
                 std::span<const cplx> k3, std::span<const cplx> k4, double h)
{
    const double w = h / 6.0;
    const auto n = static_cast<long>(y.size());
#pragma omp parallel for schedule(static) if (n >= static_cast<long>(kParallelMin))
    for (long i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i);
        y[j] += w * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
    }
}

double max_abs(std::span<const cplx> y)
{
    const auto n = static_cast<long>(y.size());
    double m2 = 0.0;
    bool finite = true;
#pragma omp parallel for schedule(static) reduction(max : m2) reduction(&& : finite) \
    if (n >= static_cast<long>(kParallelMin))
    for (long i = 0; i < n; ++i) {
        const double a = std::norm(y[static_cast<std::size_t>(i)]);
        if (!std::isfinite(a))
            finite = false;
        else if (a > m2)
            m2 = a;
    }
    return finite ? std::sqrt(m2) : std::numeric_limits<double>::infinity();
}

} // namespace gradecho::kernels::omp
