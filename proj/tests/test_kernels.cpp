#include "gradecho/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace gradecho;
using namespace gradecho::kernels;

namespace {

std::vector<cplx> wave(std::size_t n, double f)
{
    std::vector<cplx> v(n);
    for (std::size_t j = 0; j < n; ++j)
        v[j] = cplx(std::sin(f * j), std::cos(0.7 * f * j + 0.3));
    return v;
}

double rel(std::span<const cplx> a, std::span<const cplx> b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return num / den;
}

} // namespace

TEST_CASE("field propagation is the cumulative trapezoid")
{
    // rho31 = z gives field = 1 + coupling z^2 / 2 exactly under the trapezoid rule.
    const std::size_t n = 101;
    const double dz = 1.0 / (n - 1);
    std::vector<cplx> r31(n), field(n);
    for (std::size_t j = 0; j < n; ++j)
        r31[j] = j * dz;
    serial::propagate_field(1.0, cplx(0.0, 2.0), dz, r31, field);
    for (std::size_t j = 0; j < n; ++j)
        CHECK(std::abs(field[j] - cplx(1.0, (j * dz) * (j * dz))) < 1e-14);
}

TEST_CASE("Bloch right-hand side")
{
    MediumParams m;
    m.gamma_decay = 1.0;
    m.gamma_ground = 0.1;
    m.delta_p = 0.5;
    m.delta_c = 0.2;
    m.xi = 4.0;
    const auto c = make_coefficients(m, 0.25);
    CHECK(c.decay31 == cplx(-0.5, -0.5));
    CHECK(std::abs(c.decay21 - cplx(-0.1, -0.3)) < 1e-15);
    CHECK(c.coupling == cplx(0.0, 2.0));

    const std::vector<double> prof{2.0};
    const std::vector<cplx> field{cplx(1.0, 0.0)}, r31{cplx(0.1, 0.2)}, r21{cplx(-0.3, 0.05)};
    std::vector<cplx> d31(1), d21(1);
    serial::bloch_derivative(c, -1.5, prof, field, r31, r21, d31, d21);
    const cplx I(0.0, 1.0);
    const double oc = -3.0;
    CHECK(std::abs(d31[0] - (c.decay31 * r31[0] + 0.5 * I * oc * r21[0] + 0.5 * I * field[0])) < 1e-15);
    CHECK(std::abs(d21[0] - (c.decay21 * r21[0] + 0.5 * I * oc * r31[0])) < 1e-15);
}

TEST_CASE("serial and OpenMP kernels agree")
{
    MediumParams m;
    m.xi = 2000.0;
    m.gamma_ground = 0.01;
    for (std::size_t n : {std::size_t{2}, std::size_t{255}, std::size_t{1024}, std::size_t{2049},
                          std::size_t{4097}, std::size_t{70001}}) {
        CAPTURE(n);
        const double dz = 1.0 / (n - 1);
        const auto c = make_coefficients(m, dz);
        const auto r31 = wave(n, 0.013), r21 = wave(n, 0.021);
        std::vector<double> prof(n);
        for (std::size_t j = 0; j < n; ++j)
            prof[j] = 1000.0 * j * dz;

        std::vector<cplx> fa(n), fb(n);
        serial::propagate_field(cplx(0.3, -0.1), c.coupling, dz, r31, fa);
        omp::propagate_field(cplx(0.3, -0.1), c.coupling, dz, r31, fb);
        CHECK(rel(fb, fa) <= 1e-12);

        std::vector<cplx> a31(n), a21(n), b31(n), b21(n);
        serial::bloch_derivative(c, -1.0, prof, fa, r31, r21, a31, a21);
        omp::bloch_derivative(c, -1.0, prof, fa, r31, r21, b31, b21);
        CHECK(a31 == b31);
        CHECK(a21 == b21);

        std::vector<cplx> sa(n), sb(n);
        serial::stage(r31, a31, 0.01, sa);
        omp::stage(r31, a31, 0.01, sb);
        CHECK(sa == sb);

        std::vector<cplx> ya = r21, yb = r21;
        serial::rk4_combine(ya, a31, a21, b31, sa, 0.02);
        omp::rk4_combine(yb, a31, a21, b31, sa, 0.02);
        CHECK(ya == yb);

        CHECK(serial::max_abs(ya) == omp::max_abs(yb));
    }
}

TEST_CASE("max_abs flags non-finite entries")
{
    std::vector<cplx> v(5000, cplx(0.5, 0.0));
    v[4321] = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK(std::isinf(serial::max_abs(v)));
    CHECK(std::isinf(omp::max_abs(v)));
    v[4321] = cplx(3.0, 4.0);
    CHECK(serial::max_abs(v) == doctest::Approx(5.0));
    CHECK(omp::max_abs(v) == doctest::Approx(5.0));
}

TEST_CASE("policy selection")
{
    CHECK(select(Policy::Serial).propagate_field == &serial::propagate_field);
    CHECK(select(Policy::OpenMP).propagate_field == &omp::propagate_field);
}
