#include "gradecho/analytic.hpp"

#include "gradecho/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gradecho::analytic {

bool AnalyticParams::in_validity_regime(double probe_bandwidth) const noexcept
{
    return probe_bandwidth > gamma_decay && gamma_decay > std::abs(omega_c);
}

double bessel_j0(double x)
{
    return std::cyl_bessel_j(0.0, std::abs(x));
}

double bessel_j1(double x)
{
    const double v = std::cyl_bessel_j(1.0, std::abs(x));
    return x < 0.0 ? -v : v;
}

namespace {

double envelope(const AnalyticParams& p, double T)
{
    return bessel_j0(std::sqrt(p.eta_z * T)) * std::exp(-0.25 * p.gamma_decay * T);
}

void require_nonnegative(double T, const char* what)
{
    if (!(T >= 0.0))
        throw DomainError(std::string(what) + ": T must be >= 0");
}

} // namespace

cplx rho31_closed_area(const AnalyticParams& p, double T, double angle)
{
    require_nonnegative(T, "rho31_closed");
    return cplx(0.0, 1.0) * (p.probe_amp / 8.0) * envelope(p, T) * std::cos(angle);
}

cplx rho21_closed_area(const AnalyticParams& p, double T, double angle)
{
    require_nonnegative(T, "rho21_closed");
    return -(p.probe_amp / 8.0) * envelope(p, T) * std::sin(angle);
}

cplx rho31_closed(const AnalyticParams& p, double T)
{
    return rho31_closed_area(p, T, 0.5 * p.omega_c * T);
}

cplx rho21_closed(const AnalyticParams& p, double T)
{
    return rho21_closed_area(p, T, 0.5 * p.omega_c * T);
}

ProbeTail probe_closed_area(const AnalyticParams& p, double T, double angle)
{
    if (!(T > 0.0))
        throw DomainError("probe_closed: singular at T = 0 (sqrt(eta z / T) diverges); T must be > 0");
    const double x = std::sqrt(p.eta_z * T);
    const double v = -0.25 * std::sqrt(p.eta_z / T) * bessel_j1(x) *
                     std::exp(-0.25 * p.gamma_decay * T) * std::cos(angle);
    return {cplx(v, 0.0), true};
}

ProbeTail probe_closed(const AnalyticParams& p, double T)
{
    return probe_closed_area(p, T, 0.5 * p.omega_c * T);
}

double phase_area(const ControlSchedule& schedule, const SpatialProfile& profile, double z,
                  double t0, double t, double length)
{
    if (!(t >= t0))
        throw DomainError("phase_area: t must be >= t0");
    return 0.5 * profile.value(z, length) * schedule.integral(t0, t);
}

namespace {

// Zero crossings of G(t) = integral_{t0}^{t} gain over (lo, hi].
std::vector<double> crossings(const ControlSchedule& schedule, double t0, double lo, double hi,
                              bool first_only)
{
    std::vector<double> cuts{lo};
    for (double b : schedule.breakpoints())
        if (b > lo && b < hi)
            cuts.push_back(b);
    cuts.push_back(hi);

    auto G = [&](double t) { return schedule.integral(t0, t); };
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double a = cuts[k], b = cuts[k + 1];
        double ga = G(a), gb = G(b);
        if (ga == 0.0 || !(ga * gb <= 0.0))
            continue;
        if (gb == 0.0) {
            out.push_back(b);
        } else {
            // Bisection; the interval shrinks to adjacent doubles.
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                if (m <= a || m >= b)
                    break;
                const double gm = G(m);
                if (gm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((gm > 0.0) == (ga > 0.0)) {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            out.push_back(0.5 * (a + b));
        }
        if (first_only)
            break;
    }
    return out;
}

} // namespace

std::optional<double> predict_echo_time(const ControlSchedule& schedule,
                                        const SpatialProfile& profile, double t0, double t_end,
                                        std::optional<double> z_ref, double length)
{
    const auto flips = schedule.flip_times();
    if (flips.empty())
        return std::nullopt;
    const double z = z_ref.value_or(profile.argmax_abs(length));
    if (profile.value(z, length) == 0.0)
        return std::nullopt;
    const double start = std::max(t0, flips.back());
    if (!(t_end > start))
        return std::nullopt;
    const auto c = crossings(schedule, t0, start, t_end, true);
    if (c.empty())
        return std::nullopt;
    return c.front();
}

std::vector<double> echo_train(const ControlSchedule& schedule, double t0, double t_end)
{
    if (!(t_end > t0))
        return {};
    return crossings(schedule, t0, t0, t_end, false);
}

double first_order_signal(const SpatialProfile& profile, double T, int nquad, double length)
{
    if (!(T >= 0.0))
        throw DomainError("first_order_signal: T must be >= 0");
    if (nquad < 16)
        throw DomainError("first_order_signal: nquad must be >= 16");
    const int n = nquad + (nquad % 2);
    const double h = length / n;
    auto f = [&](double z) { return std::cos(0.5 * profile.value(z, length) * T); };
    double sum = f(0.0) + f(length);
    for (int i = 1; i < n; ++i)
        sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
    const double integral = sum * h / 3.0 / length;
    return integral * integral;
}

} // namespace gradecho::analytic
