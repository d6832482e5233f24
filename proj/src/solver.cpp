#include "gradecho/solver.hpp"

#include "gradecho/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gradecho {

std::vector<double> FieldRecord::intensity_out() const
{
    std::vector<double> out(probe_out.size());
    std::transform(probe_out.begin(), probe_out.end(), out.begin(),
                   [](cplx v) { return std::norm(v); });
    return out;
}

std::vector<double> FieldRecord::intensity_in() const
{
    std::vector<double> out(probe_in.size());
    std::transform(probe_in.begin(), probe_in.end(), out.begin(),
                   [](cplx v) { return std::norm(v); });
    return out;
}

std::size_t FieldRecord::nearest_z(double zq) const
{
    if (z.empty())
        throw DomainError("record has no coherence snapshots");
    auto it = std::lower_bound(z.begin(), z.end(), zq);
    if (it == z.end())
        return z.size() - 1;
    auto i = static_cast<std::size_t>(std::distance(z.begin(), it));
    if (i > 0 && std::abs(z[i - 1] - zq) <= std::abs(z[i] - zq))
        --i;
    return i;
}

double relative_l2(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.size() != b.size())
        throw DomainError("relative_l2: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    if (den == 0.0)
        return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

namespace {

struct Interval {
    double a, b;
    std::size_t steps;
};

std::vector<Interval> make_intervals(const ControlSchedule& sched, const GridSpec& g,
                                     std::size_t multiplier)
{
    std::vector<double> cuts{0.0};
    for (double t : sched.breakpoints())
        if (t > 0.0 && t < g.t_end)
            cuts.push_back(t);
    cuts.push_back(g.t_end);

    std::vector<Interval> out;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double span = cuts[k + 1] - cuts[k];
        // Tolerance keeps exact multiples of dt from gaining a step to rounding.
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / g.dt - 1e-9)));
        out.push_back({cuts[k], cuts[k + 1], n * multiplier});
    }
    return out;
}

} // namespace

FieldRecord integrate(const Scenario& s, const SolverOptions& opts)
{
    const ValidationReport report = validate_scenario(s);
    for (const auto& issue : report.issues) {
        if (issue.severity != Severity::Error)
            continue;
        const bool resolution = issue.code == "grid.control_resolution" ||
                                issue.code == "grid.probe_resolution";
        if (resolution && !opts.enforce_resolution)
            continue;
        throw ConfigError("invalid scenario '" + s.name + "': " + issue.message);
    }
    if (opts.refinement < 0 || opts.refinement > 12)
        throw ConfigError("refinement level must be in [0, 12]");

    const std::size_t mult = std::size_t{1} << opts.refinement;
    GridSpec grid = resolve_grid(s);
    grid.nz = (grid.nz - 1) * mult + 1;
    grid.dt /= static_cast<double>(mult);
    grid.record_stride *= mult;

    const std::size_t nz = grid.nz;
    const double length = s.medium.length;
    const double dz = length / static_cast<double>(nz - 1);
    const auto intervals = make_intervals(s.schedule, resolve_grid(s), mult);

    std::size_t total_steps = 0;
    for (const auto& iv : intervals)
        total_steps += iv.steps;
    if (static_cast<double>(total_steps) * static_cast<double>(nz) > opts.max_work) {
        std::ostringstream os;
        os << "work nz*steps = " << static_cast<double>(total_steps) * static_cast<double>(nz)
           << " exceeds budget " << opts.max_work;
        throw ResourceError(os.str());
    }

    const kernels::KernelSet K = kernels::select(opts.kernel);
    const kernels::BlochCoefficients coef = kernels::make_coefficients(s.medium, dz);

    std::vector<double> profile(nz);
    for (std::size_t j = 0; j < nz; ++j)
        profile[j] = s.profile.value(static_cast<double>(j) * dz, length);

    std::vector<cplx> r31(nz), r21(nz), field(nz);
    std::vector<cplx> s31(nz), s21(nz);
    std::vector<cplx> k31[4], k21[4];
    for (int i = 0; i < 4; ++i) {
        k31[i].assign(nz, cplx{});
        k21[i].assign(nz, cplx{});
    }

    FieldRecord rec;
    rec.scenario_name = s.name;
    rec.grid = grid;
    rec.length = length;
    rec.steps = total_steps;
    const std::size_t expect = total_steps / grid.record_stride + 2;
    rec.times.reserve(expect);
    rec.probe_in.reserve(expect);
    rec.probe_out.reserve(expect);

    const bool snap = s.outputs.coherences;
    std::size_t snap_stride = 1, z_stride = 1;
    if (snap) {
        snap_stride = s.outputs.snapshot_stride > 0
                          ? s.outputs.snapshot_stride * mult
                          : std::max<std::size_t>(1, total_steps / 200);
        z_stride = s.outputs.z_stride > 0 ? s.outputs.z_stride * mult
                                          : std::max<std::size_t>(1, (nz - 1) / 256);
        for (std::size_t j = 0; j < nz; j += z_stride)
            rec.z.push_back(static_cast<double>(j) * dz);
    }

    auto record = [&](double t) {
        rec.times.push_back(t);
        rec.probe_in.push_back(field[0]);
        rec.probe_out.push_back(field[nz - 1]);
    };
    auto snapshot = [&](double t) {
        rec.snapshot_times.push_back(t);
        for (std::size_t j = 0; j < nz; j += z_stride) {
            rec.rho31.push_back(r31[j]);
            rec.rho21.push_back(r21[j]);
        }
    };

    K.propagate_field(s.probe.value(0.0), coef.coupling, dz, r31, field);
    record(0.0);
    if (snap)
        snapshot(0.0);

    std::size_t step = 0;
    for (const auto& iv : intervals) {
        const double h = (iv.b - iv.a) / static_cast<double>(iv.steps);
        // Gain on this interval, taking the left limit at its right end.
        const double b_left = std::nextafter(iv.b, iv.a);
        auto gain_at = [&](double t) { return s.schedule.gain(std::min(t, b_left)); };
        auto rhs = [&](double t, std::span<const cplx> y31, std::span<const cplx> y21,
                       std::span<cplx> d31, std::span<cplx> d21) {
            K.propagate_field(s.probe.value(t), coef.coupling, dz, y31, field);
            K.bloch_derivative(coef, gain_at(t), profile, field, y31, y21, d31, d21);
        };

        for (std::size_t i = 0; i < iv.steps; ++i) {
            const double t = iv.a + static_cast<double>(i) * h;
            const double t_next = (i + 1 == iv.steps) ? iv.b : iv.a + static_cast<double>(i + 1) * h;
            const double t_mid = 0.5 * (t + t_next);
            const double hh = t_next - t;

            // field already holds Omega_p for (r31, t).
            K.bloch_derivative(coef, gain_at(t), profile, field, r31, r21, k31[0], k21[0]);
            K.stage(r31, k31[0], 0.5 * hh, s31);
            K.stage(r21, k21[0], 0.5 * hh, s21);
            rhs(t_mid, s31, s21, k31[1], k21[1]);
            K.stage(r31, k31[1], 0.5 * hh, s31);
            K.stage(r21, k21[1], 0.5 * hh, s21);
            rhs(t_mid, s31, s21, k31[2], k21[2]);
            K.stage(r31, k31[2], hh, s31);
            K.stage(r21, k21[2], hh, s21);
            rhs(t_next, s31, s21, k31[3], k21[3]);
            K.rk4_combine(r31, k31[0], k31[1], k31[2], k31[3], hh);
            K.rk4_combine(r21, k21[0], k21[1], k21[2], k21[3], hh);

            ++step;
            const double m = std::max(K.max_abs(r31), K.max_abs(r21));
            if (!(m <= opts.divergence_limit)) {
                std::ostringstream os;
                os << "divergence at step " << step << " (t = " << t_next << "): max|rho| = " << m;
                throw DivergenceError(os.str(), static_cast<long>(step));
            }

            K.propagate_field(s.probe.value(t_next), coef.coupling, dz, r31, field);
            if (step % grid.record_stride == 0 || step == total_steps)
                record(t_next);
            if (snap && (step % snap_stride == 0 || step == total_steps))
                snapshot(t_next);
        }
    }
    return rec;
}

ConvergenceReport convergence_check(const Scenario& s, int refinements, SolverOptions opts)
{
    if (refinements < 1)
        throw DomainError("convergence_check: refinements must be >= 1");
    ConvergenceReport out;
    std::vector<std::vector<cplx>> traces;
    for (int k = 0; k <= refinements; ++k) {
        opts.refinement = k;
        try {
            FieldRecord r = integrate(s, opts);
            out.grids.push_back(r.grid);
            traces.push_back(std::move(r.probe_out));
        } catch (const DivergenceError& e) {
            out.grids.push_back({});
            traces.emplace_back();
            out.note += "level " + std::to_string(k) + ": " + e.what() + "\n";
        }
    }
    for (int k = 0; k < refinements; ++k) {
        const auto& coarse = traces[static_cast<std::size_t>(k)];
        const auto& fine = traces[static_cast<std::size_t>(k) + 1];
        if (coarse.empty() || fine.empty() || coarse.size() != fine.size())
            out.errors.push_back(std::numeric_limits<double>::infinity());
        else
            out.errors.push_back(relative_l2(coarse, fine));
    }
    out.monotone = true;
    for (std::size_t k = 0; k < out.errors.size(); ++k) {
        if (!std::isfinite(out.errors[k]))
            out.monotone = false;
        if (k > 0 && !(out.errors[k] < out.errors[k - 1]))
            out.monotone = false;
    }
    return out;
}

} // namespace gradecho
