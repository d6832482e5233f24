#include "gradecho/metrics.hpp"

#include "gradecho/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

namespace gradecho::metrics {

namespace {

double trapz(std::span<const double> t, std::span<const double> y, std::size_t from = 0)
{
    double s = 0.0;
    for (std::size_t i = from + 1; i < t.size(); ++i)
        s += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
    return s;
}

std::size_t first_after(std::span<const double> t, double after)
{
    return static_cast<std::size_t>(
        std::distance(t.begin(), std::upper_bound(t.begin(), t.end(), after)));
}

} // namespace

double fwhm(std::span<const double> t, std::span<const double> intensity)
{
    if (t.size() != intensity.size() || t.size() < 2)
        throw MetricError("fwhm: need at least two samples of matching size");
    const auto it = std::max_element(intensity.begin(), intensity.end());
    const double peak = *it;
    if (!(peak > 0.0) || !std::isfinite(peak))
        throw MetricError("fwhm: trace has no positive finite peak");
    const auto k = static_cast<std::size_t>(std::distance(intensity.begin(), it));
    const double half = 0.5 * peak;
    const std::size_t n = t.size();

    std::size_t i = k;
    while (i > 0 && intensity[i] > half)
        --i;
    double left = t[0];
    if (intensity[i] <= half && i < k)
        left = t[i] + (half - intensity[i]) / (intensity[i + 1] - intensity[i]) * (t[i + 1] - t[i]);

    std::size_t j = k;
    while (j + 1 < n && intensity[j] > half)
        ++j;
    double right = t[n - 1];
    if (intensity[j] <= half && j > k)
        right = t[j - 1] + (half - intensity[j - 1]) / (intensity[j] - intensity[j - 1]) * (t[j] - t[j - 1]);

    // Main lobe: walk downhill from the peak to the first local minimum.
    std::size_t lo = k, hi = k;
    while (lo > 0 && intensity[lo - 1] <= intensity[lo])
        --lo;
    while (hi + 1 < n && intensity[hi + 1] <= intensity[hi])
        ++hi;
    for (std::size_t m = 0; m < n; ++m) {
        if (m >= lo && m <= hi)
            continue;
        if (intensity[m] > 0.8 * peak)
            throw MetricError("fwhm: ambiguous trace, secondary lobe above 80% of the peak");
    }
    return right - left;
}

EchoPeak detect_echo(const FieldRecord& rec, double after, double threshold)
{
    if (rec.times.empty() || !(after < rec.times.back()))
        throw DomainError("detect_echo: 'after' must lie before the end of the record");
    const auto I = rec.intensity_out();
    const auto Iin = rec.intensity_in();
    const double in_peak = *std::max_element(Iin.begin(), Iin.end());

    const std::size_t start = first_after(rec.times, after);
    EchoPeak out;
    if (start >= I.size())
        return out;
    const auto it = std::max_element(I.begin() + static_cast<long>(start), I.end());
    const auto k = static_cast<std::size_t>(std::distance(I.begin(), it));
    if (!(*it > threshold * in_peak))
        return out;

    out.found = true;
    out.index = k;
    out.time = rec.times[k];
    out.value = *it;
    if (k > start && k + 1 < I.size()) {
        const double t0 = rec.times[k - 1], t1 = rec.times[k], t2 = rec.times[k + 1];
        const double y0 = I[k - 1], y1 = I[k], y2 = I[k + 1];
        // Vertex of the parabola through the three samples.
        const double d01 = (y1 - y0) / (t1 - t0);
        const double d12 = (y2 - y1) / (t2 - t1);
        const double a = (d12 - d01) / (t2 - t0);
        if (a < 0.0) {
            const double b = d01 - a * (t0 + t1);
            const double tv = -b / (2.0 * a);
            if (tv > t0 && tv < t2) {
                out.time = tv;
                out.value = std::max(y1, y0 + d01 * (tv - t0) + a * (tv - t0) * (tv - t1));
            }
        }
    }
    return out;
}

Efficiency storage_efficiency(const FieldRecord& rec, double t_cut)
{
    if (rec.times.size() < 2 || !(t_cut >= rec.times.front() && t_cut < rec.times.back()))
        throw DomainError("storage_efficiency: t_cut outside the record window");
    const auto Iin = rec.intensity_in();
    const double e_in = trapz(rec.times, Iin);
    if (!(e_in > 0.0))
        throw MetricError("storage_efficiency: zero input energy");

    const auto Iout = rec.intensity_out();
    const std::size_t k = first_after(rec.times, t_cut);
    double e_out = trapz(rec.times, Iout, k);
    if (k > 0 && k < rec.times.size()) {
        // Partial interval [t_cut, t_k] with the interpolated intensity at t_cut.
        const double w = (t_cut - rec.times[k - 1]) / (rec.times[k] - rec.times[k - 1]);
        const double Ic = Iout[k - 1] + w * (Iout[k] - Iout[k - 1]);
        e_out += 0.5 * (Ic + Iout[k]) * (rec.times[k] - t_cut);
    }
    return {e_out / e_in, rec.times.back()};
}

namespace {

std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

std::vector<cplx> resample(std::span<const double> t, std::span<const cplx> y, double t0, double dt,
                           std::size_t n)
{
    std::vector<cplx> out(n);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double tq = t0 + static_cast<double>(i) * dt;
        while (j + 2 < t.size() && t[j + 1] < tq)
            ++j;
        const double w = std::clamp((tq - t[j]) / (t[j + 1] - t[j]), 0.0, 1.0);
        out[i] = y[j] + w * (y[j + 1] - y[j]);
    }
    return out;
}

} // namespace

Fidelity classical_fidelity(std::span<const double> t, std::span<const cplx> in_trace,
                            std::span<const cplx> out_trace, const FidelityOptions& opts)
{
    if (t.size() != in_trace.size() || t.size() != out_trace.size() || t.size() < 2)
        throw MetricError("classical_fidelity: traces must share a time axis of >= 2 samples");

    double dt = t.back() - t.front();
    for (std::size_t i = 1; i < t.size(); ++i)
        dt = std::min(dt, t[i] - t[i - 1]);
    if (!(dt > 0.0))
        throw MetricError("classical_fidelity: time axis must be strictly increasing");
    const auto n = static_cast<std::size_t>(std::floor((t.back() - t.front()) / dt + 1e-9)) + 1;
    if (n > (std::size_t{1} << 22))
        throw MetricError("classical_fidelity: trace too long after resampling");

    const auto a = resample(t, in_trace, t.front(), dt, n);
    const auto b = resample(t, out_trace, t.front(), dt, n);
    double ea = 0.0, eb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ea += std::norm(a[i]);
        eb += std::norm(b[i]);
    }
    if (!(ea > 0.0) || !(eb > 0.0))
        throw MetricError("classical_fidelity: zero-energy trace");

    std::size_t m = 1;
    while (m < 2 * n)
        m <<= 1;
    // fftw_malloc keeps the alignment, and therefore the chosen codelets and
    // the rounding, identical from call to call.
    struct Buffer {
        explicit Buffer(std::size_t n)
            : p(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)))
        {
            if (!p)
                throw ResourceError("classical_fidelity: FFT buffer allocation failed");
            std::fill_n(reinterpret_cast<double*>(p), 2 * n, 0.0);
        }
        ~Buffer() { fftw_free(p); }
        Buffer(const Buffer&) = delete;
        Buffer& operator=(const Buffer&) = delete;
        cplx* c() const { return reinterpret_cast<cplx*>(p); }
        fftw_complex* p;
    };
    Buffer fa(m), fb(m), corr(m);
    std::copy(a.begin(), a.end(), fa.c());
    std::copy(b.begin(), b.end(), fb.c());

    const int mi = static_cast<int>(m);
    fftw_plan fwd_a, fwd_b, inv;
    {
        std::lock_guard lock(fftw_planner_mutex());
        fwd_a = fftw_plan_dft_1d(mi, fa.p, fa.p, FFTW_FORWARD, FFTW_ESTIMATE);
        fwd_b = fftw_plan_dft_1d(mi, fb.p, fb.p, FFTW_FORWARD, FFTW_ESTIMATE);
        inv = fftw_plan_dft_1d(mi, corr.p, corr.p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(fwd_a);
    fftw_execute(fwd_b);
    for (std::size_t i = 0; i < m; ++i)
        corr.c()[i] = fb.c()[i] * std::conj(fa.c()[i]);
    fftw_execute(inv);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_a);
        fftw_destroy_plan(fwd_b);
        fftw_destroy_plan(inv);
    }

    // corr[k] = m * sum_i b[i + k] conj(a[i]); k >= m/2 wraps to negative lags.
    Fidelity best;
    double best_c = -1.0;
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
        const long lag = k < m / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(m);
        const double delay = static_cast<double>(lag) * dt;
        if (delay < opts.min_delay || delay > opts.max_delay)
            continue;
        const double c = std::norm(corr.c()[k] * scale);
        if (c > best_c) {
            best_c = c;
            best.best_delay = delay;
        }
    }
    if (best_c < 0.0)
        throw MetricError("classical_fidelity: empty delay search window");
    best.normalized = std::min(1.0, best_c / (ea * eb));
    best.overlap = best_c / (ea * ea);
    return best;
}

EitBaseline eit_baseline(double xi)
{
    if (!(xi > 2.9))
        return {0.0, true};
    return {1.0 - 2.9 / xi, false};
}

FeasibilityReport feasibility(const FeasibilityInput& in, Geometry g)
{
    if (!(in.b > 1.0))
        throw DomainError("feasibility: b must exceed 1 for a finite Rayleigh length");
    if (!(in.length_cm > 0.0 && in.wavelength_nm > 0.0 && in.lifetime_s > 0.0))
        throw DomainError("feasibility: length, wavelength and lifetime must be positive");
    constexpr double um_per_cm = 1e4;
    constexpr double cm2_per_um2 = 1e-8;

    FeasibilityReport r;
    r.geometry = g;
    const double rate = in.b / in.lifetime_s;
    r.intensity_w_cm2 = in.intensity_coefficient * rate * rate;
    const double length_um = in.length_cm * um_per_cm;
    if (g == Geometry::GaussianBeam) {
        r.rayleigh_um = length_um / std::sqrt(in.b * in.b - 1.0);
        r.spot_um2 = in.wavelength_nm * 1e-3 * r.rayleigh_um;
    } else {
        r.spot_um2 = std::numbers::pi * length_um * length_um / std::log(in.b);
    }
    r.power_w = 0.5 * r.intensity_w_cm2 * r.spot_um2 * cm2_per_um2;
    return r;
}

double delay_bandwidth(const EchoMetrics& m)
{
    if (!m.echo_detected || !(m.echo_fwhm > 0.0))
        throw MetricError("delay_bandwidth: undefined without a detected echo");
    return (m.echo_peak_time - m.input_peak_time) / m.echo_fwhm;
}

Protocol protocol_for(const Scenario& s)
{
    const auto flips = s.schedule.flip_times();
    const double fallback = flips.empty() ? s.probe.t0 + 3.0 * s.probe.kappa : flips.back();
    Protocol p;
    p.efficiency_cut = s.outputs.efficiency_cut.value_or(fallback);
    p.echo_after = s.outputs.echo_after.value_or(fallback);
    return p;
}

EchoMetrics compute_echo_metrics(const FieldRecord& rec, const Protocol& p)
{
    EchoMetrics m;
    const auto Iin = rec.intensity_in();
    const auto kin = static_cast<std::size_t>(
        std::distance(Iin.begin(), std::max_element(Iin.begin(), Iin.end())));
    m.input_peak_time = rec.times[kin];
    m.input_fwhm = fwhm(rec.times, Iin);

    const auto eff = storage_efficiency(rec, p.efficiency_cut);
    m.efficiency_R = std::clamp(eff.value, 0.0, 1.0);
    m.efficiency_truncated_at = eff.truncated_at;
    if (eff.value > 1.0)
        m.note += "efficiency above 1 clamped; ";

    const EchoPeak peak = detect_echo(rec, p.echo_after);
    if (!peak.found) {
        m.note += "no echo after t = " + std::to_string(p.echo_after);
        return m;
    }
    m.echo_detected = true;
    m.echo_peak_time = peak.time;
    m.echo_peak_value = peak.value;

    const std::size_t start = first_after(rec.times, p.echo_after);
    const auto Iout = rec.intensity_out();
    std::span<const double> tw(rec.times.data() + start, rec.times.size() - start);
    std::span<const double> iw(Iout.data() + start, Iout.size() - start);
    try {
        m.echo_fwhm = fwhm(tw, iw);
        m.delay_bandwidth = delay_bandwidth(m);
    } catch (const MetricError& e) {
        m.note += std::string("echo width: ") + e.what() + "; ";
    }

    std::vector<cplx> out_window(rec.probe_out.size(), cplx{});
    std::copy(rec.probe_out.begin() + static_cast<long>(start), rec.probe_out.end(),
              out_window.begin() + static_cast<long>(start));
    try {
        const Fidelity f = classical_fidelity(rec.times, rec.probe_in, out_window);
        m.fidelity = f.normalized;
        m.fidelity_overlap = f.overlap;
    } catch (const MetricError& e) {
        m.note += std::string("fidelity: ") + e.what() + "; ";
    }
    return m;
}

std::optional<bool> dispersion_flag(const EchoMetrics& m)
{
    if (!m.echo_detected || !(m.echo_fwhm > 0.0))
        return std::nullopt;
    return m.echo_fwhm > 1.25 * m.input_fwhm;
}

} // namespace gradecho::metrics
