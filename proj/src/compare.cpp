#include "gradecho/compare.hpp"

#include "gradecho/errors.hpp"

namespace gradecho {

ClosedFormComparison compare_closed_form(const Scenario& s, const FieldRecord& rec, double z_fraction,
                                         double t_min, double t_max)
{
    const auto* uni = std::get_if<UniformProfile>(&s.profile.kind());
    if (!uni || s.schedule.segments().size() != 1)
        throw DomainError("compare: closed forms need a uniform profile and a constant schedule");
    if (rec.z.empty() || rec.snapshot_times.empty())
        throw DomainError("compare: record has no coherence snapshots (set outputs.coherences)");
    if (!(z_fraction >= 0.0 && z_fraction <= 1.0))
        throw DomainError("compare: z fraction must be in [0, 1]");

    ClosedFormComparison c;
    c.t_min = t_min;
    c.t_max = t_max;
    const std::size_t iz = rec.nearest_z(z_fraction * s.medium.length);
    c.z = rec.z[iz];

    analytic::AnalyticParams p;
    p.omega_c = uni->b * s.schedule.segments().front().gain;
    p.gamma_decay = s.medium.gamma_decay;
    p.probe_amp = s.probe.area();
    c.in_validity = p.in_validity_regime(1.0 / s.probe.kappa);

    p.eta_z = s.medium.eta() * c.z;
    for (std::size_t k = 0; k < rec.snapshot_times.size(); ++k) {
        const double T = rec.snapshot_times[k] - s.probe.t0;
        if (T < t_min || T > t_max)
            continue;
        c.T.push_back(T);
        c.rho31_solver.push_back(rec.rho31_at(k, iz));
        c.rho21_solver.push_back(rec.rho21_at(k, iz));
        c.rho31_closed.push_back(analytic::rho31_closed(p, T));
        c.rho21_closed.push_back(analytic::rho21_closed(p, T));
    }

    p.eta_z = s.medium.eta() * s.medium.length;
    for (std::size_t k = 0; k < rec.samples(); ++k) {
        const double T = rec.times[k] - s.probe.t0;
        if (T < t_min || T > t_max)
            continue;
        c.T_tail.push_back(T);
        c.tail_solver.push_back(rec.probe_out[k]);
        c.tail_closed.push_back(p.probe_amp * analytic::probe_closed(p, T).tail);
    }
    if (c.T.empty() || c.T_tail.empty())
        throw DomainError("compare: no samples inside the comparison window");

    c.residual_rho31 = relative_l2(c.rho31_solver, c.rho31_closed);
    c.residual_rho21 = relative_l2(c.rho21_solver, c.rho21_closed);
    c.residual_tail = relative_l2(c.tail_solver, c.tail_closed);
    return c;
}

} // namespace gradecho
