// Serial reference kernels against their OpenMP versions, and one full
// integration step loop under each policy.

#include "gradecho/kernels.hpp"
#include "gradecho/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace gradecho;

namespace {

std::vector<cplx> ramp(std::size_t n)
{
    std::vector<cplx> v(n);
    for (std::size_t j = 0; j < n; ++j)
        v[j] = cplx(std::sin(0.01 * j), std::cos(0.02 * j)) * 1e-3;
    return v;
}

template <kernels::Policy P>
void BM_PropagateField(benchmark::State& st)
{
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto K = kernels::select(P);
    const auto r31 = ramp(n);
    std::vector<cplx> field(n);
    for (auto _ : st) {
        K.propagate_field(cplx(1.0, 0.0), cplx(0.0, 1000.0), 1.0 / (n - 1), r31, field);
        benchmark::DoNotOptimize(field.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <kernels::Policy P>
void BM_BlochDerivative(benchmark::State& st)
{
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto K = kernels::select(P);
    MediumParams m;
    m.xi = 2000;
    const auto c = kernels::make_coefficients(m, 1.0 / (n - 1));
    std::vector<double> profile(n);
    for (std::size_t j = 0; j < n; ++j)
        profile[j] = 1000.0 * j / (n - 1);
    const auto field = ramp(n), r31 = ramp(n), r21 = ramp(n);
    std::vector<cplx> d31(n), d21(n);
    for (auto _ : st) {
        K.bloch_derivative(c, -1.0, profile, field, r31, r21, d31, d21);
        benchmark::DoNotOptimize(d31.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <kernels::Policy P>
void BM_Integrate(benchmark::State& st)
{
    Scenario s;
    s.medium.xi = 2000;
    s.profile = SpatialProfile::linear(1000);
    s.schedule = ControlSchedule({{0.0, 1.0}, {0.065, -1.0}});
    s.probe.kappa = 5e-3;
    s.probe.t0 = 0.048;
    s.grid.t_end = 0.1;
    s.grid.nz = static_cast<std::size_t>(st.range(0));
    SolverOptions o;
    o.kernel = P;
    for (auto _ : st) {
        auto rec = integrate(s, o);
        benchmark::DoNotOptimize(rec.probe_out.data());
    }
}

} // namespace

BENCHMARK(BM_PropagateField<kernels::Policy::Serial>)->RangeMultiplier(4)->Range(1024, 65536);
BENCHMARK(BM_PropagateField<kernels::Policy::OpenMP>)->RangeMultiplier(4)->Range(1024, 65536);
BENCHMARK(BM_BlochDerivative<kernels::Policy::Serial>)->RangeMultiplier(4)->Range(1024, 65536);
BENCHMARK(BM_BlochDerivative<kernels::Policy::OpenMP>)->RangeMultiplier(4)->Range(1024, 65536);
BENCHMARK(BM_Integrate<kernels::Policy::Serial>)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Integrate<kernels::Policy::OpenMP>)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
