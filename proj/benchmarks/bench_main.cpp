#include <cmath>

#include <benchmark/benchmark.h>

#include "ramanecho/echo_efficiency.hpp"
#include "ramanecho/mbsolver.hpp"
#include "ramanecho/specfun.hpp"
#include "ramanecho/str_verifier.hpp"
#include "ramanecho/sweep.hpp"
#include "ramanecho/switching.hpp"

using namespace ramanecho;

namespace {

void BM_ComplexGamma(benchmark::State& st) {
    cplx z(0.3, 2.0);
    for (auto _ : st) benchmark::DoNotOptimize(complex_gamma(z));
}
BENCHMARK(BM_ComplexGamma);

void BM_BesselSeries(benchmark::State& st) {
    const double x = static_cast<double>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(bessel_j(cplx(0.5, 3.0), x));
}
BENCHMARK(BM_BesselSeries)->Arg(1)->Arg(10)->Arg(20);

void BM_BesselOde(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(bessel_j(cplx(0.5, 3.0), 30.0));
}
BENCHMARK(BM_BesselOde);

void BM_Faddeeva(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(faddeeva_w(cplx(1.3, 0.2)));
}
BENCHMARK(BM_Faddeeva);

PhysicalParams switching_params(double k) {
    PhysicalParams p;
    p.delta01 = 5.0;
    p.k_off = k;
    return p;
}

void BM_SwitchOffClosedForm(benchmark::State& st) {
    const PhysicalParams p = switching_params(static_cast<double>(st.range(0)));
    const CoherencePair in = init_coherence_after_storage(p, 0.0, 0.0);
    for (auto _ : st) benchmark::DoNotOptimize(switch_off_coherences(p, in, 0.0, 0.0));
}
BENCHMARK(BM_SwitchOffClosedForm)->Arg(1)->Arg(50);

void BM_SwitchOffOde(benchmark::State& st) {
    const PhysicalParams p = switching_params(static_cast<double>(st.range(0)));
    const CoherencePair in = init_coherence_after_storage(p, 0.0, 0.0);
    for (auto _ : st) benchmark::DoNotOptimize(switch_off_ode_oracle(p, in, 0.0, 0.0, switch_off_interval(p)));
}
BENCHMARK(BM_SwitchOffOde)->Arg(1)->Arg(50);

void BM_SwitchOn(benchmark::State& st) {
    PhysicalParams p;
    p.k_on = 10.0;
    for (auto _ : st) benchmark::DoNotOptimize(switch_on_coefficients(p));
}
BENCHMARK(BM_SwitchOn);

void BM_OverallEfficiency(benchmark::State& st) {
    BroadeningSpec b;
    b.optical = GaussianLine{0.1};
    PhysicalParams p;
    p.optical_depth = 200.0;
    EfficiencyOptions o = efficiency_options_from(b);
    o.interaction_time = 50.0;
    for (auto _ : st) benchmark::DoNotOptimize(overall_efficiency(p, b, o));
}
BENCHMARK(BM_OverallEfficiency);

PropagationProblem storage(Model m, int nodes) {
    BroadeningSpec b;
    b.raman = GaussianLine{1.0};
    b.raman_quadrature.nodes = nodes;
    PhysicalParams p;
    p.optical_depth = 5.0;
    p = with_derived_beta(p, b);
    PropagationProblem pr;
    pr.params = p;
    pr.broadening = b;
    pr.model = m;
    pr.control = ControlSchedule::constant(1.0);
    pr.grid = make_grid(b, uniform_axis(0.0, 30.0, 601), stretched_axis(1.0, 60, std::log(5.0) - 0.3));
    pr.input_field = gaussian_pulse(pr.grid.tau, 15.0, 2.5);
    return pr;
}

void BM_StorageReduced(benchmark::State& st) {
    const PropagationProblem pr = storage(Model::reduced, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(propagate(pr, make_state(pr)));
    st.SetItemsProcessed(st.iterations() * 601 * 60 * st.range(0));
}
BENCHMARK(BM_StorageReduced)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_StorageFull(benchmark::State& st) {
    const PropagationProblem pr = storage(Model::full, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(propagate(pr, make_state(pr)));
    st.SetItemsProcessed(st.iterations() * 601 * 60 * st.range(0));
}
BENCHMARK(BM_StorageFull)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_StrResidual(benchmark::State& st) {
    const PropagationProblem pr = storage(Model::reduced, 32);
    const StrSolution s = record_storage(pr);
    StrTransform t;
    t.eta = 2.0;
    t.tau_flip = pr.grid.tau.back();
    PhysicalParams p = pr.params;
    p.eta = p.eta_prime = 2.0;
    const PhysicalParams pr2 = str_retrieval_params(p, t);
    const StrSolution img = apply_str(s, t);
    for (auto _ : st) benchmark::DoNotOptimize(str_residual(img, pr2));
}
BENCHMARK(BM_StrResidual)->Unit(benchmark::kMillisecond);

void BM_Figure6Sweep(benchmark::State& st) {
    const SweepSpec s = figure_preset(6);
    for (auto _ : st) benchmark::DoNotOptimize(run_sweep(s, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_Figure6Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
