#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "qtm/collective_dynamics.hpp"
#include "qtm/free_fermion.hpp"
#include "qtm/mbl.hpp"

namespace {

double seconds(const std::function<void()>& f, int reps)
{
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char* name, const std::function<void(qtm::Exec)>& f, int reps)
{
    const double s = seconds([&] { f(qtm::Exec::serial); }, reps);
    const double p = seconds([&] { f(qtm::Exec::parallel); }, reps);
    std::printf("%-28s serial %9.4f s  parallel %9.4f s  speedup %5.2f\n", name, s, p, s / p);
}

}  // namespace

int main()
{
    using namespace qtm;
    std::printf("threads: %d\n", omp_get_max_threads());

    const TfimSpec chain{800, 1.0};
    report("tfim ramp (N=800, tau=50)",
           [&](Exec e) { ramp_transition_probabilities(chain, kz_ramp(2.0, 0.0, 50.0), 0.2, 0.05, e); }, 3);

    const TfimSpec small{200, 1.0};
    report("tfim open (N=200, tau=20)",
           [&](Exec e) {
               evolve_open(small, to_density(ground_state(small, 2.0)), kz_ramp(2.0, 0.0, 20.0),
                           {LindbladKind::create, 1e-3}, {}, e);
           },
           1);

    const SpinEnsembleSpec ens{40, 0.5, 1.0};
    const EnsembleState st = symmetric_gibbs(ens, 0.1);
    const BathSpec bath = BathSpec::flat(1.0, 1.0);
    const double dt = 0.5 * stable_step(ens.max_j(), bath.rate(1.0), bath.rate(-1.0));
    const double t0 = seconds([&] { evolve_ensemble_serial(st, bath, 1.0, dt, 1.0); }, 3);
    const double t1 = seconds([&] { evolve_ensemble(st, bath, 1.0, dt, 1.0); }, 3);
    std::printf("%-28s serial %9.4f s  parallel %9.4f s  speedup %5.2f\n", "dicke blocks (N=40)", t0, t1, t0 / t1);

    report("mbl monte carlo (1e6)", [](Exec e) { mbl_cycle_monte_carlo(MblCycleParams{}, 1000000, 7, e); }, 3);

    SpectrumEnsemble goe;
    goe.kind = GapKind::goe;
    goe.dim = 200;
    report("goe gaps (dim 200, 1e4)", [&](Exec e) { sample_gaps(goe, 10000, e); }, 1);

    GaahSpec g;
    g.n_sites = 400;
    report("gaah edge (N=400, 4 phases)", [&](Exec e) { classify_edge(g, 4, e); }, 1);
    return 0;
}
