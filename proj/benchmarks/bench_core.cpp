#include <benchmark/benchmark.h>

#include <random>

#include "cmscan/heights.hpp"
#include "cmscan/lattice.hpp"
#include "cmscan/legendre.hpp"
#include "cmscan/modular.hpp"
#include "cmscan/quadforms.hpp"

using namespace cmscan;

namespace {

TauPoint generic_tau(mpfr_prec_t wp) {
    return TauPoint(BigComplex(BigFloat(0.23, wp), BigFloat(1.17, wp)));
}

void bm_agm(benchmark::State& state) {
    Precision prec(state.range(0), 32);
    mpfr_prec_t wp = prec.total();
    BigComplex a(BigFloat(1L, wp));
    BigComplex b(sqrt(BigFloat(2L, wp)));
    for (auto _ : state)
        benchmark::DoNotOptimize(agm(a, b, prec));
}

void bm_theta_constants(benchmark::State& state) {
    Precision prec(state.range(0), 32);
    TauPoint tau = generic_tau(prec.total());
    for (auto _ : state)
        benchmark::DoNotOptimize(theta_constants(tau, prec));
}

void bm_lambda_of_tau(benchmark::State& state) {
    Precision prec(state.range(0), 32);
    TauPoint tau = generic_tau(prec.total());
    for (auto _ : state)
        benchmark::DoNotOptimize(lambda_of_tau(tau, prec));
}

void bm_elliptic_log(benchmark::State& state) {
    Precision prec(state.range(0), 32);
    TauPoint tau = generic_tau(prec.total());
    BigComplex z = BigComplex(BigFloat(0.31, prec.total()))
                   + tau.value * BigFloat(0.27, prec.total());
    LegendrePoint p = point_of_z(LatticeCoordinate(z, tau), prec);
    for (auto _ : state)
        benchmark::DoNotOptimize(elliptic_log(p, tau, prec));
}

void bm_lll_reduce(benchmark::State& state) {
    long dim = state.range(0);
    std::mt19937_64 rng(7);
    IntLattice lat;
    lat.basis.assign(dim, {});
    for (auto& row : lat.basis) {
        row.resize(dim);
        for (auto& x : row)
            x = mpz_class((long)(rng() % 20001) - 10000);
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(lll_reduce(lat));
}

void bm_class_number_sweep(benchmark::State& state) {
    long dmax = state.range(0);
    for (auto _ : state) {
        long total = 0;
        for (long long n = 3; n <= dmax; ++n)
            if (n % 4 == 0 || n % 4 == 3)
                total += class_number(Discriminant(-n));
        benchmark::DoNotOptimize(total);
    }
}

void bm_j_class_polynomial(benchmark::State& state) {
    Precision prec(320, 32);
    Discriminant d(-state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(j_class_polynomial(d, prec));
}

BENCHMARK(bm_agm)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(bm_theta_constants)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(bm_lambda_of_tau)->Arg(256)->Arg(1024);
BENCHMARK(bm_elliptic_log)->Arg(256)->Arg(1024);
BENCHMARK(bm_lll_reduce)->Arg(4)->Arg(8)->Arg(12);
BENCHMARK(bm_class_number_sweep)->Arg(500)->Arg(2000);
BENCHMARK(bm_j_class_polynomial)->Arg(23)->Arg(71);

} // namespace

BENCHMARK_MAIN();
