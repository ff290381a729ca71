#include <benchmark/benchmark.h>

#include <numbers>

#include "kcex/construct.hpp"
#include "kcex/eigensolve.hpp"
#include "kcex/mcatalog.hpp"
#include "kcex/verify.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

kcex::DomainSpec pi_interval()
{
    return kcex::make_domain(kcex::DomainSpec{kcex::Interval{-kPi / 2, kPi / 2}});
}

void BM_Assemble1D(benchmark::State& state)
{
    const kcex::Mesh mesh = kcex::build_mesh(pi_interval(), kPi / state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kcex::assemble(mesh));
    }
}
BENCHMARK(BM_Assemble1D)->Arg(2000)->Arg(8000);

void BM_AssembleSquare(benchmark::State& state)
{
    const kcex::Mesh mesh = kcex::build_mesh(
        kcex::make_domain(kcex::DomainSpec{kcex::Rectangle{0, 1, 0, 1}}),
        1.0 / state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kcex::assemble(mesh));
    }
}
BENCHMARK(BM_AssembleSquare)->Arg(32)->Arg(64);

void BM_Eigenpair1D(benchmark::State& state)
{
    const kcex::Mesh mesh = kcex::build_mesh(pi_interval(), kPi / state.range(0));
    const kcex::OperatorPair ops = kcex::assemble(mesh);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kcex::principal_eigenpair(ops, mesh));
    }
}
BENCHMARK(BM_Eigenpair1D)->Arg(2000);

void BM_EigenpairDisk(benchmark::State& state)
{
    const kcex::Mesh mesh = kcex::build_mesh(
        kcex::make_domain(kcex::DomainSpec{kcex::Disk{{0, 0}, 1.0}}),
        1.0 / state.range(0));
    const kcex::OperatorPair ops = kcex::assemble(mesh);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kcex::principal_eigenpair(ops, mesh));
    }
}
BENCHMARK(BM_EigenpairDisk)->Arg(20)->Arg(40);

void BM_BuildAndCertify1D(benchmark::State& state)
{
    const kcex::MFunctionSpec m =
        kcex::make_m_function(kcex::MFunctionSpec{kcex::Affine{1.0, 1.0}});
    const kcex::IncreasingPair pair{1.0, 4.0, 2.0, 5.0};
    for (auto _ : state) {
        const kcex::Counterexample cex = kcex::build_counterexample(
            pi_interval(), m, pair, kcex::Mode::Ssm, kPi / state.range(0), 0.5);
        benchmark::DoNotOptimize(kcex::certify(cex, m));
    }
}
BENCHMARK(BM_BuildAndCertify1D)->Arg(500)->Arg(2000);

void BM_Classify(benchmark::State& state)
{
    const kcex::MFunctionSpec m =
        kcex::make_m_function(kcex::MFunctionSpec{kcex::RationalDecay{1.0}});
    for (auto _ : state) {
        benchmark::DoNotOptimize(kcex::classify(m, 10.0, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_Classify)->Arg(512)->Arg(4096);

} // namespace

BENCHMARK_MAIN();
