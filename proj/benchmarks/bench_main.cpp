#include <benchmark/benchmark.h>

#include <array>
#include <cmath>

#include "affsurf/blaschke.hpp"
#include "affsurf/grid_fields.hpp"
#include "affsurf/immersion.hpp"
#include "affsurf/soliton_eqs.hpp"

using namespace affsurf;

namespace {

Grid2 square(int n) { return make_grid({-0.5, 0.5, -0.5, 0.5}, n, n); }

ScalarField2D smooth(const Grid2& g) {
    return ScalarField2D::sample(g, [](double x, double y) { return 0.2 * std::sin(2 * x) * std::cos(y) + 0.1 * x * y; });
}

void BM_Diff(benchmark::State& st) {
    const ScalarField2D f = smooth(square(static_cast<int>(st.range(0))));
    for (auto _ : st) benchmark::DoNotOptimize(diff(f, Deriv::d12));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(f.values.size()));
}
BENCHMARK(BM_Diff)->Arg(65)->Arg(257)->Arg(1025);

void BM_Residual(benchmark::State& st) {
    const ScalarField2D f = smooth(square(static_cast<int>(st.range(0))));
    const SolitonEquation eq = SolitonEquation::sphere_lambda(-2);
    for (auto _ : st) benchmark::DoNotOptimize(residual(eq, f));
}
BENCHMARK(BM_Residual)->Arg(65)->Arg(257);

void BM_SolveElliptic(benchmark::State& st) {
    const Grid2 g = square(static_cast<int>(st.range(0)));
    const ScalarField2D bnd = ScalarField2D::sample(g, [](double x, double y) { return 0.1 * x - 0.05 * y; });
    const SolitonEquation eq = SolitonEquation::sphere_lambda(-2);
    for (auto _ : st) benchmark::DoNotOptimize(solve_elliptic(eq, bnd, bnd));
}
BENCHMARK(BM_SolveElliptic)->Arg(33)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_SolveGoursat(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const Grid2 g = make_grid({0, 1, 0, 1}, n, n);
    std::vector<double> row(n), col(n);
    for (int i = 0; i < n; ++i) {
        row[i] = 0.2 * g.x1(i);
        col[i] = -0.1 * g.x2(i);
    }
    for (auto _ : st) benchmark::DoNotOptimize(solve_goursat(SolitonEquation::cosh_gordon(), g, row, col));
}
BENCHMARK(BM_SolveGoursat)->Arg(129)->Arg(513)->Unit(benchmark::kMillisecond);

void BM_Verify(benchmark::State& st) {
    const BlaschkeStructure s = build_sphere_definite(smooth(square(static_cast<int>(st.range(0)))), -2);
    for (auto _ : st) benchmark::DoNotOptimize(verify(s));
}
BENCHMARK(BM_Verify)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& st) {
    const Grid2 g = square(static_cast<int>(st.range(0)));
    CatalogueParams p;
    const ImmersionSheet cat = catalogue(CatalogueKind::DefiniteConstFp, p, g);
    const BlaschkeStructure s = build_sphere_definite(ScalarField2D(g, 0.0), -2);
    const SeedFrame seed = seed_from_sheet(cat);
    for (auto _ : st) benchmark::DoNotOptimize(integrate(s, seed));
}
BENCHMARK(BM_Integrate)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_Induce(benchmark::State& st) {
    CatalogueParams p;
    const ImmersionSheet cat = catalogue(CatalogueKind::DefiniteConstFp, p, square(static_cast<int>(st.range(0))));
    for (auto _ : st) benchmark::DoNotOptimize(induce(cat));
}
BENCHMARK(BM_Induce)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
