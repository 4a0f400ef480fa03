#include <benchmark/benchmark.h>

#include <set>

#include "haystacks/grammar.hpp"
#include "haystacks/sat.hpp"

using namespace haystacks;

namespace {

const ClauseGrammar& grammar() {
    static const ClauseGrammar g{GrammarConfig{}};
    return g;
}

GroundCNF base_cnf(int size, std::uint64_t seed) {
    std::vector<std::pair<int, FormulaPtr>> fs;
    for (const auto& c : grammar().generate_base_formula(size, seed))
        fs.emplace_back(c.id, c.formula);
    return ground(fs, grammar().domain());
}

void BM_SolveFromScratch(benchmark::State& state) {
    GroundCNF cnf = base_cnf(static_cast<int>(state.range(0)), 21);
    for (auto _ : state) {
        auto [v, stats] = solve(cnf);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_SolveFromScratch)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_RestrictionSolve(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    GroundCNF cnf = base_cnf(size, 33);
    SourceSolver solver(cnf);
    std::set<int> active;
    for (int i = 0; i < size; i += 2)
        active.insert(i);
    for (auto _ : state) {
        SatVerdict v = solver.solve(active);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_RestrictionSolve)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
