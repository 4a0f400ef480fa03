#include <benchmark/benchmark.h>

#include "haystacks/grammar.hpp"
#include "haystacks/rng.hpp"

using namespace haystacks;

namespace {

const ClauseGrammar& grammar() {
    static const ClauseGrammar g{GrammarConfig{}};
    return g;
}

void BM_GenerateBaseFormula(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        auto clauses = grammar().generate_base_formula(size, seed++);
        benchmark::DoNotOptimize(clauses);
    }
    state.SetItemsProcessed(state.iterations() * size);
}
BENCHMARK(BM_GenerateBaseFormula)->Arg(8)->Arg(32)->Arg(128);

void BM_SampleHypothesis(benchmark::State& state) {
    auto clauses = grammar().generate_base_formula(32, 7);
    SymbolPool pool = grammar().collect_symbols(clauses);
    auto rng = make_rng(99);
    for (auto _ : state) {
        SourcedClause h = grammar().sample_hypothesis(rng, &pool, 0.9);
        benchmark::DoNotOptimize(h);
    }
}
BENCHMARK(BM_SampleHypothesis);

}  // namespace
