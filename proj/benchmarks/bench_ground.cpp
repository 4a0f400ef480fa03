#include <benchmark/benchmark.h>

#include "haystacks/grammar.hpp"
#include "haystacks/ground.hpp"

using namespace haystacks;

namespace {

const ClauseGrammar& grammar() {
    static const ClauseGrammar g{GrammarConfig{}};
    return g;
}

std::vector<std::pair<int, FormulaPtr>> base_formulas(int size, std::uint64_t seed) {
    std::vector<std::pair<int, FormulaPtr>> fs;
    for (const auto& c : grammar().generate_base_formula(size, seed))
        fs.emplace_back(c.id, c.formula);
    return fs;
}

void BM_GroundFormula(benchmark::State& state) {
    auto fs = base_formulas(static_cast<int>(state.range(0)), 11);
    for (auto _ : state) {
        GroundCNF cnf = ground(fs, grammar().domain());
        benchmark::DoNotOptimize(cnf);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GroundFormula)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
