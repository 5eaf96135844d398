// Serial reference against the OpenMP version of each batch kernel.
// The argument selects the policy: 0 serial, 1 parallel.
#include <benchmark/benchmark.h>

#include <random>

#include "rwsos/equivalence.hpp"
#include "rwsos/imp_spec.hpp"
#include "rwsos/parse.hpp"
#include "rwsos/ref2.hpp"

using namespace rwsos;

namespace {

Exec policy(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_Embedding(benchmark::State& st) {
    imp::EnumConfig cfg;
    cfg.leaves = {parse::imp_program("skip"), parse::imp_program("x := x - 1"), parse::imp_program("y := x + 2")};
    cfg.guards = {ImpExpr::var("x"), ImpExpr::var("y")};
    cfg.maxDepth = 3;
    auto programs = imp::enumerate_programs(cfg);
    std::vector<VarStore> stores = {VarStore{}, VarStore{{"x", 1}}, VarStore{{"x", 2}, {"y", 1}}};
    for (auto _ : st) benchmark::DoNotOptimize(imp2::verify_embedding(programs, stores, 30, policy(st)));
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * programs.size() * stores.size()));
}
BENCHMARK(BM_Embedding)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Preservation(benchmark::State& st) {
    std::mt19937_64 rng(1);
    auto spec = sos::random_cool_spec(rng);
    std::vector<Term> terms;
    for (int i = 0; i < 2000; ++i) terms.push_back(sos::random_term(rng, spec, 5));
    std::vector<sos::StateId> states;
    for (int s = 0; s < static_cast<int>(spec.states.size()); ++s) states.push_back(s);
    for (auto _ : st) benchmark::DoNotOptimize(sos::verify_preservation(spec, terms, states, 40, policy(st)));
}
BENCHMARK(BM_Preservation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Fidelity(benchmark::State& st) {
    impspec::Config cfg;
    cfg.vars = {"x", "y"};
    cfg.domain = 2;
    auto is = impspec::imp_as_spec(cfg);
    auto terms = sos::enumerate_terms(is.spec, 3);
    auto states = is.all_states();
    for (auto _ : st) benchmark::DoNotOptimize(impspec::check_fidelity(is, terms, states, 2000, policy(st)));
}
BENCHMARK(BM_Fidelity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GreatestSimulation(benchmark::State& st) {
    std::mt19937_64 rng(2);
    equiv::RandomSystemConfig cfg;
    cfg.maxReaders = 20;
    cfg.maxWriters = 120;
    cfg.maxStates = 4;
    cfg.deterministic = false;
    auto sys = equiv::random_system(rng, cfg);
    for (auto _ : st) benchmark::DoNotOptimize(equiv::greatest_simulation(sys, equiv::Flavor::Trace, policy(st)));
}
BENCHMARK(BM_GreatestSimulation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ContextSearch(benchmark::State& st) {
    auto p = parse::ref2_reader("skip ; #0 := 1"), q = parse::ref2_reader("#0 := 1");
    auto sample = ref2::default_sample();
    for (auto _ : st) benchmark::DoNotOptimize(ref2::ctx_refute(p, q, 3, sample, 4000, policy(st)));
}
BENCHMARK(BM_ContextSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
