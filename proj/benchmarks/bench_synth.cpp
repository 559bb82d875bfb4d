#include <benchmark/benchmark.h>

#include <random>

#include "instances.hpp"
#include "support.hpp"
#include "webqa/dsl.hpp"
#include "webqa/select.hpp"
#include "webqa/synth.hpp"

namespace webqa {
namespace {

SynthConfig motivating_config(bool no_prune, bool no_decomp) {
  SynthConfig cfg;
  cfg.grammar = testing::motivating_grammar();
  cfg.no_prune = no_prune;
  cfg.no_decomp = no_decomp;
  return cfg;
}

// Arg 0: pruned, 1: no_prune, 2: no_decomp.
void BM_SynthesizeMotivating(benchmark::State& state) {
  const ExampleSet examples = testing::motivating_examples();
  const SynthConfig cfg = motivating_config(state.range(0) == 1, state.range(0) == 2);
  std::uint64_t expansions = 0;
  for (auto _ : state) {
    CachingProvider provider(testing::fixture_provider());
    const OptimalSet optimal = synthesize(examples, provider, cfg);
    expansions = optimal.stats().expansions();
    benchmark::DoNotOptimize(optimal.count());
  }
  state.counters["expansions"] = static_cast<double>(expansions);
}
BENCHMARK(BM_SynthesizeMotivating)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_SynthesizeRandomInstances(benchmark::State& state) {
  std::mt19937_64 rng(17);
  std::vector<testing::TinyInstance> instances;
  for (int i = 0; i < 20; ++i) instances.push_back(testing::random_instance(rng));
  for (auto _ : state) {
    for (const auto& inst : instances) {
      SynthConfig cfg = inst.config;
      cfg.no_prune = state.range(0) == 1;
      benchmark::DoNotOptimize(synthesize(inst.examples, testing::tiny_provider(), cfg).count());
    }
  }
}
BENCHMARK(BM_SynthesizeRandomInstances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BruteForceRandomInstances(benchmark::State& state) {
  std::mt19937_64 rng(17);
  std::vector<testing::TinyInstance> instances;
  for (int i = 0; i < 20; ++i) instances.push_back(testing::random_instance(rng));
  for (auto _ : state) {
    for (const auto& inst : instances) {
      benchmark::DoNotOptimize(brute_force_synthesize(inst.examples, testing::tiny_provider(), inst.config).count());
    }
  }
}
BENCHMARK(BM_BruteForceRandomInstances)->Unit(benchmark::kMillisecond);

void BM_Tokenize(benchmark::State& state) {
  const PagePtr page = testing::load_fixture_page("motivating/page_a.html");
  const std::string text = page->node_text(page->root(), true);
  for (auto _ : state) benchmark::DoNotOptimize(tokenize(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize);

void BM_EvalReferenceProgram(benchmark::State& state) {
  const dsl::Program program =
      dsl::parse_program(testing::read_file(testing::fixture_path("motivating/program.json")));
  const PagePtr page = testing::load_fixture_page("motivating/page_a.html");
  const auto& provider = *testing::fixture_provider();
  for (auto _ : state) benchmark::DoNotOptimize(dsl::eval_program(program, *page, provider));
}
BENCHMARK(BM_EvalReferenceProgram);

void BM_SelectProgram(benchmark::State& state) {
  const ExampleSet examples = testing::motivating_examples();
  CachingProvider provider(testing::fixture_provider());
  const OptimalSet optimal = synthesize(examples, provider, motivating_config(false, false));
  const std::vector<PagePtr> unlabeled{testing::heldout_page()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        select_program(optimal, unlabeled, static_cast<std::size_t>(state.range(0)), 7, provider).loss);
  }
}
BENCHMARK(BM_SelectProgram)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace webqa

BENCHMARK_MAIN();
