#include <benchmark/benchmark.h>

#include <filesystem>
#include <sstream>

#include "fixture_corpus.hpp"
#include "pseudo/gazetteer.hpp"
#include "pseudo/pipeline.hpp"

namespace {

using namespace pseudo;
namespace fs = std::filesystem;

const PseudoDatabase& bench_db() {
    static PseudoDatabase db = [] {
        fs::path dir = fs::temp_directory_path() / "pseudo_bench" / "db";
        fs::remove_all(dir);
        testsupport::write_db_fixture(dir);
        return PseudoDatabase::load_dir(dir);
    }();
    return db;
}

const std::string& bench_corpus() {
    static std::string text = [] {
        std::string t;
        for (const auto& line : testsupport::make_corpus(20000, 3).lines) {
            t += line;
            t += '\n';
        }
        return t;
    }();
    return text;
}

void WeightedSample(benchmark::State& state) {
    RandomStream rng(1, 0);
    const auto& db = bench_db();
    for (auto _ : state) {
        benchmark::DoNotOptimize(db.sample("last_names", rng).surface.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(WeightedSample);

void FilteredSample(benchmark::State& state) {
    RandomStream rng(1, 0);
    const auto& db = bench_db();
    AttrFilter female = AttrFilter::parse("gender=F");
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            db.sample("first_names", female, rng).surface.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(FilteredSample);

void Synthesize(benchmark::State& state) {
    RuleTable rules = default_rule_table();
    SynthesisOptions options;
    options.seed = 42;
    options.workers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        std::istringstream in(bench_corpus());
        std::ostringstream out;
        CorpusCensus census =
            synthesize_stream(in, out, bench_db(), rules, options);
        benchmark::DoNotOptimize(census.total_masks);
    }
    state.SetBytesProcessed(state.iterations() *
                            static_cast<int64_t>(bench_corpus().size()));
}
BENCHMARK(Synthesize)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void CensusOnly(benchmark::State& state) {
    RuleTable rules = default_rule_table();
    for (auto _ : state) {
        std::istringstream in(bench_corpus());
        CorpusCensus census = census_stream(in, rules);
        benchmark::DoNotOptimize(census.total_masks);
    }
    state.SetBytesProcessed(state.iterations() *
                            static_cast<int64_t>(bench_corpus().size()));
}
BENCHMARK(CensusOnly)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
