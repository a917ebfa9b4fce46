#include <benchmark/benchmark.h>

#include "fixture_corpus.hpp"
#include "pseudo/mask_grammar.hpp"
#include "pseudo/segmenter.hpp"

namespace {

using namespace pseudo;

const std::vector<std::string>& corpus_lines() {
    static std::vector<std::string> lines =
        testsupport::make_corpus(2000, 99).lines;
    return lines;
}

void ScanLine(benchmark::State& state) {
    const auto& lines = corpus_lines();
    std::size_t bytes = 0;
    for (auto _ : state) {
        std::size_t tokens = 0;
        for (const std::string& line : lines) {
            LineScan scan = scan_line(line);
            tokens += scan.tokens.size();
            bytes += line.size();
        }
        benchmark::DoNotOptimize(tokens);
    }
    state.SetBytesProcessed(static_cast<int64_t>(bytes));
}
BENCHMARK(ScanLine);

void ClassifyDefaultTable(benchmark::State& state) {
    RuleTable table = default_rule_table();
    const auto& lines = corpus_lines();
    std::vector<MaskToken> tokens;
    for (const std::string& line : lines)
        for (MaskToken& t : scan_line(line).tokens)
            tokens.push_back(std::move(t));
    for (auto _ : state) {
        std::size_t sum = 0;
        for (const MaskToken& t : tokens)
            sum += static_cast<std::size_t>(table.classify(t));
        benchmark::DoNotOptimize(sum);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(tokens.size()));
}
BENCHMARK(ClassifyDefaultTable);

void SegmentNote(benchmark::State& state) {
    SentenceSegmenter segmenter;
    std::string note;
    for (const std::string& line : corpus_lines()) {
        note += line;
        note += '\n';
    }
    for (auto _ : state) {
        auto sentences = segmenter.split_note(note);
        benchmark::DoNotOptimize(sentences.size());
    }
    state.SetBytesProcessed(state.iterations() *
                            static_cast<int64_t>(note.size()));
}
BENCHMARK(SegmentNote);

}  // namespace

BENCHMARK_MAIN();
