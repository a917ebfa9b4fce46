#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixture_corpus.hpp"
#include "pseudo/noteevents.hpp"
#include "pseudo/pipeline.hpp"

using namespace pseudo;
namespace ts = pseudo::testsupport;
namespace fs = std::filesystem;

namespace {

const PseudoDatabase& fixture_db() {
    static PseudoDatabase db = [] {
        fs::path dir = fs::temp_directory_path() / "pseudo_tests" / "pipe_db";
        fs::remove_all(dir);
        ts::write_db_fixture(dir);
        return PseudoDatabase::load_dir(dir);
    }();
    return db;
}

const ts::FixtureCorpus& fixture() {
    static ts::FixtureCorpus corpus = ts::load_corpus(
        fs::path(PSEUDO_TEST_FIXTURE_DIR) / "corpus_masked.txt",
        fs::path(PSEUDO_TEST_FIXTURE_DIR) / "corpus_manifest.json");
    return corpus;
}

std::string fixture_text() {
    std::string text;
    for (const std::string& line : fixture().lines) {
        text += line;
        text += '\n';
    }
    return text;
}

std::string run_synthesize(const std::string& input, std::uint64_t seed,
                           int workers, CorpusCensus* census_out = nullptr,
                           std::vector<IncidentRecord>* incidents = nullptr,
                           bool strict = false) {
    std::istringstream in(input);
    std::ostringstream out;
    SynthesisOptions options;
    options.seed = seed;
    options.workers = workers;
    options.strict = strict;
    options.block_lines = 64;  // exercise multi-block paths in tests
    options.block_lines_max = 256;
    RuleTable rules = default_rule_table();
    CorpusCensus census = synthesize_stream(in, out, fixture_db(), rules,
                                            options, incidents);
    if (census_out)
        *census_out = census;
    return out.str();
}

}  // namespace

TEST_CASE("census: empty input is an all-zero census") {
    std::istringstream in("");
    RuleTable rules = default_rule_table();
    CorpusCensus census = census_stream(in, rules);
    CHECK(census.total_lines == 0);
    CHECK(census.total_masks == 0);
    CHECK(census.total_ws_tokens == 0);
    CHECK(census.mask_fraction() == 0.0);
}

TEST_CASE("census: fixture counts equal the injection manifest") {
    std::istringstream in(fixture_text());
    RuleTable rules = default_rule_table();
    CorpusCensus census = census_stream(in, rules);
    CHECK(census.total_lines == fixture().lines.size());
    CHECK(census.total_masks == fixture().masks.size());
    CHECK(census.incidents == 0);
    for (const auto& [tag, expected] : fixture().by_tag)
        CHECK_MESSAGE(census.by_tag[static_cast<std::size_t>(
                          *tag_from_string(tag))] == expected,
                      tag);
}

TEST_CASE("census: whitespace token denominator counts masks once") {
    std::istringstream in("one [**Last Name (STitle) 2601**] three\n");
    RuleTable rules = default_rule_table();
    CorpusCensus census = census_stream(in, rules);
    CHECK(census.total_ws_tokens == 3);
    CHECK(census.total_masks == 1);
    CHECK(census.mask_fraction() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("synthesize: unmasked lines pass through unchanged") {
    std::string input = "Pt resting comfortably.\n\nNo masks here at all.\n";
    CHECK(run_synthesize(input, 42, 1) == input);
}

TEST_CASE("synthesize: byte-identical for equal seeds, different across") {
    std::string input = fixture_text();
    std::string a = run_synthesize(input, 42, 1);
    std::string b = run_synthesize(input, 42, 1);
    std::string c = run_synthesize(input, 43, 1);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("synthesize: worker count never changes the bytes") {
    std::string input = fixture_text();
    std::string serial = run_synthesize(input, 42, 1);
    std::string parallel = run_synthesize(input, 42, 3);
    CHECK(serial == parallel);
}

TEST_CASE("synthesize: output is mask-free and line count is preserved") {
    std::string input = fixture_text();
    CorpusCensus census;
    std::string output = run_synthesize(input, 42, 2, &census);
    CHECK(census.total_masks == fixture().masks.size());

    std::istringstream out_in(output);
    RuleTable rules = default_rule_table();
    CorpusCensus after = census_stream(out_in, rules);
    CHECK(after.total_masks == 0);
    CHECK(after.total_lines == census.total_lines);
    CHECK(after.incidents == 0);
}

TEST_CASE("synthesize: text outside mask spans is byte-identical") {
    std::string input = fixture_text();
    std::string output = run_synthesize(input, 42, 1);
    std::istringstream in_lines(input);
    std::istringstream out_lines(output);
    std::string in_line;
    std::string out_line;
    std::uint64_t line_no = 0;
    while (std::getline(in_lines, in_line)) {
        REQUIRE(std::getline(out_lines, out_line));
        ++line_no;
        LineScan in_scan = scan_line(in_line);
        if (in_scan.tokens.empty()) {
            CHECK(out_line == in_line);
            continue;
        }
        // The input's outside segments must appear in the output, in
        // order: the leading one as a prefix, the trailing one as a
        // suffix, interior ones by ordered search.
        std::string prefix = in_line.substr(0, in_scan.tokens.front().begin);
        std::string suffix = in_line.substr(in_scan.tokens.back().end);
        REQUIRE(out_line.size() >= prefix.size() + suffix.size());
        CHECK(out_line.substr(0, prefix.size()) == prefix);
        CHECK(out_line.substr(out_line.size() - suffix.size()) == suffix);
        std::size_t pos = prefix.size();
        for (std::size_t t = 1; t < in_scan.tokens.size(); ++t) {
            std::string middle =
                in_line.substr(in_scan.tokens[t - 1].end,
                               in_scan.tokens[t].begin -
                                   in_scan.tokens[t - 1].end);
            std::size_t found = out_line.find(middle, pos);
            REQUIRE(found != std::string::npos);
            pos = found + middle.size();
        }
    }
    CHECK(!std::getline(out_lines, out_line));
}

TEST_CASE("synthesize: source counts cover every replacement") {
    CorpusCensus census;
    run_synthesize(fixture_text(), 42, 1, &census);
    std::uint64_t total = 0;
    for (std::uint64_t n : census.by_source)
        total += n;
    CHECK(total == census.total_masks);
    CHECK(census.by_source[static_cast<std::size_t>(GenSource::Gazetteer)] >
          0);
    CHECK(census.by_source[static_cast<std::size_t>(GenSource::Randomized)] >
          0);
    // No backend configured: fill-mask tags all fall back.  Memoized
    // entities replay the fallback surface without a fresh incident, so
    // incidents count generation events, not replays.
    std::uint64_t fallbacks =
        census.by_source[static_cast<std::size_t>(GenSource::Fallback)];
    CHECK(fallbacks > 0);
    CHECK(census.incidents > 0);
    CHECK(census.incidents <= fallbacks);
}

TEST_CASE("synthesize: incidents arrive in input order") {
    std::vector<IncidentRecord> incidents;
    run_synthesize(fixture_text(), 42, 3, nullptr, &incidents);
    CHECK(!incidents.empty());
    for (std::size_t i = 1; i < incidents.size(); ++i)
        CHECK(incidents[i - 1].line <= incidents[i].line);
    for (const IncidentRecord& inc : incidents) {
        CHECK(inc.kind == "fillmask_unconfigured");
        CHECK(inc.action == "fallback");
        CHECK(!inc.to_json_line().empty());
    }
}

TEST_CASE("synthesize: unterminated masks skip with incident, strict aborts") {
    std::string input = "ok [**Last Name 1**] then [**broken\n";
    CorpusCensus census;
    std::vector<IncidentRecord> incidents;
    std::string output = run_synthesize(input, 1, 1, &census, &incidents);
    REQUIRE(incidents.size() == 1);
    CHECK(incidents[0].kind == "unterminated_mask");
    CHECK(incidents[0].line == 1);
    CHECK(incidents[0].offset == 26);
    CHECK(output.find("[**broken") != std::string::npos);  // left as-is
    CHECK(output.find("[**Last Name 1**]") == std::string::npos);

    CHECK_THROWS_AS(run_synthesize(input, 1, 1, nullptr, nullptr, true),
                    PipelineAbort);
}

TEST_CASE("synthesize: memoized entities repeat within a note only") {
    std::string input =
        "Dr. [**Last Name (STitle) 77**] called.\n"
        "Later [**Last Name (STitle) 77**] signed.\n"
        "\n"
        "Next note: [**Last Name (STitle) 77**] again.\n";
    std::string output = run_synthesize(input, 7, 1);
    std::istringstream out(output);
    std::string l1, l2, blank, l3;
    std::getline(out, l1);
    std::getline(out, l2);
    std::getline(out, blank);
    std::getline(out, l3);
    // Same surface within the note.
    std::string s1 = l1.substr(4, l1.size() - 4 - 8);   // "Dr. " ... " called."
    std::string s2 = l2.substr(6, l2.size() - 6 - 8);   // "Later " ... " signed."
    CHECK(s1 == s2);
}

TEST_CASE("census json shape") {
    std::istringstream in(fixture_text());
    RuleTable rules = default_rule_table();
    CorpusCensus census = census_stream(in, rules);
    std::string j = census.to_json(false);
    CHECK(j.find("\"total_mask_tokens\"") != std::string::npos);
    CHECK(j.find("\"by_tag\"") != std::string::npos);
    CHECK(j.find("\"by_source\"") == std::string::npos);
    CHECK(census.to_json(true).find("\"by_source\"") != std::string::npos);
}

TEST_CASE("normalize: noteevents csv with quoted multiline text") {
    std::string csv =
        "ROW_ID,CATEGORY,TEXT\n"
        "1,Nursing,\"Pt stable. Tolerating po.\n"
        "Plan:\n"
        "1. advance diet\n"
        "2. ambulate\n"
        "\"\n"
        "2,Discharge,\"Seen by Dr. [**Last Name (STitle) 2601**] today. "
        "Doing well.\"\n";
    std::istringstream in(csv);
    NoteEventsCsvSource source(in, "notes.csv");
    std::ostringstream out;
    SentenceSegmenter segmenter;
    NormalizeStats stats = normalize_stream(source, out, segmenter);
    CHECK(stats.notes == 2);
    CHECK(stats.skipped_notes == 0);
    std::string text = out.str();
    CHECK(text.find("1. advance diet\n") != std::string::npos);
    CHECK(text.find("2. ambulate\n") != std::string::npos);
    CHECK(text.find("[**Last Name (STitle) 2601**]") != std::string::npos);
    // Two sentences from the discharge note.
    CHECK(text.find("Doing well.\n") != std::string::npos);
    CHECK(stats.sentences >= 5);
}

TEST_CASE("normalize: undecodable note skips (strict aborts)") {
    std::string csv = "ROW_ID,TEXT\n1,\"ok note. fine.\"\n2,\"bad \xFF\xFE "
                      "bytes\"\n";
    {
        std::istringstream in(csv);
        NoteEventsCsvSource source(in, "notes.csv");
        std::ostringstream out;
        SentenceSegmenter segmenter;
        std::vector<IncidentRecord> incidents;
        NormalizeStats stats =
            normalize_stream(source, out, segmenter, false, &incidents);
        CHECK(stats.notes == 1);
        CHECK(stats.skipped_notes == 1);
        REQUIRE(incidents.size() == 1);
        CHECK(incidents[0].kind == "undecodable_note");
        CHECK(incidents[0].note_id == "2");
    }
    {
        std::istringstream in(csv);
        NoteEventsCsvSource source(in, "notes.csv");
        std::ostringstream out;
        SentenceSegmenter segmenter;
        CHECK_THROWS_AS(normalize_stream(source, out, segmenter, true),
                        PipelineAbort);
    }
}

TEST_CASE("noteevents: malformed csv names the record") {
    std::string csv = "ROW_ID,TEXT\n1,\"unterminated\n";
    std::istringstream in(csv);
    NoteEventsCsvSource source(in, "notes.csv");
    CHECK_THROWS_AS(source.next(), Error);

    std::string missing = "ROW_ID,NOPE\n";
    std::istringstream in2(missing);
    CHECK_THROWS_AS(NoteEventsCsvSource(in2, "notes.csv"), Error);

    std::string short_row = "ROW_ID,CATEGORY,TEXT\n1,x\n";
    std::istringstream in3(short_row);
    NoteEventsCsvSource source3(in3, "notes.csv");
    CHECK_THROWS_AS(source3.next(), Error);
}

TEST_CASE("normalize then synthesize round trip keeps line counts") {
    std::string csv =
        "ROW_ID,TEXT\n"
        "10,\"Admitted [**2151-7-16**]. Seen by Dr. [**Last Name (STitle) "
        "2601**]. Stable.\"\n";
    std::istringstream in(csv);
    NoteEventsCsvSource source(in, "notes.csv");
    std::ostringstream flat;
    SentenceSegmenter segmenter;
    normalize_stream(source, flat, segmenter);

    CorpusCensus census;
    std::string pseudo_text = run_synthesize(flat.str(), 11, 1, &census);
    CHECK(census.total_masks == 2);
    std::istringstream again(pseudo_text);
    RuleTable rules = default_rule_table();
    CHECK(census_stream(again, rules).total_masks == 0);
}
