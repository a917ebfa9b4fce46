// Acceptance suite: one self-contained check per shipped guarantee, one
// PASS/FAIL line each.  Exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "fixture_corpus.hpp"
#include "pseudo/fillmask.hpp"
#include "pseudo/labels.hpp"
#include "pseudo/overlap.hpp"
#include "pseudo/pipeline.hpp"
#include "pseudo/scoring.hpp"
#include "pseudo/stats.hpp"
#include "pseudo/stratify.hpp"

using namespace pseudo;
namespace ts = pseudo::testsupport;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
    std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name,
                detail.c_str());
    if (!ok)
        ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const ts::FixtureCorpus& fixture() {
    static ts::FixtureCorpus corpus = ts::load_corpus(
        fs::path(PSEUDO_TEST_FIXTURE_DIR) / "corpus_masked.txt",
        fs::path(PSEUDO_TEST_FIXTURE_DIR) / "corpus_manifest.json");
    return corpus;
}

std::string corpus_text(const ts::FixtureCorpus& corpus) {
    std::string text;
    for (const std::string& line : corpus.lines) {
        text += line;
        text += '\n';
    }
    return text;
}

const PseudoDatabase& db() {
    static PseudoDatabase instance = [] {
        fs::path dir = fs::temp_directory_path() / "pseudo_accept" / "db";
        fs::remove_all(dir);
        ts::write_db_fixture(dir);
        return PseudoDatabase::load_dir(dir);
    }();
    return instance;
}

// ---- 1. parser round trip -------------------------------------------------

void check_parser_round_trip() {
    const auto& corpus = fixture();
    RuleTable rules = default_rule_table();
    std::set<std::string> tags_seen;
    for (const auto& m : corpus.masks)
        tags_seen.insert(m.tag);

    auto t0 = Clock::now();
    std::size_t matched = 0;
    std::size_t found = 0;
    bool splice_ok = true;
    bool tags_ok = true;
    std::size_t mask_idx = 0;
    for (std::size_t i = 0; i < corpus.lines.size(); ++i) {
        const std::string& line = corpus.lines[i];
        LineScan scan = scan_line(line);
        found += scan.tokens.size();

        std::string spliced;
        std::size_t pos = 0;
        for (const MaskToken& tok : scan.tokens) {
            spliced.append(line.substr(pos, tok.begin - pos));
            spliced += tok.raw;
            pos = tok.end;
            // Exact match against the manifest, in order.
            if (mask_idx < corpus.masks.size()) {
                const ts::InjectedMask& expect = corpus.masks[mask_idx];
                if (expect.line == i + 1 && expect.begin == tok.begin &&
                    expect.end == tok.end) {
                    ++matched;
                    tags_ok &= to_string(rules.classify(tok)) == expect.tag;
                    ++mask_idx;
                }
            }
        }
        spliced.append(line.substr(pos));
        splice_ok &= spliced == line;
    }
    double elapsed = seconds_since(t0);

    bool ok = corpus.masks.size() >= 1000 &&
              tags_seen.size() == kTagKindCount &&
              matched == corpus.masks.size() &&
              found == corpus.masks.size() && splice_ok && tags_ok &&
              elapsed < 1.0;
    report("parser-round-trip", ok,
           cat("masks=", corpus.masks.size(), " found=", found,
               " matched=", matched, " tags=", tags_seen.size(), "/",
               kTagKindCount, " splice=", splice_ok ? "ok" : "BAD",
               " classify=", tags_ok ? "ok" : "BAD", " in ", elapsed, "s"));
}

// ---- 2. synthesis completeness & determinism --------------------------------

std::pair<std::string, CorpusCensus> synthesize_text(const std::string& input,
                                                     std::uint64_t seed,
                                                     int workers) {
    std::istringstream in(input);
    std::ostringstream out;
    SynthesisOptions options;
    options.seed = seed;
    options.workers = workers;
    RuleTable rules = default_rule_table();
    CorpusCensus census = synthesize_stream(in, out, db(), rules, options);
    return {out.str(), census};
}

void check_synthesis() {
    std::string input = corpus_text(fixture());
    auto [out42a, census42] = synthesize_text(input, 42, 2);
    auto [out42b, census42b] = synthesize_text(input, 42, 2);
    auto [out43, census43] = synthesize_text(input, 43, 2);
    (void)census42b;
    (void)census43;

    std::istringstream re_in(out42a);
    RuleTable rules = default_rule_table();
    CorpusCensus after = census_stream(re_in, rules);

    bool ok = after.total_masks == 0 && out42a == out42b &&
              out42a != out43 &&
              census42.total_masks == fixture().masks.size();
    report("synthesis-complete-determ", ok,
           cat("remaining=", after.total_masks,
               " identical=", out42a == out42b,
               " seeds-differ=", out42a != out43));

    // Throughput: 100k synthetic lines under the stated budget.
    ts::FixtureCorpus big = ts::make_corpus(100000, 7);
    std::string big_text = corpus_text(big);
    auto t0 = Clock::now();
    auto [big_out, big_census] = synthesize_text(big_text, 42, 4);
    double elapsed = seconds_since(t0);
    bool perf_ok =
        elapsed < 60.0 && big_census.total_masks == big.masks.size() &&
        !big_out.empty();
    report("synthesis-throughput", perf_ok,
           cat(big.masks.size(), " masks over 100k lines in ", elapsed,
               "s (budget 60s)"));
}

// ---- 3. weighted sampling ----------------------------------------------------

void check_weighted_sampling() {
    PseudoDatabase two;
    two.add_list("ab", {{"A", 3.0, {}}, {"B", 1.0, {}}});
    RandomStream rng(42, 0);
    const int n = 100000;
    int a = 0;
    for (int i = 0; i < n; ++i)
        a += two.sample("ab", rng).surface == "A";
    double ea = 0.75 * n;
    double eb = 0.25 * n;
    double chi2 =
        (a - ea) * (a - ea) / ea + (n - a - eb) * (n - a - eb) / eb;
    bool chi_ok = chi2 < 6.634896601021213;  // alpha = 0.01, 1 df

    AttrFilter female = AttrFilter::parse("gender=F");
    RandomStream rng2(5, 1);
    bool filter_ok = true;
    for (int i = 0; i < 10000; ++i)
        filter_ok &=
            db().sample("first_names", female, rng2).attrs.at("gender") ==
            "F";
    report("weighted-sampling", chi_ok && filter_ok,
           cat("chi2=", chi2, " (crit 6.635), filtered=",
               filter_ok ? "all-F" : "LEAK"));
}

// ---- 4. stratification --------------------------------------------------------

double fold_deviation(const std::vector<StratifyDoc>& docs,
                      const std::vector<int>& assignment,
                      const std::vector<double>& fractions) {
    std::map<std::string, std::vector<double>> counts;
    std::map<std::string, double> totals;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        std::set<std::string> labels(docs[d].labels.begin(),
                                     docs[d].labels.end());
        for (const auto& label : labels) {
            counts[label].resize(fractions.size());
            counts[label][assignment[d]] += 1;
            totals[label] += 1;
        }
    }
    double worst = 0.0;
    for (const auto& [label, row] : counts)
        for (std::size_t j = 0; j < fractions.size(); ++j)
            worst = std::max(
                worst, std::fabs(row[j] / totals[label] - fractions[j]));
    return worst;
}

void check_stratification() {
    // 200-doc multi-label fixture, every label within 2 points of 80/20.
    RandomStream gen(5, 5);
    static const char* kLabels[] = {"NAME", "DATE", "AGE", "ID", "LOC",
                                    "CONTACT"};
    std::vector<StratifyDoc> docs;
    for (int i = 0; i < 200; ++i) {
        StratifyDoc d;
        d.doc_id = "d" + std::to_string(i);
        for (auto* label : kLabels)
            if (gen.below(3) == 0)
                d.labels.push_back(label);
        if (d.labels.empty())
            d.labels.push_back("NAME");
        docs.push_back(std::move(d));
    }
    std::vector<double> fractions = {0.8, 0.2};
    RandomStream rng(6, 0);
    StratifyResult r = iterative_stratify(docs, fractions, rng);
    double dev200 = fold_deviation(docs, r.assignment, fractions);

    // 12-doc exhaustive comparison against the brute-force frontier.
    std::vector<StratifyDoc> twelve = {
        {"d0", {"A"}},      {"d1", {"A"}},      {"d2", {"A", "B"}},
        {"d3", {"A", "B"}}, {"d4", {"A", "C"}}, {"d5", {"A", "C"}},
        {"d6", {"B"}},      {"d7", {"B", "C"}}, {"d8", {"B"}},
        {"d9", {"C"}},      {"d10", {}},        {"d11", {"A", "B", "C"}}};
    RandomStream rng12(11, 0);
    StratifyResult g12 = iterative_stratify(twelve, fractions, rng12);
    double greedy_dev = fold_deviation(twelve, g12.assignment, fractions);
    double best = 1.0;
    for (unsigned mask = 0; mask < (1u << 12); ++mask) {
        int small = __builtin_popcount(mask);
        if (small != 2 && small != 3)
            continue;
        std::vector<int> assignment(12, 0);
        for (int d = 0; d < 12; ++d)
            if (mask & (1u << d))
                assignment[d] = 1;
        best =
            std::min(best, fold_deviation(twelve, assignment, fractions));
    }
    bool ok = dev200 <= 0.02 && greedy_dev <= 1.5 * best + 1e-9;
    report("stratification", ok,
           cat("200-doc max dev=", dev200, " (cap 0.02); 12-doc greedy=",
               greedy_dev, " vs optimum=", best));
}

// ---- 5. scoring oracle equivalence --------------------------------------------

void check_scoring_oracle() {
    static const char* kLabels[] = {"O", "NAME", "DATE", "AGE", "ID",
                                    "LOCATION"};
    RandomStream rng(2024, 0);
    bool ok = true;
    for (int fixture_i = 0; fixture_i < 25 && ok; ++fixture_i) {
        std::vector<TokenLabelSequence> seqs;
        std::size_t n_docs = 3 + rng.below(6);
        for (std::size_t d = 0; d < n_docs; ++d) {
            TokenLabelSequence seq;
            seq.doc_id = "doc" + std::to_string(d);
            std::size_t n = 20 + rng.below(41);
            for (std::size_t i = 0; i < n; ++i) {
                std::string gold = kLabels[rng.below(std::size(kLabels))];
                std::string pred =
                    rng.below(3) == 0
                        ? gold
                        : kLabels[rng.below(std::size(kLabels))];
                seq.tokens.push_back({"t", gold, pred});
            }
            seqs.push_back(std::move(seq));
        }
        ScoreReport got = score_tokens(seqs);

        // Naive per-label full-pass oracle.
        std::set<std::string> labels;
        for (const auto& seq : seqs)
            for (const auto& tok : seq.tokens) {
                labels.insert(tok.gold);
                labels.insert(*tok.pred);
            }
        labels.erase("O");
        for (const std::string& label : labels) {
            std::uint64_t tp = 0, fp = 0, fn = 0;
            for (const auto& seq : seqs)
                for (const auto& tok : seq.tokens) {
                    tp += tok.gold == label && *tok.pred == label;
                    fp += *tok.pred == label && tok.gold != label;
                    fn += tok.gold == label && *tok.pred != label;
                }
            const LabelScore& s = got.labels.at(label);
            double p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
            double rec = tp + fn ? double(tp) / double(tp + fn) : 0.0;
            double f1 = p + rec > 0 ? 2 * p * rec / (p + rec) : 0.0;
            ok &= s.tp == tp && s.fp == fp && s.fn == fn;
            ok &= std::fabs(s.precision - p) <= 1e-12;
            ok &= std::fabs(s.recall - rec) <= 1e-12;
            ok &= std::fabs(s.f1 - f1) <= 1e-12;
        }
    }
    report("scoring-oracle", ok, "25 randomized fixtures, tolerance 1e-12");
}

// ---- 6. significance tests -----------------------------------------------------

void check_significance() {
    McNemarResult mc = mcnemar({0, 10, 20, 0}, McNemarMode::Corrected);
    double erfc_oracle = std::erfc(std::sqrt(2.7 / 2.0));
    bool mc_ok = std::fabs(mc.statistic - 2.7) < 1e-12 &&
                 std::fabs(mc.p_value - erfc_oracle) < 1e-3;

    McNemarResult same = mcnemar({50, 0, 0, 50});
    bool same_ok = same.p_value == 1.0;

    AnovaResult an = anova_oneway({{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
    // Independent F(2, 6) tail by quadrature of the density.
    auto f_pdf = [](double x) {
        double d1 = 2.0, d2 = 6.0;
        double log_num = d1 * std::log(d1 * x) + d2 * std::log(d2) -
                         (d1 + d2) * std::log(d1 * x + d2);
        double log_beta = std::lgamma(d1 / 2) + std::lgamma(d2 / 2) -
                          std::lgamma((d1 + d2) / 2);
        return std::exp(0.5 * log_num - std::log(x) - log_beta);
    };
    const int steps = 200000;
    double a = 1e-12, b = 3.0;
    double h = (b - a) / steps;
    double integral = f_pdf(a) + f_pdf(b);
    for (int i = 1; i < steps; ++i)
        integral += f_pdf(a + i * h) * (i % 2 ? 4.0 : 2.0);
    integral *= h / 3.0;
    double f_oracle = 1.0 - integral;
    bool an_ok = std::fabs(an.f - 3.0) < 1e-12 &&
                 std::fabs(an.p_value - f_oracle) < 1e-6;

    report("significance-tests", mc_ok && same_ok && an_ok,
           cat("chi2=", mc.statistic, " p=", mc.p_value, " (oracle ",
               erfc_oracle, "); identical p=", same.p_value, "; F=", an.f,
               " p=", an.p_value, " (oracle ", f_oracle, ")"));
}

// ---- 7. remap totality -----------------------------------------------------------

void check_remap() {
    LabelMap map = default_label_map();
    bool count_ok = map.source_label_count() == 23;
    bool rows_ok = map.target_for("HOSPITAL") == "LOCATION" &&
                   map.target_for("PATIENT") == "NAME";

    RandomStream rng(77, 0);
    std::vector<std::string> sources;
    for (const auto& [source, target] : map.entries())
        sources.push_back(source);
    bool preserved = true;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<TokenLabelSequence> seqs(1 + rng.below(4));
        std::size_t total_before = 0;
        for (std::size_t d = 0; d < seqs.size(); ++d) {
            seqs[d].doc_id = "d" + std::to_string(d);
            std::size_t n = 5 + rng.below(50);
            total_before += n;
            for (std::size_t i = 0; i < n; ++i)
                seqs[d].tokens.push_back(
                    {"t", sources[rng.below(sources.size())],
                     std::optional<std::string>(
                         sources[rng.below(sources.size())])});
        }
        remap_sequences(seqs, map);
        std::size_t total_after = 0;
        for (const auto& seq : seqs)
            total_after += seq.tokens.size();
        preserved &= total_before == total_after;
    }
    report("remap-totality", count_ok && rows_ok && preserved,
           cat("sources=", map.source_label_count(),
               " key-rows=", rows_ok, " counts-preserved=", preserved));
}

// ---- 8. overlap analysis ----------------------------------------------------------

void check_overlap() {
    // 20 corpus hospital names; 5 planted verbatim in the gazetteer, 3
    // more that only match once "hospital"/"clinic" are stripped.
    std::vector<std::string> corpus;
    std::vector<GazetteerEntry> list;
    for (int i = 0; i < 5; ++i) {
        corpus.push_back("Shared Medical " + std::to_string(i));
        list.push_back({"Shared Medical " + std::to_string(i), 1.0, {}});
    }
    corpus.push_back("Mercy Hospital");
    list.push_back({"Mercy Clinic", 1.0, {}});
    corpus.push_back("Lakeview Clinic");
    list.push_back({"Lakeview Hospital", 1.0, {}});
    corpus.push_back("Summit Hospital");
    list.push_back({"Summit", 1.0, {}});
    for (int i = 0; i < 12; ++i)
        corpus.push_back("Corpus Only " + std::to_string(i));

    OverlapResult plain = gazetteer_overlap(corpus, list);
    OverlapResult stripped =
        gazetteer_overlap(corpus, list, {"hospital", "clinic"});
    bool ok = plain.shared == 5 && plain.corpus_size == 20 &&
              std::fabs(plain.fraction - 0.25) < 1e-12 &&
              stripped.shared == 8 && stripped.corpus_size == 20 &&
              std::fabs(stripped.fraction - 0.40) < 1e-12;
    report("overlap-analysis", ok,
           cat("plain=", plain.shared, "/", plain.corpus_size, "=",
               plain.fraction, "; stripped=", stripped.shared, "/",
               stripped.corpus_size, "=", stripped.fraction));
}

// ---- 9. fill-mask protocol conformance ---------------------------------------------

void check_fillmask() {
    FillMaskStubServer stub({{"Jones", 0.9}, {"Smith", 0.05}});
    int port = stub.start();

    GeneratorConfig cfg;
    cfg.fillmask_endpoint = "127.0.0.1:" + std::to_string(port);
    Generator gen(&db(), cfg);
    RandomStream rng(1, 0);

    auto gen_for = [&](const Generator& g, std::string_view line,
                       TagKind tag) {
        LineScan scan = scan_line(line);
        GenerationContext ctx{line, scan.tokens.at(0), tag, nullptr};
        return g.generate(ctx, rng);
    };
    GenResult name =
        gen_for(gen, "Dr. [**Name (NI) 5**] called", TagKind::NAME);
    GenResult unk =
        gen_for(gen, "x [**CC Contact Info 1**] y", TagKind::UNKNOWN);
    bool stub_ok = name.text == "Jones" && unk.text == "Jones" &&
                   name.source == GenSource::FillMask && !name.incident;

    // Backend down, strict off: per-tag fallback, exactly one incident
    // per failing mask.
    GeneratorConfig down_cfg;
    down_cfg.fillmask_endpoint = "127.0.0.1:1";
    down_cfg.fillmask_retries = 1;
    down_cfg.fillmask_timeout_ms = 100;
    down_cfg.memoize = false;
    Generator down(&db(), down_cfg);
    int incidents = 0;
    bool fallback_ok = true;
    for (int i = 0; i < 5; ++i) {
        GenResult r = gen_for(down, "x [**Name (NI) 5**] y", TagKind::NAME);
        fallback_ok &= r.text == std::string(fallback_for(TagKind::NAME)) &&
                       r.source == GenSource::Fallback;
        incidents += r.incident.has_value();
    }
    report("fillmask-protocol", stub_ok && fallback_ok && incidents == 5,
           cat("stub-top=", name.text, " fallback=", fallback_ok,
               " incidents=", incidents, "/5"));
    stub.stop();
}

// ---- 10. fuzzing --------------------------------------------------------------------

void check_fuzzing() {
    RandomStream rng(31337, 0);
    SentenceSegmenter segmenter;
    static const std::string_view pieces[] = {
        "[**", "**]", "[", "*", "]", "(", ")", " ", "\t", "a", "Zz", "9",
        "Last Name", "2151-7-16", "\xC3\xA9", "\xF0\x9F\x20", ". ", "1. ",
        "- ", "\xFF", "\x01",
    };
    auto t0 = Clock::now();
    bool ok = true;
    std::size_t tokens = 0;
    try {
        for (int i = 0; i < 1000000; ++i) {
            std::string line;
            std::size_t n = rng.below(12);
            for (std::size_t j = 0; j < n; ++j)
                line += pieces[rng.below(std::size(pieces))];
            LineScan scan = scan_line(line);
            tokens += scan.tokens.size();
            for (const MaskToken& t : scan.tokens)
                ok &= t.end > t.begin && t.end <= line.size();
            auto sentences = segmenter.split_note(line);
            for (const auto& s : sentences)
                ok &= !s.empty() && s.find('\n') == std::string::npos;
        }
    } catch (const std::exception&) {
        ok = false;
    }
    report("fuzzing", ok,
           cat("1e6 junk lines, ", tokens, " tokens parsed, ",
               seconds_since(t0), "s, no crashes"));
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    check_parser_round_trip();
    check_synthesis();
    check_weighted_sampling();
    check_stratification();
    check_scoring_oracle();
    check_significance();
    check_remap();
    check_overlap();
    check_fillmask();
    check_fuzzing();
    std::printf("%d failure(s)\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
