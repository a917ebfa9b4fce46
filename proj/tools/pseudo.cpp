// pseudo: corpus re-synthesis toolkit command line.
//
// Subcommands map 1:1 onto the library: build-db, normalize, census,
// synthesize, split, remap, score, mcnemar, anova, overlap, stub-server,
// emit-manifest.  All reports are JSON on stdout (or --out); exit codes:
// 0 success, 1 validation error, 2 runtime incident in strict mode.

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pseudo/fillmask.hpp"
#include "pseudo/gazetteer.hpp"
#include "pseudo/labels.hpp"
#include "pseudo/mask_grammar.hpp"
#include "pseudo/noteevents.hpp"
#include "pseudo/overlap.hpp"
#include "pseudo/pipeline.hpp"
#include "pseudo/scoring.hpp"
#include "pseudo/stats.hpp"
#include "pseudo/stratify.hpp"

namespace {

using nlohmann::json;
using namespace pseudo;

void emit_report(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        fail("cannot write --out file: ", out_path);
    out << text << "\n";
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail("cannot open --in file: ", path);
    return in;
}

std::pair<int, int> parse_range(const std::string& text, const char* flag) {
    std::size_t colon = text.find(':');
    if (colon == std::string::npos)
        fail(flag, " expects LO:HI, got '", text, "'");
    try {
        return {std::stoi(text.substr(0, colon)),
                std::stoi(text.substr(colon + 1))};
    } catch (const std::exception&) {
        fail(flag, " expects LO:HI, got '", text, "'");
    }
}

std::vector<double> parse_fractions(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ','))
        out.push_back(std::stod(part));
    return out;
}

RuleTable load_rules(const std::string& path) {
    return path.empty() ? default_rule_table() : RuleTable::load_file(path);
}

void write_incident_report(const std::vector<IncidentRecord>& incidents,
                           const std::string& path) {
    if (path.empty()) {
        if (!incidents.empty())
            std::cerr << "warning: " << incidents.size()
                      << " incident(s); pass --report FILE for details\n";
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail("cannot write --report file: ", path);
    for (const IncidentRecord& inc : incidents)
        out << inc.to_json_line() << "\n";
}

struct SynthesizeArgs {
    std::string in;
    std::string out;
    std::string db_dir;
    std::string rules;
    std::string report;
    std::string out_report;
    std::uint64_t seed = 0;
    int workers = 0;
    std::size_t block_lines = 4096;
    bool strict = false;
    bool memo_off = false;
    std::string age_range = "1:90";
    std::string date_window = "1960:2020";
    std::string endpoint;
    std::string mask_marker = "[MASK]";
    int retries = 3;
    int timeout_ms = 5000;
    int inflight = 4;
};

int run_synthesize(const SynthesizeArgs& args) {
    SynthesisOptions options;
    options.seed = args.seed;
    options.workers = args.workers > 0
                          ? args.workers
                          : static_cast<int>(
                                std::thread::hardware_concurrency());
    options.strict = args.strict;
    options.block_lines = args.block_lines;
    options.block_lines_max = args.block_lines * 4;
    options.generator.memoize = !args.memo_off;
    auto [age_lo, age_hi] = parse_range(args.age_range, "--age-range");
    options.generator.age_lo = age_lo;
    options.generator.age_hi = age_hi;
    auto [y0, y1] = parse_range(args.date_window, "--date-window");
    options.generator.date_window = {y0, y1};
    options.generator.fillmask_endpoint = args.endpoint;
    options.generator.mask_marker = args.mask_marker;
    options.generator.fillmask_retries = args.retries;
    options.generator.fillmask_timeout_ms = args.timeout_ms;
    options.generator.fillmask_inflight = args.inflight;

    PseudoDatabase db = PseudoDatabase::load_dir(args.db_dir);
    RuleTable rules = load_rules(args.rules);

    std::ifstream in = open_input(args.in);
    std::ofstream out(args.out, std::ios::binary);
    if (!out)
        fail("cannot write --out file: ", args.out);

    std::vector<IncidentRecord> incidents;
    CorpusCensus census =
        synthesize_stream(in, out, db, rules, options, &incidents);
    write_incident_report(incidents, args.report);
    emit_report(census.to_json(true), args.out_report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo: mask-token corpus re-synthesis toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Read options from a TOML config file (flags win)");
    bool dump_config = false;
    app.add_flag("--dump-config", dump_config,
                 "Print the effective configuration and exit")
        ->configurable(false);

    // ---- build-db ----------------------------------------------------
    auto* build_db = app.add_subcommand(
        "build-db", "Ingest year-partitioned raw name counts into list files");
    std::string bd_names, bd_out, bd_years = "1960:2020";
    build_db->add_option("--names", bd_names,
                         "Directory of yob<YEAR>.txt name,gender,count files")
        ->required();
    build_db->add_option("--out", bd_out, "Output list directory")->required();
    build_db->add_option("--years", bd_years, "Year range LO:HI")->capture_default_str();
    std::string bd_report;
    build_db->add_option("--report-out", bd_report,
                         "Write the JSON report here instead of stdout");
    build_db->callback([&] {
        if (dump_config)
            return;
        auto [lo, hi] = parse_range(bd_years, "--years");
        IngestStats stats = ingest_census_names(bd_names, bd_out, lo, hi);
        json j = {{"files_read", stats.files_read},
                  {"rows_read", stats.rows_read},
                  {"names_out", stats.names_out},
                  {"years", {stats.year_lo, stats.year_hi}},
                  {"out", bd_out}};
        emit_report(j.dump(2), bd_report);
    });

    // ---- normalize ---------------------------------------------------
    auto* normalize = app.add_subcommand(
        "normalize", "Flatten notes into one sentence per line");
    std::string nm_in, nm_out, nm_format = "noteevents", nm_report,
                nm_note_id = "note";
    bool nm_strict = false, nm_no_lists = false;
    normalize->add_option("--in", nm_in, "Input file")->required();
    normalize->add_option("--out", nm_out, "Flat sentence output file")
        ->required();
    normalize
        ->add_option("--format", nm_format,
                     "Input format: noteevents (ROW_ID,TEXT csv) or text")
        ->capture_default_str()
        ->check(CLI::IsMember({"noteevents", "text"}));
    normalize->add_option("--note-id", nm_note_id,
                          "Note id used with --format text")->capture_default_str();
    normalize->add_flag("--strict", nm_strict,
                        "Abort on the first undecodable note");
    normalize->add_flag("--no-list-reconstruction", nm_no_lists,
                        "Disable enumerated/itemized list rejoining");
    normalize->add_option("--report", nm_report,
                          "Write incident JSON lines here");
    normalize->callback([&] {
        if (dump_config)
            return;
        std::ifstream in = open_input(nm_in);
        std::ofstream out(nm_out, std::ios::binary);
        if (!out)
            fail("cannot write --out file: ", nm_out);
        SegmenterConfig seg_cfg;
        seg_cfg.reconstruct_lists = !nm_no_lists;
        SentenceSegmenter segmenter(seg_cfg);
        std::vector<IncidentRecord> incidents;
        NormalizeStats stats;
        if (nm_format == "noteevents") {
            NoteEventsCsvSource source(in, nm_in);
            stats = normalize_stream(source, out, segmenter, nm_strict,
                                     &incidents);
        } else {
            PlainTextNoteSource source(in, nm_note_id);
            stats = normalize_stream(source, out, segmenter, nm_strict,
                                     &incidents);
        }
        write_incident_report(incidents, nm_report);
        emit_report(stats.to_json(), "");
    });

    // ---- census --------------------------------------------------------
    auto* census_cmd = app.add_subcommand(
        "census", "Count mask tokens per tag without replacing them");
    std::string cs_in, cs_rules, cs_out;
    bool cs_strict = false;
    census_cmd->add_option("--in", cs_in, "Masked sentence file")->required();
    census_cmd->add_option("--rules", cs_rules,
                           "Rule table TSV (default: built-in)");
    census_cmd->add_option("--out", cs_out, "Write JSON here, not stdout");
    census_cmd->add_flag("--strict", cs_strict,
                         "Abort on the first malformed mask");
    census_cmd->callback([&] {
        if (dump_config)
            return;
        std::ifstream in = open_input(cs_in);
        RuleTable rules = load_rules(cs_rules);
        CorpusCensus census = census_stream(in, rules, nullptr, cs_strict);
        emit_report(census.to_json(false), cs_out);
    });

    // ---- synthesize ----------------------------------------------------
    auto* synth = app.add_subcommand(
        "synthesize", "Replace every mask token with generated pseudo text");
    SynthesizeArgs sy;
    synth->add_option("--in", sy.in, "Masked sentence file")->required();
    synth->add_option("--out", sy.out, "Pseudo corpus output file")
        ->required();
    synth->add_option("--db", sy.db_dir, "Pseudo database directory")
        ->required();
    synth->add_option("--seed", sy.seed, "Deterministic RNG seed")
        ->envname("PSEUDO_SEED")
        ->required();
    synth->add_option("--rules", sy.rules,
                      "Rule table TSV (default: built-in)");
    synth->add_option("--workers", sy.workers,
                      "Worker threads (default: hardware)");
    synth->add_option("--block-lines", sy.block_lines,
                      "Target lines per parallel block")->capture_default_str();
    synth->add_flag("--strict", sy.strict, "Abort on the first incident");
    synth->add_flag("--no-memo", sy.memo_off,
                    "Do not reuse surfaces for repeated entity ids");
    synth->add_option("--age-range", sy.age_range, "AGE generator LO:HI")->capture_default_str();
    synth->add_option("--date-window", sy.date_window,
                      "Date generator year window LO:HI")->capture_default_str();
    synth->add_option("--fillmask-endpoint", sy.endpoint,
                      "host:port of the fill-mask backend");
    synth->add_option("--mask-marker", sy.mask_marker,
                      "Placeholder token sent to the backend")->capture_default_str();
    synth->add_option("--fillmask-retries", sy.retries,
                      "Transport retries before fallback")->capture_default_str();
    synth->add_option("--fillmask-timeout-ms", sy.timeout_ms,
                      "Backend timeout per request")->capture_default_str();
    synth->add_option("--fillmask-inflight", sy.inflight,
                      "Max concurrent backend calls")->capture_default_str();
    synth->add_option("--report", sy.report,
                      "Write incident JSON lines here");
    synth->add_option("--census-out", sy.out_report,
                      "Write the census JSON here, not stdout");
    synth->callback([&] {
        if (dump_config)
            return;
        run_synthesize(sy);
    });

    // ---- split -----------------------------------------------------------
    auto* split = app.add_subcommand(
        "split", "Multi-label iterative stratification of documents");
    std::string sp_in, sp_fractions = "0.8,0.2", sp_out;
    std::uint64_t sp_seed = 0;
    split->add_option("--in", sp_in, "JSONL documents with gold labels")
        ->required();
    split->add_option("--fractions", sp_fractions,
                      "Fold fractions, comma separated")->capture_default_str();
    split->add_option("--seed", sp_seed, "Tie-break RNG seed")
        ->envname("PSEUDO_SEED");
    split->add_option("--out", sp_out, "Write JSON here, not stdout");
    split->callback([&] {
        if (dump_config)
            return;
        std::ifstream in = open_input(sp_in);
        auto seqs = load_sequences_jsonl(in, sp_in);
        std::vector<StratifyDoc> docs;
        docs.reserve(seqs.size());
        for (const auto& seq : seqs) {
            StratifyDoc d;
            d.doc_id = seq.doc_id;
            for (const auto& tok : seq.tokens)
                if (tok.gold != "O")
                    d.labels.push_back(tok.gold);
            docs.push_back(std::move(d));
        }
        std::vector<double> fractions = parse_fractions(sp_fractions);
        RandomStream rng(sp_seed, 0);
        StratifyResult r = iterative_stratify(docs, fractions, rng);
        json assignments = json::object();
        for (std::size_t i = 0; i < docs.size(); ++i)
            assignments[docs[i].doc_id] = r.assignment[i];
        json j = {{"fractions", fractions},
                  {"seed", sp_seed},
                  {"fold_sizes", r.fold_sizes},
                  {"assignments", assignments}};
        emit_report(j.dump(2), sp_out);
    });

    // ---- remap -----------------------------------------------------------
    auto* remap = app.add_subcommand(
        "remap", "Re-categorize gold and predicted labels");
    std::string rm_in, rm_map, rm_out;
    remap->add_option("--in", rm_in, "JSONL labeled documents")->required();
    remap->add_option("--map", rm_map,
                      "Label map TSV (default: built-in i2b2->HIPAA)");
    remap->add_option("--out", rm_out, "Output JSONL ('-' = stdout)");
    remap->callback([&] {
        if (dump_config)
            return;
        std::ifstream in = open_input(rm_in);
        auto seqs = load_sequences_jsonl(in, rm_in);
        LabelMap map = rm_map.empty() ? default_label_map()
                                      : LabelMap::load_file(rm_map);
        remap_sequences(seqs, map);
        std::ostringstream out;
        for (const auto& seq : seqs)
            out << sequence_to_json_line(seq) << "\n";
        if (rm_out.empty() || rm_out == "-") {
            std::cout << out.str();
        } else {
            std::ofstream f(rm_out, std::ios::binary);
            if (!f)
                fail("cannot write --out file: ", rm_out);
            f << out.str();
        }
    });

    // ---- score -----------------------------------------------------------
    auto* score = app.add_subcommand(
        "score", "Token-level (or span-level) precision/recall/F1");
    std::string sc_in, sc_mode = "token", sc_out;
    score->add_option("--in", sc_in, "JSONL labeled documents with preds")
        ->required();
    score->add_option("--mode", sc_mode, "token or span")
        ->capture_default_str()
        ->check(CLI::IsMember({"token", "span"}));
    score->add_option("--out", sc_out, "Write JSON here, not stdout");
    score->callback([&] {
        if (dump_config)
            return;
        std::ifstream in = open_input(sc_in);
        auto seqs = load_sequences_jsonl(in, sc_in);
        ScoreReport r =
            sc_mode == "token" ? score_tokens(seqs) : score_spans(seqs);
        emit_report(r.to_json(), sc_out);
    });

    // ---- mcnemar ---------------------------------------------------------
    auto* mc = app.add_subcommand(
        "mcnemar", "Paired McNemar test on discordant counts");
    std::uint64_t mc_b = 0, mc_c = 0, mc_n00 = 0, mc_n11 = 0;
    std::string mc_mode = "auto", mc_out;
    mc->add_option("--b", mc_b, "Tokens only system B got right")
        ->required();
    mc->add_option("--c", mc_c, "Tokens only system A got right")
        ->required();
    mc->add_option("--n00", mc_n00, "Tokens both systems missed");
    mc->add_option("--n11", mc_n11, "Tokens both systems got right");
    mc->add_option("--mode", mc_mode, "auto, exact, or corrected")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "exact", "corrected"}));
    mc->add_option("--out", mc_out, "Write JSON here, not stdout");
    mc->callback([&] {
        if (dump_config)
            return;
        McNemarMode mode = mc_mode == "exact"      ? McNemarMode::Exact
                           : mc_mode == "corrected" ? McNemarMode::Corrected
                                                    : McNemarMode::Auto;
        ContingencyTable t{mc_n00, mc_b, mc_c, mc_n11};
        McNemarResult r = mcnemar(t, mode);
        json j = {{"b", mc_b},
                  {"c", mc_c},
                  {"mode", r.mode_used == McNemarMode::Exact ? "exact"
                                                             : "corrected"},
                  {"statistic", r.statistic},
                  {"p_value", r.p_value}};
        emit_report(j.dump(2), mc_out);
    });

    // ---- anova -----------------------------------------------------------
    auto* an = app.add_subcommand("anova",
                                  "One-way ANOVA over observation groups");
    std::string an_groups, an_in, an_out;
    an->add_option("--groups", an_groups,
                   "Inline groups: \"1,2,3;4,5,6\" (';' separates groups)");
    an->add_option("--in", an_in,
                   "JSON file holding an array of number arrays");
    an->add_option("--out", an_out, "Write JSON here, not stdout");
    an->callback([&] {
        if (dump_config)
            return;
        std::vector<std::vector<double>> groups;
        if (!an_groups.empty()) {
            std::stringstream ss(an_groups);
            std::string group;
            while (std::getline(ss, group, ';'))
                groups.push_back(parse_fractions(group));
        } else if (!an_in.empty()) {
            std::ifstream in = open_input(an_in);
            json parsed = json::parse(in);
            for (const json& g : parsed)
                groups.push_back(g.get<std::vector<double>>());
        } else {
            fail("anova needs --groups or --in");
        }
        AnovaResult r = anova_oneway(groups);
        json j = {{"f", r.f},
                  {"p_value", r.p_value},
                  {"df_between", r.df_between},
                  {"df_within", r.df_within}};
        emit_report(j.dump(2), an_out);
    });

    // ---- overlap ---------------------------------------------------------
    auto* ov = app.add_subcommand(
        "overlap", "Corpus-vs-gazetteer surface intersection");
    std::string ov_corpus, ov_db, ov_list = "hospitals", ov_strip, ov_out;
    ov->add_option("--corpus", ov_corpus, "File with one surface per line")
        ->required();
    ov->add_option("--db", ov_db, "Pseudo database directory")->required();
    ov->add_option("--list", ov_list, "List name to intersect with")->capture_default_str();
    ov->add_option("--strip", ov_strip,
                   "Comma-separated words stripped before matching");
    ov->add_option("--out", ov_out, "Write JSON here, not stdout");
    ov->callback([&] {
        if (dump_config)
            return;
        std::ifstream in = open_input(ov_corpus);
        std::vector<std::string> corpus;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (!line.empty())
                corpus.push_back(line);
        }
        PseudoDatabase db = PseudoDatabase::load_dir(ov_db);
        std::vector<std::string> strip;
        if (!ov_strip.empty()) {
            std::stringstream ss(ov_strip);
            std::string word;
            while (std::getline(ss, word, ','))
                strip.push_back(word);
        }
        OverlapResult r = gazetteer_overlap(corpus, db.list(ov_list), strip);
        emit_report(r.to_json(), ov_out);
    });

    // ---- stub-server -------------------------------------------------------
    auto* stub = app.add_subcommand(
        "stub-server", "Serve the fill-mask protocol with canned responses");
    std::string st_host = "127.0.0.1", st_candidates = "Jones:0.9";
    int st_port = 0;
    stub->add_option("--host", st_host, "Bind address")->capture_default_str();
    stub->add_option("--port", st_port, "Port (required)")->required();
    stub->add_option("--candidates", st_candidates,
                     "token:score[,token:score...] returned by /fill")->capture_default_str();
    stub->callback([&] {
        if (dump_config)
            return;
        std::vector<FillMaskCandidate> canned;
        std::stringstream ss(st_candidates);
        std::string part;
        while (std::getline(ss, part, ',')) {
            std::size_t colon = part.rfind(':');
            if (colon == std::string::npos)
                fail("--candidates expects token:score, got '", part, "'");
            canned.push_back(
                {part.substr(0, colon), std::stod(part.substr(colon + 1))});
        }
        FillMaskStubServer server(std::move(canned));
        std::cout << "fill-mask stub listening on " << st_host << ":"
                  << st_port << std::endl;
        if (!server.listen_forever(st_host, st_port))
            fail("stub server: cannot listen on ", st_host, ":", st_port);
    });

    // ---- emit-manifest -----------------------------------------------------
    auto* manifest = app.add_subcommand(
        "emit-manifest",
        "Print the pretraining / fine-tuning hyperparameter manifest");
    std::string mf_out;
    manifest->add_option("--out", mf_out, "Write JSON here, not stdout");
    manifest->callback([&] {
        if (dump_config)
            return;
        json j = {{"pretrain",
                   {{"lr", 2e-5}, {"max_seq_len", 1024}, {"epochs", 6}}},
                  {"finetune",
                   {{"lr", 7e-6},
                    {"dropout", 0.1},
                    {"epochs", 20},
                    {"selection", "lowest validation loss"}}}};
        emit_report(j.dump(2), mf_out);
    });

    try {
        app.parse(argc, argv);
        if (dump_config) {
            std::cout << app.config_to_str(true, true);
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const PipelineAbort& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
