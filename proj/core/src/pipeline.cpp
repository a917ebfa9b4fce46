#include "pseudo/pipeline.hpp"

#include <algorithm>
#include <deque>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace pseudo {

namespace {

using nlohmann::json;

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) {
        return c == ' ' || c == '\t' || c == '\r';
    });
}

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (c == 0)
            return false;
        std::size_t len = c < 0x80   ? 1
                          : c < 0xC2 ? 0
                          : c < 0xE0 ? 2
                          : c < 0xF0 ? 3
                          : c < 0xF5 ? 4
                                     : 0;
        if (len == 0 || i + len > s.size())
            return false;
        for (std::size_t j = 1; j < len; ++j) {
            unsigned char cc = static_cast<unsigned char>(s[i + j]);
            if ((cc & 0xC0) != 0x80)
                return false;
        }
        i += len;
    }
    return true;
}

/// Descriptor -> tag cache; rule regexes only run once per distinct
/// descriptor within a block.
class ClassifyCache {
public:
    explicit ClassifyCache(const RuleTable& rules) : rules_(&rules) {}

    TagKind classify(const MaskToken& token) {
        std::string key = token.rule_text();
        if (key.size() > 256)  // junk descriptors are never repeated
            return rules_->classify_text(key);
        auto it = cache_.find(key);
        if (it != cache_.end())
            return it->second;
        TagKind tag = rules_->classify_text(key);
        cache_.emplace(std::move(key), tag);
        return tag;
    }

private:
    const RuleTable* rules_;
    std::unordered_map<std::string, TagKind> cache_;
};

struct Block {
    std::uint64_t index = 0;
    std::uint64_t first_line = 0;  // 1-based
    std::vector<std::string> lines;
};

/// Reads note-boundary-aligned line blocks.  Block boundaries depend only
/// on the input and the configured sizes, never on the worker count, so
/// per-block RNG streams make parallel runs byte-reproducible.
class BlockReader {
public:
    BlockReader(std::istream& in, std::size_t target, std::size_t hard_max)
        : in_(&in), target_(target), hard_max_(hard_max) {}

    std::optional<Block> next() {
        if (done_)
            return std::nullopt;
        Block block;
        block.index = next_index_++;
        block.first_line = next_line_;
        std::string line;
        while (true) {
            if (block.lines.size() >= hard_max_)
                break;
            if (!std::getline(*in_, line)) {
                done_ = true;
                break;
            }
            ++next_line_;
            bool blank = is_blank(line);
            block.lines.push_back(std::move(line));
            if (blank && block.lines.size() >= target_)
                break;
        }
        if (block.lines.empty())
            return std::nullopt;
        return block;
    }

private:
    std::istream* in_;
    std::size_t target_;
    std::size_t hard_max_;
    std::uint64_t next_index_ = 0;
    std::uint64_t next_line_ = 1;
    bool done_ = false;
};

struct BlockResult {
    std::vector<std::string> out_lines;
    CorpusCensus census;
    std::vector<IncidentRecord> incidents;
};

void count_line(CorpusCensus& census, const std::string& line,
                const std::vector<MaskToken>& tokens) {
    census.total_lines += 1;
    census.total_masks += tokens.size();
    census.total_ws_tokens += whitespace_token_count(line, tokens);
}

IncidentRecord unterminated_incident(std::uint64_t line_no,
                                     std::size_t offset, bool strict) {
    IncidentRecord inc;
    inc.line = line_no;
    inc.offset = offset;
    inc.kind = "unterminated_mask";
    inc.action = strict ? "aborted" : "skipped";
    inc.detail = "mask opening '[**' without closing '**]'";
    return inc;
}

[[noreturn]] void abort_on(const IncidentRecord& inc) {
    throw PipelineAbort(
        inc, cat("strict mode: ", inc.kind, " at line ", inc.line,
                 " offset ", inc.offset,
                 inc.detail.empty() ? "" : ": ", inc.detail));
}

BlockResult process_block(const Block& block, const RuleTable& rules,
                          const Generator& gen,
                          const SynthesisOptions& options) {
    BlockResult result;
    result.out_lines.reserve(block.lines.size());
    ClassifyCache classify(rules);
    RandomStream rng(options.seed, block.index);
    NoteMemo memo;

    for (std::size_t i = 0; i < block.lines.size(); ++i) {
        const std::string& line = block.lines[i];
        std::uint64_t line_no = block.first_line + i;
        if (is_blank(line)) {
            memo.clear();  // note boundary
            result.out_lines.push_back(line);
            result.census.total_lines += 1;
            continue;
        }

        LineScan scan = scan_line(line);
        count_line(result.census, line, scan.tokens);
        if (scan.unterminated) {
            IncidentRecord inc = unterminated_incident(
                line_no, *scan.unterminated, options.strict);
            if (options.strict)
                abort_on(inc);
            result.census.incidents += 1;
            result.incidents.push_back(std::move(inc));
        }

        std::string out;
        out.reserve(line.size());
        std::size_t pos = 0;
        for (const MaskToken& token : scan.tokens) {
            TagKind tag = classify.classify(token);
            result.census.by_tag[static_cast<std::size_t>(tag)] += 1;

            GenerationContext ctx{line, token, tag, &memo};
            GenResult g = gen.generate(ctx, rng);
            result.census.by_source[static_cast<std::size_t>(g.source)] += 1;
            if (g.incident) {
                IncidentRecord inc;
                inc.line = line_no;
                inc.offset = token.begin;
                inc.kind = g.incident->kind;
                inc.tag = std::string(to_string(tag));
                inc.action = options.strict ? "aborted" : "fallback";
                inc.detail = g.incident->detail;
                if (options.strict)
                    abort_on(inc);
                result.census.incidents += 1;
                result.incidents.push_back(std::move(inc));
            }

            out.append(line, pos, token.begin - pos);
            out += g.text;
            pos = token.end;
        }
        out.append(line, pos, line.size() - pos);
        result.out_lines.push_back(std::move(out));
    }
    return result;
}

}  // namespace

PlainTextNoteSource::PlainTextNoteSource(std::istream& in,
                                         std::string note_id)
    : in_(&in), note_id_(std::move(note_id)) {}

std::optional<NoteRecord> PlainTextNoteSource::next() {
    if (done_)
        return std::nullopt;
    done_ = true;
    std::ostringstream ss;
    ss << in_->rdbuf();
    NoteRecord rec;
    rec.note_id = note_id_;
    rec.text = ss.str();
    if (rec.text.empty())
        return std::nullopt;
    return rec;
}

std::string IncidentRecord::to_json_line() const {
    json j = {{"line", line},       {"offset", offset}, {"kind", kind},
              {"action", action},   {"detail", detail}};
    if (!tag.empty())
        j["tag"] = tag;
    if (!note_id.empty())
        j["note_id"] = note_id;
    return j.dump();
}

void CorpusCensus::merge(const CorpusCensus& other) {
    total_lines += other.total_lines;
    total_masks += other.total_masks;
    total_ws_tokens += other.total_ws_tokens;
    incidents += other.incidents;
    for (std::size_t i = 0; i < by_tag.size(); ++i)
        by_tag[i] += other.by_tag[i];
    for (std::size_t i = 0; i < by_source.size(); ++i)
        by_source[i] += other.by_source[i];
}

std::string CorpusCensus::to_json(bool with_sources) const {
    json by_tag_json = json::object();
    for (TagKind tag : all_tag_kinds()) {
        std::uint64_t n = by_tag[static_cast<std::size_t>(tag)];
        if (n > 0)
            by_tag_json[std::string(to_string(tag))] = n;
    }
    json j = {{"total_lines", total_lines},
              {"total_mask_tokens", total_masks},
              {"total_ws_tokens", total_ws_tokens},
              {"mask_token_fraction", mask_fraction()},
              {"by_tag", by_tag_json},
              {"incidents", incidents}};
    if (with_sources) {
        json by_source_json = json::object();
        for (GenSource s : {GenSource::Gazetteer, GenSource::Randomized,
                            GenSource::FillMask, GenSource::Fallback})
            by_source_json[std::string(to_string(s))] =
                by_source[static_cast<std::size_t>(s)];
        j["by_source"] = by_source_json;
    }
    return j.dump(2);
}

CorpusCensus census_stream(std::istream& in, const RuleTable& rules,
                           std::vector<IncidentRecord>* incidents,
                           bool strict) {
    CorpusCensus census;
    ClassifyCache classify(rules);
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        LineScan scan = scan_line(line);
        count_line(census, line, scan.tokens);
        if (scan.unterminated) {
            IncidentRecord inc =
                unterminated_incident(line_no, *scan.unterminated, strict);
            if (strict)
                abort_on(inc);
            census.incidents += 1;
            if (incidents)
                incidents->push_back(std::move(inc));
        }
        for (const MaskToken& token : scan.tokens)
            census.by_tag[static_cast<std::size_t>(
                classify.classify(token))] += 1;
    }
    return census;
}

CorpusCensus synthesize_stream(std::istream& in, std::ostream& out,
                               const PseudoDatabase& db,
                               const RuleTable& rules,
                               const SynthesisOptions& options,
                               std::vector<IncidentRecord>* incidents) {
    Generator gen(&db, options.generator);
    BlockReader reader(in, options.block_lines, options.block_lines_max);
    CorpusCensus census;

    auto emit = [&](BlockResult&& result) {
        for (const std::string& line : result.out_lines)
            out << line << '\n';
        census.merge(result.census);
        if (incidents)
            for (IncidentRecord& inc : result.incidents)
                incidents->push_back(std::move(inc));
    };

    int workers = std::max(1, options.workers);
    if (workers == 1) {
        while (auto block = reader.next())
            emit(process_block(*block, rules, gen, options));
        return census;
    }

    // Windowed fan-out: blocks are dispatched to async workers and
    // collected strictly in input order.
    std::deque<std::future<BlockResult>> window;
    std::size_t max_window = static_cast<std::size_t>(workers) * 2;
    for (;;) {
        while (window.size() < max_window) {
            auto block = reader.next();
            if (!block)
                break;
            window.push_back(std::async(
                std::launch::async,
                [&rules, &gen, &options, b = std::move(*block)]() {
                    return process_block(b, rules, gen, options);
                }));
        }
        if (window.empty())
            break;
        emit(window.front().get());
        window.pop_front();
    }
    return census;
}

std::string NormalizeStats::to_json() const {
    json j = {{"notes", notes},
              {"sentences", sentences},
              {"skipped_notes", skipped_notes}};
    return j.dump(2);
}

NormalizeStats normalize_stream(NoteSource& source, std::ostream& out,
                                const SentenceSegmenter& segmenter,
                                bool strict,
                                std::vector<IncidentRecord>* incidents) {
    NormalizeStats stats;
    while (auto note = source.next()) {
        if (!valid_utf8(note->text)) {
            IncidentRecord inc;
            inc.kind = "undecodable_note";
            inc.action = strict ? "aborted" : "skipped";
            inc.note_id = note->note_id;
            inc.detail = "note text is not valid UTF-8";
            if (strict)
                abort_on(inc);
            stats.skipped_notes += 1;
            if (incidents)
                incidents->push_back(std::move(inc));
            continue;
        }
        std::vector<std::string> sentences = segmenter.split_note(note->text);
        for (const std::string& s : sentences)
            out << s << '\n';
        out << '\n';  // note separator
        stats.notes += 1;
        stats.sentences += sentences.size();
    }
    return stats;
}

}  // namespace pseudo
