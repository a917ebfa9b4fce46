#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pseudo/error.hpp"
#include "pseudo/gazetteer.hpp"
#include "pseudo/generators.hpp"
#include "pseudo/mask_grammar.hpp"
#include "pseudo/segmenter.hpp"
#include "pseudo/tags.hpp"

namespace pseudo {

struct NoteRecord {
    std::string note_id;
    std::string text;
    /// Opaque passthrough (category, patient id, ...).
    std::map<std::string, std::string> metadata;
};

/// Pull-based source of notes for normalization.
class NoteSource {
public:
    virtual ~NoteSource() = default;
    virtual std::optional<NoteRecord> next() = 0;
};

/// Whole input stream as a single note.
class PlainTextNoteSource : public NoteSource {
public:
    PlainTextNoteSource(std::istream& in, std::string note_id);
    std::optional<NoteRecord> next() override;

private:
    std::istream* in_;
    std::string note_id_;
    bool done_ = false;
};

/// One reportable pipeline event (JSON lines in the run report).
struct IncidentRecord {
    std::uint64_t line = 0;     // 1-based line in the masked input
    std::size_t offset = 0;     // byte offset within the line
    std::string kind;           // "unterminated_mask", "fillmask_*", ...
    std::string tag;            // tag name when known, else empty
    std::string action;         // "skipped", "fallback", "aborted"
    std::string detail;
    std::string note_id;        // normalization incidents only

    std::string to_json_line() const;
};

/// Raised when strict mode turns an incident into a hard stop.
class PipelineAbort : public Error {
public:
    PipelineAbort(IncidentRecord incident, const std::string& what)
        : Error(what), incident(std::move(incident)) {}
    IncidentRecord incident;
};

struct CorpusCensus {
    std::uint64_t total_lines = 0;
    std::uint64_t total_masks = 0;
    /// Whitespace-delimited tokens with each mask counted as one token.
    std::uint64_t total_ws_tokens = 0;
    std::array<std::uint64_t, kTagKindCount> by_tag{};
    std::array<std::uint64_t, 4> by_source{};  // indexed by GenSource
    std::uint64_t incidents = 0;

    double mask_fraction() const {
        return total_ws_tokens == 0
                   ? 0.0
                   : static_cast<double>(total_masks) /
                         static_cast<double>(total_ws_tokens);
    }
    void merge(const CorpusCensus& other);
    std::string to_json(bool with_sources) const;
};

struct SynthesisOptions {
    std::uint64_t seed = 0;
    int workers = 1;
    bool strict = false;
    /// Blocks close at the first note boundary (blank line) past this many
    /// lines; bound on memory and the unit of parallelism + RNG streams.
    std::size_t block_lines = 4096;
    /// Hard cut for boundary-free inputs (resets the note memo).
    std::size_t block_lines_max = 16384;
    GeneratorConfig generator;
};

/// Count masks per tag without replacing anything.
CorpusCensus census_stream(std::istream& in, const RuleTable& rules,
                           std::vector<IncidentRecord>* incidents = nullptr,
                           bool strict = false);

/// Replace every mask token in `in` with generated pseudo text.  Output
/// has identical line count and byte-identical text outside mask spans;
/// equal (input, options, seed) produce byte-identical output.  Incidents,
/// when a sink is given, arrive in input order.
CorpusCensus synthesize_stream(std::istream& in, std::ostream& out,
                               const PseudoDatabase& db,
                               const RuleTable& rules,
                               const SynthesisOptions& options,
                               std::vector<IncidentRecord>* incidents =
                                   nullptr);

struct NormalizeStats {
    std::uint64_t notes = 0;
    std::uint64_t sentences = 0;
    std::uint64_t skipped_notes = 0;

    std::string to_json() const;
};

/// Flatten notes into the sentence-per-line format (blank line between
/// notes).  Undecodable notes are skipped with an incident; strict mode
/// aborts instead.
NormalizeStats normalize_stream(NoteSource& source, std::ostream& out,
                                const SentenceSegmenter& segmenter,
                                bool strict = false,
                                std::vector<IncidentRecord>* incidents =
                                    nullptr);

}  // namespace pseudo
