#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace pseudo {

struct SegmenterConfig {
    /// Abbreviations (lowercase, no trailing period) that never end a
    /// sentence, merged with the built-in clinical set.
    std::vector<std::string> extra_abbreviations;
    /// Rejoin enumerated / itemized list items onto single lines.
    bool reconstruct_lists = true;
};

/// Rule-based, abbreviation-aware sentence splitter with list
/// reconstruction.  Stateless after construction and safe to share across
/// threads.  Mask tokens are treated as atomic: no sentence boundary is
/// ever placed inside one.
class SentenceSegmenter {
public:
    explicit SentenceSegmenter(SegmenterConfig cfg = {});

    /// Normalize one note body into flat sentences, one per output entry:
    /// paragraphs are unwrapped and split at sentence boundaries, list
    /// items (lines opening with `1.`, `2)`, `-`, `*`, or a bullet) are
    /// rejoined with their continuation lines and emitted as single
    /// entries, and runs of whitespace collapse to single spaces.
    std::vector<std::string> split_note(std::string_view note) const;

    /// Split one already-unwrapped paragraph into sentences.
    std::vector<std::string> split_sentences(std::string_view paragraph) const;

private:
    bool ends_with_abbreviation(std::string_view text,
                                std::size_t period) const;

    std::unordered_set<std::string> abbreviations_;
    bool reconstruct_lists_;
};

}  // namespace pseudo
