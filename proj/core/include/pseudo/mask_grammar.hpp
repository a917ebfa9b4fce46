#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "pseudo/tags.hpp"

namespace pseudo {

/// One parsed redaction mask.  The surface grammar is
///
///   [** descriptor ( '(' type_hint ')' )? entity_id? **]
///   [** bare-date-or-number **]
///
/// where the bare form carries no descriptor (e.g. [**2151-7-16**]).
/// `raw` is the full surface including delimiters and equals the source
/// substring at [begin, end).
struct MaskToken {
    std::string raw;
    std::string descriptor;             // empty for bare forms
    std::string bare;                   // inner content for bare forms
    std::optional<std::string> type_hint;
    std::optional<std::uint64_t> entity_id;
    std::size_t begin = 0;              // byte offsets into the source line,
    std::size_t end = 0;                // half-open
    bool is_bare = false;

    /// Text the rule table matches against: the bare content for bare
    /// forms, otherwise `descriptor` or `descriptor (hint)`.
    std::string rule_text() const;
};

/// Result of scanning one line.  `unterminated`, when set, is the byte
/// offset of a mask opening with no closing delimiter on the line; tokens
/// found before that point are still returned.  Scanning never throws.
struct LineScan {
    std::vector<MaskToken> tokens;
    std::optional<std::size_t> unterminated;
};

/// Find all non-overlapping mask tokens left to right.  Splicing each
/// token's `raw` back into its span reproduces `line` byte-exactly.
LineScan scan_line(std::string_view line);

/// Count of whitespace-delimited tokens in `line` with every mask span
/// collapsed to a single token (the denominator of the census fraction).
std::size_t whitespace_token_count(std::string_view line,
                                   const std::vector<MaskToken>& masks);

struct TagRule {
    long priority = 0;                  // lower fires first
    std::string pattern;                // case-insensitive ECMAScript regex
    TagKind tag = TagKind::UNKNOWN;
    std::regex compiled;
};

/// Ordered rule table mapping mask descriptors to tags.  Immutable after
/// construction and shareable across threads.
class RuleTable {
public:
    /// Parse the external one-rule-per-line format:
    ///   priority<TAB>regex<TAB>TAG
    /// with '#' comments and blank lines ignored.  Priorities must be
    /// strictly increasing and the final rule must yield UNKNOWN.
    static RuleTable parse(std::string_view text, const std::string& origin);
    static RuleTable load_file(const std::filesystem::path& path);

    /// Canonical serialization (priority<TAB>regex<TAB>TAG per line).
    /// parse(serialize()) round-trips byte-identically.
    std::string serialize() const;

    /// First matching rule's tag; UNKNOWN if nothing matches.  Pure.
    TagKind classify(const MaskToken& token) const;
    TagKind classify_text(std::string_view rule_text) const;

    const std::vector<TagRule>& rules() const { return rules_; }
    std::size_t size() const { return rules_.size(); }

private:
    std::vector<TagRule> rules_;
};

/// The built-in rule table, calibrated against MIMIC-III style masks.
/// Ships as editable data too (data/rules_default.tsv mirrors this text).
std::string_view default_rule_table_text();
RuleTable default_rule_table();

}  // namespace pseudo
