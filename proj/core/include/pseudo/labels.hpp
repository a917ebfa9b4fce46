#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pseudo {

struct LabeledToken {
    std::string text;
    std::string gold;
    std::optional<std::string> pred;
};

/// One document of labeled tokens.  Within a sequence, predictions are
/// either present on every token or absent on every token.
struct TokenLabelSequence {
    std::string doc_id;
    std::vector<LabeledToken> tokens;

    bool has_preds() const {
        return !tokens.empty() && tokens.front().pred.has_value();
    }
};

/// JSON lines, one document per line:
///   {"doc_id": "...", "tokens": [{"t": "...", "gold": "...", "pred": "..."}]}
std::vector<TokenLabelSequence> load_sequences_jsonl(
    std::istream& in, const std::string& origin);
std::string sequence_to_json_line(const TokenLabelSequence& seq);

/// Total source -> target label mapping (O maps to O).
class LabelMap {
public:
    /// Parse the external TSV format: source<TAB>target per line, '#'
    /// comments.  Requires an O -> O row and rejects duplicate sources.
    static LabelMap parse(std::string_view text, const std::string& origin);
    static LabelMap load_file(const std::filesystem::path& path);
    std::string serialize() const;

    /// Throws naming the label when it is not covered.
    const std::string& target_for(const std::string& source) const;
    bool covers(const std::string& source) const;

    /// Source labels excluding the O passthrough.
    std::size_t source_label_count() const;
    const std::map<std::string, std::string>& entries() const {
        return entries_;
    }

private:
    std::map<std::string, std::string> entries_;
};

/// Built-in i2b2-2014 -> HIPAA re-categorization (23 source labels plus
/// O).  Shipped as editable data in data/label_map_hipaa.tsv.
std::string_view default_label_map_text();
LabelMap default_label_map();

/// Structure-preserving relabeling of gold and (when present) predicted
/// labels.  Token count and order are unchanged; unmapped labels throw.
void remap_sequences(std::vector<TokenLabelSequence>& seqs,
                     const LabelMap& map);

}  // namespace pseudo
