#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pseudo/labels.hpp"

namespace pseudo {

struct LabelScore {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t support = 0;  // gold count (tp + fn)
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    /// False when support is zero; such labels are excluded from macro
    /// aggregates and their metrics are reported as undefined.
    bool defined = true;
};

struct ScoreReport {
    std::string mode;  // "token" or "span"
    std::map<std::string, LabelScore> labels;
    LabelScore micro;          // aggregated over all non-O labels
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::size_t macro_label_count = 0;

    std::string to_json() const;
};

/// Token-level scoring: for each label L != O, TP counts tokens with
/// gold = pred = L.  Every sequence must carry predictions.
ScoreReport score_tokens(const std::vector<TokenLabelSequence>& seqs);

/// Span-level exact match: maximal runs of one non-O label must agree on
/// (start, end, label) to count as TP.
ScoreReport score_spans(const std::vector<TokenLabelSequence>& seqs);

}  // namespace pseudo
