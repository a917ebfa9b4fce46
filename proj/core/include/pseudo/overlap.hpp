#pragma once

#include <string>
#include <vector>

#include "pseudo/gazetteer.hpp"

namespace pseudo {

struct OverlapResult {
    std::size_t shared = 0;
    std::size_t corpus_size = 0;  // distinct normalized corpus surfaces
    double fraction = 0.0;        // shared / corpus_size
    std::vector<std::string> shared_surfaces;  // normalized, sorted

    std::string to_json() const;
};

/// Case-insensitive exact-match intersection between a corpus surface set
/// and a gazetteer list.  `strip_words`, when given, are removed as whole
/// words from both sides before matching (e.g. "hospital", "clinic");
/// surfaces that normalize to nothing are dropped.
OverlapResult gazetteer_overlap(const std::vector<std::string>& corpus,
                                const std::vector<GazetteerEntry>& db_list,
                                const std::vector<std::string>& strip_words =
                                    {});

/// Normalization used by the overlap: ASCII lowercase, whitespace
/// collapsed, strip words removed.  Exposed for tests.
std::string overlap_normalize(std::string_view surface,
                              const std::vector<std::string>& strip_words);

}  // namespace pseudo
