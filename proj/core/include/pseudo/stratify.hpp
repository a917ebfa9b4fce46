#pragma once

#include <string>
#include <vector>

#include "pseudo/random.hpp"

namespace pseudo {

struct StratifyDoc {
    std::string doc_id;
    /// Label multiset; multiplicity collapses to presence for the split.
    std::vector<std::string> labels;
};

struct StratifyResult {
    /// fold index per input document, parallel to the input order.
    std::vector<int> assignment;
    std::vector<std::size_t> fold_sizes;
};

/// Greedy multi-label iterative stratification: repeatedly take the label
/// with the fewest unassigned documents and deal each of its documents to
/// the fold with the largest remaining demand for that label, breaking
/// ties by largest remaining overall capacity and then by rng.  Documents
/// with no labels are dealt by capacity, then rng.  Deterministic for a
/// fixed seed (label ties break lexicographically).
StratifyResult iterative_stratify(const std::vector<StratifyDoc>& docs,
                                  const std::vector<double>& fractions,
                                  RandomStream& rng);

}  // namespace pseudo
