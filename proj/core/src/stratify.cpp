#include "pseudo/stratify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "pseudo/error.hpp"

namespace pseudo {

StratifyResult iterative_stratify(const std::vector<StratifyDoc>& docs,
                                  const std::vector<double>& fractions,
                                  RandomStream& rng) {
    if (docs.empty())
        fail("iterative_stratify: no documents");
    if (fractions.size() < 2)
        fail("iterative_stratify: need at least 2 fractions");
    double sum = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0))
            fail("iterative_stratify: fractions must be positive, got ", f);
        sum += f;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        fail("iterative_stratify: fractions must sum to 1, got ", sum);

    const std::size_t n_docs = docs.size();
    const std::size_t n_folds = fractions.size();

    // Label -> unassigned documents carrying it (presence semantics).
    std::map<std::string, std::set<std::size_t>> remaining;
    std::vector<std::set<std::string>> doc_labels(n_docs);
    for (std::size_t d = 0; d < n_docs; ++d) {
        for (const std::string& label : docs[d].labels) {
            doc_labels[d].insert(label);
            remaining[label].insert(d);
        }
    }

    // Remaining overall capacity and per-label demand for each fold.
    std::vector<double> capacity(n_folds);
    std::map<std::string, std::vector<double>> demand;
    for (std::size_t j = 0; j < n_folds; ++j)
        capacity[j] = fractions[j] * static_cast<double>(n_docs);
    for (const auto& [label, label_docs] : remaining) {
        auto& row = demand[label];
        row.resize(n_folds);
        for (std::size_t j = 0; j < n_folds; ++j)
            row[j] =
                fractions[j] * static_cast<double>(label_docs.size());
    }

    StratifyResult result;
    result.assignment.assign(n_docs, -1);
    result.fold_sizes.assign(n_folds, 0);

    auto pick_fold = [&](const std::vector<double>* label_demand) {
        // Largest demand, then largest capacity, then rng.
        std::vector<std::size_t> best;
        if (label_demand) {
            double top = -1e300;
            for (std::size_t j = 0; j < n_folds; ++j) {
                double v = (*label_demand)[j];
                if (v > top + 1e-12) {
                    top = v;
                    best.assign(1, j);
                } else if (v > top - 1e-12) {
                    best.push_back(j);
                }
            }
        } else {
            for (std::size_t j = 0; j < n_folds; ++j)
                best.push_back(j);
        }
        if (best.size() > 1) {
            double top = -1e300;
            std::vector<std::size_t> tied;
            for (std::size_t j : best) {
                if (capacity[j] > top + 1e-12) {
                    top = capacity[j];
                    tied.assign(1, j);
                } else if (capacity[j] > top - 1e-12) {
                    tied.push_back(j);
                }
            }
            best = std::move(tied);
        }
        if (best.size() == 1)
            return best[0];
        return best[rng.below(best.size())];
    };

    auto assign = [&](std::size_t d, std::size_t fold) {
        result.assignment[d] = static_cast<int>(fold);
        result.fold_sizes[fold] += 1;
        capacity[fold] -= 1.0;
        for (const std::string& label : doc_labels[d]) {
            remaining[label].erase(d);
            demand[label][fold] -= 1.0;
        }
    };

    for (;;) {
        // Rarest label first; ties break lexicographically (map order).
        const std::string* rarest = nullptr;
        std::size_t rarest_count = 0;
        for (const auto& [label, label_docs] : remaining) {
            if (label_docs.empty())
                continue;
            if (!rarest || label_docs.size() < rarest_count) {
                rarest = &label;
                rarest_count = label_docs.size();
            }
        }
        if (!rarest)
            break;
        // Deal every document with this label (ascending index).
        std::vector<std::size_t> batch(remaining[*rarest].begin(),
                                       remaining[*rarest].end());
        const auto& label_demand = demand[*rarest];
        for (std::size_t d : batch)
            assign(d, pick_fold(&label_demand));
    }

    // Unlabeled documents: by capacity, then rng.
    for (std::size_t d = 0; d < n_docs; ++d) {
        if (result.assignment[d] < 0)
            assign(d, pick_fold(nullptr));
    }
    return result;
}

}  // namespace pseudo
