#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pseudo/random.hpp"

namespace pseudo {

/// One gazetteer row: a surface string, a positive popularity weight, and
/// free-form attributes (gender=F, state=MA, year=1987, ...).
struct GazetteerEntry {
    std::string surface;
    double weight = 0.0;
    std::map<std::string, std::string> attrs;
};

/// Conjunction of attribute equality constraints.
class AttrFilter {
public:
    AttrFilter() = default;

    /// Parse "gender=F" or "gender=F,state=MA".  Empty string -> no filter.
    static AttrFilter parse(std::string_view text);

    void add(std::string key, std::string value);
    bool empty() const { return equals_.empty(); }
    bool matches(const GazetteerEntry& e) const;

    /// Canonical cache key ("gender=F;state=MA").
    const std::string& key() const { return key_; }

private:
    std::vector<std::pair<std::string, std::string>> equals_;
    std::string key_;
};

/// Named weighted lists with popularity sampling.  Immutable after load and
/// shareable across threads; filtered sampling indices are cached lazily
/// behind a shared mutex.
class PseudoDatabase {
public:
    /// Load every *.tsv file in `dir` as a list named by the file stem.
    /// The directory must contain at least one list file.
    static PseudoDatabase load_dir(const std::filesystem::path& dir);

    /// Parse one list file.  Format: UTF-8 TSV, one entry per line,
    ///   surface<TAB>weight[<TAB>attr=value ...]
    /// An optional leading header line "surface<TAB>weight..." and '#'
    /// comments are skipped.  Weights must be > 0.
    static std::vector<GazetteerEntry> parse_list(std::string_view text,
                                                  const std::string& origin);

    /// Canonical serialization (header line + rows); parse_list round-trips
    /// entries, weights, and attrs exactly.
    static std::string serialize_list(const std::vector<GazetteerEntry>&);

    /// Add a list; rejects duplicates, empty lists, and bad entries.
    void add_list(const std::string& name, std::vector<GazetteerEntry>);

    bool has_list(const std::string& name) const;
    const std::vector<GazetteerEntry>& list(const std::string& name) const;
    std::vector<std::string> list_names() const;
    /// name -> entry count for every list.
    std::map<std::string, std::size_t> counts() const;

    /// Draw an entry with probability weight / sum(weights) over entries
    /// passing `filter`.  Deterministic given the rng state.  Throws on an
    /// unknown list or when nothing matches the filter.
    const GazetteerEntry& sample(const std::string& list_name,
                                 const AttrFilter& filter,
                                 RandomStream& rng) const;
    const GazetteerEntry& sample(const std::string& list_name,
                                 RandomStream& rng) const;

private:
    struct List {
        std::vector<GazetteerEntry> entries;
        std::vector<double> cumulative;  // ends at total weight
        double total = 0.0;
    };

    struct FilteredIndex {
        std::vector<std::uint32_t> indices;
        std::vector<double> cumulative;
        double total = 0.0;
    };

    const List& find_list(const std::string& name) const;
    const FilteredIndex& filtered_index(const std::string& list_name,
                                        const List& list,
                                        const AttrFilter& filter) const;

    struct FilterCache {
        std::shared_mutex mutex;
        std::unordered_map<std::string, std::unique_ptr<FilteredIndex>> map;
    };

    std::map<std::string, List> lists_;
    // Lazily built filtered sampling indices; behind a pointer so the
    // database stays movable.
    std::unique_ptr<FilterCache> cache_ =
        std::make_unique<FilterCache>();
};

struct IngestStats {
    std::size_t files_read = 0;
    std::size_t rows_read = 0;
    std::size_t names_out = 0;
    int year_lo = 0;
    int year_hi = 0;
};

/// Build first_names.tsv from year-partitioned raw name counts.  Input:
/// every yob<YEAR>.txt file in `input_dir`, rows "name,gender,count".
/// Weights are counts summed over [year_lo, year_hi]; years outside the
/// range are dropped.  Output rows carry gender=F/M attributes and are
/// sorted by (surface, gender) for reproducibility.
IngestStats ingest_census_names(const std::filesystem::path& input_dir,
                                const std::filesystem::path& output_dir,
                                int year_lo = 1960, int year_hi = 2020);

}  // namespace pseudo
