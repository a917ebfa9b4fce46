#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "pseudo/gazetteer.hpp"
#include "pseudo/mask_grammar.hpp"
#include "pseudo/random.hpp"
#include "pseudo/tags.hpp"

namespace pseudo {

/// Where a replacement came from; the census reports counts per source.
enum class GenSource : std::uint8_t {
    Gazetteer,   // sampled from a pseudo-database list
    Randomized,  // dates, ages, phone numbers, numeric ids
    FillMask,    // fill-mask backend candidate
    Fallback,    // per-tag static fallback text
};

std::string_view to_string(GenSource s);

struct DateWindow {
    int first_year = 1960;
    int last_year = 2020;
};

enum class DateStyle { Full, YearOnly, MonthDay };

struct GeneratorConfig {
    bool memoize = true;  // reuse surfaces for repeated (tag, entity_id)
    int age_lo = 1;
    int age_hi = 90;
    DateWindow date_window;
    /// host:port of the fill-mask backend; empty disables the backend and
    /// routes fill-mask tags straight to the fallback table.
    std::string fillmask_endpoint;
    std::string mask_marker = "[MASK]";
    int fillmask_retries = 3;  // extra attempts after the first failure
    int fillmask_timeout_ms = 5000;
    int fillmask_inflight = 4;  // global cap on concurrent backend calls
};

/// Note-scoped memo: (tag, entity_id) -> previously generated surface.
/// Cleared between notes; never shared across notes.
class NoteMemo {
public:
    using Key = std::pair<TagKind, std::uint64_t>;

    const std::pair<std::string, GenSource>* find(const Key& k) const {
        auto it = memo_.find(k);
        return it == memo_.end() ? nullptr : &it->second;
    }
    void put(const Key& k, std::string text, GenSource source) {
        memo_.emplace(k, std::make_pair(std::move(text), source));
    }
    void clear() { memo_.clear(); }
    std::size_t size() const { return memo_.size(); }

private:
    std::map<Key, std::pair<std::string, GenSource>> memo_;
};

struct GenerationContext {
    std::string_view sentence;  // full source line containing the token
    const MaskToken& token;
    TagKind tag;
    NoteMemo* memo = nullptr;  // may be null (memoization off)
};

struct GenIncident {
    std::string kind;    // e.g. "fillmask_transport", "missing_list"
    std::string detail;  // human-readable cause
};

struct GenResult {
    std::string text;
    GenSource source = GenSource::Randomized;
    std::optional<GenIncident> incident;
};

/// Uniformly drawn calendar-valid date over all days in the window,
/// rendered per style (Full -> M/D/YYYY, YearOnly -> YYYY, MonthDay ->
/// M/D).
std::string gen_date(DateStyle style, DateWindow window, RandomStream& rng);
/// Pattern tokens: YYYY, MM, DD, M, D; other characters copy through.
std::string gen_date(std::string_view pattern, DateWindow window,
                     RandomStream& rng);

/// Exactly `length` uniform digits (leading zeros allowed).
std::string gen_numeric_id(int length, RandomStream& rng);
/// NNN-NNN-NNNN.
std::string gen_phone(RandomStream& rng);
/// Bare integer rendering of a uniform age in [lo, hi].
std::string gen_age(int lo, int hi, RandomStream& rng);

/// Static replacement used when the fill-mask backend is unavailable.
std::string_view fallback_for(TagKind tag);

/// Strip mask delimiters and collapse tabs/newlines out of generated text.
std::string sanitize_output(std::string text);

/// Maps each TagKind to its generator and produces replacement text.
/// Shared immutable across workers; each worker owns its RandomStream and
/// NoteMemo.  Fill-mask failures degrade to the fallback table and are
/// reported through GenResult::incident (the pipeline decides skip vs
/// abort).
class Generator {
public:
    Generator(const PseudoDatabase* db, GeneratorConfig cfg);
    ~Generator();

    Generator(const Generator&) = delete;
    Generator& operator=(const Generator&) = delete;

    const GeneratorConfig& config() const { return cfg_; }

    /// Total function of ctx.tag; never returns empty text and never
    /// emits mask delimiters, tabs, or newlines.
    GenResult generate(const GenerationContext& ctx, RandomStream& rng) const;

    /// The route `tag` dispatches to (exposed for dispatch-coverage tests).
    GenSource route_for(TagKind tag) const;

private:
    struct Impl;
    GenResult dispatch(const GenerationContext& ctx, RandomStream& rng) const;
    GenResult fill_mask_route(const GenerationContext& ctx) const;
    GenResult sample_list(const std::string& list, const AttrFilter& filter,
                          TagKind tag, RandomStream& rng) const;

    const PseudoDatabase* db_;
    GeneratorConfig cfg_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace pseudo
