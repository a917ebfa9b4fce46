#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace pseudo {

// Canonical HPHI tag vocabulary.  Every parsed mask token classifies to
// exactly one of these; UNKNOWN routes to the fill-mask fallback.
#define PSEUDO_TAG_KINDS(X) \
    X(FIRSTNAME)            \
    X(LASTNAME)             \
    X(DOCTORFIRSTNAME)      \
    X(DOCTORLASTNAME)       \
    X(HOSPITAL)             \
    X(COMPANY)              \
    X(UNIVERSITY)           \
    X(STATE)                \
    X(COUNTRY)              \
    X(LOCATION)             \
    X(DATE)                 \
    X(YEAR)                 \
    X(AGE)                  \
    X(PHONE)                \
    X(PAGER)                \
    X(NUMERICID)            \
    X(EMAIL)                \
    X(URL)                  \
    X(HOLIDAY)              \
    X(WARDNAME)             \
    X(NAME)                 \
    X(UNKNOWN)

enum class TagKind : std::uint8_t {
#define X(name) name,
    PSEUDO_TAG_KINDS(X)
#undef X
};

inline constexpr std::size_t kTagKindCount = []() {
    std::size_t n = 0;
#define X(name) ++n;
    PSEUDO_TAG_KINDS(X)
#undef X
    return n;
}();

constexpr std::string_view to_string(TagKind tag) {
    switch (tag) {
#define X(name)          \
    case TagKind::name:  \
        return #name;
        PSEUDO_TAG_KINDS(X)
#undef X
    }
    return "UNKNOWN";
}

constexpr std::optional<TagKind> tag_from_string(std::string_view s) {
#define X(name)                 \
    if (s == #name)             \
        return TagKind::name;
    PSEUDO_TAG_KINDS(X)
#undef X
    return std::nullopt;
}

constexpr std::array<TagKind, kTagKindCount> all_tag_kinds() {
    return {
#define X(name) TagKind::name,
        PSEUDO_TAG_KINDS(X)
#undef X
    };
}

}  // namespace pseudo
