#include "pseudo/segmenter.hpp"

#include <algorithm>
#include <cctype>

#include "pseudo/mask_grammar.hpp"

namespace pseudo {

namespace {

const char* const kBuiltinAbbreviations[] = {
    "dr",   "mr",    "mrs",  "ms",   "prof", "rev",  "jr",   "sr",
    "st",   "vs",    "etc",  "e.g",  "i.e",  "cf",   "al",   "approx",
    "dept", "fig",   "no",   "inc",  "ltd",  "co",   "corp", "mt",
    "ave",  "blvd",  "rd",   "a.m",  "p.m",  "q.d",  "q.h.s", "b.i.d",
    "t.i.d", "q.i.d", "h.s",  "p.r.n", "p.o", "subq", "neg",  "pos",
};

bool is_blank_line(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) {
        return c == ' ' || c == '\t' || c == '\r';
    });
}

std::string_view trim_view(std::string_view s) {
    while (!s.empty() &&
           (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

/// Line opens a list item: `1.`/`1)` or a dash/asterisk/bullet marker.
bool is_item_marker(std::string_view line) {
    if (line.empty())
        return false;
    if (line.front() == '-' || line.front() == '*') {
        if (line.size() >= 2 && line[0] == '*' && line[1] == '*')
            return false;  // mask fragment, not a bullet
        return line.size() == 1 || line[1] == ' ' || line[1] == '\t';
    }
    if (line.starts_with("\xE2\x80\xA2"))  // U+2022 bullet
        return true;
    std::size_t i = 0;
    while (i < line.size() && std::isdigit((unsigned char)line[i]))
        ++i;
    if (i == 0 || i > 3)
        return false;
    if (i >= line.size() || (line[i] != '.' && line[i] != ')'))
        return false;
    ++i;
    return i == line.size() || line[i] == ' ' || line[i] == '\t';
}

/// Collapse runs of spaces/tabs to single spaces.
std::string collapse_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\r') {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty())
            out += ' ';
        in_ws = false;
        out += c;
    }
    return out;
}

bool is_close_punct(char c) {
    return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}';
}

}  // namespace

SentenceSegmenter::SentenceSegmenter(SegmenterConfig cfg)
    : reconstruct_lists_(cfg.reconstruct_lists) {
    for (const char* abbr : kBuiltinAbbreviations)
        abbreviations_.insert(abbr);
    for (std::string& abbr : cfg.extra_abbreviations) {
        std::transform(abbr.begin(), abbr.end(), abbr.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        while (!abbr.empty() && abbr.back() == '.')
            abbr.pop_back();
        if (!abbr.empty())
            abbreviations_.insert(abbr);
    }
}

bool SentenceSegmenter::ends_with_abbreviation(std::string_view text,
                                               std::size_t period) const {
    // Word before the period, including internal dots ("e.g", "b.i.d").
    std::size_t start = period;
    while (start > 0) {
        unsigned char c = static_cast<unsigned char>(text[start - 1]);
        if (std::isalnum(c) || c == '.')
            --start;
        else
            break;
    }
    if (start == period)
        return false;
    std::string word(text.substr(start, period - start));
    // A single capital is an initial ("J. Smith").
    if (word.size() == 1 && std::isupper((unsigned char)word[0]))
        return true;
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    while (!word.empty() && word.back() == '.')
        word.pop_back();
    return abbreviations_.count(word) != 0;
}

std::vector<std::string> SentenceSegmenter::split_sentences(
    std::string_view paragraph) const {
    std::vector<std::string> sentences;
    if (paragraph.empty())
        return sentences;

    // Mask spans are atomic; never place a boundary inside one.
    LineScan scan = scan_line(paragraph);
    std::size_t next_mask = 0;

    auto in_mask = [&](std::size_t i) {
        while (next_mask < scan.tokens.size() &&
               scan.tokens[next_mask].end <= i)
            ++next_mask;
        return next_mask < scan.tokens.size() &&
               i >= scan.tokens[next_mask].begin &&
               i < scan.tokens[next_mask].end;
    };

    std::size_t start = 0;
    for (std::size_t i = 0; i < paragraph.size(); ++i) {
        char c = paragraph[i];
        if (c != '.' && c != '!' && c != '?')
            continue;
        if (in_mask(i))
            continue;
        std::size_t after = i + 1;
        while (after < paragraph.size() && is_close_punct(paragraph[after]))
            ++after;
        if (after >= paragraph.size())
            break;  // handled by the tail flush
        if (paragraph[after] != ' ' && paragraph[after] != '\t')
            continue;
        std::size_t next = after;
        while (next < paragraph.size() &&
               (paragraph[next] == ' ' || paragraph[next] == '\t'))
            ++next;
        if (next >= paragraph.size())
            break;
        unsigned char head = static_cast<unsigned char>(paragraph[next]);
        if (!(std::isupper(head) || std::isdigit(head) || head == '['))
            continue;
        if (c == '.' && ends_with_abbreviation(paragraph, i))
            continue;
        std::string_view piece =
            trim_view(paragraph.substr(start, after - start));
        if (!piece.empty())
            sentences.emplace_back(piece);
        start = next;
    }
    std::string_view tail = trim_view(paragraph.substr(start));
    if (!tail.empty())
        sentences.emplace_back(tail);
    return sentences;
}

std::vector<std::string> SentenceSegmenter::split_note(
    std::string_view note) const {
    // Group physical lines into logical units: an item marker opens an
    // item that absorbs continuation lines until the next marker or blank
    // line; consecutive prose lines form a paragraph.
    struct Unit {
        std::string text;
        bool is_item = false;
    };
    std::vector<Unit> units;
    bool unit_open = false;  // the open unit is always units.back()

    std::size_t pos = 0;
    while (pos <= note.size()) {
        std::size_t eol = note.find('\n', pos);
        std::string_view line = eol == std::string_view::npos
                                    ? note.substr(pos)
                                    : note.substr(pos, eol - pos);
        bool last = eol == std::string_view::npos;
        pos = last ? note.size() + 1 : eol + 1;

        if (is_blank_line(line)) {
            unit_open = false;
            if (last)
                break;
            continue;
        }
        std::string_view stripped = trim_view(line);
        if (reconstruct_lists_ && is_item_marker(stripped)) {
            units.push_back({std::string(stripped), true});
            unit_open = true;
        } else if (unit_open) {
            Unit& unit = units.back();
            if (!unit.text.empty())
                unit.text += ' ';
            unit.text.append(stripped);
        } else {
            units.push_back({std::string(stripped), false});
            unit_open = true;
        }
        if (last)
            break;
    }

    std::vector<std::string> out;
    for (const Unit& unit : units) {
        std::string text = collapse_ws(unit.text);
        if (text.empty())
            continue;
        if (unit.is_item) {
            out.push_back(std::move(text));
        } else {
            for (std::string& s : split_sentences(text))
                out.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace pseudo
