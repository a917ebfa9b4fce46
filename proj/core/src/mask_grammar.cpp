#include "pseudo/mask_grammar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include "pseudo/error.hpp"

namespace pseudo {

namespace {

constexpr std::string_view kOpen = "[**";
constexpr std::string_view kClose = "**]";

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

bool all_digits(std::string_view s) {
    if (s.empty())
        return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return c >= '0' && c <= '9';
    });
}

// Bare forms are dates or numbers: digits plus date punctuation only.
bool is_bare_content(std::string_view s) {
    if (s.empty() || !(s.front() >= '0' && s.front() <= '9'))
        return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= '0' && c <= '9') || c == '-' || c == '/' || c == ' ';
    });
}

MaskToken parse_token(std::string_view line, std::size_t begin,
                      std::size_t end) {
    MaskToken tok;
    tok.begin = begin;
    tok.end = end;
    tok.raw.assign(line.substr(begin, end - begin));

    std::string_view content =
        trim(line.substr(begin + kOpen.size(),
                         end - kClose.size() - (begin + kOpen.size())));

    if (content.empty() || is_bare_content(content)) {
        tok.is_bare = true;
        tok.bare.assign(content);
        return tok;
    }

    // Trailing all-digit token is the entity id.
    std::string_view head = content;
    std::size_t last_space = head.find_last_of(" \t");
    if (last_space != std::string_view::npos) {
        std::string_view tail = head.substr(last_space + 1);
        if (all_digits(tail)) {
            std::uint64_t id = 0;
            auto [p, ec] =
                std::from_chars(tail.data(), tail.data() + tail.size(), id);
            if (ec == std::errc() && p == tail.data() + tail.size()) {
                tok.entity_id = id;
                head = trim(head.substr(0, last_space));
            }
        }
    }

    // Trailing parenthesized group is the type hint.
    if (!head.empty() && head.back() == ')') {
        std::size_t open = head.find_last_of('(');
        if (open != std::string_view::npos) {
            std::string_view inner =
                trim(head.substr(open + 1, head.size() - open - 2));
            std::string_view rest = trim(head.substr(0, open));
            if (!rest.empty()) {
                tok.type_hint = std::string(inner);
                head = rest;
            }
        }
    }

    tok.descriptor.assign(head);
    return tok;
}

}  // namespace

std::string MaskToken::rule_text() const {
    if (is_bare)
        return bare;
    if (type_hint)
        return cat(descriptor, " (", *type_hint, ")");
    return descriptor;
}

LineScan scan_line(std::string_view line) {
    LineScan out;
    std::size_t pos = 0;
    for (;;) {
        std::size_t open = line.find(kOpen, pos);
        if (open == std::string_view::npos)
            break;
        std::size_t close = line.find(kClose, open + kOpen.size());
        if (close == std::string_view::npos) {
            out.unterminated = open;
            break;
        }
        out.tokens.push_back(parse_token(line, open, close + kClose.size()));
        pos = close + kClose.size();
    }
    return out;
}

std::size_t whitespace_token_count(std::string_view line,
                                   const std::vector<MaskToken>& masks) {
    // Count tokens as if each mask span were a single character.
    std::size_t count = 0;
    bool in_token = false;
    std::size_t i = 0;
    std::size_t next_mask = 0;
    while (i < line.size()) {
        if (next_mask < masks.size() && i == masks[next_mask].begin) {
            if (!in_token) {
                ++count;
                in_token = true;
            }
            i = masks[next_mask].end;
            ++next_mask;
            continue;
        }
        unsigned char c = static_cast<unsigned char>(line[i]);
        if (c == ' ' || c == '\t') {
            in_token = false;
        } else if (!in_token) {
            ++count;
            in_token = true;
        }
        ++i;
    }
    return count;
}

RuleTable RuleTable::parse(std::string_view text, const std::string& origin) {
    RuleTable table;
    long prev_priority = 0;
    bool have_prev = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = eol == std::string_view::npos
                                    ? text.substr(pos)
                                    : text.substr(pos, eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#')
            continue;

        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string_view::npos
                             ? std::string_view::npos
                             : line.find('\t', t1 + 1);
        if (t1 == std::string_view::npos || t2 == std::string_view::npos)
            fail(origin, ":", line_no,
                 ": expected priority<TAB>regex<TAB>TAG");

        TagRule rule;
        std::string_view prio = line.substr(0, t1);
        auto [p, ec] =
            std::from_chars(prio.data(), prio.data() + prio.size(),
                            rule.priority);
        if (ec != std::errc() || p != prio.data() + prio.size())
            fail(origin, ":", line_no, ": bad priority '", prio, "'");
        if (have_prev && rule.priority <= prev_priority)
            fail(origin, ":", line_no, ": priority ", rule.priority,
                 " not strictly increasing (previous ", prev_priority, ")");
        prev_priority = rule.priority;
        have_prev = true;

        rule.pattern.assign(line.substr(t1 + 1, t2 - t1 - 1));
        if (rule.pattern.empty())
            fail(origin, ":", line_no, ": empty regex");
        try {
            rule.compiled.assign(rule.pattern,
                                 std::regex::ECMAScript | std::regex::icase |
                                     std::regex::optimize);
        } catch (const std::regex_error& e) {
            fail(origin, ":", line_no, ": bad regex '", rule.pattern,
                 "': ", e.what());
        }

        std::string_view tag_text = trim(line.substr(t2 + 1));
        auto tag = tag_from_string(tag_text);
        if (!tag)
            fail(origin, ":", line_no, ": unknown tag '", tag_text, "'");
        rule.tag = *tag;
        table.rules_.push_back(std::move(rule));
    }

    if (table.rules_.empty())
        fail(origin, ": rule table is empty");
    if (table.rules_.back().tag != TagKind::UNKNOWN)
        fail(origin, ": final rule must be the UNKNOWN catch-all, got ",
             to_string(table.rules_.back().tag));
    return table;
}

RuleTable RuleTable::load_file(const std::filesystem::path& path) {
    std::string text;
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            fail("cannot open rule table: ", path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return parse(text, path.string());
}

std::string RuleTable::serialize() const {
    std::string out;
    for (const TagRule& r : rules_) {
        out += std::to_string(r.priority);
        out += '\t';
        out += r.pattern;
        out += '\t';
        out += to_string(r.tag);
        out += '\n';
    }
    return out;
}

TagKind RuleTable::classify(const MaskToken& token) const {
    return classify_text(token.rule_text());
}

TagKind RuleTable::classify_text(std::string_view rule_text) const {
    for (const TagRule& r : rules_) {
        if (std::regex_search(rule_text.begin(), rule_text.end(),
                              r.compiled))
            return r.tag;
    }
    return TagKind::UNKNOWN;  // terminal guarantee
}

RuleTable default_rule_table() {
    return RuleTable::parse(default_rule_table_text(), "<default rules>");
}

}  // namespace pseudo
