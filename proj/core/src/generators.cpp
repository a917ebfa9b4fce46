#include "pseudo/generators.hpp"

#include <algorithm>
#include <cctype>
#include <semaphore>

#include "pseudo/fillmask.hpp"

namespace pseudo {

namespace {

// Howard Hinnant's civil-calendar algorithms; exact over the supported
// year range.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
    int year;
    unsigned month;
    unsigned day;
};

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe =
        (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), m, d};
}

std::string pad2(unsigned v) {
    std::string s = std::to_string(v);
    return v < 10 ? "0" + s : s;
}

std::string render_date(const CivilDate& date, std::string_view pattern) {
    std::string out;
    std::size_t i = 0;
    while (i < pattern.size()) {
        std::string_view rest = pattern.substr(i);
        if (rest.starts_with("YYYY")) {
            out += std::to_string(date.year);
            i += 4;
        } else if (rest.starts_with("MM")) {
            out += pad2(date.month);
            i += 2;
        } else if (rest.starts_with("DD")) {
            out += pad2(date.day);
            i += 2;
        } else if (rest.starts_with("M")) {
            out += std::to_string(date.month);
            i += 1;
        } else if (rest.starts_with("D")) {
            out += std::to_string(date.day);
            i += 1;
        } else {
            out += pattern[i];
            i += 1;
        }
    }
    return out;
}

CivilDate draw_date(DateWindow window, RandomStream& rng) {
    std::int64_t first = days_from_civil(window.first_year, 1, 1);
    std::int64_t last = days_from_civil(window.last_year, 12, 31);
    return civil_from_days(rng.range(first, last));
}

bool matches_shape(std::string_view text, std::string_view shape) {
    // shape chars: '9' = one or two digits, '4' = exactly four digits,
    // anything else literal.
    std::size_t i = 0;
    for (char s : shape) {
        if (s == '9') {
            if (i >= text.size() || !std::isdigit((unsigned char)text[i]))
                return false;
            ++i;
            if (i < text.size() && std::isdigit((unsigned char)text[i]))
                ++i;
        } else if (s == '4') {
            for (int k = 0; k < 4; ++k, ++i)
                if (i >= text.size() ||
                    !std::isdigit((unsigned char)text[i]))
                    return false;
        } else {
            if (i >= text.size() || text[i] != s)
                return false;
            ++i;
        }
    }
    return i == text.size();
}

// Replacement pattern mirroring the shape of a bare date mask.
std::string_view bare_date_pattern(std::string_view bare) {
    if (matches_shape(bare, "4-9-9"))
        return "YYYY-M-D";
    if (matches_shape(bare, "9-9-4"))
        return "M-D-YYYY";
    if (matches_shape(bare, "9-9"))
        return "M-D";
    if (matches_shape(bare, "9/4"))
        return "M/YYYY";
    return "M/D/YYYY";
}

bool contains_word(std::string_view haystack, std::string_view needle) {
    auto lower = [](unsigned char c) { return std::tolower(c); };
    if (needle.empty() || haystack.size() < needle.size())
        return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        bool hit = true;
        for (std::size_t j = 0; j < needle.size(); ++j) {
            if (lower(haystack[i + j]) != lower(needle[j])) {
                hit = false;
                break;
            }
        }
        if (!hit)
            continue;
        bool left_ok = i == 0 || !std::isalpha((unsigned char)haystack[i - 1]);
        std::size_t after = i + needle.size();
        bool right_ok = after == haystack.size() ||
                        !std::isalpha((unsigned char)haystack[after]);
        if (left_ok && right_ok)
            return true;
    }
    return false;
}

// Gender requested by the mask, from descriptor words ("Female First
// Name") or an F/M type hint; empty when unspecified.
std::string gender_from_token(const MaskToken& token) {
    if (contains_word(token.descriptor, "female"))
        return "F";
    if (contains_word(token.descriptor, "male"))
        return "M";
    if (token.type_hint) {
        std::string h = *token.type_hint;
        std::transform(h.begin(), h.end(), h.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (h == "f" || h == "female")
            return "F";
        if (h == "m" || h == "male")
            return "M";
    }
    return "";
}

int digit_count(std::uint64_t v) {
    int n = 1;
    while (v >= 10) {
        v /= 10;
        ++n;
    }
    return n;
}

}  // namespace

std::string_view to_string(GenSource s) {
    switch (s) {
    case GenSource::Gazetteer:
        return "gazetteer";
    case GenSource::Randomized:
        return "randomized";
    case GenSource::FillMask:
        return "fill_mask";
    case GenSource::Fallback:
        return "fallback";
    }
    return "fallback";
}

std::string gen_date(DateStyle style, DateWindow window, RandomStream& rng) {
    switch (style) {
    case DateStyle::Full:
        return gen_date("M/D/YYYY", window, rng);
    case DateStyle::YearOnly:
        return gen_date("YYYY", window, rng);
    case DateStyle::MonthDay:
        return gen_date("M/D", window, rng);
    }
    return gen_date("M/D/YYYY", window, rng);
}

std::string gen_date(std::string_view pattern, DateWindow window,
                     RandomStream& rng) {
    if (window.first_year > window.last_year)
        fail("empty date window [", window.first_year, ", ",
             window.last_year, "]");
    return render_date(draw_date(window, rng), pattern);
}

std::string gen_numeric_id(int length, RandomStream& rng) {
    if (length < 1)
        fail("numeric id length must be >= 1, got ", length);
    std::string out;
    out.reserve(length);
    for (int i = 0; i < length; ++i)
        out += static_cast<char>('0' + rng.below(10));
    return out;
}

std::string gen_phone(RandomStream& rng) {
    std::string out = gen_numeric_id(3, rng);
    out += '-';
    out += gen_numeric_id(3, rng);
    out += '-';
    out += gen_numeric_id(4, rng);
    return out;
}

std::string gen_age(int lo, int hi, RandomStream& rng) {
    if (lo < 0 || hi > 120 || lo > hi)
        fail("age range must lie within [0, 120], got [", lo, ", ", hi, "]");
    return std::to_string(rng.range(lo, hi));
}

std::string_view fallback_for(TagKind tag) {
    switch (tag) {
    case TagKind::FIRSTNAME:
    case TagKind::DOCTORFIRSTNAME:
        return "John";
    case TagKind::LASTNAME:
    case TagKind::DOCTORLASTNAME:
    case TagKind::NAME:
        return "Smith";
    case TagKind::HOSPITAL:
        return "General Hospital";
    case TagKind::COMPANY:
        return "Acme";
    case TagKind::UNIVERSITY:
        return "State University";
    case TagKind::STATE:
        return "Massachusetts";
    case TagKind::COUNTRY:
        return "United States";
    case TagKind::LOCATION:
        return "Boston";
    case TagKind::DATE:
        return "1/1/2000";
    case TagKind::YEAR:
        return "2000";
    case TagKind::AGE:
        return "50";
    case TagKind::PHONE:
    case TagKind::PAGER:
        return "555-555-5555";
    case TagKind::NUMERICID:
        return "0000000";
    case TagKind::EMAIL:
        return "contact@example.com";
    case TagKind::URL:
        return "http://example.com";
    case TagKind::HOLIDAY:
        return "Christmas";
    case TagKind::WARDNAME:
        return "5 North";
    case TagKind::UNKNOWN:
        return "item";
    }
    return "item";
}

std::string sanitize_output(std::string text) {
    // Dropping every bracket and asterisk (not just whole delimiters)
    // guarantees a replacement can never complete a mask delimiter even
    // by juxtaposition with surrounding text.
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '[' || c == ']' || c == '*')
            continue;
        if (c == '\t' || c == '\n' || c == '\r')
            c = ' ';
        out += c;
    }
    std::size_t first = out.find_first_not_of(' ');
    if (first == std::string::npos)
        return "";
    std::size_t last = out.find_last_not_of(' ');
    return out.substr(first, last - first + 1);
}

struct Generator::Impl {
    std::optional<FillMaskClient> client;
    mutable std::counting_semaphore<> inflight;

    explicit Impl(const GeneratorConfig& cfg)
        : inflight(std::max(1, cfg.fillmask_inflight)) {
        if (!cfg.fillmask_endpoint.empty())
            client.emplace(cfg.fillmask_endpoint, cfg.fillmask_timeout_ms);
    }
};

Generator::Generator(const PseudoDatabase* db, GeneratorConfig cfg)
    : db_(db), cfg_(std::move(cfg)),
      impl_(std::make_unique<Impl>(cfg_)) {}

Generator::~Generator() = default;

GenSource Generator::route_for(TagKind tag) const {
    switch (tag) {
    case TagKind::FIRSTNAME:
    case TagKind::LASTNAME:
    case TagKind::DOCTORFIRSTNAME:
    case TagKind::DOCTORLASTNAME:
    case TagKind::HOSPITAL:
    case TagKind::COMPANY:
    case TagKind::UNIVERSITY:
    case TagKind::STATE:
        return GenSource::Gazetteer;
    case TagKind::DATE:
    case TagKind::YEAR:
    case TagKind::AGE:
    case TagKind::PHONE:
    case TagKind::PAGER:
    case TagKind::NUMERICID:
        return GenSource::Randomized;
    case TagKind::COUNTRY:
    case TagKind::LOCATION:
    case TagKind::EMAIL:
    case TagKind::URL:
    case TagKind::HOLIDAY:
    case TagKind::WARDNAME:
    case TagKind::NAME:
    case TagKind::UNKNOWN:
        return GenSource::FillMask;
    }
    return GenSource::FillMask;
}

GenResult Generator::sample_list(const std::string& list,
                                 const AttrFilter& filter, TagKind tag,
                                 RandomStream& rng) const {
    GenResult r;
    if (!db_ || !db_->has_list(list)) {
        r.text = std::string(fallback_for(tag));
        r.source = GenSource::Fallback;
        r.incident = GenIncident{"missing_list",
                                 cat("pseudo database has no list '", list,
                                     "' for tag ", to_string(tag))};
        return r;
    }
    if (!filter.empty()) {
        try {
            r.text = db_->sample(list, filter, rng).surface;
            r.source = GenSource::Gazetteer;
            return r;
        } catch (const Error&) {
            // List has no entries with the requested attribute; fall
            // through to an unfiltered draw.
        }
    }
    r.text = db_->sample(list, rng).surface;
    r.source = GenSource::Gazetteer;
    return r;
}

GenResult Generator::fill_mask_route(const GenerationContext& ctx) const {
    GenResult r;
    TagKind tag = ctx.tag;
    auto fallback = [&](std::string kind, std::string detail) {
        r.text = std::string(fallback_for(tag));
        r.source = GenSource::Fallback;
        r.incident = GenIncident{std::move(kind), std::move(detail)};
        return r;
    };

    if (!impl_->client)
        return fallback("fillmask_unconfigured",
                        cat("tag ", to_string(tag),
                            " routes to fill-mask but no endpoint is "
                            "configured"));

    FillMaskRequest req;
    req.mask_marker = cfg_.mask_marker;
    req.top_k = 1;
    req.text.assign(ctx.sentence.substr(0, ctx.token.begin));
    req.text += cfg_.mask_marker;
    req.text.append(ctx.sentence.substr(ctx.token.end));

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.fillmask_retries; ++attempt) {
        try {
            impl_->inflight.acquire();
            FillMaskResponse res = [&] {
                struct Release {
                    std::counting_semaphore<>& s;
                    ~Release() { s.release(); }
                } release{impl_->inflight};
                return impl_->client->fill(req);
            }();
            std::string text = sanitize_output(res.top().token);
            if (text.empty())
                return fallback("fillmask_empty",
                                "backend candidate sanitized to empty text");
            r.text = std::move(text);
            r.source = GenSource::FillMask;
            return r;
        } catch (const FillMaskError& e) {
            last_error = e.what();
            if (e.kind == FillMaskError::Kind::Protocol)
                return fallback("fillmask_protocol", last_error);
            // Transport errors are retried.
        }
    }
    return fallback("fillmask_transport", last_error);
}

GenResult Generator::dispatch(const GenerationContext& ctx,
                              RandomStream& rng) const {
    const MaskToken& token = ctx.token;
    switch (ctx.tag) {
    case TagKind::FIRSTNAME:
    case TagKind::DOCTORFIRSTNAME: {
        std::string gender = gender_from_token(token);
        if (gender.empty())
            gender = rng.below(2) == 0 ? "F" : "M";
        AttrFilter filter;
        filter.add("gender", gender);
        return sample_list("first_names", filter, ctx.tag, rng);
    }
    case TagKind::LASTNAME:
    case TagKind::DOCTORLASTNAME:
        return sample_list("last_names", AttrFilter(), ctx.tag, rng);
    case TagKind::HOSPITAL:
        return sample_list("hospitals", AttrFilter(), ctx.tag, rng);
    case TagKind::COMPANY:
        return sample_list("companies", AttrFilter(), ctx.tag, rng);
    case TagKind::UNIVERSITY:
        return sample_list("universities", AttrFilter(), ctx.tag, rng);
    case TagKind::STATE:
        return sample_list("states", AttrFilter(), ctx.tag, rng);
    case TagKind::DATE: {
        std::string_view pattern = token.is_bare
                                       ? bare_date_pattern(token.bare)
                                       : std::string_view("M/D/YYYY");
        return {gen_date(pattern, cfg_.date_window, rng),
                GenSource::Randomized, std::nullopt};
    }
    case TagKind::YEAR:
        return {gen_date(DateStyle::YearOnly, cfg_.date_window, rng),
                GenSource::Randomized, std::nullopt};
    case TagKind::AGE:
        return {gen_age(cfg_.age_lo, cfg_.age_hi, rng),
                GenSource::Randomized, std::nullopt};
    case TagKind::PHONE:
    case TagKind::PAGER:
        return {gen_phone(rng), GenSource::Randomized, std::nullopt};
    case TagKind::NUMERICID: {
        int length = 7;
        if (token.entity_id)
            length = digit_count(*token.entity_id);
        else if (token.is_bare && !token.bare.empty())
            length = static_cast<int>(token.bare.size());
        return {gen_numeric_id(length, rng), GenSource::Randomized,
                std::nullopt};
    }
    case TagKind::COUNTRY:
    case TagKind::LOCATION:
    case TagKind::EMAIL:
    case TagKind::URL:
    case TagKind::HOLIDAY:
    case TagKind::WARDNAME:
    case TagKind::NAME:
    case TagKind::UNKNOWN:
        return fill_mask_route(ctx);
    }
    return fill_mask_route(ctx);
}

GenResult Generator::generate(const GenerationContext& ctx,
                              RandomStream& rng) const {
    const bool memo_on =
        cfg_.memoize && ctx.memo != nullptr && ctx.token.entity_id.has_value();
    NoteMemo::Key key{ctx.tag, ctx.token.entity_id.value_or(0)};
    if (memo_on) {
        if (const auto* hit = ctx.memo->find(key))
            return {hit->first, hit->second, std::nullopt};
    }
    GenResult r = dispatch(ctx, rng);
    r.text = sanitize_output(std::move(r.text));
    if (r.text.empty()) {
        // Degenerate inputs only; keep the completeness contract.
        r.text = std::string(fallback_for(ctx.tag));
        r.source = GenSource::Fallback;
    }
    if (memo_on)
        ctx.memo->put(key, r.text, r.source);
    return r;
}

}  // namespace pseudo
