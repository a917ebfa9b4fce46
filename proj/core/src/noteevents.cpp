#include "pseudo/noteevents.hpp"

#include <algorithm>
#include <cctype>
#include <istream>

#include "pseudo/error.hpp"

namespace pseudo {

NoteEventsCsvSource::NoteEventsCsvSource(std::istream& in, std::string origin)
    : in_(&in), origin_(std::move(origin)) {
    columns_ = read_record();
    if (columns_.empty())
        fail(origin_, ": empty CSV (no header row)");
    auto find_col = [&](const char* name) -> std::size_t {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            std::string upper = columns_[i];
            std::transform(upper.begin(), upper.end(), upper.begin(),
                           [](unsigned char c) { return std::toupper(c); });
            if (upper == name)
                return i;
        }
        fail(origin_, ": header has no ", name, " column");
    };
    row_id_col_ = find_col("ROW_ID");
    text_col_ = find_col("TEXT");
}

// One CSV record (possibly spanning physical lines inside quotes).
// Returns an empty vector at EOF.
std::vector<std::string> NoteEventsCsvSource::read_record() {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    ++record_no_;

    int ch;
    while ((ch = in_->get()) != std::istream::traits_type::eof()) {
        any = true;
        char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in_->peek() == '"') {
                    in_->get();
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty())
                fail(origin_, ": record ", record_no_,
                     ": quote inside unquoted field");
            in_quotes = true;
            break;
        case ',':
            fields.push_back(std::move(field));
            field.clear();
            break;
        case '\r':
            break;
        case '\n':
            fields.push_back(std::move(field));
            return fields;
        default:
            field += c;
        }
    }
    if (in_quotes)
        fail(origin_, ": record ", record_no_, ": unterminated quoted field");
    if (!any)
        return {};
    fields.push_back(std::move(field));
    return fields;
}

std::optional<NoteRecord> NoteEventsCsvSource::next() {
    if (eof_)
        return std::nullopt;
    for (;;) {
        std::vector<std::string> fields = read_record();
        if (fields.empty()) {
            eof_ = true;
            return std::nullopt;
        }
        if (fields.size() == 1 && fields[0].empty())
            continue;  // blank line between records
        if (fields.size() != columns_.size())
            fail(origin_, ": record ", record_no_, ": expected ",
                 columns_.size(), " fields, got ", fields.size());
        NoteRecord rec;
        rec.note_id = fields[row_id_col_];
        rec.text = std::move(fields[text_col_]);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i == row_id_col_ || i == text_col_)
                continue;
            rec.metadata[columns_[i]] = std::move(fields[i]);
        }
        return rec;
    }
}

}  // namespace pseudo
