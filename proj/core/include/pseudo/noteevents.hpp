#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pseudo/pipeline.hpp"

namespace pseudo {

/// Streaming adapter for a NOTEEVENTS-shaped CSV (RFC-4180 quoting,
/// multi-line TEXT fields).  The header must name ROW_ID and TEXT columns;
/// other columns pass through as metadata.
class NoteEventsCsvSource : public NoteSource {
public:
    NoteEventsCsvSource(std::istream& in, std::string origin);

    std::optional<NoteRecord> next() override;

private:
    std::vector<std::string> read_record();

    std::istream* in_;
    std::string origin_;
    std::vector<std::string> columns_;
    std::size_t row_id_col_ = 0;
    std::size_t text_col_ = 0;
    std::uint64_t record_no_ = 0;
    bool eof_ = false;
};

}  // namespace pseudo
