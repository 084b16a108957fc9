#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <string>
#include <vector>

#include "glsb/records.hpp"

namespace glsb {

/// Attribute names and codes follow the public Stack Exchange data-dump
/// schema (Posts.xml, Comments.xml, PostLinks.xml; 2021+ layout).
///   PostTypeId: 1 = question, 2 = answer, anything else skipped.
///   LinkTypeId: 1 = linked, 3 = duplicate, anything else skipped.
inline constexpr const char* kDumpSchemaNote = "stackexchange-dump-2021";

struct RowError {
    std::size_t row_index = 0;
    std::string message;
};

/// Row accounting for one dump file: parsed + skipped() == total_rows.
struct ParseReport {
    std::size_t total_rows = 0;
    std::size_t parsed = 0;
    std::size_t skipped_kind = 0;
    std::vector<RowError> row_errors;

    std::size_t skipped() const { return skipped_kind + row_errors.size(); }
};

template <typename Record>
struct ParseResult {
    std::vector<Record> records;
    ParseReport report;
};

// Streaming entry points: memory stays constant in the input size, each
// record is handed to the sink as soon as its row closes. Malformed XML
// throws Error(ParseError) carrying the byte offset.
ParseReport stream_posts(std::istream& in, const std::function<void(PostRecord&&)>& sink);
ParseReport stream_comments(std::istream& in, const std::function<void(CommentRecord&&)>& sink);
ParseReport stream_postlinks(std::istream& in,
                             const std::function<void(PostLinkRecord&&)>& sink);

ParseResult<PostRecord> parse_posts(std::istream& in);
ParseResult<CommentRecord> parse_comments(std::istream& in);
ParseResult<PostLinkRecord> parse_postlinks(std::istream& in);

}  // namespace glsb
