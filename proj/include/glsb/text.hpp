#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace glsb::text {

/// Removes markup, replacing each tag with a single space so adjacent block
/// elements never fuse into one word, then decodes character references.
std::string strip_html(std::string_view html);

/// Decodes named (common subset) and numeric character references once.
std::string decode_entities(std::string_view text);

/// ASCII lowercase; bytes >= 0x80 are left untouched.
std::string to_lower(std::string_view text);

/// Accepts both dump tag encodings: "<a><b>" and "|a|b|".
std::vector<std::string> parse_tags(std::string_view raw);

std::size_t utf8_length(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);

}  // namespace glsb::text
