#include "glsb/text.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <utility>

namespace glsb::text {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

constexpr std::array<std::pair<std::string_view, std::uint32_t>, 12> kNamedEntities{{
    {"amp", '&'},
    {"lt", '<'},
    {"gt", '>'},
    {"quot", '"'},
    {"apos", '\''},
    {"nbsp", 0xA0},
    {"ndash", 0x2013},
    {"mdash", 0x2014},
    {"hellip", 0x2026},
    {"rsquo", 0x2019},
    {"lsquo", 0x2018},
    {"copy", 0xA9},
}};

}  // namespace

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '&') {
            out += text[i++];
            continue;
        }
        const auto semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += text[i++];
            continue;
        }
        const auto name = text.substr(i + 1, semi - i - 1);
        bool decoded = false;
        if (!name.empty() && name[0] == '#') {
            std::uint32_t cp = 0;
            const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
            const auto digits = name.substr(hex ? 2 : 1);
            const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), cp,
                                             hex ? 16 : 10);
            if (!digits.empty() && res.ec == std::errc{} &&
                res.ptr == digits.data() + digits.size()) {
                append_utf8(out, cp);
                decoded = true;
            }
        } else {
            for (const auto& [entity, cp] : kNamedEntities) {
                if (entity == name) {
                    append_utf8(out, cp);
                    decoded = true;
                    break;
                }
            }
        }
        if (decoded) {
            i = semi + 1;
        } else {
            out += text[i++];
        }
    }
    return out;
}

std::string strip_html(std::string_view html) {
    std::string out;
    out.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        const char c = html[i];
        // A '<' only opens a tag when followed by a name, '/', '!' or '?'.
        if (c == '<' && i + 1 < html.size()) {
            const char n = html[i + 1];
            const bool opens = (n >= 'a' && n <= 'z') || (n >= 'A' && n <= 'Z') || n == '/' ||
                               n == '!' || n == '?';
            if (opens) {
                const auto close = html.find('>', i + 1);
                if (close != std::string_view::npos) {
                    out += ' ';
                    i = close + 1;
                    continue;
                }
            }
        }
        out += c;
        ++i;
    }
    return decode_entities(out);
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    for (auto& ch : out) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    return out;
}

std::vector<std::string> parse_tags(std::string_view raw) {
    std::vector<std::string> tags;
    if (raw.empty()) return tags;
    if (raw.front() == '|') {
        for (auto& part : split(raw, '|')) {
            if (!part.empty()) tags.push_back(to_lower(part));
        }
        return tags;
    }
    std::size_t pos = 0;
    while ((pos = raw.find('<', pos)) != std::string_view::npos) {
        const auto end = raw.find('>', pos + 1);
        if (end == std::string_view::npos) break;
        if (end > pos + 1) tags.push_back(to_lower(raw.substr(pos + 1, end - pos - 1)));
        pos = end + 1;
    }
    return tags;
}

std::size_t utf8_length(std::string_view text) {
    std::size_t n = 0;
    for (const unsigned char c : text) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace glsb::text
