#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 helpers. All character offsets in this project are Unicode
// scalar-value counts, not byte counts; these helpers map between the two.

namespace tweetner::utf8 {

inline bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Decodes one code point starting at byte offset `i`, advancing `i`.
// Malformed sequences throw.
inline char32_t decode_at(std::string_view s, std::size_t& i) {
    unsigned char c0 = static_cast<unsigned char>(s[i]);
    if (c0 < 0x80) {
        ++i;
        return c0;
    }
    int extra;
    char32_t cp;
    if ((c0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = c0 & 0x1F;
    } else if ((c0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = c0 & 0x0F;
    } else if ((c0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = c0 & 0x07;
    } else {
        throw std::runtime_error("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + extra >= s.size()) throw std::runtime_error("truncated UTF-8 sequence");
    for (int k = 1; k <= extra; ++k) {
        unsigned char c = static_cast<unsigned char>(s[i + k]);
        if (!is_continuation(c)) throw std::runtime_error("invalid UTF-8 continuation byte");
        cp = (cp << 6) | (c & 0x3F);
    }
    i += extra + 1;
    return cp;
}

// Byte offset of each code point, plus one past-the-end entry.
inline std::vector<std::size_t> codepoint_byte_offsets(std::string_view s) {
    std::vector<std::size_t> offs;
    std::size_t i = 0;
    while (i < s.size()) {
        offs.push_back(i);
        decode_at(s, i);
    }
    offs.push_back(s.size());
    return offs;
}

inline std::size_t length(std::string_view s) {
    std::size_t n = 0, i = 0;
    while (i < s.size()) {
        decode_at(s, i);
        ++n;
    }
    return n;
}

inline std::vector<char32_t> decode(std::string_view s) {
    std::vector<char32_t> cps;
    std::size_t i = 0;
    while (i < s.size()) cps.push_back(decode_at(s, i));
    return cps;
}

inline void encode_to(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    for (char32_t cp : cps) encode_to(cp, out);
    return out;
}

// Substring by character (code point) range [first, last).
inline std::string substr_chars(std::string_view s, std::size_t first, std::size_t last) {
    auto offs = codepoint_byte_offsets(s);
    std::size_t n = offs.size() - 1;
    if (first > last || last > n) throw std::out_of_range("character range out of bounds");
    return std::string(s.substr(offs[first], offs[last] - offs[first]));
}

inline bool is_space(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' || cp == U'\f';
}

inline bool is_ascii_upper(char32_t cp) { return cp >= U'A' && cp <= U'Z'; }
inline bool is_ascii_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

inline char32_t ascii_lower(char32_t cp) {
    return is_ascii_upper(cp) ? cp + 32 : cp;
}

// ASCII-only case fold; non-ASCII code points pass through unchanged.
inline std::string fold_case(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) encode_to(ascii_lower(decode_at(s, i)), out);
    return out;
}

}  // namespace tweetner::utf8
