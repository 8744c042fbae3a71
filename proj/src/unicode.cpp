#include "naab/unicode.hpp"

#include <cstdio>

namespace naab {

std::optional<std::size_t> first_invalid_byte(std::string_view s) {
    std::size_t i = 0;
    char32_t cp;
    while (i < s.size()) {
        if (!next_codepoint(s, i, cp)) return i;
    }
    return std::nullopt;
}

namespace {

// How many bytes to discard when decoding fails at s[i]: the offending
// leader plus any continuation bytes that followed it.
std::size_t invalid_run_length(std::string_view s, std::size_t i) {
    const auto* p = reinterpret_cast<const unsigned char*>(s.data());
    const unsigned char b0 = p[i];
    std::size_t expect = 1;
    if (b0 >= 0xC0 && b0 <= 0xDF) expect = 2;
    else if (b0 >= 0xE0 && b0 <= 0xEF) expect = 3;
    else if (b0 >= 0xF0 && b0 <= 0xF7) expect = 4;
    std::size_t k = 1;
    while (k < expect && i + k < s.size() && (p[i + k] & 0xC0) == 0x80) ++k;
    return k;
}

} // namespace

std::string replace_invalid_utf8(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    char32_t cp;
    while (i < s.size()) {
        const std::size_t start = i;
        if (next_codepoint(s, i, cp)) {
            out.append(s, start, i - start);
        } else {
            append_utf8(replacement_char, out);
            i += invalid_run_length(s, i);
        }
    }
    return out;
}

std::string codepoint_name(char32_t cp) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(cp));
    return buf;
}

} // namespace naab
