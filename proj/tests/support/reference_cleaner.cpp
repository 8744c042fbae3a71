#include "reference_cleaner.hpp"

namespace naab::testing {

namespace {

constexpr char32_t half_space = 0x200C;

// Independent decoder: counts continuation bytes. Input lines are already
// validated by ingestion, so no error handling here.
std::u32string to_u32(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char b = static_cast<unsigned char>(s[i]);
        char32_t cp;
        std::size_t extra;
        if (b < 0x80) {
            cp = b;
            extra = 0;
        } else if ((b & 0xE0) == 0xC0) {
            cp = b & 0x1F;
            extra = 1;
        } else if ((b & 0xF0) == 0xE0) {
            cp = b & 0x0F;
            extra = 2;
        } else {
            cp = b & 0x07;
            extra = 3;
        }
        ++i;
        for (std::size_t k = 0; k < extra && i < s.size(); ++k, ++i) {
            cp = (cp << 6) | (static_cast<unsigned char>(s[i]) & 0x3F);
        }
        out.push_back(cp);
    }
    return out;
}

std::string to_u8(const std::u32string& s) {
    std::string out;
    for (char32_t cp : s) {
        if (cp <= 0x7F) {
            out.push_back(static_cast<char>(cp));
        } else if (cp <= 0x7FF) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp <= 0xFFFF) {
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
    return out;
}

std::vector<std::u32string> split_on_spaces(const std::u32string& s) {
    std::vector<std::u32string> words;
    std::u32string current;
    for (char32_t cp : s) {
        if (cp == U' ') {
            if (!current.empty()) {
                words.push_back(current);
                current.clear();
            }
        } else {
            current.push_back(cp);
        }
    }
    if (!current.empty()) words.push_back(current);
    return words;
}

} // namespace

reference_cleaner::reference_cleaner(const ruleset& rules)
    : substitutions_(rules.substitutions()), min_tokens_(rules.min_tokens()) {
    // Expanding ranges into a set is fine for test-scale policies.
    for (const auto& range : rules.allowed_ranges()) {
        for (char32_t cp = range.lo;; ++cp) {
            allowed_.insert(cp);
            if (cp == range.hi) break;
        }
    }
}

std::optional<std::string> reference_cleaner::clean_line(std::string_view line) const {
    const std::u32string text = to_u32(line);

    // step 1: keep proper words
    std::u32string filtered;
    for (const auto& word : split_on_spaces(text)) {
        bool keep = true;
        bool any_regular = false;
        for (char32_t cp : word) {
            if (!allowed_.count(cp)) {
                keep = false;
                break;
            }
            if (cp != half_space) any_regular = true;
        }
        if (keep && any_regular) {
            if (!filtered.empty()) filtered.push_back(U' ');
            filtered += word;
        }
    }

    // step 2: unify characters
    std::u32string unified;
    for (char32_t cp : filtered) {
        const auto it = substitutions_.find(cp);
        unified.push_back(it == substitutions_.end() ? cp : it->second);
    }

    // step 3: unify spaces (and collapse half-space runs)
    std::u32string spaced;
    bool pending = false;
    for (char32_t cp : unified) {
        if (cp == U' ' || cp == U'\t') {
            pending = !spaced.empty();
            continue;
        }
        if (pending) {
            spaced.push_back(U' ');
            pending = false;
        }
        if (cp == half_space && !spaced.empty() && spaced.back() == half_space) continue;
        spaced.push_back(cp);
    }

    // step 4: remove empty lines
    if (spaced.empty()) return std::nullopt;

    // step 5: remove short lines
    if (split_on_spaces(spaced).size() < min_tokens_) return std::nullopt;

    return to_u8(spaced);
}

std::vector<std::string> reference_cleaner::clean_lines(
    const std::vector<std::string>& lines) const {
    std::vector<std::string> out;
    for (const auto& line : lines) {
        if (auto cleaned = clean_line(line)) out.push_back(std::move(*cleaned));
    }
    return out;
}

} // namespace naab::testing
