#include "naab/charsets.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "naab/checksum.hpp"
#include "naab/unicode.hpp"

namespace naab {

namespace {

// The 32 letters of the Farsi alphabet, alef through ye.
constexpr char32_t farsi_letters[] = {
    0x0627, // ا
    0x0628, // ب
    0x067E, // پ
    0x062A, // ت
    0x062B, // ث
    0x062C, // ج
    0x0686, // چ
    0x062D, // ح
    0x062E, // خ
    0x062F, // د
    0x0630, // ذ
    0x0631, // ر
    0x0632, // ز
    0x0698, // ژ
    0x0633, // س
    0x0634, // ش
    0x0635, // ص
    0x0636, // ض
    0x0637, // ط
    0x0638, // ظ
    0x0639, // ع
    0x063A, // غ
    0x0641, // ف
    0x0642, // ق
    0x06A9, // ک
    0x06AF, // گ
    0x0644, // ل
    0x0645, // م
    0x0646, // ن
    0x0648, // و
    0x0647, // ه
    0x06CC, // ی
};

// Arabic characters ubiquitous in Farsi text. All substitution sources must
// stay allowed so the word filter does not delete them before unification.
constexpr char32_t arabic_extras[] = {
    0x064A, // ي
    0x06CE, // ێ
    0x0629, // ة
    0x06C0, // ۀ
    0x0643, // ك
    0x0625, // إ
    0x0692, // ڒ
    0x06C6, // ۆ
    0x06C7, // ۇ (allowed, never substituted)
};

constexpr char32_t symbol_chars[] = {
    0x002E, // .
    0x003F, // ?
    0x002D, // -
    0x002C, // ,
    0x061F, // ؟
    0x060C, // ،
    0x061B, // ؛
};

constexpr std::uint64_t default_min_tokens = 2;

constexpr std::pair<char32_t, char32_t> default_substitutions[] = {
    {0x064A, 0x06CC}, // ي -> ی
    {0x06CE, 0x06CC}, // ێ -> ی
    {0x0629, 0x0647}, // ة -> ه
    {0x06C0, 0x0647}, // ۀ -> ه
    {0x0643, 0x06A9}, // ك -> ک
    {0x0625, 0x0627}, // إ -> ا
    {0x0692, 0x0631}, // ڒ -> ر
    {0x06C6, 0x0648}, // ۆ -> و
};

std::vector<codepoint_range> normalize_ranges(std::vector<codepoint_range> ranges) {
    std::sort(ranges.begin(), ranges.end(),
              [](const codepoint_range& a, const codepoint_range& b) {
                  return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
              });
    std::vector<codepoint_range> merged;
    for (const auto& r : ranges) {
        if (!merged.empty() && static_cast<std::uint32_t>(r.lo) <=
                                   static_cast<std::uint32_t>(merged.back().hi) + 1) {
            merged.back().hi = std::max(merged.back().hi, r.hi);
        } else {
            merged.push_back(r);
        }
    }
    return merged;
}

bool in_ranges(const std::vector<codepoint_range>& ranges, char32_t cp) {
    const auto it = std::upper_bound(
        ranges.begin(), ranges.end(), cp,
        [](char32_t v, const codepoint_range& r) { return v < r.lo; });
    return it != ranges.begin() && cp <= std::prev(it)->hi;
}

struct rule_file_contents {
    bool no_defaults = false;
    std::vector<codepoint_range> allowed;
    std::map<char32_t, char32_t> substitutions;
    std::optional<std::uint64_t> min_tokens;
};

[[noreturn]] void parse_fail(std::string_view origin, std::size_t line_no,
                             const std::string& what) {
    std::ostringstream msg;
    msg << origin << ":" << line_no << ": " << what;
    throw validation_error(msg.str());
}

// A codepoint token: U+XXXX (2-6 hex digits) or a single character in
// single quotes.
char32_t parse_codepoint_token(std::string_view tok, std::string_view origin,
                               std::size_t line_no) {
    if (tok.size() >= 3 && tok.front() == '\'' && tok.back() == '\'') {
        const std::string_view inner = tok.substr(1, tok.size() - 2);
        std::size_t i = 0;
        char32_t cp;
        if (!next_codepoint(inner, i, cp) || i != inner.size())
            parse_fail(origin, line_no,
                       "quoted literal must be exactly one character: " + std::string(tok));
        return cp;
    }
    if (tok.size() >= 4 && (tok.substr(0, 2) == "U+" || tok.substr(0, 2) == "u+")) {
        const std::string_view hex = tok.substr(2);
        if (hex.empty() || hex.size() > 6)
            parse_fail(origin, line_no, "bad codepoint: " + std::string(tok));
        std::uint32_t value = 0;
        for (char c : hex) {
            std::uint32_t digit;
            if (c >= '0' && c <= '9') digit = static_cast<std::uint32_t>(c - '0');
            else if (c >= 'a' && c <= 'f') digit = static_cast<std::uint32_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') digit = static_cast<std::uint32_t>(c - 'A' + 10);
            else parse_fail(origin, line_no, "bad codepoint: " + std::string(tok));
            value = (value << 4) | digit;
        }
        if (value > static_cast<std::uint32_t>(max_codepoint))
            parse_fail(origin, line_no, "codepoint out of range: " + std::string(tok));
        return static_cast<char32_t>(value);
    }
    parse_fail(origin, line_no, "expected U+XXXX or quoted literal, got: " + std::string(tok));
}

// Splits "A..B" range syntax before codepoint parsing. The ".." separator
// cannot collide with a quoted '.' because quotes hold exactly one char.
codepoint_range parse_range_token(std::string_view tok, std::string_view origin,
                                  std::size_t line_no) {
    const std::size_t dots = tok.find("..", 1);
    if (dots == std::string_view::npos || tok.size() < dots + 3) {
        const char32_t cp = parse_codepoint_token(tok, origin, line_no);
        return {cp, cp};
    }
    const char32_t lo = parse_codepoint_token(tok.substr(0, dots), origin, line_no);
    const char32_t hi = parse_codepoint_token(tok.substr(dots + 2), origin, line_no);
    if (hi < lo)
        parse_fail(origin, line_no, "range upper bound below lower bound: " + std::string(tok));
    return {lo, hi};
}

// Strips the `# ...` comment, respecting single-quoted literals.
std::string_view strip_comment(std::string_view line) {
    bool in_quote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\'') in_quote = !in_quote;
        else if (line[i] == '#' && !in_quote) return line.substr(0, i);
    }
    return line;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

rule_file_contents parse_rule_text(std::string_view text, std::string_view origin) {
    rule_file_contents out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool seen_directive = false;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                              : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        const auto fields = split_fields(strip_comment(raw));
        if (fields.empty()) continue;

        const std::string_view verb = fields[0];
        if (verb == "no_defaults") {
            if (seen_directive)
                parse_fail(origin, line_no, "no_defaults must be the first directive");
            if (fields.size() != 1)
                parse_fail(origin, line_no, "no_defaults takes no arguments");
            out.no_defaults = true;
        } else if (verb == "allow") {
            if (fields.size() != 2)
                parse_fail(origin, line_no, "allow takes one codepoint or range");
            out.allowed.push_back(parse_range_token(fields[1], origin, line_no));
        } else if (verb == "sub") {
            if (fields.size() != 3)
                parse_fail(origin, line_no, "sub takes a source and a replacement");
            const char32_t src = parse_codepoint_token(fields[1], origin, line_no);
            const char32_t dst = parse_codepoint_token(fields[2], origin, line_no);
            out.substitutions[src] = dst;
        } else if (verb == "min_tokens") {
            std::size_t arg = 1;
            if (fields.size() == 3 && fields[1] == "=") arg = 2;
            else if (fields.size() != 2)
                parse_fail(origin, line_no, "min_tokens takes one number");
            const std::string_view num = fields[arg];
            std::uint64_t value = 0;
            if (num.empty()) parse_fail(origin, line_no, "min_tokens takes one number");
            for (char c : num) {
                if (c < '0' || c > '9')
                    parse_fail(origin, line_no, "min_tokens expects a non-negative integer, got: " +
                                                    std::string(num));
                value = value * 10 + static_cast<std::uint64_t>(c - '0');
            }
            out.min_tokens = value;
        } else {
            parse_fail(origin, line_no, "unknown directive: " + std::string(verb));
        }
        seen_directive = true;
    }
    return out;
}

} // namespace

ruleset::ruleset(std::vector<codepoint_range> allowed,
                 std::map<char32_t, char32_t> substitutions,
                 std::uint64_t min_tokens)
    : allowed_ranges_(normalize_ranges(std::move(allowed))),
      substitutions_(std::move(substitutions)),
      min_tokens_(min_tokens) {
    for (const auto& r : allowed_ranges_) {
        if (r.hi > max_codepoint)
            throw validation_error("allowed range exceeds U+10FFFF at " + codepoint_name(r.lo));
    }
    for (const auto& [src, dst] : substitutions_) {
        if (src == dst)
            throw validation_error("substitution maps " + codepoint_name(src) + " to itself");
        if (!in_ranges(allowed_ranges_, src))
            throw validation_error("substitution source " + codepoint_name(src) +
                                   " is not in the allowed set");
        if (!in_ranges(allowed_ranges_, dst))
            throw validation_error("substitution replacement " + codepoint_name(dst) +
                                   " is not in the allowed set");
        if (substitutions_.count(dst))
            throw validation_error("substitution replacement " + codepoint_name(dst) +
                                   " is itself a substitution source");
    }
    if (!in_ranges(allowed_ranges_, U' '))
        throw validation_error("the allowed set must contain U+0020 (space)");
    if (!in_ranges(allowed_ranges_, zwnj))
        throw validation_error("the allowed set must contain U+200C (half-space)");

    char32_t top = 0;
    for (const auto& r : allowed_ranges_) top = std::max(top, r.hi);
    allowed_bits_.assign((static_cast<std::size_t>(top) >> 6) + 1, 0);
    for (const auto& r : allowed_ranges_) {
        for (char32_t cp = r.lo;; ++cp) {
            allowed_bits_[cp >> 6] |= std::uint64_t{1} << (cp & 63u);
            if (cp == r.hi) break;
        }
    }

    subst_dense_.resize(0x10000);
    std::iota(subst_dense_.begin(), subst_dense_.end(), char32_t{0});
    for (const auto& [src, dst] : substitutions_) {
        if (src < subst_dense_.size()) subst_dense_[src] = dst;
    }
}

ruleset ruleset::defaults() {
    std::vector<codepoint_range> allowed;
    for (char32_t cp : farsi_letters) allowed.push_back({cp, cp});
    for (char32_t cp : arabic_extras) allowed.push_back({cp, cp});
    for (char32_t cp : symbol_chars) allowed.push_back({cp, cp});
    allowed.push_back({U' ', U' '});
    allowed.push_back({zwnj, zwnj});

    std::map<char32_t, char32_t> subs;
    for (const auto& [src, dst] : default_substitutions) subs[src] = dst;

    return ruleset(std::move(allowed), std::move(subs), default_min_tokens);
}

ruleset ruleset::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open rule file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw io_error("cannot read rule file: " + path.string());
    return parse(buf.str(), path.filename().string());
}

ruleset ruleset::parse(std::string_view text, std::string_view origin) {
    rule_file_contents file = parse_rule_text(text, origin);
    if (file.no_defaults) {
        return ruleset(std::move(file.allowed), std::move(file.substitutions),
                       file.min_tokens.value_or(default_min_tokens));
    }
    const ruleset base = defaults();
    std::vector<codepoint_range> allowed = base.allowed_ranges();
    allowed.insert(allowed.end(), file.allowed.begin(), file.allowed.end());
    std::map<char32_t, char32_t> subs = base.substitutions();
    for (const auto& [src, dst] : file.substitutions) subs[src] = dst;
    return ruleset(std::move(allowed), std::move(subs),
                   file.min_tokens.value_or(base.min_tokens()));
}

std::string ruleset::serialize() const {
    std::string out = "no_defaults\n";
    out += "min_tokens " + std::to_string(min_tokens_) + "\n";
    for (const auto& r : allowed_ranges_) {
        out += "allow " + codepoint_name(r.lo);
        if (r.hi != r.lo) out += ".." + codepoint_name(r.hi);
        out += "\n";
    }
    for (const auto& [src, dst] : substitutions_) {
        out += "sub " + codepoint_name(src) + " " + codepoint_name(dst) + "\n";
    }
    return out;
}

std::string ruleset::fingerprint() const { return sha256_hex(serialize()); }

} // namespace naab
