#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "naab/errors.hpp"

namespace naab {

struct codepoint_range {
    char32_t lo;
    char32_t hi; // inclusive

    friend bool operator==(const codepoint_range&, const codepoint_range&) = default;
};

// The cleaning policy: which codepoints count as "proper" Farsi text, which
// Arabic variants get folded onto their Farsi form, and the minimum number
// of tokens a line must keep to survive.
//
// Rule files are UTF-8, line oriented, `#` to end of line is a comment:
//
//   no_defaults            # first directive only: start from an empty policy
//   min_tokens 3
//   allow U+0627           # single codepoint
//   allow U+06F0..U+06F9   # inclusive range
//   allow '.'              # quoted literal works wherever a codepoint does
//   sub U+064A U+06CC
//   sub 'ك' 'ک'
//
// Without `no_defaults` the file extends the built-in policy: allowed
// codepoints are unioned, substitutions are added (same source: the file
// wins), and min_tokens replaces the default when present.
class ruleset {
public:
    // The built-in policy: the 32-letter Farsi alphabet, the Arabic
    // characters common in Farsi text, '.', '?', '-', ',' with their Farsi
    // counterparts, space and the half-space; eight Arabic->Farsi folds;
    // min_tokens 2.
    static ruleset defaults();

    static ruleset load(const std::filesystem::path& path);

    // `origin` names the source in diagnostics ("rules.txt:12: ...").
    static ruleset parse(std::string_view text, std::string_view origin = "<rules>");

    // Validates every invariant; throws validation_error naming the
    // offending codepoint.
    ruleset(std::vector<codepoint_range> allowed,
            std::map<char32_t, char32_t> substitutions,
            std::uint64_t min_tokens);

    bool is_allowed(char32_t cp) const {
        const std::size_t word = cp >> 6;
        if (word >= allowed_bits_.size()) return false;
        return (allowed_bits_[word] >> (cp & 63u)) & 1u;
    }

    char32_t substitute(char32_t cp) const {
        if (cp < subst_dense_.size()) return subst_dense_[cp];
        const auto it = substitutions_.find(cp);
        return it == substitutions_.end() ? cp : it->second;
    }

    std::uint64_t min_tokens() const { return min_tokens_; }

    const std::vector<codepoint_range>& allowed_ranges() const { return allowed_ranges_; }
    const std::map<char32_t, char32_t>& substitutions() const { return substitutions_; }

    // Canonical text form; load(serialize()) reproduces the ruleset exactly.
    std::string serialize() const;

    // SHA-256 of serialize(), hex. Stamped into reports and manifests.
    std::string fingerprint() const;

    friend bool operator==(const ruleset& a, const ruleset& b) {
        return a.allowed_ranges_ == b.allowed_ranges_ &&
               a.substitutions_ == b.substitutions_ &&
               a.min_tokens_ == b.min_tokens_;
    }

private:
    std::vector<codepoint_range> allowed_ranges_; // sorted, merged
    std::map<char32_t, char32_t> substitutions_;
    std::uint64_t min_tokens_ = 0;

    std::vector<std::uint64_t> allowed_bits_;
    std::vector<char32_t> subst_dense_; // identity-mapped table over the BMP
};

} // namespace naab
