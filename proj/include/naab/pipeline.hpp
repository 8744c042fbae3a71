#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include "naab/charsets.hpp"
#include "naab/stream.hpp"

namespace naab {

// Per-run accounting. Counters cover finalized lines only, so the balance
// lines_out + lines_dropped_empty + lines_dropped_short == lines_in holds
// even for runs aborted by a sink failure.
struct pipeline_report {
    std::uint64_t lines_in = 0;
    std::uint64_t lines_out = 0;
    std::uint64_t lines_dropped_empty = 0;
    std::uint64_t lines_dropped_short = 0;
    std::uint64_t words_dropped_non_farsi = 0;
    std::uint64_t substitutions_applied = 0;
    std::uint64_t words_out = 0;
    std::uint64_t bytes_in = 0;  // line content bytes, terminators excluded
    std::uint64_t bytes_out = 0;
    std::chrono::nanoseconds elapsed{0};

    // Counters sum; elapsed takes the max (parallel legs overlap).
    void merge(const pipeline_report& other);

    friend bool operator==(const pipeline_report&, const pipeline_report&) = default;
};

// Wall-clock attribution across the cleaning stages, nanoseconds.
struct stage_timings {
    std::uint64_t read_ns = 0;
    std::uint64_t filter_words_ns = 0;
    std::uint64_t unify_chars_ns = 0;
    std::uint64_t unify_spaces_ns = 0;
    std::uint64_t length_gate_ns = 0;
    std::uint64_t write_ns = 0;
};

// --- The five stages, in the order the cleaner applies them. -------------
//
// Each stage is a pure per-line transform; `out` is overwritten. Inputs are
// valid UTF-8 (ingestion guarantees it).

// Stage 1: keep only proper words. Words are split on runs of U+0020; a
// word survives iff every codepoint is allowed and at least one codepoint
// is not the half-space. Survivors are re-joined with single spaces.
// Returns the number of words dropped.
std::uint64_t filter_words(std::string_view in, const ruleset& rules, std::string& out);

// Stage 2: fold substitution-source codepoints onto their replacements.
// Returns the number of codepoints changed.
std::uint64_t unify_chars(std::string_view in, const ruleset& rules, std::string& out);

// Stage 3: collapse runs of space/tab to one space, trim both ends, and
// collapse runs of consecutive half-spaces to one. The half-space is not
// whitespace: it never separates words and is not trimmed.
void unify_spaces(std::string_view in, std::string& out);

// Stage 4 predicate.
inline bool is_empty(std::string_view line) { return line.empty(); }

// Number of space-separated tokens; assumes spaces are already unified.
std::uint64_t count_tokens(std::string_view line);

// Stage 5 predicate: keep lines with at least n tokens.
inline bool meets_min_tokens(std::string_view line, std::uint64_t n) {
    return count_tokens(line) >= n;
}

// --------------------------------------------------------------------------

enum class drop_reason : std::uint8_t { none, empty, short_line };

struct line_outcome {
    drop_reason reason = drop_reason::none;
    std::uint64_t words_dropped = 0;
    std::uint64_t substitutions = 0;
    std::uint64_t tokens_kept = 0; // valid when reason == none
};

// Applies the five stages to `text` in place; cleaned text is left in
// `text` when the line survives. `scratch` is reused across calls.
line_outcome clean_line(std::string& text, const ruleset& rules, std::string& scratch);
line_outcome clean_line(std::string& text, const ruleset& rules);

struct clean_options {
    unsigned workers = 1;
    bool ordered = true; // relative input order of survivors is preserved
    std::size_t batch_bytes = std::size_t{4} << 20;
    std::size_t batch_lines = 1 << 16;
    line_sink* reject = nullptr;      // receives "reason<TAB>original_line"
    stage_timings* timings = nullptr; // filled when non-null
};

// A sink failure surfaces as this; the report covers everything finalized
// before the failed write and still balances.
class sink_write_error : public io_error {
public:
    sink_write_error(const std::string& what, pipeline_report partial)
        : io_error(what), partial_report(partial) {}

    pipeline_report partial_report;
};

// Streams source through the five stages into sink. Peak memory is bounded
// by batch size times worker count, independent of stream length. Output is
// byte-identical for any worker count.
pipeline_report clean_stream(line_source& source, line_sink& sink, const ruleset& rules,
                             const clean_options& options = {});

} // namespace naab
