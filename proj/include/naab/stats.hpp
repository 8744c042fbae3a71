#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "naab/errors.hpp"
#include "naab/stream.hpp"

namespace naab {

// One Table-1 row: mergeable single-pass aggregates over a line stream.
struct corpus_stats {
    std::uint64_t bytes = 0; // UTF-8 content bytes, terminators excluded
    std::uint64_t paragraphs = 0;
    std::uint64_t words = 0;
    std::uint64_t max_words_in_paragraph = 0;

    void add_line(std::string_view line);
    void merge(const corpus_stats& other);

    friend bool operator==(const corpus_stats&, const corpus_stats&) = default;
};

// Number of words in a line: maximal nonempty runs between separators.
// Space is the separator; tab counts too so raw (pre-cleaning) text gets
// sane counts. Cleaned text never contains tabs, so both conventions agree
// where it matters.
std::uint64_t count_words(std::string_view line);

// Words-per-paragraph distribution with exponentially growing bins: bin k
// counts paragraphs whose word count w satisfies base^k <= w < base^(k+1).
// Zero-word paragraphs go to a dedicated underflow slot.
class histogram {
public:
    explicit histogram(std::uint32_t base = 2);

    void add(std::uint64_t words);
    void merge(const histogram& other); // throws validation_error on base mismatch

    std::uint32_t base() const { return base_; }
    std::uint64_t underflow_zero() const { return underflow_zero_; }

    // (lower_bound, count) ascending through the highest occupied bin;
    // interior zero-count bins are kept so the rows plot gap-free.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> bins() const;

    // Sum of all bin counts plus the underflow slot.
    std::uint64_t total() const;

    friend bool operator==(const histogram&, const histogram&) = default;

private:
    std::uint32_t base_;
    std::uint64_t underflow_zero_ = 0;
    std::vector<std::uint64_t> counts_; // counts_[k] covers [base^k, base^(k+1))
};

struct scan_result {
    corpus_stats stats;
    histogram hist;

    scan_result() : hist(2) {}
    explicit scan_result(std::uint32_t base) : hist(base) {}

    void merge(const scan_result& other);
};

// Single pass over a line stream; constant memory.
scan_result scan(line_source& source, std::uint32_t base = 2);

// words / paragraphs in hundredths, rounded half to even on the exact
// rational. Throws validation_error when paragraphs == 0.
std::uint64_t words_per_paragraph_centi(const corpus_stats& s);
double words_per_paragraph(const corpus_stats& s);

// The centi value rendered as "19.57".
std::string format_ratio_centi(std::uint64_t centi);

struct source_share {
    std::string name;
    corpus_stats stats;
    double byte_share = 0;
    double paragraph_share = 0;
};

struct source_breakdown {
    std::vector<source_share> entries;
    corpus_stats total;
};

// Per-source size proportions. Names must be unique and the totals nonzero.
source_breakdown breakdown(const std::vector<std::pair<std::string, corpus_stats>>& entries);

enum class report_format : std::uint8_t { human, json, tsv };

struct report_meta {
    std::string tool_version;
    std::string ruleset_fingerprint;
    std::string input;
};

// `tsv` renders the histogram only: "lower_bound<TAB>count" rows ascending,
// with the zero-word underflow slot as lower_bound 0.
std::string render_report(const corpus_stats& s, const histogram& h, report_format format,
                          const report_meta& meta = {});

} // namespace naab
