#include "naab/stats.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include <json.hpp>

namespace naab {

std::uint64_t count_words(std::string_view line) {
    std::uint64_t count = 0;
    bool in_word = false;
    for (char c : line) {
        if (c == ' ' || c == '\t') {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

void corpus_stats::add_line(std::string_view line) {
    const std::uint64_t w = count_words(line);
    bytes += line.size();
    paragraphs += 1;
    words += w;
    max_words_in_paragraph = std::max(max_words_in_paragraph, w);
}

void corpus_stats::merge(const corpus_stats& other) {
    bytes += other.bytes;
    paragraphs += other.paragraphs;
    words += other.words;
    max_words_in_paragraph = std::max(max_words_in_paragraph, other.max_words_in_paragraph);
}

histogram::histogram(std::uint32_t base) : base_(base) {
    if (base < 2) throw validation_error("histogram base must be at least 2");
}

void histogram::add(std::uint64_t words) {
    if (words == 0) {
        ++underflow_zero_;
        return;
    }
    std::size_t k;
    if (base_ == 2) {
        k = static_cast<std::size_t>(std::bit_width(words)) - 1;
    } else {
        k = 0;
        std::uint64_t lower = 1;
        while (lower <= words / base_) {
            lower *= base_;
            ++k;
        }
    }
    if (k >= counts_.size()) counts_.resize(k + 1, 0);
    ++counts_[k];
}

void histogram::merge(const histogram& other) {
    if (base_ != other.base_)
        throw validation_error("cannot merge histograms with bases " + std::to_string(base_) +
                               " and " + std::to_string(other.base_));
    underflow_zero_ += other.underflow_zero_;
    if (other.counts_.size() > counts_.size()) counts_.resize(other.counts_.size(), 0);
    for (std::size_t k = 0; k < other.counts_.size(); ++k) counts_[k] += other.counts_[k];
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> histogram::bins() const {
    std::size_t top = counts_.size();
    while (top > 0 && counts_[top - 1] == 0) --top;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    out.reserve(top);
    std::uint64_t lower = 1;
    for (std::size_t k = 0; k < top; ++k) {
        out.emplace_back(lower, counts_[k]);
        lower *= base_;
    }
    return out;
}

std::uint64_t histogram::total() const {
    std::uint64_t sum = underflow_zero_;
    for (std::uint64_t c : counts_) sum += c;
    return sum;
}

void scan_result::merge(const scan_result& other) {
    stats.merge(other.stats);
    hist.merge(other.hist);
}

scan_result scan(line_source& source, std::uint32_t base) {
    scan_result result(base);
    std::string line;
    while (source.next(line)) {
        const std::uint64_t w = count_words(line);
        result.stats.bytes += line.size();
        result.stats.paragraphs += 1;
        result.stats.words += w;
        result.stats.max_words_in_paragraph = std::max(result.stats.max_words_in_paragraph, w);
        result.hist.add(w);
    }
    return result;
}

std::uint64_t words_per_paragraph_centi(const corpus_stats& s) {
    if (s.paragraphs == 0)
        throw validation_error("words/paragraph is undefined for zero paragraphs");
    const std::uint64_t scaled = s.words * 100;
    std::uint64_t q = scaled / s.paragraphs;
    const std::uint64_t r = scaled % s.paragraphs;
    // round half to even on the exact remainder
    if (2 * r > s.paragraphs || (2 * r == s.paragraphs && (q & 1))) ++q;
    return q;
}

double words_per_paragraph(const corpus_stats& s) {
    if (s.paragraphs == 0)
        throw validation_error("words/paragraph is undefined for zero paragraphs");
    return static_cast<double>(s.words) / static_cast<double>(s.paragraphs);
}

std::string format_ratio_centi(std::uint64_t centi) {
    std::string out = std::to_string(centi / 100);
    out.push_back('.');
    const std::uint64_t frac = centi % 100;
    out.push_back(static_cast<char>('0' + frac / 10));
    out.push_back(static_cast<char>('0' + frac % 10));
    return out;
}

source_breakdown breakdown(const std::vector<std::pair<std::string, corpus_stats>>& entries) {
    if (entries.empty()) throw validation_error("breakdown needs at least one source");
    source_breakdown out;
    for (const auto& [name, stats] : entries) {
        for (const auto& existing : out.entries) {
            if (existing.name == name)
                throw validation_error("duplicate source name: " + name);
        }
        out.entries.push_back({name, stats, 0, 0});
        out.total.merge(stats);
    }
    if (out.total.bytes == 0 || out.total.paragraphs == 0)
        throw validation_error("breakdown needs nonzero total bytes and paragraphs");
    for (auto& entry : out.entries) {
        entry.byte_share =
            static_cast<double>(entry.stats.bytes) / static_cast<double>(out.total.bytes);
        entry.paragraph_share = static_cast<double>(entry.stats.paragraphs) /
                                static_cast<double>(out.total.paragraphs);
    }
    return out;
}

namespace {

nlohmann::json histogram_bins_json(const histogram& h) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& [lower, count] : h.bins()) {
        bins.push_back(nlohmann::json::array({lower, count}));
    }
    return bins;
}

std::string render_json(const corpus_stats& s, const histogram& h, const report_meta& meta) {
    nlohmann::json doc;
    doc["bytes"] = s.bytes;
    doc["paragraphs"] = s.paragraphs;
    doc["words"] = s.words;
    doc["max_words_in_paragraph"] = s.max_words_in_paragraph;
    doc["words_per_paragraph"] =
        s.paragraphs == 0 ? 0.0
                          : static_cast<double>(words_per_paragraph_centi(s)) / 100.0;
    doc["histogram"] = histogram_bins_json(h);
    doc["histogram_base"] = h.base();
    doc["histogram_underflow_zero"] = h.underflow_zero();
    doc["tool_version"] = meta.tool_version;
    doc["ruleset_fingerprint"] = meta.ruleset_fingerprint;
    doc["input"] = meta.input;
    return doc.dump(2) + "\n";
}

std::string render_tsv(const histogram& h) {
    std::string out = "0\t" + std::to_string(h.underflow_zero()) + "\n";
    for (const auto& [lower, count] : h.bins()) {
        out += std::to_string(lower);
        out.push_back('\t');
        out += std::to_string(count);
        out.push_back('\n');
    }
    return out;
}

std::string render_human(const corpus_stats& s, const histogram& h, const report_meta& meta) {
    std::ostringstream out;
    if (!meta.input.empty()) out << "input:                  " << meta.input << "\n";
    out << "bytes:                  " << s.bytes << "\n";
    out << "paragraphs:             " << s.paragraphs << "\n";
    out << "words:                  " << s.words << "\n";
    out << "words/paragraph:        "
        << (s.paragraphs == 0 ? "n/a" : format_ratio_centi(words_per_paragraph_centi(s)))
        << "\n";
    out << "max words in paragraph: " << s.max_words_in_paragraph << "\n";
    const auto bins = h.bins();
    if (h.underflow_zero() > 0 || !bins.empty()) {
        out << "words/paragraph histogram (base " << h.base() << "):\n";
        if (h.underflow_zero() > 0)
            out << "  [0]  " << h.underflow_zero() << "\n";
        for (const auto& [lower, count] : bins) {
            out << "  [" << lower << ", " << lower * h.base() << ")  " << count << "\n";
        }
    }
    return out.str();
}

} // namespace

std::string render_report(const corpus_stats& s, const histogram& h, report_format format,
                          const report_meta& meta) {
    switch (format) {
    case report_format::json:
        return render_json(s, h, meta);
    case report_format::tsv:
        return render_tsv(h);
    case report_format::human:
    default:
        return render_human(s, h, meta);
    }
}

} // namespace naab
