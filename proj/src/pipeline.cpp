#include "naab/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

#include "naab/unicode.hpp"

namespace naab {

void pipeline_report::merge(const pipeline_report& other) {
    lines_in += other.lines_in;
    lines_out += other.lines_out;
    lines_dropped_empty += other.lines_dropped_empty;
    lines_dropped_short += other.lines_dropped_short;
    words_dropped_non_farsi += other.words_dropped_non_farsi;
    substitutions_applied += other.substitutions_applied;
    words_out += other.words_out;
    bytes_in += other.bytes_in;
    bytes_out += other.bytes_out;
    elapsed = std::max(elapsed, other.elapsed);
}

namespace {

// Word-filter worker: appends surviving words from in[from..] onto out.
std::uint64_t filter_words_into(std::string_view in, std::size_t from, const ruleset& rules,
                                std::string& out) {
    std::uint64_t dropped = 0;
    std::size_t i = from;
    const std::size_t n = in.size();
    while (i < n) {
        if (in[i] == ' ') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        bool proper = true;
        bool only_half_space = true;
        while (i < n && in[i] != ' ') {
            const char32_t cp = next_codepoint_trusted(in, i);
            if (!rules.is_allowed(cp)) {
                proper = false;
                while (i < n && in[i] != ' ') ++i;
                break;
            }
            if (cp != zwnj) only_half_space = false;
        }
        if (proper && !only_half_space) {
            if (!out.empty()) out.push_back(' ');
            out.append(in.data() + start, i - start);
        } else {
            ++dropped;
        }
    }
    return dropped;
}

} // namespace

std::uint64_t filter_words(std::string_view in, const ruleset& rules, std::string& out) {
    out.clear();
    return filter_words_into(in, 0, rules, out);
}

std::uint64_t unify_chars(std::string_view in, const ruleset& rules, std::string& out) {
    out.clear();
    std::uint64_t changed = 0;
    std::size_t copied_from = 0;
    std::size_t i = 0;
    while (i < in.size()) {
        const std::size_t start = i;
        const char32_t cp = next_codepoint_trusted(in, i);
        const char32_t repl = rules.substitute(cp);
        if (repl != cp) {
            out.append(in, copied_from, start - copied_from);
            append_utf8(repl, out);
            copied_from = i;
            ++changed;
        }
    }
    out.append(in, copied_from, in.size() - copied_from);
    return changed;
}

namespace {

// U+200C encodes as E2 80 8C; 0xE2 can never be a continuation byte, so a
// byte scan is safe on valid UTF-8.
inline bool is_zwnj_at(std::string_view s, std::size_t i) {
    return i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
           static_cast<unsigned char>(s[i + 1]) == 0x80 &&
           static_cast<unsigned char>(s[i + 2]) == 0x8C;
}

} // namespace

namespace {

// Shared worker for unify_spaces: copies content runs wholesale and returns
// the token count of the unified line (tokens = emitted spaces + 1).
std::uint64_t unify_spaces_impl(std::string_view in, std::string& out) {
    out.clear();
    std::uint64_t spaces = 0;
    bool pending_space = false;
    std::size_t i = 0;
    const std::size_t n = in.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(in[i]);
        if (c == ' ' || c == '\t') {
            pending_space = !out.empty();
            ++i;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            ++spaces;
            pending_space = false;
        }
        if (c == 0xE2 && is_zwnj_at(in, i)) {
            out.append("‌");
            i += 3;
            while (is_zwnj_at(in, i)) i += 3;
        } else {
            std::size_t run = i + 1;
            while (run < n) {
                const unsigned char rc = static_cast<unsigned char>(in[run]);
                if (rc == ' ' || rc == '\t' || rc == 0xE2) break;
                ++run;
            }
            out.append(in, i, run - i);
            i = run;
        }
    }
    return out.empty() ? 0 : spaces + 1;
}

// In-place stage variants for the batch path: a read-only detection pass
// first, rewriting only lines that actually change.

std::uint64_t filter_words_inplace(std::string& text, const ruleset& rules,
                                   std::string& scratch) {
    const std::string_view in = text;
    const std::size_t n = in.size();
    // Scan for the first thing the rebuild would change, remembering how far
    // the line is already canonical so the rebuild can start there.
    std::size_t i = 0;
    std::size_t prefix_end = 0; // end of the last proper word seen
    bool rebuild = false;
    while (i < n) {
        if (in[i] == ' ') {
            if (i == 0 || i + 1 >= n || in[i + 1] == ' ') { // leading/trailing/run
                rebuild = true;
                break;
            }
            ++i;
            continue;
        }
        const std::size_t word_start = i;
        bool proper = true;
        bool only_half_space = true;
        while (i < n && in[i] != ' ') {
            const char32_t cp = next_codepoint_trusted(in, i);
            if (!rules.is_allowed(cp)) {
                proper = false;
                break;
            }
            if (cp != zwnj) only_half_space = false;
        }
        if (!proper || only_half_space) {
            rebuild = true;
            i = word_start;
            break;
        }
        prefix_end = i;
    }
    if (!rebuild) return 0;

    scratch.assign(in.data(), prefix_end);
    const std::uint64_t dropped = filter_words_into(in, i, rules, scratch);
    text.swap(scratch);
    return dropped;
}

std::uint64_t unify_chars_inplace(std::string& text, const ruleset& rules,
                                  std::string& scratch) {
    const std::string_view in = text;
    std::size_t i = 0;
    std::size_t first = std::string_view::npos;
    while (i < in.size()) {
        const std::size_t start = i;
        const char32_t cp = next_codepoint_trusted(in, i);
        if (rules.substitute(cp) != cp) {
            first = start;
            break;
        }
    }
    if (first == std::string_view::npos) return 0;
    const std::uint64_t changed = unify_chars(in.substr(first), rules, scratch);
    scratch.insert(0, in.substr(0, first));
    text.swap(scratch);
    return changed;
}

std::uint64_t unify_spaces_inplace(std::string& text, std::string& scratch) {
    const std::string_view in = text;
    if (in.empty()) return 0;
    if (in.front() != ' ' && in.back() != ' ' && in.find('\t') == std::string_view::npos &&
        in.find("  ") == std::string_view::npos &&
        in.find("‌‌") == std::string_view::npos) {
        return static_cast<std::uint64_t>(std::count(in.begin(), in.end(), ' ')) + 1;
    }
    const std::uint64_t tokens = unify_spaces_impl(in, scratch);
    text.swap(scratch);
    return tokens;
}

} // namespace

void unify_spaces(std::string_view in, std::string& out) { unify_spaces_impl(in, out); }

std::uint64_t count_tokens(std::string_view line) {
    std::uint64_t count = 0;
    bool in_token = false;
    for (char c : line) {
        if (c == ' ') {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

line_outcome clean_line(std::string& text, const ruleset& rules, std::string& scratch) {
    line_outcome outcome;
    outcome.words_dropped = filter_words_inplace(text, rules, scratch);
    outcome.substitutions = unify_chars_inplace(text, rules, scratch);
    const std::uint64_t tokens = unify_spaces_inplace(text, scratch);
    if (is_empty(text)) {
        outcome.reason = drop_reason::empty;
        return outcome;
    }
    if (tokens < rules.min_tokens()) {
        outcome.reason = drop_reason::short_line;
        return outcome;
    }
    outcome.tokens_kept = tokens;
    return outcome;
}

line_outcome clean_line(std::string& text, const ruleset& rules) {
    std::string scratch;
    return clean_line(text, rules, scratch);
}

namespace {

using steady = std::chrono::steady_clock;

inline std::uint64_t elapsed_ns(steady::time_point from, steady::time_point to) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(to - from).count());
}

struct batch_line {
    std::string text;     // working buffer; cleaned text after processing
    std::string original; // kept only when a reject channel is attached
    std::size_t original_bytes = 0;
    line_outcome outcome;
};

// Runs the five stages over lines [lo, hi), stage by stage. Timing uses one
// clock pair per stage per slice.
void clean_slice(std::vector<batch_line>& lines, std::size_t lo, std::size_t hi,
                 const ruleset& rules, std::string& scratch, stage_timings* timings) {
    auto t0 = steady::now();
    for (std::size_t k = lo; k < hi; ++k) {
        lines[k].outcome = line_outcome{};
        lines[k].outcome.words_dropped = filter_words_inplace(lines[k].text, rules, scratch);
    }
    auto t1 = steady::now();
    for (std::size_t k = lo; k < hi; ++k) {
        lines[k].outcome.substitutions = unify_chars_inplace(lines[k].text, rules, scratch);
    }
    auto t2 = steady::now();
    for (std::size_t k = lo; k < hi; ++k) {
        lines[k].outcome.tokens_kept = unify_spaces_inplace(lines[k].text, scratch);
    }
    auto t3 = steady::now();
    for (std::size_t k = lo; k < hi; ++k) {
        auto& line = lines[k];
        if (is_empty(line.text)) {
            line.outcome.reason = drop_reason::empty;
            line.outcome.tokens_kept = 0;
        } else if (line.outcome.tokens_kept < rules.min_tokens()) {
            line.outcome.reason = drop_reason::short_line;
            line.outcome.tokens_kept = 0;
        }
    }
    auto t4 = steady::now();
    if (timings) {
        #pragma omp atomic
        timings->filter_words_ns += elapsed_ns(t0, t1);
        #pragma omp atomic
        timings->unify_chars_ns += elapsed_ns(t1, t2);
        #pragma omp atomic
        timings->unify_spaces_ns += elapsed_ns(t2, t3);
        #pragma omp atomic
        timings->length_gate_ns += elapsed_ns(t3, t4);
    }
}

constexpr std::string_view reason_label(drop_reason reason) {
    return reason == drop_reason::empty ? "empty" : "short";
}

} // namespace

pipeline_report clean_stream(line_source& source, line_sink& sink, const ruleset& rules,
                             const clean_options& options) {
    const auto run_start = steady::now();
    pipeline_report report;
    const unsigned workers = std::max(1u, options.workers);
    const bool keep_original = options.reject != nullptr;

    std::vector<batch_line> batch;
    std::vector<std::string> scratches(workers);

    bool exhausted = false;
    while (!exhausted) {
        // Fill one batch. Buffers are recycled across batches.
        auto read_start = steady::now();
        std::size_t count = 0;
        std::size_t batch_bytes = 0;
        while (count < options.batch_lines && batch_bytes < options.batch_bytes) {
            if (count == batch.size()) batch.emplace_back();
            batch_line& slot = batch[count];
            if (!source.next(slot.text)) {
                exhausted = true;
                break;
            }
            slot.original_bytes = slot.text.size();
            if (keep_original) slot.original = slot.text;
            batch_bytes += slot.original_bytes;
            ++count;
        }
        if (options.timings) options.timings->read_ns += elapsed_ns(read_start, steady::now());
        if (count == 0) break;

        if (workers == 1) {
            clean_slice(batch, 0, count, rules, scratches[0], options.timings);
        } else {
            #pragma omp parallel num_threads(workers)
            {
                const unsigned nthreads = static_cast<unsigned>(omp_get_num_threads());
                const unsigned tid = static_cast<unsigned>(omp_get_thread_num());
                const std::size_t lo = count * tid / nthreads;
                const std::size_t hi = count * (tid + 1) / nthreads;
                if (lo < hi) {
                    clean_slice(batch, lo, hi, rules, scratches[tid], options.timings);
                }
            }
        }

        // Finalize sequentially in input order; a line enters the report
        // only once its fate is settled, so aborted runs stay balanced.
        auto write_start = steady::now();
        for (std::size_t k = 0; k < count; ++k) {
            batch_line& line = batch[k];
            if (line.outcome.reason == drop_reason::none) {
                try {
                    sink.write(line.text);
                } catch (const io_error& e) {
                    report.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
                        steady::now() - run_start);
                    throw sink_write_error(e.what(), report);
                }
                report.lines_out += 1;
                report.words_out += line.outcome.tokens_kept;
                report.bytes_out += line.text.size();
            } else {
                if (options.reject) {
                    std::string entry;
                    entry.reserve(line.original.size() + 8);
                    entry.append(reason_label(line.outcome.reason));
                    entry.push_back('\t');
                    entry.append(line.original);
                    try {
                        options.reject->write(entry);
                    } catch (const io_error& e) {
                        report.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
                            steady::now() - run_start);
                        throw sink_write_error(e.what(), report);
                    }
                }
                if (line.outcome.reason == drop_reason::empty) {
                    report.lines_dropped_empty += 1;
                } else {
                    report.lines_dropped_short += 1;
                }
            }
            report.lines_in += 1;
            report.bytes_in += line.original_bytes;
            report.words_dropped_non_farsi += line.outcome.words_dropped;
            report.substitutions_applied += line.outcome.substitutions;
        }
        if (options.timings) options.timings->write_ns += elapsed_ns(write_start, steady::now());
    }

    report.elapsed =
        std::chrono::duration_cast<std::chrono::nanoseconds>(steady::now() - run_start);
    return report;
}

} // namespace naab
