#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "naab/charsets.hpp"
#include "naab/pipeline.hpp"
#include "naab/stream.hpp"
#include "naab/unicode.hpp"
#include "support/reference_cleaner.hpp"
#include "support/synthetic.hpp"

using namespace naab;

namespace {

const ruleset& rules() {
    static const ruleset r = ruleset::defaults();
    return r;
}

std::pair<std::string, std::uint64_t> filtered(std::string_view in) {
    std::string out;
    const std::uint64_t dropped = filter_words(in, rules(), out);
    return {out, dropped};
}

std::pair<std::string, std::uint64_t> unified(std::string_view in) {
    std::string out;
    const std::uint64_t subs = unify_chars(in, rules(), out);
    return {out, subs};
}

std::string spaced(std::string_view in) {
    std::string out;
    unify_spaces(in, out);
    return out;
}

std::vector<std::string> run_clean(const std::vector<std::string>& lines,
                                   pipeline_report* report_out = nullptr,
                                   clean_options options = {}) {
    vector_line_source source(lines);
    vector_line_sink sink;
    const pipeline_report report = clean_stream(source, sink, rules(), options);
    if (report_out) *report_out = report;
    return sink.lines;
}

bool counters_equal(const pipeline_report& a, const pipeline_report& b) {
    pipeline_report x = a;
    pipeline_report y = b;
    x.elapsed = y.elapsed = {};
    return x == y;
}

std::uint64_t codepoints_in(std::string_view s) {
    std::size_t i = 0;
    std::uint64_t n = 0;
    char32_t cp;
    while (next_codepoint(s, i, cp)) ++n;
    return n;
}

} // namespace

TEST_CASE("filter_words keeps proper words and counts the dropped") {
    CHECK(filtered("سلام hello دنیا") == std::pair<std::string, std::uint64_t>{"سلام دنیا", 1});
    CHECK(filtered("") == std::pair<std::string, std::uint64_t>{"", 0});
    CHECK(filtered("کتاب‌ها .") == std::pair<std::string, std::uint64_t>{"کتاب‌ها .", 0});
    // multiple spaces become single joins already at this stage
    CHECK(filtered("سلام   دنیا") == std::pair<std::string, std::uint64_t>{"سلام دنیا", 0});
    // a word that is nothing but half-spaces is improper
    CHECK(filtered("‌ ا ‌‌") ==
          std::pair<std::string, std::uint64_t>{"ا", 2});
    // half-space at word edges survives
    CHECK(filtered("‌سلام") == std::pair<std::string, std::uint64_t>{"‌سلام", 0});
    // a tab glues its neighbours into one improper word
    CHECK(filtered("سلام\tدنیا") == std::pair<std::string, std::uint64_t>{"", 1});
}

TEST_CASE("unify_chars folds variants and preserves codepoint length") {
    auto [yeh, yeh_subs] = unified("علي");
    CHECK(yeh == "علی");
    CHECK(yeh_subs == 1);
    CHECK(codepoints_in(yeh) == codepoints_in("علي"));

    CHECK(unified("مدرسة") == std::pair<std::string, std::uint64_t>{"مدرسه", 1});
    CHECK(unified("کتاب") == std::pair<std::string, std::uint64_t>{"کتاب", 0});
    CHECK(unified("كۆڒێإية") ==
          std::pair<std::string, std::uint64_t>{"کوریایه", 7});
}

TEST_CASE("unify_spaces collapses runs, trims, and folds half-space runs") {
    CHECK(spaced("سلام   دنیا") == "سلام دنیا");
    CHECK(spaced("  سلام\tدنیا  ") == "سلام دنیا");
    CHECK(spaced("سلام دنیا") == "سلام دنیا");
    CHECK(spaced("کتاب‌‌‌ها") == "کتاب‌ها");
    // the half-space is not whitespace: not trimmed, not a separator
    CHECK(spaced("‌سلام‌") == "‌سلام‌");
    CHECK(spaced("‌ ‌") == "‌ ‌");
    CHECK(spaced(" \t ") == "");
}

TEST_CASE("empty and short gates") {
    CHECK(is_empty(""));
    CHECK_FALSE(is_empty("ی"));
    CHECK_FALSE(is_empty("."));

    CHECK(count_tokens("سلام دنیا") == 2);
    CHECK(count_tokens("") == 0);
    CHECK(meets_min_tokens("سلام دنیا", 2));
    CHECK_FALSE(meets_min_tokens("سلام", 2));
    CHECK(meets_min_tokens("سلام دنیا", 0));
}

TEST_CASE("clean_line composes the stages in order") {
    std::string all_latin = "ok ok ok";
    const line_outcome dropped = clean_line(all_latin, rules());
    CHECK(dropped.reason == drop_reason::empty);
    CHECK(dropped.words_dropped == 3);

    std::string substituted = "علي  رفت";
    const line_outcome kept = clean_line(substituted, rules());
    CHECK(kept.reason == drop_reason::none);
    CHECK(substituted == "علی رفت");
    CHECK(kept.substitutions == 1);
    CHECK(kept.tokens_kept == 2);

    std::string lone = "سلام";
    CHECK(clean_line(lone, rules()).reason == drop_reason::short_line);
}

TEST_CASE("clean_stream handles the three-line fixture") {
    pipeline_report report;
    const auto out = run_clean({"hello", "سلام دنیا", ""}, &report);
    CHECK(out == std::vector<std::string>{"سلام دنیا"});
    CHECK(report.lines_in == 3);
    CHECK(report.lines_out == 1);
    CHECK(report.lines_dropped_empty == 2);
    CHECK(report.lines_dropped_short == 0);
    CHECK(report.words_dropped_non_farsi == 1);
    CHECK(report.substitutions_applied == 0);
    CHECK(report.words_out == 2);
    CHECK(report.bytes_out == std::string("سلام دنیا").size());
}

TEST_CASE("clean_stream on an empty stream reports all zeros") {
    pipeline_report report;
    const auto out = run_clean({}, &report);
    CHECK(out.empty());
    CHECK(counters_equal(report, pipeline_report{}));
}

TEST_CASE("cleaning is idempotent and the second run is a no-op") {
    const auto lines = naab::testing::mixed_script_lines(2000, 11);
    pipeline_report first_report;
    const auto once = run_clean(lines, &first_report);
    pipeline_report second_report;
    const auto twice = run_clean(once, &second_report);
    CHECK(once == twice);
    CHECK(second_report.substitutions_applied == 0);
    CHECK(second_report.words_dropped_non_farsi == 0);
    CHECK(second_report.lines_dropped_empty == 0);
    CHECK(second_report.lines_dropped_short == 0);
    CHECK(second_report.lines_out == second_report.lines_in);
}

TEST_CASE("every surviving line satisfies the output contract") {
    const auto lines = naab::testing::mixed_script_lines(2000, 23);
    const auto out = run_clean(lines);
    CHECK(!out.empty());
    for (const auto& line : out) {
        CHECK_FALSE(line.empty());
        CHECK(line.front() != ' ');
        CHECK(line.back() != ' ');
        CHECK(line.find("  ") == std::string::npos);
        CHECK(count_tokens(line) >= rules().min_tokens());
        std::size_t i = 0;
        char32_t cp;
        while (i < line.size()) {
            REQUIRE(next_codepoint(line, i, cp));
            CHECK(rules().is_allowed(cp));
            CHECK(rules().substitutions().count(cp) == 0);
        }
    }
}

TEST_CASE("report balance holds on randomized fixtures") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto lines = naab::testing::mixed_script_lines(500, seed);
        pipeline_report report;
        run_clean(lines, &report);
        CHECK(report.lines_in == lines.size());
        CHECK(report.lines_out + report.lines_dropped_empty + report.lines_dropped_short ==
              report.lines_in);
    }
}

TEST_CASE("output and counters are identical across worker counts and batch shapes") {
    const auto lines = naab::testing::mixed_script_lines(3000, 37);
    pipeline_report base_report;
    const auto base = run_clean(lines, &base_report);

    for (unsigned workers : {2u, 3u, 8u}) {
        clean_options options;
        options.workers = workers;
        pipeline_report report;
        CHECK(run_clean(lines, &report, options) == base);
        CHECK(counters_equal(report, base_report));
    }
    for (std::size_t batch_lines : {1ul, 7ul, 64ul}) {
        clean_options options;
        options.workers = 4;
        options.batch_lines = batch_lines;
        pipeline_report report;
        CHECK(run_clean(lines, &report, options) == base);
        CHECK(counters_equal(report, base_report));
    }
}

TEST_CASE("pipeline output equals the naive reference implementation") {
    const auto lines = naab::testing::mixed_script_lines(2000, 91);
    const naab::testing::reference_cleaner reference(rules());
    const auto expected = reference.clean_lines(lines);
    for (unsigned workers : {1u, 4u}) {
        clean_options options;
        options.workers = workers;
        CHECK(run_clean(lines, nullptr, options) == expected);
    }
}

TEST_CASE("reject channel records reason and original line in order") {
    const std::vector<std::string> lines{"hello there", "سلام دنیا", "سلام", "  "};
    vector_line_source source(lines);
    vector_line_sink sink;
    vector_line_sink rejects;
    clean_options options;
    options.reject = &rejects;
    clean_stream(source, sink, rules(), options);
    CHECK(sink.lines == std::vector<std::string>{"سلام دنیا"});
    CHECK(rejects.lines == std::vector<std::string>{
                               "empty\thello there",
                               "short\tسلام",
                               "empty\t  ",
                           });
}

namespace {

class failing_sink final : public line_sink {
public:
    explicit failing_sink(std::size_t capacity) : capacity_(capacity) {}

    void write(std::string_view line) override {
        if (written_ >= capacity_) throw io_error("sink full");
        ++written_;
        lines.emplace_back(line);
    }

    std::vector<std::string> lines;

private:
    std::size_t capacity_;
    std::size_t written_ = 0;
};

} // namespace

TEST_CASE("a sink failure aborts with a balanced partial report") {
    const auto lines = naab::testing::mixed_script_lines(400, 5);
    vector_line_source source(lines);
    failing_sink sink(10);
    pipeline_report partial;
    try {
        clean_stream(source, sink, rules());
        FAIL("expected sink_write_error");
    } catch (const sink_write_error& e) {
        partial = e.partial_report;
    }
    CHECK(partial.lines_out == 10);
    CHECK(partial.lines_out + partial.lines_dropped_empty + partial.lines_dropped_short ==
          partial.lines_in);
    CHECK(partial.lines_in < lines.size());
}

TEST_CASE("report merge sums counters and keeps the longest elapsed") {
    pipeline_report a;
    a.lines_in = 3;
    a.lines_out = 2;
    a.lines_dropped_empty = 1;
    a.bytes_in = 100;
    a.elapsed = std::chrono::nanoseconds(500);
    pipeline_report b;
    b.lines_in = 5;
    b.lines_out = 4;
    b.lines_dropped_short = 1;
    b.bytes_in = 50;
    b.elapsed = std::chrono::nanoseconds(200);

    pipeline_report ab = a;
    ab.merge(b);
    CHECK(ab.lines_in == 8);
    CHECK(ab.lines_out == 6);
    CHECK(ab.lines_dropped_empty == 1);
    CHECK(ab.lines_dropped_short == 1);
    CHECK(ab.bytes_in == 150);
    CHECK(ab.elapsed == std::chrono::nanoseconds(500));

    pipeline_report ba = b;
    ba.merge(a);
    CHECK(ab == ba);

    pipeline_report identity;
    pipeline_report a_copy = a;
    a_copy.merge(identity);
    CHECK(a_copy == a);
}

TEST_CASE("stage timings are recorded when requested") {
    const auto lines = naab::testing::mixed_script_lines(500, 77);
    vector_line_source source(lines);
    null_line_sink sink;
    stage_timings timings;
    clean_options options;
    options.workers = 2;
    options.timings = &timings;
    clean_stream(source, sink, rules(), options);
    CHECK(timings.filter_words_ns > 0);
    CHECK(timings.unify_chars_ns > 0);
    CHECK(timings.unify_spaces_ns > 0);
}
