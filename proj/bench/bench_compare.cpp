// Compares the batched (optionally OpenMP-parallel) cleaner against the
// straightforward serial reference on an in-memory synthetic corpus, and
// checks they produce identical output while timing both.
//
//   bench_compare [lines] [workers...]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "naab/charsets.hpp"
#include "naab/pipeline.hpp"
#include "naab/stream.hpp"
#include "support/reference_cleaner.hpp"
#include "support/synthetic.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t total_bytes(const std::vector<std::string>& lines) {
    std::uint64_t sum = 0;
    for (const auto& line : lines) sum += line.size() + 1;
    return sum;
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t line_count = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
    std::vector<unsigned> worker_counts;
    for (int i = 2; i < argc; ++i)
        worker_counts.push_back(static_cast<unsigned>(std::strtoul(argv[i], nullptr, 10)));
    if (worker_counts.empty()) worker_counts = {1, 2, 4};

    const naab::ruleset rules = naab::ruleset::defaults();
    const std::vector<std::string> lines = naab::testing::mixed_script_lines(line_count, 2024);
    const double megabytes = static_cast<double>(total_bytes(lines)) / 1e6;
    std::printf("corpus: %zu lines, %.1f MB\n", lines.size(), megabytes);

    const naab::testing::reference_cleaner reference(rules);
    auto start = std::chrono::steady_clock::now();
    const std::vector<std::string> expected = reference.clean_lines(lines);
    const double ref_seconds = seconds_since(start);
    std::printf("%-22s %8.3f s  %7.1f MB/s\n", "serial reference", ref_seconds,
                megabytes / ref_seconds);

    for (unsigned workers : worker_counts) {
        naab::vector_line_source source(lines);
        naab::vector_line_sink sink;
        naab::clean_options options;
        options.workers = workers;
        start = std::chrono::steady_clock::now();
        naab::clean_stream(source, sink, rules, options);
        const double seconds = seconds_since(start);
        const bool matches = sink.lines == expected;
        std::printf("%-13s workers=%u %8.3f s  %7.1f MB/s  x%.2f  %s\n", "pipeline",
                    workers, seconds, megabytes / seconds, ref_seconds / seconds,
                    matches ? "output: identical" : "output: MISMATCH");
        if (!matches) return 1;
    }
    return 0;
}
