#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <string>
#include <vector>

#include "naab/charsets.hpp"
#include "naab/pipeline.hpp"
#include "naab/stream.hpp"

namespace naab {

struct reader_options {
    std::size_t chunk_size = std::size_t{1} << 20;
    // Replace invalid UTF-8 with U+FFFD instead of failing.
    bool lossy = false;
};

// Streams lines out of a byte stream in fixed-size chunks. Multi-byte
// sequences split across chunk boundaries reassemble transparently; the
// yielded line sequence is identical for every chunk size. CRLF and lone CR
// both terminate a line, so no line ever contains U+000D. An unterminated
// final line is yielded. Invalid UTF-8 raises data_error naming the
// absolute byte offset unless lossy repair is requested. Memory use is
// bounded by chunk_size plus the longest line.
class chunked_line_reader final : public line_source {
public:
    chunked_line_reader(std::istream& in, reader_options options = {},
                        std::string name = "<input>");

    bool next(std::string& line) override;

    std::uint64_t lines_read() const { return lines_read_; }

private:
    bool refill();

    std::istream* in_;
    reader_options options_;
    std::string name_;
    std::string buf_;
    std::size_t pos_ = 0;            // scan position within buf_
    std::uint64_t buf_offset_ = 0;   // absolute offset of buf_[0]
    std::uint64_t lines_read_ = 0;
    bool eof_ = false;
    bool skip_lf_ = false; // previous chunk ended in CR; swallow a leading LF
};

// ---------------------------------------------------------------------------
// Deterministic train/test split.
//
// Line i goes to the test stream iff u(seed, i) < test_fraction, where
//
//   h(seed, i)  = mix64(seed + (i + 1) * 0x9E3779B97F4A7C15)
//   u(seed, i)  = (h(seed, i) >> 11) * 2^-53
//
// and mix64 is the splitmix64 finalizer:
//
//   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27;  z *= 0x94D049BB133111EB;
//   z ^= z >> 31;
//
// Every step is exact in 64-bit unsigned arithmetic and IEEE-754 doubles,
// so any implementation of this recipe reproduces the split bit for bit.

struct split_spec {
    double test_fraction = 0.0; // in [0, 1]
    std::uint64_t seed = 0;
};

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t split_hash(std::uint64_t seed, std::uint64_t line_index) {
    return mix64(seed + (line_index + 1) * 0x9E3779B97F4A7C15ull);
}

inline bool assign_to_test(const split_spec& spec, std::uint64_t line_index) {
    if (spec.test_fraction <= 0.0) return false;
    if (spec.test_fraction >= 1.0) return true;
    const double u =
        static_cast<double>(split_hash(spec.seed, line_index) >> 11) * 0x1.0p-53;
    return u < spec.test_fraction;
}

struct split_counts {
    std::uint64_t train_lines = 0;
    std::uint64_t test_lines = 0;
};

split_counts split_stream(line_source& source, const split_spec& spec, line_sink& train,
                          line_sink& test);

// ---------------------------------------------------------------------------
// Sharded output with a manifest.

struct shard_entry {
    std::string file_name;
    std::uint64_t byte_size = 0;
    std::uint64_t paragraph_count = 0;
    std::string content_checksum; // SHA-256 hex of the shard file bytes

    friend bool operator==(const shard_entry&, const shard_entry&) = default;
};

struct shard_manifest {
    std::vector<shard_entry> shards;
    std::string split_label = "none"; // train | test | none
    std::string ruleset_fingerprint;
    std::uint64_t split_seed = 0;
    double test_fraction = 0.0;
    std::string tool_version;
    bool incomplete = false;

    std::uint64_t total_paragraphs() const;
    std::string to_json() const;
    static shard_manifest from_json(const std::string& text);

    // manifest.<label>.json
    std::string file_name() const;

    friend bool operator==(const shard_manifest&, const shard_manifest&) = default;
};

// Writes lines into `<label>-NNNNN.txt` under dir, starting a new shard when
// appending a line would push the current one past max_shard_bytes. A single
// line longer than the limit gets a shard of its own. finish() closes the
// last shard and returns the manifest.
class shard_writer final : public line_sink {
public:
    shard_writer(std::filesystem::path dir, std::string label, std::uint64_t max_shard_bytes);
    ~shard_writer();

    void write(std::string_view line) override;
    shard_manifest finish();

    // The manifest as it stands, flagged incomplete; for error reporting.
    shard_manifest partial() const;

private:
    void open_next();
    void close_current();

    std::filesystem::path dir_;
    std::string label_;
    std::uint64_t max_shard_bytes_;
    shard_manifest manifest_;
    struct impl;
    std::unique_ptr<impl> io_;
    std::uint64_t current_bytes_ = 0;
    std::uint64_t current_lines_ = 0;
    bool open_ = false;
};

// On I/O failure throws shard_io_error carrying the partial manifest
// (incomplete = true), after persisting it to dir best-effort.
class shard_io_error : public io_error {
public:
    shard_io_error(const std::string& what, shard_manifest partial)
        : io_error(what), partial_manifest(std::move(partial)) {}

    shard_manifest partial_manifest;
};

// Drains source through a shard_writer, writes the manifest file into dir,
// and returns the manifest.
shard_manifest write_shards(line_source& source, std::uint64_t max_shard_bytes,
                            const std::filesystem::path& dir, const std::string& label = "none",
                            const std::string& ruleset_fingerprint = "");

// Persists `manifest.<label>.json` into dir.
void write_manifest(const shard_manifest& manifest, const std::filesystem::path& dir);

struct shard_check {
    std::string file_name;
    bool ok = false;
    std::string detail; // first mismatch: missing file, size, count, checksum
};

struct verify_report {
    bool ok = false;
    std::vector<shard_check> checks;

    std::string to_text() const;
};

verify_report verify_shards(const shard_manifest& manifest, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Throughput benchmark: runs the cleaner end to end over a file, discarding
// output, and reports throughput, per-stage time and peak memory.

struct bench_report {
    std::string input;
    std::uint64_t input_bytes = 0; // file size, terminators included
    unsigned workers = 1;
    double elapsed_seconds = 0;
    double bytes_per_second = 0;
    double lines_per_second = 0;
    double throughput_mbps = 0; // MB = 10^6 bytes
    std::uint64_t peak_rss_bytes = 0;
    stage_timings stages;
    double floor_mbps = 0;
    bool meets_floor = false;
    pipeline_report pipeline;

    std::string to_json() const;
    std::string to_text() const;
};

bench_report bench(const std::filesystem::path& input, const ruleset& rules, unsigned workers,
                   double floor_mbps = 17.0);

std::uint64_t peak_rss_bytes();

// Machine-readable form of a cleaning run, for `clean --report`.
std::string clean_report_json(const pipeline_report& report,
                              const std::string& ruleset_fingerprint, unsigned workers,
                              const std::string& input);
std::string clean_report_text(const pipeline_report& report);

} // namespace naab
