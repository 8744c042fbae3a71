#include "naab/corpus_io.hpp"

#include <sys/resource.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "naab/checksum.hpp"
#include "naab/unicode.hpp"
#include "naab/version.hpp"

namespace naab {

// --- chunked_line_reader ---------------------------------------------------

chunked_line_reader::chunked_line_reader(std::istream& in, reader_options options,
                                         std::string name)
    : in_(&in), options_(std::move(options)), name_(std::move(name)) {
    if (options_.chunk_size == 0) throw validation_error("chunk_size must be positive");
}

bool chunked_line_reader::refill() {
    if (eof_) return false;
    if (pos_ > 0) {
        buf_.erase(0, pos_);
        buf_offset_ += pos_;
        pos_ = 0;
    }
    const std::size_t old_size = buf_.size();
    buf_.resize(old_size + options_.chunk_size);
    in_->read(buf_.data() + old_size, static_cast<std::streamsize>(options_.chunk_size));
    const std::size_t got = static_cast<std::size_t>(in_->gcount());
    buf_.resize(old_size + got);
    if (got < options_.chunk_size) {
        if (in_->bad()) throw io_error("read failed: " + name_);
        eof_ = true;
    }
    return got > 0;
}

bool chunked_line_reader::next(std::string& line) {
    // Swallow the LF of a CRLF pair that straddled a chunk boundary.
    if (skip_lf_) {
        while (pos_ >= buf_.size() && refill()) {}
        if (pos_ < buf_.size() && buf_[pos_] == '\n') ++pos_;
        skip_lf_ = false;
    }

    // refill() compacts the buffer, so track the scanned prefix of the
    // pending line rather than an absolute position.
    std::size_t scanned = 0;
    bool found_terminator = false;
    while (true) {
        const char* base = buf_.data() + pos_ + scanned;
        const std::size_t avail = buf_.size() - pos_ - scanned;
        const char* lf = static_cast<const char*>(std::memchr(base, '\n', avail));
        const std::size_t segment = lf ? static_cast<std::size_t>(lf - base) : avail;
        const char* cr = static_cast<const char*>(std::memchr(base, '\r', segment));
        if (cr) {
            scanned += static_cast<std::size_t>(cr - base);
            found_terminator = true;
            break;
        }
        scanned += segment;
        if (lf) {
            found_terminator = true;
            break;
        }
        if (!refill()) break;
    }

    if (!found_terminator && scanned == 0 && pos_ >= buf_.size()) return false; // end of stream

    const std::uint64_t line_offset = buf_offset_ + pos_;
    const std::string_view content(buf_.data() + pos_, scanned);

    if (const auto bad = first_invalid_byte(content)) {
        if (!options_.lossy) {
            throw data_error("invalid UTF-8 at byte offset " +
                                 std::to_string(line_offset + *bad) + " in " + name_,
                             line_offset + *bad);
        }
        line = replace_invalid_utf8(content);
    } else {
        line.assign(content);
    }

    const std::size_t term = pos_ + scanned;
    if (found_terminator) {
        if (buf_[term] == '\r') {
            if (term + 1 < buf_.size()) {
                pos_ = term + 1 + (buf_[term + 1] == '\n' ? 1 : 0);
            } else {
                pos_ = term + 1;
                skip_lf_ = !eof_; // CR at buffer end: an LF may follow next chunk
            }
        } else {
            pos_ = term + 1;
        }
    } else {
        pos_ = buf_.size(); // unterminated final line
    }
    ++lines_read_;
    return true;
}

// --- split -----------------------------------------------------------------

split_counts split_stream(line_source& source, const split_spec& spec, line_sink& train,
                          line_sink& test) {
    if (spec.test_fraction < 0.0 || spec.test_fraction > 1.0)
        throw validation_error("test_fraction must be within [0, 1]");
    split_counts counts;
    std::string line;
    std::uint64_t index = 0;
    while (source.next(line)) {
        if (assign_to_test(spec, index)) {
            test.write(line);
            ++counts.test_lines;
        } else {
            train.write(line);
            ++counts.train_lines;
        }
        ++index;
    }
    return counts;
}

// --- shard manifest ----------------------------------------------------------

std::uint64_t shard_manifest::total_paragraphs() const {
    std::uint64_t sum = 0;
    for (const auto& s : shards) sum += s.paragraph_count;
    return sum;
}

std::string shard_manifest::file_name() const { return "manifest." + split_label + ".json"; }

std::string shard_manifest::to_json() const {
    nlohmann::json doc;
    doc["split_label"] = split_label;
    doc["ruleset_fingerprint"] = ruleset_fingerprint;
    doc["split_seed"] = split_seed;
    doc["test_fraction"] = test_fraction;
    doc["tool_version"] = tool_version;
    doc["incomplete"] = incomplete;
    doc["total_paragraphs"] = total_paragraphs();
    nlohmann::json shard_list = nlohmann::json::array();
    for (const auto& s : shards) {
        nlohmann::json entry;
        entry["file_name"] = s.file_name;
        entry["byte_size"] = s.byte_size;
        entry["paragraph_count"] = s.paragraph_count;
        entry["content_checksum"] = s.content_checksum;
        shard_list.push_back(std::move(entry));
    }
    doc["shards"] = std::move(shard_list);
    return doc.dump(2) + "\n";
}

shard_manifest shard_manifest::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("manifest is not valid JSON: ") + e.what(), 0);
    }
    shard_manifest m;
    try {
        m.split_label = doc.at("split_label").get<std::string>();
        m.ruleset_fingerprint = doc.value("ruleset_fingerprint", std::string());
        m.split_seed = doc.value("split_seed", std::uint64_t{0});
        m.test_fraction = doc.value("test_fraction", 0.0);
        m.tool_version = doc.value("tool_version", std::string());
        m.incomplete = doc.value("incomplete", false);
        for (const auto& entry : doc.at("shards")) {
            shard_entry s;
            s.file_name = entry.at("file_name").get<std::string>();
            s.byte_size = entry.at("byte_size").get<std::uint64_t>();
            s.paragraph_count = entry.at("paragraph_count").get<std::uint64_t>();
            s.content_checksum = entry.at("content_checksum").get<std::string>();
            m.shards.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("manifest is missing fields: ") + e.what(), 0);
    }
    return m;
}

// --- shard_writer ------------------------------------------------------------

struct shard_writer::impl {
    std::ofstream out;
    sha256_stream hasher;
};

namespace {

std::string shard_file_name(const std::string& label, std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%05zu", index);
    return label + "-" + buf + ".txt";
}

} // namespace

shard_writer::shard_writer(std::filesystem::path dir, std::string label,
                           std::uint64_t max_shard_bytes)
    : dir_(std::move(dir)), label_(std::move(label)), max_shard_bytes_(max_shard_bytes),
      io_(std::make_unique<impl>()) {
    if (max_shard_bytes_ == 0) throw validation_error("max_shard_bytes must be positive");
    if (label_ != "train" && label_ != "test" && label_ != "none")
        throw validation_error("shard label must be train, test or none");
    manifest_.split_label = label_;
    manifest_.tool_version = std::string(tool_version);
}

shard_writer::~shard_writer() = default;

void shard_writer::open_next() {
    const std::string name = shard_file_name(label_, manifest_.shards.size());
    io_->out.open(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!io_->out) {
        manifest_.incomplete = true;
        throw shard_io_error("cannot open shard file: " + (dir_ / name).string(), partial());
    }
    manifest_.shards.push_back({name, 0, 0, ""});
    current_bytes_ = 0;
    current_lines_ = 0;
    open_ = true;
}

void shard_writer::close_current() {
    if (!open_) return;
    io_->out.flush();
    const bool good = static_cast<bool>(io_->out);
    io_->out.close();
    auto& entry = manifest_.shards.back();
    entry.byte_size = current_bytes_;
    entry.paragraph_count = current_lines_;
    entry.content_checksum = io_->hasher.hex_digest();
    open_ = false;
    if (!good) {
        manifest_.incomplete = true;
        throw shard_io_error("write failed on shard file: " + (dir_ / entry.file_name).string(),
                             partial());
    }
}

void shard_writer::write(std::string_view line) {
    const std::uint64_t need = line.size() + 1;
    if (open_ && current_bytes_ > 0 && current_bytes_ + need > max_shard_bytes_) {
        close_current();
    }
    if (!open_) open_next();
    io_->out.write(line.data(), static_cast<std::streamsize>(line.size()));
    io_->out.put('\n');
    if (!io_->out) {
        manifest_.incomplete = true;
        throw shard_io_error(
            "write failed on shard file: " + (dir_ / manifest_.shards.back().file_name).string(),
            partial());
    }
    io_->hasher.update(line);
    io_->hasher.update("\n");
    current_bytes_ += need;
    current_lines_ += 1;
}

shard_manifest shard_writer::finish() {
    close_current();
    return manifest_;
}

shard_manifest shard_writer::partial() const {
    shard_manifest m = manifest_;
    m.incomplete = true;
    if (open_ && !m.shards.empty()) {
        m.shards.back().byte_size = current_bytes_;
        m.shards.back().paragraph_count = current_lines_;
    }
    return m;
}

void write_manifest(const shard_manifest& manifest, const std::filesystem::path& dir) {
    std::ofstream out(dir / manifest.file_name(), std::ios::binary | std::ios::trunc);
    const std::string text = manifest.to_json();
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw io_error("cannot write manifest: " + (dir / manifest.file_name()).string());
}

shard_manifest write_shards(line_source& source, std::uint64_t max_shard_bytes,
                            const std::filesystem::path& dir, const std::string& label,
                            const std::string& ruleset_fingerprint) {
    shard_writer writer(dir, label, max_shard_bytes);
    std::string line;
    try {
        while (source.next(line)) writer.write(line);
        shard_manifest manifest = writer.finish();
        manifest.ruleset_fingerprint = ruleset_fingerprint;
        write_manifest(manifest, dir);
        return manifest;
    } catch (shard_io_error& e) {
        e.partial_manifest.ruleset_fingerprint = ruleset_fingerprint;
        try {
            write_manifest(e.partial_manifest, dir);
        } catch (const io_error&) {
            // keep the original failure
        }
        throw;
    }
}

// --- verify ------------------------------------------------------------------

verify_report verify_shards(const shard_manifest& manifest, const std::filesystem::path& dir) {
    verify_report report;
    report.ok = true;
    for (const auto& expected : manifest.shards) {
        shard_check check;
        check.file_name = expected.file_name;
        std::ifstream in(dir / expected.file_name, std::ios::binary);
        if (!in) {
            check.detail = "missing shard file";
            report.ok = false;
            report.checks.push_back(std::move(check));
            continue;
        }
        sha256_stream hasher;
        std::uint64_t bytes = 0;
        std::uint64_t lines = 0;
        std::vector<char> buf(std::size_t{1} << 20);
        while (in) {
            in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
            const std::size_t got = static_cast<std::size_t>(in.gcount());
            if (got == 0) break;
            hasher.update(std::string_view(buf.data(), got));
            bytes += got;
            for (std::size_t i = 0; i < got; ++i) {
                if (buf[i] == '\n') ++lines;
            }
        }
        if (in.bad()) {
            check.detail = "read failed";
        } else if (bytes != expected.byte_size) {
            check.detail = "byte size mismatch: expected " + std::to_string(expected.byte_size) +
                           ", found " + std::to_string(bytes);
        } else if (lines != expected.paragraph_count) {
            check.detail = "paragraph count mismatch: expected " +
                           std::to_string(expected.paragraph_count) + ", found " +
                           std::to_string(lines);
        } else {
            const std::string digest = hasher.hex_digest();
            if (digest != expected.content_checksum) {
                check.detail = "checksum mismatch";
            } else {
                check.ok = true;
            }
        }
        if (!check.ok) report.ok = false;
        report.checks.push_back(std::move(check));
    }
    return report;
}

std::string verify_report::to_text() const {
    std::string out;
    for (const auto& check : checks) {
        out += check.ok ? "ok    " : "FAIL  ";
        out += check.file_name;
        if (!check.ok) {
            out += ": ";
            out += check.detail;
        }
        out.push_back('\n');
    }
    out += ok ? "verification passed\n" : "verification FAILED\n";
    return out;
}

// --- bench -------------------------------------------------------------------

std::uint64_t peak_rss_bytes() {
    struct rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024; // Linux reports KiB
}

bench_report bench(const std::filesystem::path& input, const ruleset& rules, unsigned workers,
                   double floor_mbps) {
    bench_report report;
    report.input = input.string();
    report.workers = std::max(1u, workers);
    report.floor_mbps = floor_mbps;

    std::error_code ec;
    const auto size = std::filesystem::file_size(input, ec);
    if (ec) throw io_error("cannot stat input: " + input.string());
    report.input_bytes = size;

    std::ifstream in(input, std::ios::binary);
    if (!in) throw io_error("cannot open input: " + input.string());

    chunked_line_reader reader(in, {}, input.string());
    null_line_sink sink;
    clean_options options;
    options.workers = report.workers;
    options.timings = &report.stages;

    report.pipeline = clean_stream(reader, sink, rules, options);

    const double seconds =
        std::chrono::duration<double>(report.pipeline.elapsed).count();
    report.elapsed_seconds = seconds;
    if (report.input_bytes > 0 && seconds > 0) {
        report.bytes_per_second = static_cast<double>(report.input_bytes) / seconds;
        report.lines_per_second = static_cast<double>(report.pipeline.lines_in) / seconds;
        report.throughput_mbps = report.bytes_per_second / 1e6;
    }
    report.peak_rss_bytes = peak_rss_bytes();
    report.meets_floor = report.input_bytes == 0 || report.throughput_mbps >= floor_mbps;
    return report;
}

namespace {

nlohmann::json pipeline_report_json(const pipeline_report& r) {
    nlohmann::json doc;
    doc["lines_in"] = r.lines_in;
    doc["lines_out"] = r.lines_out;
    doc["lines_dropped_empty"] = r.lines_dropped_empty;
    doc["lines_dropped_short"] = r.lines_dropped_short;
    doc["words_dropped_non_farsi"] = r.words_dropped_non_farsi;
    doc["substitutions_applied"] = r.substitutions_applied;
    doc["words_out"] = r.words_out;
    doc["bytes_in"] = r.bytes_in;
    doc["bytes_out"] = r.bytes_out;
    doc["elapsed_seconds"] = std::chrono::duration<double>(r.elapsed).count();
    return doc;
}

} // namespace

std::string clean_report_json(const pipeline_report& report,
                              const std::string& ruleset_fingerprint, unsigned workers,
                              const std::string& input) {
    nlohmann::json doc = pipeline_report_json(report);
    doc["ruleset_fingerprint"] = ruleset_fingerprint;
    doc["workers"] = workers;
    doc["input"] = input;
    doc["tool_version"] = std::string(tool_version);
    return doc.dump(2) + "\n";
}

std::string clean_report_text(const pipeline_report& report) {
    std::ostringstream out;
    out << "lines in:               " << report.lines_in << "\n";
    out << "lines out:              " << report.lines_out << "\n";
    out << "lines dropped (empty):  " << report.lines_dropped_empty << "\n";
    out << "lines dropped (short):  " << report.lines_dropped_short << "\n";
    out << "words dropped:          " << report.words_dropped_non_farsi << "\n";
    out << "substitutions applied:  " << report.substitutions_applied << "\n";
    out << "bytes in/out:           " << report.bytes_in << " / " << report.bytes_out << "\n";
    out << "elapsed:                " << std::chrono::duration<double>(report.elapsed).count()
        << " s\n";
    return out.str();
}

std::string bench_report::to_json() const {
    nlohmann::json doc;
    doc["input"] = input;
    doc["input_bytes"] = input_bytes;
    doc["workers"] = workers;
    doc["elapsed_seconds"] = elapsed_seconds;
    doc["bytes_per_second"] = bytes_per_second;
    doc["lines_per_second"] = lines_per_second;
    doc["throughput_mbps"] = throughput_mbps;
    doc["peak_rss_bytes"] = peak_rss_bytes;
    doc["floor_mbps"] = floor_mbps;
    doc["meets_floor"] = meets_floor;
    doc["stage_seconds"] = {
        {"read", stages.read_ns / 1e9},
        {"filter_words", stages.filter_words_ns / 1e9},
        {"unify_chars", stages.unify_chars_ns / 1e9},
        {"unify_spaces", stages.unify_spaces_ns / 1e9},
        {"length_gate", stages.length_gate_ns / 1e9},
        {"write", stages.write_ns / 1e9},
    };
    doc["pipeline"] = pipeline_report_json(pipeline);
    return doc.dump(2) + "\n";
}

std::string bench_report::to_text() const {
    std::ostringstream out;
    out << "input:            " << input << " (" << input_bytes << " bytes)\n";
    out << "workers:          " << workers << "\n";
    out << "elapsed:          " << elapsed_seconds << " s\n";
    out << "throughput:       " << throughput_mbps << " MB/s ("
        << static_cast<std::uint64_t>(lines_per_second) << " lines/s)\n";
    out << "peak rss:         " << peak_rss_bytes / (1024.0 * 1024.0) << " MiB\n";
    out << "floor:            " << floor_mbps << " MB/s -> "
        << (meets_floor ? "pass" : "FAIL") << "\n";
    const double total_ns =
        static_cast<double>(stages.read_ns + stages.filter_words_ns + stages.unify_chars_ns +
                            stages.unify_spaces_ns + stages.length_gate_ns + stages.write_ns);
    auto share = [&](std::uint64_t ns) {
        return total_ns > 0 ? 100.0 * static_cast<double>(ns) / total_ns : 0.0;
    };
    out << "stage time:       read " << share(stages.read_ns) << "%, filter_words "
        << share(stages.filter_words_ns) << "%, unify_chars " << share(stages.unify_chars_ns)
        << "%, unify_spaces " << share(stages.unify_spaces_ns) << "%, length_gate "
        << share(stages.length_gate_ns) << "%, write " << share(stages.write_ns) << "%\n";
    return out.str();
}

} // namespace naab
