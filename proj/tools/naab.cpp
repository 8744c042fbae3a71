// naab — streaming cleaning, statistics, splitting and sharding for Farsi
// text corpora. One paragraph per line, UTF-8, LF.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "naab/charsets.hpp"
#include "naab/corpus_io.hpp"
#include "naab/pipeline.hpp"
#include "naab/stats.hpp"
#include "naab/stream.hpp"
#include "naab/version.hpp"

namespace {

using namespace naab;

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_io = 2;
constexpr int exit_data = 3;

struct config {
    std::string input = "-";
    std::vector<std::string> inputs; // stats accepts several
    std::string output = "-";
    std::string rules_path;
    std::optional<std::uint64_t> min_tokens;
    unsigned workers = 1;
    bool ordered = true;
    std::string report_path;
    std::string reject_path;
    bool lossy = false;
    bool progress = false;
    std::uint64_t seed = 0;
    double test_fraction = 0.0;
    std::uint64_t max_shard_bytes = std::uint64_t{500} * 1000 * 1000;
    std::string out_dir;
    std::string label = "none";
    std::string manifest_path;
    std::string histogram_tsv_path;
    std::uint32_t histogram_base = 2;
    double floor_mbps = 17.0;
};

ruleset resolve_ruleset(const config& cfg) {
    ruleset rules = cfg.rules_path.empty() ? ruleset::defaults() : ruleset::load(cfg.rules_path);
    if (cfg.min_tokens) {
        rules = ruleset(rules.allowed_ranges(), rules.substitutions(), *cfg.min_tokens);
    }
    return rules;
}

struct input_stream {
    std::ifstream file;
    std::istream* stream = nullptr;
    std::string name;
};

input_stream open_input(const std::string& path) {
    input_stream in;
    if (path == "-") {
        in.stream = &std::cin;
        in.name = "<stdin>";
        return in;
    }
    in.file.open(path, std::ios::binary);
    if (!in.file) throw io_error("cannot open input: " + path);
    in.stream = &in.file;
    in.name = path;
    return in;
}

struct output_stream {
    std::ofstream file;
    std::ostream* stream = nullptr;
    std::string name;
};

output_stream open_output(const std::string& path) {
    output_stream out;
    if (path == "-") {
        out.stream = &std::cout;
        out.name = "<stdout>";
        return out;
    }
    out.file.open(path, std::ios::binary | std::ios::trunc);
    if (!out.file) throw io_error("cannot open output: " + path);
    out.stream = &out.file;
    out.name = path;
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw io_error("cannot write: " + path);
}

// Line-count ticker on stderr, once per 2^20 lines.
class progress_source final : public line_source {
public:
    explicit progress_source(line_source& inner) : inner_(&inner) {}

    bool next(std::string& line) override {
        if (!inner_->next(line)) return false;
        if ((++count_ & ((1u << 20) - 1)) == 0)
            std::cerr << "naab: " << count_ << " lines read\n";
        return true;
    }

private:
    line_source* inner_;
    std::uint64_t count_ = 0;
};

int run_clean(const config& cfg) {
    const ruleset rules = resolve_ruleset(cfg);
    auto in = open_input(cfg.input);
    auto out = open_output(cfg.output);

    reader_options ropts;
    ropts.lossy = cfg.lossy;
    chunked_line_reader reader(*in.stream, ropts, in.name);
    ostream_line_sink sink(*out.stream, out.name);

    std::optional<std::ofstream> reject_file;
    std::optional<ostream_line_sink> reject_sink;
    if (!cfg.reject_path.empty()) {
        reject_file.emplace(cfg.reject_path, std::ios::binary | std::ios::trunc);
        if (!*reject_file) throw io_error("cannot open reject file: " + cfg.reject_path);
        reject_sink.emplace(*reject_file, cfg.reject_path);
    }

    clean_options options;
    options.workers = cfg.workers;
    options.ordered = cfg.ordered;
    options.reject = reject_sink ? &*reject_sink : nullptr;

    pipeline_report report;
    if (cfg.progress) {
        progress_source ticker(reader);
        report = clean_stream(ticker, sink, rules, options);
    } else {
        report = clean_stream(reader, sink, rules, options);
    }
    sink.flush();
    if (reject_sink) reject_sink->flush();
    out.stream->flush();
    if (!*out.stream) throw io_error("write failed: " + out.name);

    std::cerr << clean_report_text(report);
    if (!cfg.report_path.empty()) {
        write_file(cfg.report_path,
                   clean_report_json(report, rules.fingerprint(), cfg.workers, in.name));
    }
    return exit_ok;
}

int run_stats(const config& cfg) {
    std::vector<std::string> inputs = cfg.inputs;
    if (inputs.empty()) inputs.push_back(cfg.input);

    std::vector<std::pair<std::string, corpus_stats>> sources;
    scan_result total(cfg.histogram_base);
    for (const auto& path : inputs) {
        auto in = open_input(path);
        reader_options ropts;
        ropts.lossy = cfg.lossy;
        chunked_line_reader reader(*in.stream, ropts, in.name);
        scan_result result = scan(reader, cfg.histogram_base);
        sources.emplace_back(in.name, result.stats);
        total.merge(result);
    }

    report_meta meta;
    meta.tool_version = std::string(tool_version);
    meta.input = sources.size() == 1 ? sources.front().first : "";

    auto out = open_output(cfg.output);
    *out.stream << render_report(total.stats, total.hist, report_format::human, meta);
    if (sources.size() > 1) {
        const source_breakdown shares = breakdown(sources);
        *out.stream << "per-source breakdown:\n";
        for (const auto& entry : shares.entries) {
            *out.stream << "  " << entry.name << ": bytes " << entry.stats.bytes << " ("
                        << entry.byte_share * 100 << "%), paragraphs " << entry.stats.paragraphs
                        << " (" << entry.paragraph_share * 100 << "%)\n";
        }
    }
    out.stream->flush();
    if (!*out.stream) throw io_error("write failed: " + out.name);

    if (!cfg.report_path.empty()) {
        std::string doc = render_report(total.stats, total.hist, report_format::json, meta);
        if (sources.size() > 1) {
            // fold per-source rows into the same document
            nlohmann::json parsed = nlohmann::json::parse(doc);
            nlohmann::json list = nlohmann::json::array();
            const source_breakdown shares = breakdown(sources);
            for (const auto& entry : shares.entries) {
                nlohmann::json row;
                row["name"] = entry.name;
                row["bytes"] = entry.stats.bytes;
                row["paragraphs"] = entry.stats.paragraphs;
                row["words"] = entry.stats.words;
                row["byte_share"] = entry.byte_share;
                row["paragraph_share"] = entry.paragraph_share;
                list.push_back(std::move(row));
            }
            parsed["sources"] = std::move(list);
            doc = parsed.dump(2) + "\n";
        }
        write_file(cfg.report_path, doc);
    }
    if (!cfg.histogram_tsv_path.empty()) {
        write_file(cfg.histogram_tsv_path,
                   render_report(total.stats, total.hist, report_format::tsv, meta));
    }
    return exit_ok;
}

int run_split(const config& cfg) {
    auto in = open_input(cfg.input);
    std::filesystem::create_directories(cfg.out_dir);

    reader_options ropts;
    ropts.lossy = cfg.lossy;
    chunked_line_reader reader(*in.stream, ropts, in.name);
    shard_writer train(cfg.out_dir, "train", cfg.max_shard_bytes);
    shard_writer test(cfg.out_dir, "test", cfg.max_shard_bytes);

    const split_spec spec{cfg.test_fraction, cfg.seed};
    const split_counts counts = split_stream(reader, spec, train, test);

    for (shard_writer* writer : {&train, &test}) {
        shard_manifest manifest = writer->finish();
        manifest.split_seed = cfg.seed;
        manifest.test_fraction = cfg.test_fraction;
        write_manifest(manifest, cfg.out_dir);
    }
    std::cerr << "train lines: " << counts.train_lines << "\n"
              << "test lines:  " << counts.test_lines << "\n";
    return exit_ok;
}

int run_shard(const config& cfg) {
    auto in = open_input(cfg.input);
    std::filesystem::create_directories(cfg.out_dir);
    reader_options ropts;
    ropts.lossy = cfg.lossy;
    chunked_line_reader reader(*in.stream, ropts, in.name);
    const shard_manifest manifest =
        write_shards(reader, cfg.max_shard_bytes, cfg.out_dir, cfg.label);
    std::cerr << "wrote " << manifest.shards.size() << " shard(s), "
              << manifest.total_paragraphs() << " paragraphs\n";
    return exit_ok;
}

int run_verify(const config& cfg) {
    std::ifstream in(cfg.manifest_path, std::ios::binary);
    if (!in) throw io_error("cannot open manifest: " + cfg.manifest_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const shard_manifest manifest = shard_manifest::from_json(buf.str());

    std::filesystem::path dir = cfg.out_dir.empty()
                                    ? std::filesystem::path(cfg.manifest_path).parent_path()
                                    : std::filesystem::path(cfg.out_dir);
    if (dir.empty()) dir = ".";

    const verify_report report = verify_shards(manifest, dir);
    std::cout << report.to_text();
    if (manifest.incomplete) std::cout << "note: manifest is flagged incomplete\n";
    return report.ok ? exit_ok : exit_data;
}

int run_bench(const config& cfg) {
    const ruleset rules = resolve_ruleset(cfg);
    const bench_report report = bench(cfg.input, rules, cfg.workers, cfg.floor_mbps);
    std::cout << report.to_text();
    if (!cfg.report_path.empty()) write_file(cfg.report_path, report.to_json());
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);

    CLI::App app{"streaming cleaner, statistics, splitter and sharder for Farsi text corpora"};
    app.require_subcommand(1);
    config cfg;

    auto add_rules_options = [&cfg](CLI::App* cmd) {
        cmd->add_option("--rules", cfg.rules_path, "rule file overriding the built-in policy")
            ->envname("NAAB_RULES");
        cmd->add_option("--min-tokens", cfg.min_tokens,
                        "minimum words per surviving line (default 2)");
    };

    CLI::App* clean = app.add_subcommand("clean", "run the five-stage cleaner");
    clean->add_option("-i,--input", cfg.input, "input file, - for stdin");
    clean->add_option("-o,--output", cfg.output, "output file, - for stdout");
    add_rules_options(clean);
    clean->add_option("--workers", cfg.workers, "parallel cleaning workers")
        ->check(CLI::Range(1u, 256u));
    clean->add_flag("--ordered,!--no-ordered", cfg.ordered,
                    "preserve input order of surviving lines (default on)");
    clean->add_option("--report", cfg.report_path, "write a JSON run report here");
    clean->add_option("--reject", cfg.reject_path,
                      "write dropped lines here as reason<TAB>line");
    clean->add_flag("--lossy-utf8", cfg.lossy, "replace invalid UTF-8 instead of failing");
    clean->add_flag("--progress", cfg.progress, "line-count ticker on stderr");

    CLI::App* stats_cmd = app.add_subcommand("stats", "corpus statistics and histogram");
    stats_cmd->add_option("-i,--input", cfg.inputs, "input file(s), - for stdin");
    stats_cmd->add_option("-o,--output", cfg.output, "human-readable output, - for stdout");
    stats_cmd->add_option("--base", cfg.histogram_base, "histogram bin growth factor")
        ->check(CLI::Range(2u, 1000000u));
    stats_cmd->add_option("--report", cfg.report_path, "write a JSON report here");
    stats_cmd->add_option("--histogram-tsv", cfg.histogram_tsv_path,
                          "write lower_bound<TAB>count rows here");
    stats_cmd->add_flag("--lossy-utf8", cfg.lossy, "replace invalid UTF-8 instead of failing");

    CLI::App* split = app.add_subcommand("split", "deterministic train/test split");
    split->add_option("-i,--input", cfg.input, "input file, - for stdin");
    split->add_option("--out-dir", cfg.out_dir, "directory for shards and manifests")
        ->required();
    split->add_option("--test-fraction", cfg.test_fraction, "expected share of test lines")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    split->add_option("--seed", cfg.seed, "split seed");
    split->add_option("--max-shard-bytes", cfg.max_shard_bytes, "shard size limit")
        ->check(CLI::Range(std::uint64_t{1} << 20, std::uint64_t{1} << 40));
    split->add_flag("--lossy-utf8", cfg.lossy, "replace invalid UTF-8 instead of failing");

    CLI::App* shard = app.add_subcommand("shard", "size-bounded shards plus manifest");
    shard->add_option("-i,--input", cfg.input, "input file, - for stdin");
    shard->add_option("--out-dir", cfg.out_dir, "directory for shards and manifest")
        ->required();
    shard->add_option("--max-shard-bytes", cfg.max_shard_bytes, "shard size limit")
        ->check(CLI::Range(std::uint64_t{1} << 20, std::uint64_t{1} << 40));
    shard->add_option("--label", cfg.label, "manifest label: train, test or none")
        ->check(CLI::IsMember({"train", "test", "none"}));
    shard->add_flag("--lossy-utf8", cfg.lossy, "replace invalid UTF-8 instead of failing");

    CLI::App* verify = app.add_subcommand("verify", "check shards against a manifest");
    verify->add_option("--manifest", cfg.manifest_path, "manifest file")->required();
    verify->add_option("--dir", cfg.out_dir, "shard directory (default: beside the manifest)");

    CLI::App* bench_cmd = app.add_subcommand("bench", "end-to-end cleaning throughput");
    bench_cmd->add_option("-i,--input", cfg.input, "input file")->required();
    add_rules_options(bench_cmd);
    bench_cmd->add_option("--workers", cfg.workers, "parallel cleaning workers")
        ->check(CLI::Range(1u, 256u));
    bench_cmd->add_option("--floor-mbps", cfg.floor_mbps, "throughput floor to check against");
    bench_cmd->add_option("--report", cfg.report_path, "write a JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        if (app.got_subcommand(clean)) return run_clean(cfg);
        if (app.got_subcommand(stats_cmd)) return run_stats(cfg);
        if (app.got_subcommand(split)) return run_split(cfg);
        if (app.got_subcommand(shard)) return run_shard(cfg);
        if (app.got_subcommand(verify)) return run_verify(cfg);
        if (app.got_subcommand(bench_cmd)) return run_bench(cfg);
    } catch (const data_error& e) {
        std::cerr << "naab: " << e.what() << "\n";
        return exit_data;
    } catch (const validation_error& e) {
        std::cerr << "naab: " << e.what() << "\n";
        return exit_validation;
    } catch (const io_error& e) {
        std::cerr << "naab: " << e.what() << "\n";
        return exit_io;
    } catch (const error& e) {
        std::cerr << "naab: " << e.what() << "\n";
        return exit_validation;
    }
    return exit_validation;
}
