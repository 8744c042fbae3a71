#include "synthetic.hpp"

#include <cmath>
#include <fstream>

#include "naab/errors.hpp"

namespace naab::testing {

namespace {

const std::vector<std::string>& farsi_words() {
    static const std::vector<std::string> words = {
        "سلام", "دنیا", "کتاب", "کتاب‌ها", "مدرسه", "ایران", "زبان", "فارسی",
        "نوشته", "خواندن", "بزرگ", "کوچک", "روز", "شب", "سال", "ماه",
        "می‌روم", "آب", "نان", "خانه", "شهر", "راه", "دست", "سر",
    };
    return words;
}

// Spellings that exercise the substitution table.
const std::vector<std::string>& arabic_variant_words() {
    static const std::vector<std::string> words = {
        "علي",   // Arabic yeh
        "مدرسة", // teh marbuta
        "كتاب",  // Arabic kaf
        "إیران", // alef with hamza
        "ۆردک",  // waw variant
        "رۀ",    // heh with yeh above
        "ڒاه",   // reh variant
        "قاضێ",  // yeh variant
    };
    return words;
}

const std::vector<std::string>& improper_words() {
    static const std::vector<std::string> words = {
        "hello", "world", "test123", "۱۲۳", "123", "سلامx", "a‌b", "!", ";", "(یک)",
    };
    return words;
}

const std::vector<std::string>& punct_words() {
    static const std::vector<std::string> words = {".", "?", "-", ",", "؟", "،", "؛"};
    return words;
}

template <typename Rng>
const std::string& pick(const std::vector<std::string>& pool, Rng& rng) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

} // namespace

std::vector<std::string> mixed_script_lines(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> token_count(0, 12);
    std::uniform_int_distribution<int> category(0, 99);
    std::uniform_int_distribution<int> sep_kind(0, 9);

    std::vector<std::string> lines;
    lines.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string line;
        const int tokens = token_count(rng);
        if (category(rng) < 3) line = "   \t  "; // whitespace-only line
        for (int t = 0; t < tokens; ++t) {
            if (t > 0 || category(rng) < 20) {
                switch (sep_kind(rng)) {
                case 0: line += "  "; break;
                case 1: line += "\t"; break;
                case 2: line += "   "; break;
                default: line += " "; break;
                }
            }
            const int c = category(rng);
            if (c < 55) line += pick(farsi_words(), rng);
            else if (c < 70) line += pick(arabic_variant_words(), rng);
            else if (c < 85) line += pick(improper_words(), rng);
            else if (c < 93) line += pick(punct_words(), rng);
            else if (c < 97) line += "‌"; // lone half-space token
            else line += "کتاب‌‌ها"; // half-space run inside a word
        }
        if (category(rng) < 10) line += "  ";
        lines.push_back(std::move(line));
    }
    return lines;
}

heavy_tailed_source::heavy_tailed_source(std::uint64_t total_lines, std::uint64_t seed,
                                         std::uint64_t giant_words)
    : total_lines_(total_lines), giant_words_(giant_words), rng_(seed) {
    if (total_lines_ == 0) throw validation_error("heavy_tailed_source needs at least one line");
    giant_index_ = total_lines_ / 2;
}

bool heavy_tailed_source::next(std::string& line) {
    if (emitted_ >= total_lines_) return false;

    std::uint64_t words;
    if (emitted_ == giant_index_) {
        words = giant_words_;
    } else if (std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < 0.005) {
        words = 0;
    } else {
        // Pareto tail, capped below the giant line's bin.
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        words = static_cast<std::uint64_t>(std::pow(1.0 - u, -1.0 / 1.2));
        if (words > 100000) words = 100000;
        if (words == 0) words = 1;
    }

    line.clear();
    const auto& pool = farsi_words();
    for (std::uint64_t w = 0; w < words; ++w) {
        if (w > 0) line.push_back(' ');
        line += pool[(emitted_ + w) % pool.size()];
    }

    expected_.add_line(line);
    if (words == 0) ++zero_word_lines_;
    ++emitted_;
    return true;
}

std::uint64_t write_synthetic_corpus(const std::filesystem::path& path,
                                     std::uint64_t target_bytes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    // A pool of pre-built lines keeps generation I/O-bound.
    std::uniform_int_distribution<int> words_per_line(3, 24);
    std::uniform_int_distribution<int> category(0, 99);
    std::vector<std::string> pool;
    pool.reserve(4096);
    for (int i = 0; i < 4096; ++i) {
        std::string line;
        const int words = words_per_line(rng);
        for (int w = 0; w < words; ++w) {
            if (w > 0) line += (category(rng) < 5 ? "  " : " ");
            const int c = category(rng);
            if (c < 78) line += pick(farsi_words(), rng);
            else if (c < 88) line += pick(arabic_variant_words(), rng);
            else if (c < 95) line += pick(improper_words(), rng);
            else line += pick(punct_words(), rng);
        }
        pool.push_back(std::move(line));
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    std::uniform_int_distribution<std::size_t> pool_index(0, pool.size() - 1);
    std::uint64_t written = 0;
    std::string buffer;
    buffer.reserve(std::size_t{1} << 20);
    while (written < target_bytes) {
        buffer.clear();
        while (buffer.size() < (std::size_t{1} << 20) && written + buffer.size() < target_bytes) {
            buffer += pool[pool_index(rng)];
            buffer.push_back('\n');
        }
        out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        written += buffer.size();
    }
    if (!out) throw io_error("write failed: " + path.string());
    return written;
}

} // namespace naab::testing
