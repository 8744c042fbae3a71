#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "naab/errors.hpp"

namespace naab {

// A paragraph stream: one UTF-8 line at a time, no terminators.
class line_source {
public:
    virtual ~line_source() = default;
    // Overwrites `line` with the next paragraph; false at end of stream.
    virtual bool next(std::string& line) = 0;
};

class line_sink {
public:
    virtual ~line_sink() = default;
    // Accepts one paragraph (terminator excluded); throws io_error on failure.
    virtual void write(std::string_view line) = 0;
};

class vector_line_source final : public line_source {
public:
    explicit vector_line_source(std::span<const std::string> lines) : lines_(lines) {}

    bool next(std::string& line) override {
        if (pos_ >= lines_.size()) return false;
        line = lines_[pos_++];
        return true;
    }

private:
    std::span<const std::string> lines_;
    std::size_t pos_ = 0;
};

class vector_line_sink final : public line_sink {
public:
    void write(std::string_view line) override { lines.emplace_back(line); }

    std::vector<std::string> lines;
};

// Appends LF after every line and propagates stream failure as io_error.
// Writes are staged through an internal buffer; call flush() once the
// stream is drained (the destructor flushes best-effort).
class ostream_line_sink final : public line_sink {
public:
    explicit ostream_line_sink(std::ostream& out, std::string name = "<output>")
        : out_(&out), name_(std::move(name)) {
        buffer_.reserve(buffer_limit);
    }

    ~ostream_line_sink() override {
        try {
            flush();
        } catch (...) {
        }
    }

    void write(std::string_view line) override {
        buffer_.append(line);
        buffer_.push_back('\n');
        if (buffer_.size() >= buffer_limit) flush();
    }

    void flush() {
        if (!buffer_.empty()) {
            out_->write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
            buffer_.clear();
        }
        if (!*out_) throw io_error("write failed: " + name_);
    }

private:
    static constexpr std::size_t buffer_limit = std::size_t{256} << 10;

    std::ostream* out_;
    std::string name_;
    std::string buffer_;
};

class null_line_sink final : public line_sink {
public:
    void write(std::string_view) override {}
};

} // namespace naab
