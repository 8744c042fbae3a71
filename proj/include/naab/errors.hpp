#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace naab {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration or rule file: rejected before any data is touched.
class validation_error : public error {
public:
    using error::error;
};

// Filesystem or stream failure.
class io_error : public error {
public:
    using error::error;
};

// The input bytes themselves are unsound (invalid UTF-8).
class data_error : public error {
public:
    data_error(const std::string& what, std::uint64_t byte_offset)
        : error(what), byte_offset_(byte_offset) {}

    std::uint64_t byte_offset() const { return byte_offset_; }

private:
    std::uint64_t byte_offset_ = 0;
};

} // namespace naab
