#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace naab {

// Streaming SHA-256 over shard contents; manifests store the hex digest.
class sha256_stream {
public:
    sha256_stream();
    ~sha256_stream();
    sha256_stream(const sha256_stream&) = delete;
    sha256_stream& operator=(const sha256_stream&) = delete;

    void update(std::string_view bytes);
    std::string hex_digest(); // finalizes; further update() calls restart

private:
    void* ctx_ = nullptr;
    void reset();
};

std::string sha256_hex(std::string_view bytes);

} // namespace naab
