#include "naab/checksum.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace naab {

namespace {

std::string to_hex(const unsigned char* digest, std::size_t len) {
    static const char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (std::size_t i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

} // namespace

sha256_stream::sha256_stream() {
    ctx_ = EVP_MD_CTX_new();
    if (!ctx_) throw std::runtime_error("EVP_MD_CTX_new failed");
    reset();
}

sha256_stream::~sha256_stream() {
    EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_));
}

void sha256_stream::reset() {
    if (EVP_DigestInit_ex(static_cast<EVP_MD_CTX*>(ctx_), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("EVP_DigestInit_ex failed");
}

void sha256_stream::update(std::string_view bytes) {
    if (EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), bytes.data(), bytes.size()) != 1)
        throw std::runtime_error("EVP_DigestUpdate failed");
}

std::string sha256_stream::hex_digest() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), digest, &len) != 1)
        throw std::runtime_error("EVP_DigestFinal_ex failed");
    reset();
    return to_hex(digest, len);
}

std::string sha256_hex(std::string_view bytes) {
    sha256_stream h;
    h.update(bytes);
    return h.hex_digest();
}

} // namespace naab
