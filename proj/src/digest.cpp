#include "eplan/digest.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace eplan {

std::string Digest::hex(std::size_t nbytes) const {
    static const char* digits = "0123456789abcdef";
    if (nbytes > bytes.size()) nbytes = bytes.size();
    std::string out;
    out.reserve(2 * nbytes);
    for (std::size_t i = 0; i < nbytes; ++i) {
        out += digits[bytes[i] >> 4];
        out += digits[bytes[i] & 0xf];
    }
    return out;
}

std::size_t DigestHash::operator()(const Digest& d) const noexcept {
    std::size_t h;
    std::memcpy(&h, d.bytes.data(), sizeof(h));
    return h;
}

DigestBuilder::DigestBuilder() {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("failed to initialize SHA-256 context");
    ctx_ = ctx;
}

DigestBuilder::~DigestBuilder() {
    if (ctx_ != nullptr) EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_));
}

void DigestBuilder::add_bytes(const void* data, std::size_t len) {
    EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data, len);
}

void DigestBuilder::add_u32(std::uint32_t v) {
    std::uint8_t buf[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                           static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
    add_bytes(buf, sizeof(buf));
}

void DigestBuilder::add_bits(const std::vector<bool>& bits) {
    add_u32(static_cast<std::uint32_t>(bits.size()));
    std::uint8_t acc = 0;
    int n = 0;
    for (bool b : bits) {
        acc = static_cast<std::uint8_t>((acc << 1) | (b ? 1 : 0));
        if (++n == 8) {
            add_bytes(&acc, 1);
            acc = 0;
            n = 0;
        }
    }
    if (n > 0) add_bytes(&acc, 1);
}

Digest DigestBuilder::finish() {
    Digest d;
    unsigned int len = 0;
    EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), d.bytes.data(), &len);
    return d;
}

}  // namespace eplan
