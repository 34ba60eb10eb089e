#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace eplan {

// SHA-256 digest of a canonical state serialization. Equal digests identify
// bisimilar states up to the collision probability of SHA-256.
struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;

    // Lower-case hex, optionally truncated to a prefix (used in filenames).
    std::string hex(std::size_t nbytes = 32) const;
};

struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept;
};

// Incremental builder over the underlying hash function.
class DigestBuilder {
public:
    DigestBuilder();
    ~DigestBuilder();
    DigestBuilder(const DigestBuilder&) = delete;
    DigestBuilder& operator=(const DigestBuilder&) = delete;

    void add_bytes(const void* data, std::size_t len);
    void add_u32(std::uint32_t v);
    void add_bits(const std::vector<bool>& bits);

    Digest finish();

private:
    void* ctx_;  // EVP_MD_CTX
};

}  // namespace eplan
