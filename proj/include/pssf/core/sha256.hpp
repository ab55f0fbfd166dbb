#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace pssf {

// Incremental SHA-256 (FIPS 180-4). Used for image checksums and stage
// markers; lowercase hex output matches the manifest format.
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    std::array<std::uint8_t, 32> digest();

private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t bit_count_ = 0;
    std::uint8_t buffer_[64];
    std::size_t buffer_len_ = 0;
};

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(std::string_view s);

// Hashes a file's bytes; throws Error::runtime when the file cannot be read.
std::string sha256_file(const std::string& path);

}  // namespace pssf
