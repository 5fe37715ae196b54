#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace dtfl {

// SHA-256 of the payload, lowercase hex.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(const std::string& text);

}  // namespace dtfl
