#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace latentpara {

std::uint64_t fnv1a64(std::string_view bytes);

/// Lowercase hex SHA-256 digest of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Short stable fingerprint of a real vector (bit patterns, little-endian).
std::string latent_fingerprint(std::span<const double> values);

}  // namespace latentpara
