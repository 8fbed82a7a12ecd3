#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace sncf {

/// 64-bit FNV-1a over a byte range.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

/// FNV-1a of a file's bytes as 16 lowercase hex digits.
std::string file_digest(const std::filesystem::path& path);

std::string to_hex(std::uint64_t v);

}  // namespace sncf
