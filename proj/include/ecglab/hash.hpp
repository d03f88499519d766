#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ecglab {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

/// Hash of a file's bytes as 16 lowercase hex digits.
std::string hash_file(const std::filesystem::path& path);

std::string to_hex(std::uint64_t v);

}  // namespace ecglab
