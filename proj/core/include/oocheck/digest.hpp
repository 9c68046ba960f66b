#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace oocheck {

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

std::string sha256_hex_file(const std::filesystem::path& path);

}  // namespace oocheck
