#ifndef RSE_HASH_H_
#define RSE_HASH_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace rse {

// Lowercase hex SHA-256 digest.
std::string Sha256Hex(std::string_view data);
std::string Sha256File(const std::filesystem::path& path);

}  // namespace rse

#endif  // RSE_HASH_H_
