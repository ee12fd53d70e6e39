#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fairaudit {

// FNV-1a 64-bit. Content fingerprints for run manifests and reproducibility
// checks, not a cryptographic hash.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h);

// "fnv1a64:<16 hex digits>" of the file contents. Throws Error(io_failure).
std::string hash_file(const std::string& path);
std::string hash_bytes(std::string_view bytes);

}  // namespace fairaudit
