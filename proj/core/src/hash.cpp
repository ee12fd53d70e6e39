#include "fairaudit/hash.hpp"

#include <fstream>
#include <sstream>

#include "fairaudit/types.hpp"

namespace fairaudit {

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string hash_bytes(std::string_view bytes) {
  return "fnv1a64:" + hash_hex(fnv1a64(bytes));
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_failure, "cannot open for hashing: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return hash_bytes(buf.str());
}

}  // namespace fairaudit
