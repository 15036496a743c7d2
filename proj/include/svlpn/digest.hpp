#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace svlpn {

// FNV-1a, 64 bit. Keys manifests and report provenance; not cryptographic.
inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setfill('0') << std::setw(16) << h;
  return os.str();
}

inline std::string digest_string(const std::string& data) { return hex64(fnv1a64(data)); }

inline std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("digest_file: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return digest_string(buf.str());
}

}  // namespace svlpn
