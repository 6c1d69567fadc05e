#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace k3pt {

/// Lowercase hex SHA-256 of a byte string.
inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("HashError", "SHA-256 digest failed");
  std::string out;
  out.reserve(2 * len);
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

/// Pipeline manifest embedded in every tool output: the producing command and
/// the content hash of each input, keyed by role. Paths are deliberately left
/// out so that outputs are byte-stable across working directories.
struct Manifest {
  std::string command;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> parameters;
};

} // namespace k3pt
