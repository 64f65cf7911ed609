#include "hornet/bytes.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace hornet {

std::string to_hex(ByteSpan data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  Bytes out;
  int high = -1;
  for (char c : hex) {
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t') continue;
    const int v = nibble(c);
    if (v < 0) throw std::invalid_argument("non-hex character in input");
    if (high < 0) {
      high = v;
    } else {
      out.push_back(static_cast<std::uint8_t>((high << 4) | v));
      high = -1;
    }
  }
  if (high >= 0) throw std::invalid_argument("odd number of hex digits");
  return out;
}

std::string hex_dump(ByteSpan data) {
  std::string out;
  char line[16];
  for (std::size_t off = 0; off < data.size(); off += 16) {
    std::snprintf(line, sizeof(line), "%08zx ", off);
    out += line;
    const std::size_t end = std::min(data.size(), off + 16);
    for (std::size_t i = off; i < end; ++i) {
      std::snprintf(line, sizeof(line), " %02x", data[i]);
      out += line;
    }
    out += '\n';
  }
  return out;
}

bool contains_window(ByteSpan haystack, ByteSpan needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

}  // namespace hornet
