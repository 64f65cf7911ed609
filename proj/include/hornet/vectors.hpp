#pragma once

// Golden vectors: fixed-input outputs of the primitives and the encoded
// packet formats, committed as hex dumps so format changes are noticed.
//
// File format: '#' lines are comments, "@ name" starts a blob, and blob
// lines are "OFFSET  xx xx ..." as produced by hex_dump().

#include <filesystem>
#include <string>
#include <vector>

#include "hornet/bytes.hpp"

namespace hornet::vectors {

struct Blob {
  std::string name;
  Bytes bytes;
};

struct VectorFile {
  std::string filename;
  std::string title;
  std::vector<Blob> blobs;

  std::string render() const;
  // Throws std::invalid_argument on malformed text.
  static VectorFile parse(const std::string& filename, const std::string& text);
};

// Deterministic; every call returns identical bytes.
std::vector<VectorFile> generate();

void write_all(const std::filesystem::path& dir);

struct CheckResult {
  std::string file;
  std::string blob;
  bool ok = false;
  std::string detail;
};

// Compares committed files against freshly generated ones and checks that
// committed packets decode and re-encode to the same bytes.
std::vector<CheckResult> check_all(const std::filesystem::path& dir);

}  // namespace hornet::vectors
