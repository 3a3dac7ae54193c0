#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "chiral/core.hpp"

namespace chiral::lab {

/// Hex SHA-256 of a byte string or a file.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Metadata written as "# key = value" lines at the top of every CSV.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Rows of formatted cells under a header; every row matches the header width.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add_row(const std::vector<Real>& row);
  void add_text_row(std::vector<std::string> row);
};

/// Shortest round-trip decimal form.
std::string format_real(Real v);

void write_csv(const std::filesystem::path& path, const Metadata& meta, const Table& table);
/// Complex matrix dump: one row per matrix row, "re,im" pairs separated by commas.
void write_matrix(const std::filesystem::path& path, const Metadata& meta, const MatrixXc& m);
void write_text(const std::filesystem::path& path, const std::string& text);

struct OutputRecord {
  std::string file;  // relative to the run directory
  std::string sha256;
};

struct RunManifest {
  std::string mode;
  std::string config_hash;
  std::string version;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  std::vector<OutputRecord> outputs;
  std::vector<std::string> notes;
};

/// Hashes every listed output file and writes manifest.json into `dir`.
void write_manifest(const std::filesystem::path& dir, RunManifest& manifest, const std::vector<std::string>& files);

/// Version string compiled into the binary.
const char* code_version();

}  // namespace chiral::lab
