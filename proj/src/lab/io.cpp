#include "chiral/lab/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <memory>

#include "json.hpp"
#include <openssl/evp.h>

#ifndef CHIRAL_VERSION
#define CHIRAL_VERSION "0.0.0"
#endif

namespace chiral::lab {

namespace fs = std::filesystem;

namespace {

std::string to_hex(const unsigned char* d, unsigned n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(2 * n, '0');
  for (unsigned i = 0; i < n; ++i) {
    out[2 * i] = kDigits[d[i] >> 4];
    out[2 * i + 1] = kDigits[d[i] & 15];
  }
  return out;
}

struct Digest {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};
  Digest() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
      throw Error(ErrorCode::RuntimeFailure, "sha256 initialisation failed");
  }
  void update(const void* p, std::size_t n) { EVP_DigestUpdate(ctx.get(), p, n); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned n = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &n);
    return to_hex(md.data(), n);
  }
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::RuntimeFailure, "cannot write '" + path.string() + "'");
  return out;
}

void write_meta(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << " = " << v << "\n";
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Digest d;
  d.update(bytes.data(), bytes.size());
  return d.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::RuntimeFailure, "cannot read '" + path.string() + "'");
  Digest d;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return d.hex();
}

void Table::add_row(const std::vector<Real>& row) {
  std::vector<std::string> cells;
  cells.reserve(row.size());
  for (Real v : row) cells.push_back(format_real(v));
  add_text_row(std::move(cells));
}

void Table::add_text_row(std::vector<std::string> row) {
  if (row.size() != header.size())
    throw Error(ErrorCode::InvalidArgument, "row has " + std::to_string(row.size()) + " entries, header has " +
                                                std::to_string(header.size()));
  rows.push_back(std::move(row));
}

std::string format_real(Real v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), end);
}

void write_csv(const fs::path& path, const Metadata& meta, const Table& table) {
  auto out = open_out(path);
  write_meta(out, meta);
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void write_matrix(const fs::path& path, const Metadata& meta, const MatrixXc& m) {
  auto out = open_out(path);
  write_meta(out, meta);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c)
      out << (c ? "," : "") << format_real(m(r, c).real()) << "," << format_real(m(r, c).imag());
    out << "\n";
  }
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

void write_manifest(const fs::path& dir, RunManifest& manifest, const std::vector<std::string>& files) {
  manifest.outputs.clear();
  for (const auto& f : files) manifest.outputs.push_back({f, sha256_file(dir / f)});
  nlohmann::ordered_json j;
  j["mode"] = manifest.mode;
  j["config_hash"] = manifest.config_hash;
  j["version"] = manifest.version;
  j["seed"] = manifest.seed;
  j["wall_time_s"] = manifest.wall_time_s;
  j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& o : manifest.outputs) j["outputs"].push_back({{"file", o.file}, {"sha256", o.sha256}});
  j["notes"] = manifest.notes;
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

const char* code_version() { return CHIRAL_VERSION; }

}  // namespace chiral::lab
