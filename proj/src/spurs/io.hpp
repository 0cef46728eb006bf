#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "spurs/grid.hpp"

namespace spurs {

// 64-bit FNV-1a, used for content hashes and file checksums.
class Fnv1a {
 public:
  void update(const void* data, std::size_t bytes);
  std::uint64_t value() const { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string fnv1a_hex(const void* data, std::size_t bytes);
std::string file_hash(const std::string& path);

// Little-endian float64 array, complex interleaved (re, im), row-major, with
// a JSON sidecar at path + ".json" holding dtype, shape, center_offset and
// any extra fields.
struct RawArray {
  enum class DType { f64, c128 };
  DType dtype = DType::c128;
  std::vector<std::size_t> shape;
  std::vector<std::size_t> center_offset;
  std::vector<double> real;  // used when dtype == f64
  std::vector<cplx> cplx_values;  // used when dtype == c128
  nlohmann::json extra = nlohmann::json::object();

  std::size_t element_count() const;
};

void write_raw(const std::string& path, const RawArray& arr);
RawArray read_raw(const std::string& path);

// Writes text exactly, replacing any existing file.
void write_text(const std::string& path, const std::string& text);

// 16-bit binary PGM of |values| (rows x cols), min-max scaled to 0..65535.
// Returns {min, max} of the magnitudes for the caller's sidecar.
std::pair<double, double> write_pgm16(const std::string& path, const std::vector<cplx>& values,
                                      std::size_t rows, std::size_t cols);

// Little-endian binary container writer; finish() appends the FNV-1a 64
// checksum of everything written before it.
class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path);
  void bytes(const void* data, std::size_t n);
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }
  void str(const std::string& s);
  void u64s(const std::vector<std::uint64_t>& v);
  void f64s(const std::vector<double>& v);
  void finish();

 private:
  std::string path_;
  std::ofstream out_;
  Fnv1a hash_;
};

// Reads a whole BinaryWriter file and verifies the trailing checksum
// (ChecksumError on mismatch) before any field is decoded.
class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path);
  void bytes(void* data, std::size_t n);
  std::uint64_t u64();
  double f64();
  std::string str();
  std::vector<std::uint64_t> u64s();
  std::vector<double> f64s();
  // Throws IoError if bytes remain before the checksum.
  void expect_end() const;

 private:
  std::string path_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

}  // namespace spurs
