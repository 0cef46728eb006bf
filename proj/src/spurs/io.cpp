#include "spurs/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spurs/error.hpp"

namespace spurs {

static_assert(std::endian::native == std::endian::little,
              "raw file I/O assumes a little-endian host");

void Fnv1a::update(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h_ ^= p[i];
    h_ *= 0x100000001b3ULL;
  }
}

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

std::string fnv1a_hex(const void* data, std::size_t bytes) {
  Fnv1a h;
  h.update(data, bytes);
  return h.hex();
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Fnv1a h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::size_t RawArray::element_count() const {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

void write_raw(const std::string& path, const RawArray& arr) {
  const std::size_t n = arr.element_count();
  const bool is_c = arr.dtype == RawArray::DType::c128;
  if ((is_c ? arr.cplx_values.size() : arr.real.size()) != n)
    throw ValidationError("raw array payload does not match its shape");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const void* data = is_c ? static_cast<const void*>(arr.cplx_values.data())
                          : static_cast<const void*>(arr.real.data());
  out.write(static_cast<const char*>(data),
            static_cast<std::streamsize>(n * (is_c ? 16 : 8)));
  if (!out) throw IoError("failed writing " + path);

  nlohmann::ordered_json side;
  side["dtype"] = is_c ? "c128" : "f64";
  side["shape"] = arr.shape;
  side["center_offset"] = arr.center_offset;
  for (auto it = arr.extra.begin(); it != arr.extra.end(); ++it) side[it.key()] = it.value();
  write_text(path + ".json", side.dump(2) + "\n");
}

RawArray read_raw(const std::string& path) {
  RawArray arr;
  nlohmann::json side;
  {
    std::ifstream js(path + ".json");
    if (!js) throw IoError("missing sidecar " + path + ".json");
    try {
      js >> side;
      const std::string dt = side.at("dtype").get<std::string>();
      if (dt == "c128")
        arr.dtype = RawArray::DType::c128;
      else if (dt == "f64")
        arr.dtype = RawArray::DType::f64;
      else
        throw IoError(path + ": unknown dtype '" + dt + "'");
      arr.shape = side.at("shape").get<std::vector<std::size_t>>();
      if (side.contains("center_offset"))
        arr.center_offset = side.at("center_offset").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ".json: " + e.what());
    }
  }
  for (auto it = side.begin(); it != side.end(); ++it)
    if (it.key() != "dtype" && it.key() != "shape" && it.key() != "center_offset")
      arr.extra[it.key()] = it.value();

  const std::size_t n = arr.element_count();
  const std::size_t width = arr.dtype == RawArray::DType::c128 ? 16 : 8;
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != n * width)
    throw IoError(path + ": size " + std::to_string(bytes) + " bytes does not match shape");
  in.seekg(0);
  char* dst;
  if (arr.dtype == RawArray::DType::c128) {
    arr.cplx_values.resize(n);
    dst = reinterpret_cast<char*>(arr.cplx_values.data());
  } else {
    arr.real.resize(n);
    dst = reinterpret_cast<char*>(arr.real.data());
  }
  in.read(dst, static_cast<std::streamsize>(bytes));
  if (!in) throw IoError("failed reading " + path);
  return arr;
}

std::pair<double, double> write_pgm16(const std::string& path, const std::vector<cplx>& values,
                                      std::size_t rows, std::size_t cols) {
  if (values.size() != rows * cols) throw ValidationError("PGM dimensions do not match data");
  double lo = INFINITY, hi = -INFINITY;
  std::vector<double> mag(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    mag[i] = std::abs(values[i]);
    lo = std::min(lo, mag[i]);
    hi = std::max(hi, mag[i]);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  // PGM rows run top to bottom; image row index is dimension 1 (y), flipped
  // so +y points up.
  out << "P5\n" << rows << ' ' << cols << "\n65535\n";
  std::vector<unsigned char> line(2 * rows);
  for (std::size_t y = cols; y-- > 0;) {
    for (std::size_t x = 0; x < rows; ++x) {
      const double v = (mag[x * cols + y] - lo) / span;
      const auto q = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
      line[2 * x] = static_cast<unsigned char>(q >> 8);
      line[2 * x + 1] = static_cast<unsigned char>(q & 0xff);
    }
    out.write(reinterpret_cast<const char*>(line.data()), static_cast<std::streamsize>(line.size()));
  }
  if (!out) throw IoError("failed writing " + path);
  return {lo, hi};
}

BinaryWriter::BinaryWriter(const std::string& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open " + path + " for writing");
}

void BinaryWriter::bytes(const void* data, std::size_t n) {
  hash_.update(data, n);
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void BinaryWriter::str(const std::string& s) {
  u64(s.size());
  bytes(s.data(), s.size());
}

void BinaryWriter::u64s(const std::vector<std::uint64_t>& v) {
  u64(v.size());
  bytes(v.data(), v.size() * sizeof(std::uint64_t));
}

void BinaryWriter::f64s(const std::vector<double>& v) {
  u64(v.size());
  bytes(v.data(), v.size() * sizeof(double));
}

void BinaryWriter::finish() {
  const std::uint64_t sum = hash_.value();
  out_.write(reinterpret_cast<const char*>(&sum), sizeof sum);
  out_.flush();
  if (!out_) throw IoError("failed writing " + path_);
  out_.close();
}

BinaryReader::BinaryReader(const std::string& path) : path_(path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path);
  const auto size = static_cast<std::size_t>(in.tellg());
  if (size < sizeof(std::uint64_t)) throw ChecksumError(path + ": file too short");
  buf_.resize(size);
  in.seekg(0);
  in.read(buf_.data(), static_cast<std::streamsize>(size));
  if (!in) throw IoError("failed reading " + path);
  end_ = size - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, buf_.data() + end_, sizeof stored);
  Fnv1a h;
  h.update(buf_.data(), end_);
  if (h.value() != stored) throw ChecksumError(path + ": checksum mismatch (file corrupted)");
}

void BinaryReader::bytes(void* data, std::size_t n) {
  if (n > end_ - pos_) throw IoError(path_ + ": truncated field");
  std::memcpy(data, buf_.data() + pos_, n);
  pos_ += n;
}

std::uint64_t BinaryReader::u64() {
  std::uint64_t v;
  bytes(&v, sizeof v);
  return v;
}

double BinaryReader::f64() {
  double v;
  bytes(&v, sizeof v);
  return v;
}

std::string BinaryReader::str() {
  const auto n = u64();
  if (n > end_ - pos_) throw IoError(path_ + ": truncated string");
  std::string s(buf_.data() + pos_, n);
  pos_ += n;
  return s;
}

std::vector<std::uint64_t> BinaryReader::u64s() {
  const auto n = u64();
  if (n > (end_ - pos_) / sizeof(std::uint64_t)) throw IoError(path_ + ": truncated array");
  std::vector<std::uint64_t> v(n);
  bytes(v.data(), n * sizeof(std::uint64_t));
  return v;
}

std::vector<double> BinaryReader::f64s() {
  const auto n = u64();
  if (n > (end_ - pos_) / sizeof(double)) throw IoError(path_ + ": truncated array");
  std::vector<double> v(n);
  bytes(v.data(), n * sizeof(double));
  return v;
}

void BinaryReader::expect_end() const {
  if (pos_ != end_) throw IoError(path_ + ": unexpected trailing data");
}

}  // namespace spurs
