#include <cstring>
#include <fstream>
#include <iterator>

#include "doctest.h"
#include "spurs/error.hpp"
#include "spurs/io.hpp"
#include "unit/support.hpp"

using namespace spurs;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("fnv1a reference vectors") {
  CHECK(fnv1a_hex("", 0) == "cbf29ce484222325");
  CHECK(fnv1a_hex("a", 1) == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar", 6) == "85944171f73967e8");
  const auto dir = test::scratch("fnv");
  write_text((dir / "f.txt").string(), "foobar");
  CHECK(file_hash((dir / "f.txt").string()) == "85944171f73967e8");
}

TEST_CASE("raw arrays round trip with their sidecar") {
  const auto dir = test::scratch("raw");
  RawArray a;
  a.dtype = RawArray::DType::c128;
  a.shape = {3, 2};
  a.center_offset = {1, 1};
  a.cplx_values = test::random_complex(6, 1);
  a.extra["note"] = "x";
  write_raw((dir / "a.raw").string(), a);
  CHECK(std::filesystem::file_size(dir / "a.raw") == 6 * 16);
  const auto b = read_raw((dir / "a.raw").string());
  CHECK(b.shape == a.shape);
  CHECK(b.center_offset == a.center_offset);
  CHECK(b.cplx_values == a.cplx_values);
  CHECK(b.extra["note"] == "x");

  RawArray r;
  r.dtype = RawArray::DType::f64;
  r.shape = {4};
  r.real = {1, 2, 3, 4.5};
  write_raw((dir / "r.raw").string(), r);
  CHECK(read_raw((dir / "r.raw").string()).real == r.real);
  // Little-endian float64 payload.
  const auto bytes = slurp(dir / "r.raw");
  double last;
  std::memcpy(&last, bytes.data() + 24, 8);
  CHECK(last == 4.5);

  std::filesystem::resize_file(dir / "r.raw", 20);
  CHECK_THROWS_AS(read_raw((dir / "r.raw").string()), IoError);
  CHECK_THROWS_AS(read_raw((dir / "none.raw").string()), IoError);
}

TEST_CASE("16-bit pgm") {
  const auto dir = test::scratch("pgm");
  // 2 x 3 image, dim 0 = x (columns of the picture), dim 1 = y (rows, flipped).
  std::vector<cplx> v = {0.0, 1.0, 2.0, cplx(0, -3.0), 4.0, 6.0};
  const auto [lo, hi] = write_pgm16((dir / "p.pgm").string(), v, 2, 3);
  CHECK(lo == 0.0);
  CHECK(hi == 6.0);
  const auto s = slurp(dir / "p.pgm");
  const std::string header = "P5\n2 3\n65535\n";
  REQUIRE(s.substr(0, header.size()) == header);
  auto px = [&](std::size_t i) {
    const auto* d = reinterpret_cast<const unsigned char*>(s.data() + header.size());
    return (d[2 * i] << 8) | d[2 * i + 1];
  };
  CHECK(s.size() == header.size() + 12);
  // Top row is y = 2: pixels (x=0, y=2) = 2 and (x=1, y=2) = 6.
  CHECK(px(0) == 21845);
  CHECK(px(1) == 65535);
  // Bottom row is y = 0.
  CHECK(px(4) == 0);
  CHECK(px(5) == 32768);
}

TEST_CASE("binary container checksum") {
  const auto dir = test::scratch("bin");
  const auto path = (dir / "c.bin").string();
  {
    BinaryWriter w(path);
    w.str("HELLO");
    w.u64(42);
    w.f64s({1.5, -2.0});
    w.u64s({7, 8, 9});
    w.finish();
  }
  {
    BinaryReader r(path);
    CHECK(r.str() == "HELLO");
    CHECK(r.u64() == 42);
    CHECK(r.f64s() == std::vector<double>{1.5, -2.0});
    CHECK(r.u64s() == std::vector<std::uint64_t>{7, 8, 9});
    r.expect_end();
  }
  {
    BinaryReader r(path);
    r.str();
    CHECK_THROWS_AS(r.expect_end(), IoError);
  }
  auto bytes = slurp(dir / "c.bin");
  bytes[10] ^= 0x01;
  write_text(path, bytes);
  CHECK_THROWS_AS(BinaryReader{path}, ChecksumError);
}
