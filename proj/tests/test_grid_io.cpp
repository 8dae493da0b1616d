#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include <doctest.h>

#include "cseg/errors.hpp"
#include "cseg/grid.hpp"
#include "cseg/image_io.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace cseg;

namespace {

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  f << bytes;
}

std::string f32_le(float x) {
  std::uint32_t u;
  std::memcpy(&u, &x, 4);
  std::string s(4, '\0');
  for (int i = 0; i < 4; ++i) s[static_cast<std::size_t>(i)] = static_cast<char>((u >> (8 * i)) & 0xFF);
  return s;
}

std::string u32_le(std::uint32_t u) {
  std::string s(4, '\0');
  for (int i = 0; i < 4; ++i) s[static_cast<std::size_t>(i)] = static_cast<char>((u >> (8 * i)) & 0xFF);
  return s;
}

}  // namespace

TEST_CASE("grid dims encode/decode is a bijection") {
  const GridDims dims(7, 5);
  for (std::size_t i = 0; i < dims.size(); ++i) CHECK(dims.encode(dims.decode(i)) == i);
  for (std::int64_t r = 0; r < 7; ++r) {
    for (std::int64_t c = 0; c < 5; ++c) CHECK(dims.decode(dims.encode({r, c})) == Pixel{r, c});
  }
  CHECK_THROWS_AS(GridDims(0, 3), ShapeError);
  CHECK_THROWS_AS(GridDims(3, -1), ShapeError);
}

TEST_CASE("score images reject NaN and size mismatch") {
  CHECK_THROWS_AS(ScoreImage(GridDims(1, 2), {0.0, std::nan("")}), DataError);
  CHECK_THROWS_AS(ScoreImage(GridDims(2, 2), {0.0, 1.0, 2.0}), ShapeError);
  CHECK_NOTHROW(ScoreImage(GridDims(1, 2), {-std::numeric_limits<double>::infinity(), 1.0}));
}

TEST_CASE("count, complement and pixels_where") {
  const auto center = oracle::mask_from_rows({{0, 0, 0}, {0, 1, 0}, {0, 0, 0}});
  CHECK(count_ones(center) == 1);
  CHECK(count_ones(complement(center)) == 8);
  CHECK(complement(complement(center)) == center);
  CHECK(complement(LabelMask(GridDims(2, 3), true)) == LabelMask(GridDims(2, 3), false));

  const auto diag = oracle::mask_from_rows({{1, 0}, {0, 1}});
  const auto ones = pixels_where(diag, true);
  REQUIRE(ones.size() == 2);
  CHECK(ones[0] == Pixel{0, 0});
  CHECK(ones[1] == Pixel{1, 1});
  CHECK(pixels_where(diag, false) == std::vector<Pixel>{{0, 1}, {1, 0}});

  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto m = oracle::random_mask(rng, 1 + t % 9, 1 + t % 7, 0.4);
    CHECK(count_ones(m) + count_ones(complement(m)) == m.size());
  }
}

TEST_CASE("set algebra helpers") {
  const auto a = oracle::mask_from_rows({{1, 1, 0}});
  const auto b = oracle::mask_from_rows({{0, 1, 1}});
  CHECK(set_union(a, b) == oracle::mask_from_rows({{1, 1, 1}}));
  CHECK(set_intersection(a, b) == oracle::mask_from_rows({{0, 1, 0}}));
  CHECK(count_difference(a, b) == 1);
  CHECK(is_subset(set_intersection(a, b), a));
  CHECK_FALSE(is_subset(a, b));
  CHECK_THROWS_AS((void)set_union(a, LabelMask(GridDims(3, 1), false)), ShapeError);
}

TEST_CASE("PFM reading flips rows and widens floats") {
  TempDir dir;
  // Rows are stored bottom-to-top: file row 0 is image row 1.
  const auto path = dir.path() / "a.pfm";
  write_bytes(path, "Pf\n2 2\n-1.0\n" + f32_le(-1.0f) + f32_le(0.5f) + f32_le(0.0f) + f32_le(1.0f));
  const auto img = read_score_image(path);
  CHECK(img.dims() == GridDims(2, 2));
  CHECK(img[0] == 0.0);
  CHECK(img[1] == 1.0);
  CHECK(img[2] == -1.0);
  CHECK(img[3] == 0.5);

  write_score_image(img, dir.path() / "b.pfm");
  CHECK(read_score_image(dir.path() / "b.pfm") == img);
}

TEST_CASE("score readers reject malformed payloads") {
  TempDir dir;
  std::string payload;
  for (int i = 0; i < 15; ++i) payload += f32_le(static_cast<float>(i));
  write_bytes(dir.path() / "short.pfm", "Pf\n4 4\n-1.0\n" + payload);
  CHECK_THROWS_AS((void)read_score_image(dir.path() / "short.pfm"), FormatError);

  write_bytes(dir.path() / "short.cseg", "CSEG" + u32_le(4) + u32_le(4) + payload);
  CHECK_THROWS_AS((void)read_score_image(dir.path() / "short.cseg"), FormatError);

  write_bytes(dir.path() / "nan.cseg",
              "CSEG" + u32_le(1) + u32_le(2) + f32_le(1.0f) + f32_le(std::numeric_limits<float>::quiet_NaN()));
  CHECK_THROWS_AS((void)read_score_image(dir.path() / "nan.cseg"), DataError);

  write_bytes(dir.path() / "color.pfm", "PF\n1 1\n-1.0\n" + f32_le(0.0f) + f32_le(0.0f) + f32_le(0.0f));
  CHECK_THROWS_AS((void)read_score_image(dir.path() / "color.pfm"), FormatError);

  write_bytes(dir.path() / "junk.bin", "hello world");
  CHECK_THROWS_AS((void)read_score_image(dir.path() / "junk.bin"), FormatError);
  CHECK_THROWS_AS((void)read_score_image(dir.path() / "absent.cseg"), MissingInputError);
}

TEST_CASE("raw score format round-trips f32-representable values") {
  TempDir dir;
  std::mt19937_64 rng(11);
  std::normal_distribution<float> normal(0.0f, 10.0f);
  std::vector<double> values(6 * 9);
  for (auto& v : values) v = static_cast<double>(normal(rng));
  const ScoreImage img(GridDims(6, 9), values);
  write_score_image(img, dir.path() / "s.cseg");
  const auto back = read_score_image(dir.path() / "s.cseg");
  CHECK(back == img);

  write_score_image(img, dir.path() / "s.pfm");
  CHECK(read_score_image(dir.path() / "s.pfm") == img);

  const ScoreImage bad(GridDims(1, 1), std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(write_score_image(bad, dir.path() / "bad.cseg"), DataError);
}

TEST_CASE("PGM masks threshold at 128") {
  TempDir dir;
  std::string pgm = "P5\n4 1\n255\n";
  pgm += static_cast<char>(0);
  pgm += static_cast<char>(127);
  pgm += static_cast<char>(128);
  pgm += static_cast<char>(255);
  write_bytes(dir.path() / "t.pgm", pgm);
  CHECK(read_mask(dir.path() / "t.pgm") == oracle::mask_from_rows({{0, 0, 1, 1}}));

  std::string zeros = "P5\n3 3\n255\n" + std::string(9, '\0');
  write_bytes(dir.path() / "z.pgm", zeros);
  CHECK(read_mask(dir.path() / "z.pgm") == LabelMask(GridDims(3, 3), false));

  write_bytes(dir.path() / "rgb.ppm", "P6\n1 1\n255\n" + std::string(3, '\0'));
  CHECK_THROWS_AS((void)read_mask(dir.path() / "rgb.ppm"), FormatError);
}

TEST_CASE("mask files round-trip through PGM and PNG") {
  TempDir dir;
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto m = oracle::random_mask(rng, 16, 16, 0.5);
    write_mask(m, dir.path() / "m.pgm");
    CHECK(read_mask(dir.path() / "m.pgm") == m);
    write_mask(m, dir.path() / "m.png");
    CHECK(read_mask(dir.path() / "m.png") == m);
  }
}
