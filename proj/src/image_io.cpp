#include "cseg/image_io.hpp"

#include <png.h>

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <string>

#include "cseg/errors.hpp"

namespace cseg {

namespace {

using Bytes = std::vector<unsigned char>;

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path.string());
}

bool starts_with(const Bytes& bytes, std::string_view magic) {
  return bytes.size() >= magic.size() &&
         std::memcmp(bytes.data(), magic.data(), magic.size()) == 0;
}

std::uint32_t load_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32_le(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFU));
}

float load_f32(const unsigned char* p, bool little_endian) {
  std::uint32_t bits = 0;
  if (little_endian) {
    bits = load_u32_le(p);
  } else {
    bits = (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
  }
  return std::bit_cast<float>(bits);
}

// Header tokenizer shared by PFM and PGM: whitespace-separated tokens, '#'
// comments to end of line.
class HeaderReader {
 public:
  HeaderReader(const Bytes& bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) {
      out.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (out.empty()) throw FormatError("truncated header");
    return out;
  }

  std::int64_t positive_int() {
    const auto tok = token();
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      throw FormatError("bad header integer '" + tok + "'");
    }
    if (used != tok.size() || v <= 0) throw FormatError("bad header integer '" + tok + "'");
    return v;
  }

  // Exactly one whitespace byte separates the header from the payload.
  std::size_t payload_start() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("missing whitespace before payload");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const Bytes& bytes_;
  std::size_t pos_;
};

void check_payload_size(std::size_t available, std::size_t expected, const std::string& what) {
  if (available != expected) {
    throw FormatError(what + ": payload has " + std::to_string(available) + " bytes, expected " +
                      std::to_string(expected));
  }
}

double checked_value(float f) {
  if (std::isnan(f)) throw DataError("score payload contains NaN");
  if (std::isinf(f)) throw DataError("score payload contains a non-finite value");
  return static_cast<double>(f);
}

ScoreImage parse_pfm(const Bytes& bytes) {
  HeaderReader header(bytes, 2);
  const auto width = header.positive_int();
  const auto height = header.positive_int();
  const auto scale_tok = header.token();
  double scale = 0.0;
  try {
    scale = std::stod(scale_tok);
  } catch (const std::exception&) {
    throw FormatError("bad PFM scale '" + scale_tok + "'");
  }
  if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("bad PFM scale '" + scale_tok + "'");
  const bool little_endian = scale < 0.0;
  const auto start = header.payload_start();
  const GridDims dims(height, width);
  check_payload_size(bytes.size() - start, dims.size() * 4, "PFM");

  std::vector<double> values(dims.size());
  const auto w = static_cast<std::size_t>(width);
  for (std::int64_t file_row = 0; file_row < height; ++file_row) {
    const auto row = static_cast<std::size_t>(height - 1 - file_row);
    for (std::size_t c = 0; c < w; ++c) {
      const auto offset = start + 4 * (static_cast<std::size_t>(file_row) * w + c);
      values[row * w + c] = checked_value(load_f32(bytes.data() + offset, little_endian));
    }
  }
  return {dims, std::move(values)};
}

ScoreImage parse_raw(const Bytes& bytes) {
  if (bytes.size() < 12) throw FormatError("raw score header truncated");
  const auto height = load_u32_le(bytes.data() + 4);
  const auto width = load_u32_le(bytes.data() + 8);
  if (height == 0 || width == 0) throw FormatError("raw score header has a zero dimension");
  const GridDims dims(height, width);
  check_payload_size(bytes.size() - 12, dims.size() * 4, "raw score");
  std::vector<double> values(dims.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = checked_value(load_f32(bytes.data() + 12 + 4 * i, true));
  }
  return {dims, std::move(values)};
}

std::vector<float> narrow_checked(const ScoreImage& image) {
  std::vector<float> out(image.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(image[i])) throw DataError("cannot write non-finite score value");
    const auto f = static_cast<float>(image[i]);
    if (!std::isfinite(f)) throw DataError("score value overflows float");
    out[i] = f;
  }
  return out;
}

LabelMask parse_pgm(const Bytes& bytes) {
  HeaderReader header(bytes, 2);
  const auto width = header.positive_int();
  const auto height = header.positive_int();
  const auto maxval = header.positive_int();
  if (maxval > 255) throw FormatError("PGM maxval above 255 is not 8-bit");
  const auto start = header.payload_start();
  const GridDims dims(height, width);
  check_payload_size(bytes.size() - start, dims.size(), "PGM");
  std::vector<std::uint8_t> bits(dims.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = bytes[start + i] >= kMaskThreshold ? 1 : 0;
  return {dims, std::move(bits)};
}

LabelMask parse_png(const std::filesystem::path& path, const Bytes& bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()) == 0) {
    throw FormatError(path.string() + ": " + image.message);
  }
  const auto format = image.format;
  if ((format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA)) != 0) {
    png_image_free(&image);
    throw FormatError(path.string() + ": multi-channel PNG, expected 8-bit grayscale");
  }
  if ((format & PNG_FORMAT_FLAG_LINEAR) != 0) {
    png_image_free(&image);
    throw FormatError(path.string() + ": 16-bit PNG, expected 8-bit grayscale");
  }
  image.format = PNG_FORMAT_GRAY;
  const GridDims dims(image.height, image.width);
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr) == 0) {
    throw FormatError(path.string() + ": " + image.message);
  }
  for (auto& p : pixels) p = p >= kMaskThreshold ? 1 : 0;
  return {dims, std::move(pixels)};
}

std::string lower_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext;
}

}  // namespace

ScoreImage read_score_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (starts_with(bytes, "CSEG")) return parse_raw(bytes);
  if (starts_with(bytes, "Pf")) return parse_pfm(bytes);
  if (starts_with(bytes, "PF")) throw FormatError(path.string() + ": color PFM is not supported");
  throw FormatError(path.string() + ": unrecognized score file");
}

void write_score_image(const ScoreImage& image, const std::filesystem::path& path,
                       ScoreFormat format) {
  const auto floats = narrow_checked(image);
  const auto h = static_cast<std::size_t>(image.dims().height());
  const auto w = static_cast<std::size_t>(image.dims().width());
  Bytes out;
  out.reserve(floats.size() * 4 + 64);
  auto put = [&](float f) { store_u32_le(out, std::bit_cast<std::uint32_t>(f)); };

  if (format == ScoreFormat::Raw) {
    out.insert(out.end(), {'C', 'S', 'E', 'G'});
    store_u32_le(out, static_cast<std::uint32_t>(h));
    store_u32_le(out, static_cast<std::uint32_t>(w));
    for (const float f : floats) put(f);
  } else {
    const auto header = "Pf\n" + std::to_string(w) + " " + std::to_string(h) + "\n-1.0\n";
    out.insert(out.end(), header.begin(), header.end());
    for (std::size_t r = h; r-- > 0;) {
      for (std::size_t c = 0; c < w; ++c) put(floats[r * w + c]);
    }
  }
  write_file(path, out);
}

void write_score_image(const ScoreImage& image, const std::filesystem::path& path) {
  write_score_image(image, path, lower_extension(path) == ".pfm" ? ScoreFormat::Pfm : ScoreFormat::Raw);
}

LabelMask read_mask(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (starts_with(bytes, "P5")) return parse_pgm(bytes);
  if (starts_with(bytes, "\x89PNG")) return parse_png(path, bytes);
  if (starts_with(bytes, "P6") || starts_with(bytes, "P3")) {
    throw FormatError(path.string() + ": multi-channel PPM, expected grayscale");
  }
  throw FormatError(path.string() + ": unrecognized mask file");
}

void write_mask(const LabelMask& mask, const std::filesystem::path& path) {
  const auto h = mask.dims().height();
  const auto w = mask.dims().width();
  std::vector<std::uint8_t> pixels(mask.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = mask[i] ? 255 : 0;

  if (lower_extension(path) == ".png") {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = PNG_FORMAT_GRAY;
    if (png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr) == 0) {
      throw Error("cannot write " + path.string() + ": " + image.message);
    }
    return;
  }
  const auto header = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), pixels.begin(), pixels.end());
  write_file(path, out);
}

}  // namespace cseg
