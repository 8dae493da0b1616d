#pragma once

#include <filesystem>

#include "cseg/grid.hpp"

namespace cseg {

// Score maps travel as 32-bit floats and are widened to double on read.
//
//  PFM:  "Pf\n<width> <height>\n<scale>\n" followed by rows bottom-to-top.
//        Negative scale means little-endian. Written files always use -1.0.
//  Raw:  "CSEG" | u32 height | u32 width | height*width f32, all little-endian,
//        rows top-to-bottom.
enum class ScoreFormat { Pfm, Raw };

/// Detects the format from the file's magic bytes.
[[nodiscard]] ScoreImage read_score_image(const std::filesystem::path& path);

/// Values are narrowed to float; non-finite values are rejected with DataError.
void write_score_image(const ScoreImage& image, const std::filesystem::path& path,
                       ScoreFormat format);
/// ".pfm" selects PFM, anything else the raw format.
void write_score_image(const ScoreImage& image, const std::filesystem::path& path);

// Masks are 8-bit single-channel PGM (P5) or PNG. Pixel values >= 128 read as 1.
// Written files use 0 and 255.
[[nodiscard]] LabelMask read_mask(const std::filesystem::path& path);
/// ".png" selects PNG, anything else PGM.
void write_mask(const LabelMask& mask, const std::filesystem::path& path);

inline constexpr unsigned kMaskThreshold = 128;

}  // namespace cseg
