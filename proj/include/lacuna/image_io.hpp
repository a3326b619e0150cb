#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lacuna/mask.hpp"

namespace lacuna {

struct GrayImage
{
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;
};

/// Decodes 8-bit grayscale PGM (P2/P5) or PNG (gray, gray+alpha, or
/// palette converted to gray). Throws ValidationError naming the path on
/// unreadable files or unsupported depth.
GrayImage load_gray(const std::string& path);

/// Pixel is active iff gray >= threshold.
BinaryMask threshold_image(const GrayImage& image, int threshold);

BinaryMask load_mask(const std::string& path, int threshold = 1);

/// Binary P5 with on = 255, off = 0.
void write_pgm(const BinaryMask& mask, const std::string& path);

} // namespace lacuna
