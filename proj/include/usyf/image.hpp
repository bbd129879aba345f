#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace usyf {

inline constexpr int kImageSize = 112;
inline constexpr int kImageChannels = 3;
inline constexpr int kImageValues = kImageSize * kImageSize * kImageChannels;

// Aligned face crop: 112x112x3, interleaved HWC, values in [-1, 1].
struct FaceImage {
  std::vector<float> pixels;

  FaceImage() : pixels(kImageValues, 0.0f) {}

  float& at(int y, int x, int c) {
    return pixels[static_cast<size_t>((y * kImageSize + x) * kImageChannels + c)];
  }
  float at(int y, int x, int c) const {
    return pixels[static_cast<size_t>((y * kImageSize + x) * kImageChannels + c)];
  }
};

// 8-bit value v maps to v / 127.5 - 1; the inverse rounds to nearest.
float u8_to_unit(uint8_t v);
uint8_t unit_to_u8(float v);

FaceImage image_from_u8(std::span<const uint8_t> bytes);
std::vector<uint8_t> image_to_u8(const FaceImage& image);

// Shape/range contract: size kImageValues, every value in [-1, 1], no NaNs.
void validate_image(const FaceImage& image);

}  // namespace usyf
