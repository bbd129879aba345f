#include "usyf/image.hpp"

#include <cmath>

#include "usyf/common.hpp"

namespace usyf {

float u8_to_unit(uint8_t v) { return static_cast<float>(v) / 127.5f - 1.0f; }

uint8_t unit_to_u8(float v) {
  const float scaled = (v + 1.0f) * 127.5f;
  long r = std::lroundf(scaled);
  if (r < 0) r = 0;
  if (r > 255) r = 255;
  return static_cast<uint8_t>(r);
}

FaceImage image_from_u8(std::span<const uint8_t> bytes) {
  require(bytes.size() == static_cast<size_t>(kImageValues),
          "image_from_u8: expected 112*112*3 bytes");
  FaceImage out;
  for (size_t i = 0; i < bytes.size(); ++i) out.pixels[i] = u8_to_unit(bytes[i]);
  return out;
}

std::vector<uint8_t> image_to_u8(const FaceImage& image) {
  validate_image(image);
  std::vector<uint8_t> out(kImageValues);
  for (size_t i = 0; i < out.size(); ++i) out[i] = unit_to_u8(image.pixels[i]);
  return out;
}

void validate_image(const FaceImage& image) {
  require(image.pixels.size() == static_cast<size_t>(kImageValues),
          "FaceImage: wrong pixel count");
  for (float v : image.pixels) {
    require(std::isfinite(v) && v >= -1.0f && v <= 1.0f,
            "FaceImage: pixel value outside [-1, 1]");
  }
}

}  // namespace usyf
