#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usyf/image.hpp"

namespace usyf {

// One stored render: the 64-bit seed its latents were derived from plus the
// 8-bit RGB pixels (H*W*C, interleaved).
struct DatasetRecord {
  uint64_t seed = 0;
  std::vector<uint8_t> pixels;
};

struct Dataset {
  uint16_t height = kImageSize;
  uint16_t width = kImageSize;
  uint16_t channels = kImageChannels;
  std::vector<DatasetRecord> records;
};

// Binary record file: magic "USYF", u32 version (=1), u64 count,
// u16 height/width/channels, then per record a u64 seed followed by
// height*width*channels bytes. Little-endian throughout.
inline constexpr char kDatasetMagic[4] = {'U', 'S', 'Y', 'F'};
inline constexpr uint32_t kDatasetVersion = 1;

void write_dataset(const Dataset& dataset, const std::string& path);
Dataset read_dataset(const std::string& path);

}  // namespace usyf
