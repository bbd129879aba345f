#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "usyf/schedule.hpp"

namespace usyf {

// Full training state between epochs: both encoders' parameters and buffers,
// optimizer velocities, the negative queue, scheduler state, and the epoch
// cursor. Tensors round-trip bit-exactly (raw float32).
struct CheckpointData {
  uint64_t config_hash = 0;
  std::string config_text;
  int next_epoch = 0;
  uint64_t queue_cursor = 0;
  uint64_t queue_size = 0;
  PlateauScheduler::State plateau{0.0, -1.0, 0, 0};
  std::vector<std::pair<std::string, std::vector<float>>> tensors;
};

inline constexpr char kCheckpointMagic[4] = {'U', 'S', 'C', 'K'};
inline constexpr uint32_t kCheckpointVersion = 1;

// Atomic write (temp file + rename).
void save_checkpoint(const CheckpointData& data, const std::string& path);
CheckpointData load_checkpoint(const std::string& path);

}  // namespace usyf
