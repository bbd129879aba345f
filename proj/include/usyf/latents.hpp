#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "usyf/rng.hpp"

namespace usyf {

inline constexpr int kIdentityDim = 128;
inline constexpr int kPoseDim = 3;
inline constexpr int kExpressionDim = 32;
inline constexpr int kIlluminationDim = 16;
inline constexpr int kGeneratorInputDim =
    kIdentityDim + kPoseDim + kExpressionDim + kIlluminationDim;  // 179

// Disentangled generator inputs. All four vectors are standard-normal draws
// when produced by the samplers below.
struct LatentBundle {
  std::vector<float> z_id;    // 128-D
  std::vector<float> z_pose;  // 3-D
  std::vector<float> z_expr;  // 32-D
  std::vector<float> z_ill;   // 16-D
};

struct AppearanceLatents {
  std::vector<float> z_pose;  // 3-D
  std::vector<float> z_expr;  // 32-D
  std::vector<float> z_ill;   // 16-D
};

// Flat 179-D conditioning vector: z_id | z_pose | z_expr | z_ill.
struct GeneratorInput {
  std::vector<float> values;
};

// Offsets of each latent slice inside a GeneratorInput.
inline constexpr int kPoseOffset = kIdentityDim;                       // 128
inline constexpr int kExpressionOffset = kPoseOffset + kPoseDim;       // 131
inline constexpr int kIlluminationOffset = kExpressionOffset + kExpressionDim;  // 163

// Draws `count` identity latents. Vector i depends only on (seed, i), so any
// prefix or single vector can be regenerated independently.
std::vector<std::vector<float>> sample_identity_latents(std::size_t count, uint64_t seed);

// Three fresh standard-normal vectors (pose 3-D, expression 32-D,
// illumination 16-D); advances the stream.
AppearanceLatents sample_appearance(RngStream& rng);

GeneratorInput make_generator_input(std::span<const float> z_id,
                                    std::span<const float> z_pose,
                                    std::span<const float> z_expr,
                                    std::span<const float> z_ill);

GeneratorInput make_generator_input(std::span<const float> z_id,
                                    const AppearanceLatents& appearance);

}  // namespace usyf
