#pragma once

#include <string>
#include <vector>

#include "usyf/image.hpp"
#include "usyf/rng.hpp"

namespace usyf {

// The 15 candidate operations. Horizontal flip is not listed here: it is the
// always-available baseline step applied by rand_augment before the sampled
// operations.
enum class AugmentOp {
  kShearX,
  kShearY,
  kTranslateX,
  kTranslateY,
  kRotate,
  kBrightness,
  kColor,
  kContrast,
  kSharpness,
  kPosterize,
  kSolarize,
  kAutoContrast,
  kEqualize,
  kGrayscale,
  kResizedCrop,
};

inline constexpr int kMagnitudeMax = 30;

const char* to_string(AugmentOp op);
AugmentOp augment_op_from_string(const std::string& name);

// All 15 candidate operations, in enum order.
std::vector<AugmentOp> all_augment_ops();
// The 12 operations retained after the per-operation selection study.
std::vector<AugmentOp> default_op_space();

struct AugmentationPolicy {
  int num_ops = 4;
  int magnitude = 16;
  std::vector<AugmentOp> op_space = default_op_space();
  double flip_probability = 0.5;
};

void validate_policy(const AugmentationPolicy& policy);

// Applies one operation at the given magnitude. Directional operations draw
// a random sign from the stream; ResizedCrop draws its crop scale and
// position. Pixel math happens on the 8-bit representation and the result is
// renormalized to [-1, 1].
FaceImage apply_op(const FaceImage& image, AugmentOp op, int magnitude, RngStream& rng);

// Exact mirror along the vertical axis; an involution.
FaceImage horizontal_flip(const FaceImage& image);

// Horizontal flip with the policy's probability, then num_ops operations
// drawn uniformly with replacement from op_space, applied sequentially at the
// policy magnitude.
FaceImage rand_augment(const FaceImage& image, const AugmentationPolicy& policy,
                       RngStream& rng);

// Same as rand_augment but reports which operations were applied.
FaceImage rand_augment_traced(const FaceImage& image, const AugmentationPolicy& policy,
                              RngStream& rng, std::vector<AugmentOp>* applied_ops,
                              bool* flipped);

// Largest pixel displacement the operation's geometry can cause at the given
// magnitude (0 for value-only operations). Nondecreasing in magnitude.
double max_displacement(AugmentOp op, int magnitude);

}  // namespace usyf
