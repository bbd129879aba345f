#pragma once

#include <memory>

#include "usyf/image.hpp"
#include "usyf/latents.hpp"
#include "usyf/rng.hpp"

namespace usyf {

// Failure inside a generator, re-raised with the latent context attached.
class GeneratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Conditional face generator: 179-D latent in, aligned 112x112x3 crop out.
// The production model lives behind this interface; the repo ships the
// deterministic mock below for desk-scale runs and tests.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual FaceImage render(const GeneratorInput& input) const = 0;
};

// Deterministic stand-in generator. The identity slice seeds a procedural
// texture (a fixed set of oriented color gratings) plus a 24-bit code written
// into the outer 16-pixel border frame; the appearance slice drives a global
// affine warp (scale/rotation/shift), up to three localized smooth
// deformations, and a positive per-channel color gain with a spatial lighting
// gradient. Warp and deformation are masked to zero over the border frame and
// the gain is sign-preserving, so the frame code survives any appearance:
// identity_statistic() recovers it exactly.
class MockGenerator : public Generator {
 public:
  FaceImage render(const GeneratorInput& input) const override;

  // Decodes the 24-bit border-frame code; integer-valued double in
  // [0, 2^24). Invariant under the appearance slice by construction.
  static double identity_statistic(const FaceImage& image);

  // Hash of the identity slice; the low 24 bits are the frame code.
  static uint64_t identity_hash(std::span<const float> z_id);
};

// Two renders of the same identity with independently drawn appearance
// latents; the appearance draws are returned for inspection.
struct PairSample {
  FaceImage query;
  FaceImage key;
  AppearanceLatents query_appearance;
  AppearanceLatents key_appearance;
};

PairSample generate_pair(const Generator& generator, std::span<const float> z_id,
                         RngStream& rng);

}  // namespace usyf
