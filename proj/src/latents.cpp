#include "usyf/latents.hpp"

#include "usyf/common.hpp"

namespace usyf {

namespace {
constexpr uint64_t kIdentityLatentTag = 0x1d1a7e57u;

std::vector<float> draw_normals(RngStream& rng, int dim) {
  std::vector<float> v(static_cast<size_t>(dim));
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return v;
}
}  // namespace

std::vector<std::vector<float>> sample_identity_latents(std::size_t count, uint64_t seed) {
  require(count >= 1, "sample_identity_latents: empty request (count must be >= 1)");
  std::vector<std::vector<float>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RngStream rng(derive_seed(seed, {kIdentityLatentTag, static_cast<uint64_t>(i)}));
    out.push_back(draw_normals(rng, kIdentityDim));
  }
  return out;
}

AppearanceLatents sample_appearance(RngStream& rng) {
  AppearanceLatents a;
  a.z_pose = draw_normals(rng, kPoseDim);
  a.z_expr = draw_normals(rng, kExpressionDim);
  a.z_ill = draw_normals(rng, kIlluminationDim);
  return a;
}

GeneratorInput make_generator_input(std::span<const float> z_id,
                                    std::span<const float> z_pose,
                                    std::span<const float> z_expr,
                                    std::span<const float> z_ill) {
  require(z_id.size() == kIdentityDim, "make_generator_input: z_id must be 128-D");
  require(z_pose.size() == kPoseDim, "make_generator_input: z_pose must be 3-D");
  require(z_expr.size() == kExpressionDim, "make_generator_input: z_expr must be 32-D");
  require(z_ill.size() == kIlluminationDim, "make_generator_input: z_ill must be 16-D");
  GeneratorInput input;
  input.values.reserve(kGeneratorInputDim);
  input.values.insert(input.values.end(), z_id.begin(), z_id.end());
  input.values.insert(input.values.end(), z_pose.begin(), z_pose.end());
  input.values.insert(input.values.end(), z_expr.begin(), z_expr.end());
  input.values.insert(input.values.end(), z_ill.begin(), z_ill.end());
  return input;
}

GeneratorInput make_generator_input(std::span<const float> z_id,
                                    const AppearanceLatents& appearance) {
  return make_generator_input(z_id, appearance.z_pose, appearance.z_expr, appearance.z_ill);
}

}  // namespace usyf
