#include "usyf/generator.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "usyf/common.hpp"

namespace usyf {

namespace {

constexpr int kFrameWidth = 16;   // untouched border band carrying the code
constexpr int kFrameCells = 24;   // 7 top + 7 bottom + 5 left + 5 right
constexpr int kCellSide = 16;
constexpr int kGratings = 6;
constexpr float kGratingAmplitude = 0.22f;
constexpr float kFrameAmplitude = 0.12f;
constexpr float kCenter = (kImageSize - 1) / 2.0f;  // 55.5

// Top-left corner of frame cell j.
void frame_cell_origin(int j, int* x0, int* y0) {
  if (j < 7) {
    *x0 = kCellSide * j;
    *y0 = 0;
  } else if (j < 14) {
    *x0 = kCellSide * (j - 7);
    *y0 = kImageSize - kCellSide;
  } else if (j < 19) {
    *x0 = 0;
    *y0 = kCellSide + kCellSide * (j - 14);
  } else {
    *x0 = kImageSize - kCellSide;
    *y0 = kCellSide + kCellSide * (j - 19);
  }
}

bool in_frame(int x, int y) {
  return x < kFrameWidth || x >= kImageSize - kFrameWidth || y < kFrameWidth ||
         y >= kImageSize - kFrameWidth;
}

int frame_cell_index(int x, int y) {
  if (y < kCellSide) return x / kCellSide;
  if (y >= kImageSize - kCellSide) return 7 + x / kCellSide;
  if (x < kCellSide) return 14 + (y - kCellSide) / kCellSide;
  return 19 + (y - kCellSide) / kCellSide;
}

struct Grating {
  float kx, ky;    // wave vector, 2*pi*f premultiplied
  float phase;
  float mix[3];    // per-channel weight, unit length
};

struct PatternParams {
  Grating gratings[kGratings];
  uint32_t code;  // 24-bit frame code
};

PatternParams pattern_params(std::span<const float> z_id) {
  const uint64_t h = MockGenerator::identity_hash(z_id);
  PatternParams p;
  p.code = static_cast<uint32_t>(h & 0xFFFFFFu);
  RngStream rng(h);
  for (auto& g : p.gratings) {
    const double theta = rng.uniform() * std::numbers::pi;
    const double freq = rng.uniform_range(0.035, 0.12);
    const double w = 2.0 * std::numbers::pi * freq;
    g.kx = static_cast<float>(w * std::cos(theta));
    g.ky = static_cast<float>(w * std::sin(theta));
    g.phase = static_cast<float>(rng.uniform() * 2.0 * std::numbers::pi);
    float mix[3], norm = 0.0f;
    for (float& m : mix) {
      m = static_cast<float>(rng.normal());
      norm += m * m;
    }
    norm = std::sqrt(std::max(norm, 1e-12f));
    for (int c = 0; c < 3; ++c) g.mix[c] = mix[c] / norm;
  }
  return p;
}

// Identity texture, defined analytically on the whole plane.
inline void pattern_at(const PatternParams& p, float px, float py, float out[3]) {
  float s[3] = {0.0f, 0.0f, 0.0f};
  for (const auto& g : p.gratings) {
    const float v = kGratingAmplitude * std::cos(g.kx * px + g.ky * py + g.phase);
    s[0] += v * g.mix[0];
    s[1] += v * g.mix[1];
    s[2] += v * g.mix[2];
  }
  for (int c = 0; c < 3; ++c) out[c] = 0.8f * std::tanh(2.0f * s[c]);
}

struct AppearanceParams {
  float inv_scale, cos_a, sin_a, tx;            // pose: zoom, roll, shift
  float bump_cx[3], bump_cy[3];                 // expression: local deformation
  float bump_dx[3], bump_dy[3];
  float bump_inv_2s2[3], bump_r2_max[3];
  float gain[3];                                // illumination: color cast
  float grad_x, grad_y;                         // illumination: lighting slope
};

AppearanceParams appearance_params(std::span<const float> v) {
  // v = pose(3) | expr(32) | ill(16), squashed into bounded ranges.
  AppearanceParams a;
  const float scale = std::exp(0.22f * std::tanh(v[0]));
  a.inv_scale = 1.0f / scale;
  const float alpha = 10.0f * (std::numbers::pi_v<float> / 180.0f) * std::tanh(v[1]);
  a.cos_a = std::cos(alpha);
  a.sin_a = std::sin(alpha);
  a.tx = 12.0f * std::tanh(v[2]);
  const float* e = v.data() + kPoseDim;
  for (int j = 0; j < 3; ++j) {
    a.bump_cx[j] = 28.0f * std::tanh(e[10 * j + 0]);
    a.bump_cy[j] = 28.0f * std::tanh(e[10 * j + 1]);
    a.bump_dx[j] = 9.0f * std::tanh(e[10 * j + 2]);
    a.bump_dy[j] = 9.0f * std::tanh(e[10 * j + 3]);
    const float sigma = 8.0f + 2.5f * (std::tanh(e[10 * j + 4]) + 1.0f);
    a.bump_inv_2s2[j] = 1.0f / (2.0f * sigma * sigma);
    a.bump_r2_max[j] = 9.0f * sigma * sigma;  // beyond 3 sigma the bump is ~0
  }
  const float* il = v.data() + kPoseDim + kExpressionDim;
  for (int c = 0; c < 3; ++c) a.gain[c] = std::exp(0.30f * std::tanh(il[c]));
  a.grad_x = 0.15f * std::tanh(il[3]);
  a.grad_y = 0.15f * std::tanh(il[4]);
  return a;
}

// 1 inside the face region, 0 on the border frame, cosine falloff between.
inline float warp_mask(float rinf) {
  if (rinf <= 30.0f) return 1.0f;
  if (rinf >= 40.0f) return 0.0f;
  return 0.5f * (1.0f + std::cos(std::numbers::pi_v<float> * (rinf - 30.0f) / 10.0f));
}

}  // namespace

uint64_t MockGenerator::identity_hash(std::span<const float> z_id) {
  require(z_id.size() == kIdentityDim, "identity_hash: z_id must be 128-D");
  uint64_t h = 0xcbf29ce484222325ULL;
  for (float f : z_id) {
    uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    h ^= bits;
    h *= 0x100000001b3ULL;
  }
  uint64_t s = h;
  return splitmix64(s);
}

FaceImage MockGenerator::render(const GeneratorInput& input) const {
  require(input.values.size() == kGeneratorInputDim,
          "MockGenerator::render: input must be 179-D");
  const std::span<const float> values(input.values);
  const PatternParams pattern = pattern_params(values.subspan(0, kIdentityDim));
  const AppearanceParams app = appearance_params(values.subspan(kIdentityDim));

  FaceImage out;
  for (int y = 0; y < kImageSize; ++y) {
    const float uy = static_cast<float>(y) - kCenter;
    for (int x = 0; x < kImageSize; ++x) {
      const float ux = static_cast<float>(x) - kCenter;
      const float rinf = std::max(std::fabs(ux), std::fabs(uy));
      float px = ux, py = uy;
      const float m = warp_mask(rinf);
      if (m > 0.0f) {
        // Affine displacement (inverse map into pattern coordinates).
        const float vx = ux * app.inv_scale, vy = uy * app.inv_scale;
        float dx = (app.cos_a * vx + app.sin_a * vy) + app.tx - ux;
        float dy = (-app.sin_a * vx + app.cos_a * vy) - uy;
        // Localized deformations.
        for (int j = 0; j < 3; ++j) {
          const float bx = ux - app.bump_cx[j], by = uy - app.bump_cy[j];
          const float r2 = bx * bx + by * by;
          if (r2 > app.bump_r2_max[j]) continue;
          const float w = std::exp(-r2 * app.bump_inv_2s2[j]);
          dx += app.bump_dx[j] * w;
          dy += app.bump_dy[j] * w;
        }
        px += m * dx;
        py += m * dy;
      }
      float base[3];
      pattern_at(pattern, px, py, base);
      if (in_frame(x, y)) {
        const int cell = frame_cell_index(x, y);
        const bool bit = (pattern.code >> cell) & 1u;
        base[2] = bit ? kFrameAmplitude : -kFrameAmplitude;
      }
      const float light = 1.0f + app.grad_x * (ux / kCenter) + app.grad_y * (uy / kCenter);
      for (int c = 0; c < 3; ++c) {
        float v = base[c] * app.gain[c] * light;
        out.at(y, x, c) = std::clamp(v, -1.0f, 1.0f);
      }
    }
  }
  return out;
}

double MockGenerator::identity_statistic(const FaceImage& image) {
  validate_image(image);
  uint32_t code = 0;
  for (int j = 0; j < kFrameCells; ++j) {
    int x0 = 0, y0 = 0;
    frame_cell_origin(j, &x0, &y0);
    // Average the blue channel over the central 8x8 of the cell.
    double sum = 0.0;
    for (int y = y0 + 4; y < y0 + 12; ++y)
      for (int x = x0 + 4; x < x0 + 12; ++x) sum += image.at(y, x, 2);
    if (sum > 0.0) code |= 1u << j;
  }
  return static_cast<double>(code);
}

PairSample generate_pair(const Generator& generator, std::span<const float> z_id,
                         RngStream& rng) {
  require(z_id.size() == kIdentityDim, "generate_pair: z_id must be 128-D");
  PairSample sample;
  sample.query_appearance = sample_appearance(rng);
  sample.key_appearance = sample_appearance(rng);
  try {
    sample.query = generator.render(make_generator_input(z_id, sample.query_appearance));
    sample.key = generator.render(make_generator_input(z_id, sample.key_appearance));
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "generator failed for identity latent [" << z_id[0] << ", " << z_id[1]
        << ", ...]: " << e.what();
    throw GeneratorError(msg.str());
  }
  return sample;
}

}  // namespace usyf
