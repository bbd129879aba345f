#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "usyf/common.hpp"
#include "usyf/nn.hpp"

namespace usyf {

// Elementwise convex combination theta_mom <- mc * theta_mom + (1 - mc) * theta_enc.
// Both parameter sets must be congruent.
template <typename T>
void momentum_update(std::span<T> theta_mom, std::span<const T> theta_enc, double mc) {
  require(theta_mom.size() == theta_enc.size(), "momentum_update: shape mismatch");
  require(mc >= 0.0 && mc <= 1.0, "momentum_update: coefficient must be in [0, 1]");
  const T a = static_cast<T>(mc);
  const T b = static_cast<T>(1.0 - mc);
  for (std::size_t i = 0; i < theta_mom.size(); ++i)
    theta_mom[i] = a * theta_mom[i] + b * theta_enc[i];
}

struct BackboneSpec {
  std::string arch = "small4";  // small4 | resnet50
  std::vector<int> widths = {16, 32, 64, 128};  // small4 stage widths
  int embed_dim = 512;
};

void validate_backbone_spec(const BackboneSpec& spec);

// Image encoder: configured backbone, projection to the embedding dimension,
// then L2 normalization. Weights are initialized deterministically from the
// seed, so two encoders built from the same (spec, seed) are identical.
class Encoder {
 public:
  Encoder(const BackboneSpec& spec, uint64_t init_seed);

  int embed_dim() const { return spec_.embed_dim; }
  const BackboneSpec& spec() const { return spec_; }

  // images: batch of HWC float images, row-major, values in [-1, 1].
  // Returns row-major batch x embed_dim unit vectors. record=true keeps the
  // activations needed by backward().
  std::vector<float> forward(std::span<const float> images, int batch, bool record);

  // grad: row-major batch x embed_dim gradient w.r.t. the embeddings.
  void backward(std::span<const float> grad, int batch);

  void zero_grad();
  void set_training(bool training);

  std::vector<nn::Param*> params();
  std::vector<nn::Buffer*> buffers();
  std::vector<const nn::Param*> params() const;
  std::size_t parameter_count() const;

 private:
  BackboneSpec spec_;
  std::vector<std::unique_ptr<nn::Layer>> layers_;
  int last_batch_ = 0;
};

// Parameter-set view of a whole encoder; mc applies to every element and the
// two encoders must share a spec. Buffers (norm running statistics) are not
// touched; they evolve through the momentum encoder's own forward passes.
void momentum_update(Encoder& momentum_encoder, const Encoder& encoder, double mc);

// Classical momentum SGD with decoupled-from-nothing L2 weight decay folded
// into the gradient: v <- mu * v + (g + wd * w); w <- w - lr * v.
class SgdOptimizer {
 public:
  SgdOptimizer(std::vector<nn::Param*> params, double momentum, double weight_decay);
  void step(double lr);

  std::vector<Eigen::VectorXf>& velocities() { return velocity_; }
  const std::vector<nn::Param*>& params() const { return params_; }

 private:
  std::vector<nn::Param*> params_;
  double momentum_, weight_decay_;
  std::vector<Eigen::VectorXf> velocity_;
};

}  // namespace usyf
