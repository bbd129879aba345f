#include "usyf/encoder.hpp"

#include <cstring>

#include "usyf/image.hpp"

namespace usyf {

void validate_backbone_spec(const BackboneSpec& spec) {
  require(spec.arch == "small4" || spec.arch == "resnet50",
          "backbone: arch must be small4 or resnet50");
  require(spec.embed_dim >= 1, "backbone: embed_dim must be >= 1");
  if (spec.arch == "small4") {
    require(spec.widths.size() == 4, "backbone: small4 needs exactly 4 stage widths");
    for (int w : spec.widths) require(w >= 1, "backbone: stage width must be >= 1");
  }
}

namespace {

using namespace nn;

void build_small4(const BackboneSpec& spec, RngStream& init,
                  std::vector<std::unique_ptr<Layer>>& layers) {
  int in_c = kImageChannels;
  for (int stage = 0; stage < 4; ++stage) {
    const int out_c = spec.widths[static_cast<size_t>(stage)];
    const std::string name = "stage" + std::to_string(stage + 1);
    layers.push_back(std::make_unique<Conv2d>(name + ".conv", in_c, out_c, 3, 2, 1, init));
    layers.push_back(std::make_unique<InstanceNorm2d>(name + ".norm", out_c));
    layers.push_back(std::make_unique<ReLU>());
    in_c = out_c;
  }
  layers.push_back(std::make_unique<GlobalAvgPool>());
  layers.push_back(std::make_unique<Linear>("head", in_c, spec.embed_dim, init));
  layers.push_back(std::make_unique<L2Normalize>());
}

void build_resnet50(const BackboneSpec& spec, RngStream& init,
                    std::vector<std::unique_ptr<Layer>>& layers) {
  layers.push_back(std::make_unique<Conv2d>("stem.conv", kImageChannels, 64, 7, 2, 3, init));
  layers.push_back(std::make_unique<BatchNorm2d>("stem.bn", 64));
  layers.push_back(std::make_unique<ReLU>());
  layers.push_back(std::make_unique<MaxPool2d>(3, 2, 1));

  const int block_counts[4] = {3, 4, 6, 3};
  const int mid_channels[4] = {64, 128, 256, 512};
  int in_c = 64;
  for (int stage = 0; stage < 4; ++stage) {
    for (int b = 0; b < block_counts[stage]; ++b) {
      const int stride = (b == 0 && stage > 0) ? 2 : 1;
      const std::string name =
          "layer" + std::to_string(stage + 1) + "." + std::to_string(b);
      layers.push_back(
          std::make_unique<Bottleneck>(name, in_c, mid_channels[stage], stride, init));
      in_c = mid_channels[stage] * Bottleneck::kExpansion;
    }
  }
  layers.push_back(std::make_unique<GlobalAvgPool>());
  layers.push_back(std::make_unique<Linear>("head", in_c, spec.embed_dim, init));
  layers.push_back(std::make_unique<L2Normalize>());
}

}  // namespace

Encoder::Encoder(const BackboneSpec& spec, uint64_t init_seed) : spec_(spec) {
  validate_backbone_spec(spec);
  RngStream init(init_seed);
  if (spec.arch == "small4")
    build_small4(spec, init, layers_);
  else
    build_resnet50(spec, init, layers_);
}

std::vector<float> Encoder::forward(std::span<const float> images, int batch,
                                    bool record) {
  require(batch >= 1, "Encoder::forward: empty batch");
  require(images.size() == static_cast<size_t>(batch) * kImageValues,
          "Encoder::forward: image buffer size mismatch");
  last_batch_ = batch;

  nn::FeatureMap x;
  x.batch = batch;
  x.channels = kImageChannels;
  x.height = kImageSize;
  x.width = kImageSize;
  x.data.resize(kImageChannels, static_cast<Eigen::Index>(batch) * kImageSize * kImageSize);
  const int spatial = kImageSize * kImageSize;
  for (int n = 0; n < batch; ++n) {
    const float* src = images.data() + static_cast<size_t>(n) * kImageValues;
    float* dst = x.data.data() + static_cast<Eigen::Index>(n) * spatial * kImageChannels;
    // HWC rows map directly onto the channels-major columns.
    std::memcpy(dst, src, sizeof(float) * kImageValues);
  }

  for (auto& layer : layers_) x = layer->forward(x, record);

  require(x.channels == spec_.embed_dim && x.height == 1 && x.width == 1,
          "Encoder::forward: unexpected output shape");
  std::vector<float> out(static_cast<size_t>(batch) * spec_.embed_dim);
  for (int n = 0; n < batch; ++n)
    for (int d = 0; d < spec_.embed_dim; ++d)
      out[static_cast<size_t>(n) * spec_.embed_dim + d] = x.data(d, n);
  return out;
}

void Encoder::backward(std::span<const float> grad, int batch) {
  require(batch == last_batch_, "Encoder::backward: batch mismatch with last forward");
  require(grad.size() == static_cast<size_t>(batch) * spec_.embed_dim,
          "Encoder::backward: gradient size mismatch");
  nn::FeatureMap g;
  g.batch = batch;
  g.channels = spec_.embed_dim;
  g.height = 1;
  g.width = 1;
  g.data.resize(spec_.embed_dim, batch);
  for (int n = 0; n < batch; ++n)
    for (int d = 0; d < spec_.embed_dim; ++d)
      g.data(d, n) = grad[static_cast<size_t>(n) * spec_.embed_dim + d];
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
}

void Encoder::zero_grad() {
  for (nn::Param* p : params()) p->grad.setZero();
}

void Encoder::set_training(bool training) {
  for (auto& layer : layers_) layer->set_training(training);
}

std::vector<nn::Param*> Encoder::params() {
  std::vector<nn::Param*> params;
  std::vector<nn::Buffer*> buffers;
  for (auto& layer : layers_) layer->collect(params, buffers);
  return params;
}

std::vector<nn::Buffer*> Encoder::buffers() {
  std::vector<nn::Param*> params;
  std::vector<nn::Buffer*> buffers;
  for (auto& layer : layers_) layer->collect(params, buffers);
  return buffers;
}

std::vector<const nn::Param*> Encoder::params() const {
  auto* self = const_cast<Encoder*>(this);
  std::vector<const nn::Param*> out;
  for (nn::Param* p : self->params()) out.push_back(p);
  return out;
}

std::size_t Encoder::parameter_count() const {
  std::size_t n = 0;
  for (const nn::Param* p : params()) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void momentum_update(Encoder& momentum_encoder, const Encoder& encoder, double mc) {
  auto mom = momentum_encoder.params();
  auto enc = encoder.params();
  require(mom.size() == enc.size(), "momentum_update: parameter list mismatch");
  for (std::size_t i = 0; i < mom.size(); ++i) {
    require(mom[i]->value.size() == enc[i]->value.size(),
            "momentum_update: parameter shape mismatch at " + mom[i]->name);
    momentum_update(std::span<float>(mom[i]->value.data(),
                                     static_cast<size_t>(mom[i]->value.size())),
                    std::span<const float>(enc[i]->value.data(),
                                           static_cast<size_t>(enc[i]->value.size())),
                    mc);
  }
}

SgdOptimizer::SgdOptimizer(std::vector<nn::Param*> params, double momentum,
                           double weight_decay)
    : params_(std::move(params)), momentum_(momentum), weight_decay_(weight_decay) {
  velocity_.reserve(params_.size());
  for (nn::Param* p : params_)
    velocity_.push_back(Eigen::VectorXf::Zero(p->value.size()));
}

void SgdOptimizer::step(double lr) {
  const float mu = static_cast<float>(momentum_);
  const float wd = static_cast<float>(weight_decay_);
  const float eta = static_cast<float>(lr);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    nn::Param& p = *params_[i];
    velocity_[i] = mu * velocity_[i] + (p.grad + wd * p.value);
    p.value -= eta * velocity_[i];
  }
}

}  // namespace usyf
