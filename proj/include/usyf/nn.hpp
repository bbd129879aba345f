#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "usyf/rng.hpp"

namespace usyf::nn {

// Activations are stored channels-major: data(c, n*H*W + y*W + x). Each
// Eigen column then holds all channels of one pixel, which keeps im2col and
// the normalization layers cache-friendly.
struct FeatureMap {
  int batch = 0, channels = 0, height = 0, width = 0;
  Eigen::MatrixXf data;

  int spatial() const { return height * width; }
};

struct Param {
  std::string name;
  std::vector<int> shape;
  Eigen::VectorXf value;
  Eigen::VectorXf grad;
};

// Non-learned state carried with the model (batch-norm running statistics).
struct Buffer {
  std::string name;
  Eigen::VectorXf value;
};

class Layer {
 public:
  virtual ~Layer() = default;
  // record=false skips caching of intermediates; backward is then invalid.
  virtual FeatureMap forward(const FeatureMap& x, bool record) = 0;
  virtual FeatureMap backward(const FeatureMap& dy) = 0;
  virtual void collect(std::vector<Param*>& params, std::vector<Buffer*>& buffers) {}
  virtual void set_training(bool training) {}
};

class Conv2d : public Layer {
 public:
  Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride,
         int pad, RngStream& init);
  FeatureMap forward(const FeatureMap& x, bool record) override;
  FeatureMap backward(const FeatureMap& dy) override;
  void collect(std::vector<Param*>& params, std::vector<Buffer*>& buffers) override;

 private:
  int in_c_, out_c_, k_, stride_, pad_;
  Param weight_;  // out_c x (k*k*in_c), rows (ky,kx) major / channel minor
  Eigen::MatrixXf col_;  // cached im2col of the last recorded input
  int in_h_ = 0, in_w_ = 0, batch_ = 0;
};

class InstanceNorm2d : public Layer {
 public:
  InstanceNorm2d(std::string name, int channels);
  FeatureMap forward(const FeatureMap& x, bool record) override;
  FeatureMap backward(const FeatureMap& dy) override;
  void collect(std::vector<Param*>& params, std::vector<Buffer*>& buffers) override;

 private:
  int channels_;
  Param gamma_, beta_;
  Eigen::MatrixXf xhat_;
  Eigen::MatrixXf inv_std_;  // channels x batch
  int batch_ = 0, h_ = 0, w_ = 0;
};

class BatchNorm2d : public Layer {
 public:
  BatchNorm2d(std::string name, int channels, double momentum = 0.1);
  FeatureMap forward(const FeatureMap& x, bool record) override;
  FeatureMap backward(const FeatureMap& dy) override;
  void collect(std::vector<Param*>& params, std::vector<Buffer*>& buffers) override;
  void set_training(bool training) override { training_ = training; }

 private:
  int channels_;
  double momentum_;
  bool training_ = true;
  Param gamma_, beta_;
  Buffer running_mean_, running_var_;
  Eigen::MatrixXf xhat_;
  Eigen::VectorXf inv_std_;
  int batch_ = 0, h_ = 0, w_ = 0;
};

class ReLU : public Layer {
 public:
  FeatureMap forward(const FeatureMap& x, bool record) override;
  FeatureMap backward(const FeatureMap& dy) override;

 private:
  Eigen::MatrixXf out_;
};

class MaxPool2d : public Layer {
 public:
  MaxPool2d(int kernel, int stride, int pad);
  FeatureMap forward(const FeatureMap& x, bool record) override;
  FeatureMap backward(const FeatureMap& dy) override;

 private:
  int k_, stride_, pad_;
  Eigen::MatrixXi argmax_;  // input spatial index per output element
  int in_h_ = 0, in_w_ = 0, batch_ = 0, channels_ = 0;
};

// N,C,H,W -> N,C,1,1 (mean over the spatial extent).
class GlobalAvgPool : public Layer {
 public:
  FeatureMap forward(const FeatureMap& x, bool record) override;
  FeatureMap backward(const FeatureMap& dy) override;

 private:
  int h_ = 0, w_ = 0;
};

// Fully connected head on pooled maps (expects h == w == 1).
class Linear : public Layer {
 public:
  Linear(std::string name, int in_features, int out_features, RngStream& init);
  FeatureMap forward(const FeatureMap& x, bool record) override;
  FeatureMap backward(const FeatureMap& dy) override;
  void collect(std::vector<Param*>& params, std::vector<Buffer*>& buffers) override;

 private:
  int in_f_, out_f_;
  Param weight_, bias_;
  Eigen::MatrixXf input_;
};

// Per-sample L2 normalization of the embedding columns.
class L2Normalize : public Layer {
 public:
  FeatureMap forward(const FeatureMap& x, bool record) override;
  FeatureMap backward(const FeatureMap& dy) override;

 private:
  Eigen::MatrixXf out_;
  Eigen::VectorXf norms_;
};

// Pre-activation-free residual bottleneck: 1x1 -> 3x3(stride) -> 1x1 with
// batch norm, plus a projected skip when the shape changes.
class Bottleneck : public Layer {
 public:
  Bottleneck(const std::string& name, int in_channels, int mid_channels, int stride,
             RngStream& init);
  FeatureMap forward(const FeatureMap& x, bool record) override;
  FeatureMap backward(const FeatureMap& dy) override;
  void collect(std::vector<Param*>& params, std::vector<Buffer*>& buffers) override;
  void set_training(bool training) override;

  static constexpr int kExpansion = 4;

 private:
  std::vector<std::unique_ptr<Layer>> main_;
  std::vector<std::unique_ptr<Layer>> skip_;  // empty when the skip is identity
  FeatureMap input_;
  Eigen::MatrixXf relu_mask_;
};

}  // namespace usyf::nn
