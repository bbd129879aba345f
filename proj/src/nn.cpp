#include "usyf/nn.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "usyf/common.hpp"

namespace usyf::nn {

namespace {

constexpr float kNormEps = 1e-5f;

int conv_out_extent(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

Eigen::VectorXf normal_init(RngStream& rng, int count, double stddev) {
  Eigen::VectorXf v(count);
  for (int i = 0; i < count; ++i) v[i] = static_cast<float>(rng.normal() * stddev);
  return v;
}

// Gathers k*k patches into a (k*k*in_c) x (batch*out_h*out_w) matrix. Row
// order is (ky, kx) major with the channel fastest, so each (ky, kx) slice of
// a column is a contiguous channel run shared with the source layout.
void im2col(const FeatureMap& x, int k, int stride, int pad, int out_h, int out_w,
            Eigen::MatrixXf& col) {
  const int in_c = x.channels, in_h = x.height, in_w = x.width;
  const int spatial_in = in_h * in_w;
  const int spatial_out = out_h * out_w;
  col.resize(k * k * in_c, static_cast<Eigen::Index>(x.batch) * spatial_out);
#pragma omp parallel for schedule(static)
  for (int n = 0; n < x.batch; ++n) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        const Eigen::Index j =
            static_cast<Eigen::Index>(n) * spatial_out + oy * out_w + ox;
        float* dst = col.data() + j * col.rows();
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * stride - pad + ky;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox * stride - pad + kx;
            if (iy < 0 || iy >= in_h || ix < 0 || ix >= in_w) {
              std::memset(dst, 0, sizeof(float) * in_c);
            } else {
              const float* src =
                  x.data.data() +
                  (static_cast<Eigen::Index>(n) * spatial_in + iy * in_w + ix) *
                      x.data.rows();
              std::memcpy(dst, src, sizeof(float) * in_c);
            }
            dst += in_c;
          }
        }
      }
    }
  }
}

// Scatter-add of column gradients back onto the input grid.
void col2im(const Eigen::MatrixXf& dcol, int batch, int in_c, int in_h, int in_w, int k,
            int stride, int pad, int out_h, int out_w, FeatureMap& dx) {
  dx.batch = batch;
  dx.channels = in_c;
  dx.height = in_h;
  dx.width = in_w;
  const int spatial_in = in_h * in_w;
  const int spatial_out = out_h * out_w;
  dx.data = Eigen::MatrixXf::Zero(in_c, static_cast<Eigen::Index>(batch) * spatial_in);
#pragma omp parallel for schedule(static)
  for (int n = 0; n < batch; ++n) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        const Eigen::Index j =
            static_cast<Eigen::Index>(n) * spatial_out + oy * out_w + ox;
        const float* src = dcol.data() + j * dcol.rows();
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * stride - pad + ky;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox * stride - pad + kx;
            if (iy >= 0 && iy < in_h && ix >= 0 && ix < in_w) {
              float* dst = dx.data.data() +
                           (static_cast<Eigen::Index>(n) * spatial_in + iy * in_w + ix) *
                               dx.data.rows();
              for (int c = 0; c < in_c; ++c) dst[c] += src[c];
            }
            src += in_c;
          }
        }
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv2d

Conv2d::Conv2d(std::string name, int in_channels, int out_channels, int kernel,
               int stride, int pad, RngStream& init)
    : in_c_(in_channels), out_c_(out_channels), k_(kernel), stride_(stride), pad_(pad) {
  const int fan_in = kernel * kernel * in_channels;
  weight_.name = std::move(name) + ".weight";
  weight_.shape = {out_channels, kernel * kernel * in_channels};
  weight_.value = normal_init(init, out_channels * fan_in, std::sqrt(2.0 / fan_in));
  weight_.grad = Eigen::VectorXf::Zero(weight_.value.size());
}

FeatureMap Conv2d::forward(const FeatureMap& x, bool record) {
  require(x.channels == in_c_, "Conv2d: channel mismatch");
  const int out_h = conv_out_extent(x.height, k_, stride_, pad_);
  const int out_w = conv_out_extent(x.width, k_, stride_, pad_);

  Eigen::MatrixXf local_col;
  Eigen::MatrixXf& col = record ? col_ : local_col;
  im2col(x, k_, stride_, pad_, out_h, out_w, col);
  if (record) {
    in_h_ = x.height;
    in_w_ = x.width;
    batch_ = x.batch;
  }

  Eigen::Map<const Eigen::MatrixXf> w(weight_.value.data(), out_c_, k_ * k_ * in_c_);
  FeatureMap y;
  y.batch = x.batch;
  y.channels = out_c_;
  y.height = out_h;
  y.width = out_w;
  y.data.resize(out_c_, col.cols());
  // One product per sample: equal inputs then yield bit-equal outputs at any
  // batch position (a single batched product is not position-invariant).
  const int spatial_out = out_h * out_w;
  for (int n = 0; n < x.batch; ++n) {
    const Eigen::Index base = static_cast<Eigen::Index>(n) * spatial_out;
    y.data.middleCols(base, spatial_out).noalias() =
        w * col.middleCols(base, spatial_out);
  }
  return y;
}

FeatureMap Conv2d::backward(const FeatureMap& dy) {
  require(col_.size() > 0, "Conv2d: backward without recorded forward");
  Eigen::Map<const Eigen::MatrixXf> w(weight_.value.data(), out_c_, k_ * k_ * in_c_);
  Eigen::Map<Eigen::MatrixXf> dw(weight_.grad.data(), out_c_, k_ * k_ * in_c_);
  dw.noalias() += dy.data * col_.transpose();

  const Eigen::MatrixXf dcol = w.transpose() * dy.data;
  FeatureMap dx;
  col2im(dcol, batch_, in_c_, in_h_, in_w_, k_, stride_, pad_, dy.height, dy.width, dx);
  return dx;
}

void Conv2d::collect(std::vector<Param*>& params, std::vector<Buffer*>&) {
  params.push_back(&weight_);
}

// ---------------------------------------------------------------------------
// InstanceNorm2d

InstanceNorm2d::InstanceNorm2d(std::string name, int channels) : channels_(channels) {
  gamma_.name = name + ".gamma";
  gamma_.shape = {channels};
  gamma_.value = Eigen::VectorXf::Ones(channels);
  gamma_.grad = Eigen::VectorXf::Zero(channels);
  beta_.name = name + ".beta";
  beta_.shape = {channels};
  beta_.value = Eigen::VectorXf::Zero(channels);
  beta_.grad = Eigen::VectorXf::Zero(channels);
}

FeatureMap InstanceNorm2d::forward(const FeatureMap& x, bool record) {
  require(x.channels == channels_, "InstanceNorm2d: channel mismatch");
  const int spatial = x.spatial();
  require(spatial > 0, "InstanceNorm2d: empty spatial extent");

  FeatureMap y;
  y.batch = x.batch;
  y.channels = channels_;
  y.height = x.height;
  y.width = x.width;
  y.data.resize(channels_, x.data.cols());

  // Statistics via plain sequential loops: the summation order must not
  // depend on where the sample sits in the batch, so identical images give
  // bit-identical outputs at any batch position.
  Eigen::MatrixXf inv_std(channels_, x.batch);
  Eigen::MatrixXf xhat(channels_, x.data.cols());
  std::vector<double> sum(channels_), sum_sq(channels_);
  for (int n = 0; n < x.batch; ++n) {
    const Eigen::Index base = static_cast<Eigen::Index>(n) * spatial;
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(sum_sq.begin(), sum_sq.end(), 0.0);
    for (int s = 0; s < spatial; ++s) {
      const float* col = x.data.data() + (base + s) * channels_;
      for (int c = 0; c < channels_; ++c) {
        sum[c] += col[c];
        sum_sq[c] += static_cast<double>(col[c]) * col[c];
      }
    }
    Eigen::VectorXf mean(channels_), istd(channels_);
    for (int c = 0; c < channels_; ++c) {
      const double m = sum[c] / spatial;
      const double var = std::max(sum_sq[c] / spatial - m * m, 0.0);
      mean[c] = static_cast<float>(m);
      istd[c] = static_cast<float>(1.0 / std::sqrt(var + kNormEps));
    }
    inv_std.col(n) = istd;
    auto xh = xhat.middleCols(base, spatial);
    for (int s = 0; s < spatial; ++s)
      xh.col(s) = (x.data.col(base + s) - mean).cwiseProduct(istd);
    auto out = y.data.middleCols(base, spatial);
    for (int s = 0; s < spatial; ++s)
      out.col(s) = xh.col(s).cwiseProduct(gamma_.value) + beta_.value;
  }
  if (record) {
    xhat_ = std::move(xhat);
    inv_std_ = std::move(inv_std);
    batch_ = x.batch;
    h_ = x.height;
    w_ = x.width;
  }
  return y;
}

FeatureMap InstanceNorm2d::backward(const FeatureMap& dy) {
  require(xhat_.size() > 0, "InstanceNorm2d: backward without recorded forward");
  const int spatial = h_ * w_;
  FeatureMap dx;
  dx.batch = batch_;
  dx.channels = channels_;
  dx.height = h_;
  dx.width = w_;
  dx.data.resize(channels_, dy.data.cols());

  for (int n = 0; n < batch_; ++n) {
    const auto g = dy.data.middleCols(static_cast<Eigen::Index>(n) * spatial, spatial);
    const auto xh = xhat_.middleCols(static_cast<Eigen::Index>(n) * spatial, spatial);
    const Eigen::VectorXf sum_g = g.rowwise().sum();
    const Eigen::VectorXf sum_gx = (g.cwiseProduct(xh)).rowwise().sum();
    gamma_.grad += sum_gx;
    beta_.grad += sum_g;
    const Eigen::VectorXf scale =
        gamma_.value.cwiseProduct(inv_std_.col(n)) / static_cast<float>(spatial);
    auto out = dx.data.middleCols(static_cast<Eigen::Index>(n) * spatial, spatial);
    for (int s = 0; s < spatial; ++s) {
      out.col(s) = scale.cwiseProduct(static_cast<float>(spatial) * g.col(s) - sum_g -
                                      xh.col(s).cwiseProduct(sum_gx));
    }
  }
  return dx;
}

void InstanceNorm2d::collect(std::vector<Param*>& params, std::vector<Buffer*>&) {
  params.push_back(&gamma_);
  params.push_back(&beta_);
}

// ---------------------------------------------------------------------------
// BatchNorm2d

BatchNorm2d::BatchNorm2d(std::string name, int channels, double momentum)
    : channels_(channels), momentum_(momentum) {
  gamma_.name = name + ".gamma";
  gamma_.shape = {channels};
  gamma_.value = Eigen::VectorXf::Ones(channels);
  gamma_.grad = Eigen::VectorXf::Zero(channels);
  beta_.name = name + ".beta";
  beta_.shape = {channels};
  beta_.value = Eigen::VectorXf::Zero(channels);
  beta_.grad = Eigen::VectorXf::Zero(channels);
  running_mean_.name = name + ".running_mean";
  running_mean_.value = Eigen::VectorXf::Zero(channels);
  running_var_.name = name + ".running_var";
  running_var_.value = Eigen::VectorXf::Ones(channels);
}

FeatureMap BatchNorm2d::forward(const FeatureMap& x, bool record) {
  require(x.channels == channels_, "BatchNorm2d: channel mismatch");
  const Eigen::Index cols = x.data.cols();
  require(cols > 0, "BatchNorm2d: empty input");

  FeatureMap y;
  y.batch = x.batch;
  y.channels = channels_;
  y.height = x.height;
  y.width = x.width;

  Eigen::VectorXf mean, var;
  if (training_) {
    mean = x.data.rowwise().mean();
    var = Eigen::VectorXf::Zero(channels_);
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto centered = x.data.col(j) - mean;
      var += centered.cwiseProduct(centered);
    }
    var /= static_cast<float>(cols);
    const float unbias =
        cols > 1 ? static_cast<float>(cols) / static_cast<float>(cols - 1) : 1.0f;
    running_mean_.value =
        (1.0f - static_cast<float>(momentum_)) * running_mean_.value +
        static_cast<float>(momentum_) * mean;
    running_var_.value = (1.0f - static_cast<float>(momentum_)) * running_var_.value +
                         static_cast<float>(momentum_) * (var * unbias);
  } else {
    mean = running_mean_.value;
    var = running_var_.value;
  }
  const Eigen::VectorXf istd = (var.array() + kNormEps).rsqrt();

  Eigen::MatrixXf xhat(channels_, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    xhat.col(j) = (x.data.col(j) - mean).cwiseProduct(istd);
  y.data.resize(channels_, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    y.data.col(j) = xhat.col(j).cwiseProduct(gamma_.value) + beta_.value;

  if (record) {
    require(training_, "BatchNorm2d: recorded forward requires training mode");
    xhat_ = std::move(xhat);
    inv_std_ = istd;
    batch_ = x.batch;
    h_ = x.height;
    w_ = x.width;
  }
  return y;
}

FeatureMap BatchNorm2d::backward(const FeatureMap& dy) {
  require(xhat_.size() > 0, "BatchNorm2d: backward without recorded forward");
  const Eigen::Index cols = dy.data.cols();
  const float m = static_cast<float>(cols);

  const Eigen::VectorXf sum_g = dy.data.rowwise().sum();
  const Eigen::VectorXf sum_gx = (dy.data.cwiseProduct(xhat_)).rowwise().sum();
  gamma_.grad += sum_gx;
  beta_.grad += sum_g;

  FeatureMap dx;
  dx.batch = batch_;
  dx.channels = channels_;
  dx.height = h_;
  dx.width = w_;
  dx.data.resize(channels_, cols);
  const Eigen::VectorXf scale = gamma_.value.cwiseProduct(inv_std_) / m;
  for (Eigen::Index j = 0; j < cols; ++j) {
    dx.data.col(j) = scale.cwiseProduct(m * dy.data.col(j) - sum_g -
                                        xhat_.col(j).cwiseProduct(sum_gx));
  }
  return dx;
}

void BatchNorm2d::collect(std::vector<Param*>& params, std::vector<Buffer*>& buffers) {
  params.push_back(&gamma_);
  params.push_back(&beta_);
  buffers.push_back(&running_mean_);
  buffers.push_back(&running_var_);
}

// ---------------------------------------------------------------------------
// ReLU

FeatureMap ReLU::forward(const FeatureMap& x, bool record) {
  FeatureMap y = x;
  y.data = x.data.cwiseMax(0.0f);
  if (record) out_ = y.data;
  return y;
}

FeatureMap ReLU::backward(const FeatureMap& dy) {
  require(out_.size() > 0, "ReLU: backward without recorded forward");
  FeatureMap dx = dy;
  dx.data = dy.data.cwiseProduct((out_.array() > 0.0f).cast<float>().matrix());
  return dx;
}

// ---------------------------------------------------------------------------
// MaxPool2d

MaxPool2d::MaxPool2d(int kernel, int stride, int pad)
    : k_(kernel), stride_(stride), pad_(pad) {}

FeatureMap MaxPool2d::forward(const FeatureMap& x, bool record) {
  const int out_h = conv_out_extent(x.height, k_, stride_, pad_);
  const int out_w = conv_out_extent(x.width, k_, stride_, pad_);
  const int spatial_in = x.spatial();
  const int spatial_out = out_h * out_w;

  FeatureMap y;
  y.batch = x.batch;
  y.channels = x.channels;
  y.height = out_h;
  y.width = out_w;
  y.data.resize(x.channels, static_cast<Eigen::Index>(x.batch) * spatial_out);
  Eigen::MatrixXi argmax(x.channels, static_cast<Eigen::Index>(x.batch) * spatial_out);

#pragma omp parallel for schedule(static)
  for (int n = 0; n < x.batch; ++n) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        const Eigen::Index j =
            static_cast<Eigen::Index>(n) * spatial_out + oy * out_w + ox;
        for (int c = 0; c < x.channels; ++c) {
          float best = -std::numeric_limits<float>::infinity();
          int best_idx = -1;
          for (int ky = 0; ky < k_; ++ky) {
            const int iy = oy * stride_ - pad_ + ky;
            if (iy < 0 || iy >= x.height) continue;
            for (int kx = 0; kx < k_; ++kx) {
              const int ix = ox * stride_ - pad_ + kx;
              if (ix < 0 || ix >= x.width) continue;
              const float v =
                  x.data(c, static_cast<Eigen::Index>(n) * spatial_in + iy * x.width + ix);
              if (v > best) {
                best = v;
                best_idx = iy * x.width + ix;
              }
            }
          }
          y.data(c, j) = best;
          argmax(c, j) = best_idx;
        }
      }
    }
  }
  if (record) {
    argmax_ = std::move(argmax);
    in_h_ = x.height;
    in_w_ = x.width;
    batch_ = x.batch;
    channels_ = x.channels;
  }
  return y;
}

FeatureMap MaxPool2d::backward(const FeatureMap& dy) {
  require(argmax_.size() > 0, "MaxPool2d: backward without recorded forward");
  const int spatial_in = in_h_ * in_w_;
  const int spatial_out = dy.spatial();
  FeatureMap dx;
  dx.batch = batch_;
  dx.channels = channels_;
  dx.height = in_h_;
  dx.width = in_w_;
  dx.data =
      Eigen::MatrixXf::Zero(channels_, static_cast<Eigen::Index>(batch_) * spatial_in);
#pragma omp parallel for schedule(static)
  for (int n = 0; n < batch_; ++n) {
    for (int s = 0; s < spatial_out; ++s) {
      const Eigen::Index j = static_cast<Eigen::Index>(n) * spatial_out + s;
      for (int c = 0; c < channels_; ++c) {
        const int idx = argmax_(c, j);
        if (idx >= 0)
          dx.data(c, static_cast<Eigen::Index>(n) * spatial_in + idx) += dy.data(c, j);
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// GlobalAvgPool

FeatureMap GlobalAvgPool::forward(const FeatureMap& x, bool record) {
  const int spatial = x.spatial();
  FeatureMap y;
  y.batch = x.batch;
  y.channels = x.channels;
  y.height = 1;
  y.width = 1;
  y.data.resize(x.channels, x.batch);
  std::vector<double> sum(static_cast<size_t>(x.channels));
  for (int n = 0; n < x.batch; ++n) {
    std::fill(sum.begin(), sum.end(), 0.0);
    const Eigen::Index base = static_cast<Eigen::Index>(n) * spatial;
    for (int s = 0; s < spatial; ++s) {
      const float* col = x.data.data() + (base + s) * x.channels;
      for (int c = 0; c < x.channels; ++c) sum[c] += col[c];
    }
    for (int c = 0; c < x.channels; ++c)
      y.data(c, n) = static_cast<float>(sum[c] / spatial);
  }
  if (record) {
    h_ = x.height;
    w_ = x.width;
  }
  return y;
}

FeatureMap GlobalAvgPool::backward(const FeatureMap& dy) {
  const int spatial = h_ * w_;
  FeatureMap dx;
  dx.batch = dy.batch;
  dx.channels = dy.channels;
  dx.height = h_;
  dx.width = w_;
  dx.data.resize(dy.channels, static_cast<Eigen::Index>(dy.batch) * spatial);
  const float inv = 1.0f / static_cast<float>(spatial);
  for (int n = 0; n < dy.batch; ++n) {
    const Eigen::VectorXf g = dy.data.col(n) * inv;
    auto block = dx.data.middleCols(static_cast<Eigen::Index>(n) * spatial, spatial);
    for (int s = 0; s < spatial; ++s) block.col(s) = g;
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Linear

Linear::Linear(std::string name, int in_features, int out_features, RngStream& init)
    : in_f_(in_features), out_f_(out_features) {
  weight_.name = name + ".weight";
  weight_.shape = {out_features, in_features};
  weight_.value =
      normal_init(init, out_features * in_features, std::sqrt(1.0 / in_features));
  weight_.grad = Eigen::VectorXf::Zero(weight_.value.size());
  bias_.name = name + ".bias";
  bias_.shape = {out_features};
  bias_.value = Eigen::VectorXf::Zero(out_features);
  bias_.grad = Eigen::VectorXf::Zero(out_features);
}

FeatureMap Linear::forward(const FeatureMap& x, bool record) {
  require(x.height == 1 && x.width == 1, "Linear: expects pooled 1x1 maps");
  require(x.channels == in_f_, "Linear: feature mismatch");
  if (record) input_ = x.data;
  Eigen::Map<const Eigen::MatrixXf> w(weight_.value.data(), out_f_, in_f_);
  FeatureMap y;
  y.batch = x.batch;
  y.channels = out_f_;
  y.height = 1;
  y.width = 1;
  y.data.resize(out_f_, x.batch);
  for (int n = 0; n < x.batch; ++n)
    y.data.col(n).noalias() = w * x.data.col(n) + bias_.value;
  return y;
}

FeatureMap Linear::backward(const FeatureMap& dy) {
  require(input_.size() > 0, "Linear: backward without recorded forward");
  Eigen::Map<const Eigen::MatrixXf> w(weight_.value.data(), out_f_, in_f_);
  Eigen::Map<Eigen::MatrixXf> dw(weight_.grad.data(), out_f_, in_f_);
  dw.noalias() += dy.data * input_.transpose();
  bias_.grad += dy.data.rowwise().sum();
  FeatureMap dx;
  dx.batch = dy.batch;
  dx.channels = in_f_;
  dx.height = 1;
  dx.width = 1;
  dx.data.noalias() = w.transpose() * dy.data;
  return dx;
}

void Linear::collect(std::vector<Param*>& params, std::vector<Buffer*>&) {
  params.push_back(&weight_);
  params.push_back(&bias_);
}

// ---------------------------------------------------------------------------
// L2Normalize

FeatureMap L2Normalize::forward(const FeatureMap& x, bool record) {
  FeatureMap y = x;
  Eigen::VectorXf norms(x.data.cols());
  for (Eigen::Index j = 0; j < x.data.cols(); ++j) {
    double sq = 0.0;
    for (Eigen::Index i = 0; i < x.data.rows(); ++i) {
      const double v = x.data(i, j);
      sq += v * v;
    }
    const float n = std::max(static_cast<float>(std::sqrt(sq)), 1e-12f);
    norms[j] = n;
    y.data.col(j) = x.data.col(j) / n;
  }
  if (record) {
    out_ = y.data;
    norms_ = std::move(norms);
  }
  return y;
}

FeatureMap L2Normalize::backward(const FeatureMap& dy) {
  require(out_.size() > 0, "L2Normalize: backward without recorded forward");
  FeatureMap dx = dy;
  for (Eigen::Index j = 0; j < dy.data.cols(); ++j) {
    const float proj = out_.col(j).dot(dy.data.col(j));
    dx.data.col(j) = (dy.data.col(j) - out_.col(j) * proj) / norms_[j];
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Bottleneck

Bottleneck::Bottleneck(const std::string& name, int in_channels, int mid_channels,
                       int stride, RngStream& init) {
  const int out_channels = mid_channels * kExpansion;
  main_.push_back(
      std::make_unique<Conv2d>(name + ".conv1", in_channels, mid_channels, 1, 1, 0, init));
  main_.push_back(std::make_unique<BatchNorm2d>(name + ".bn1", mid_channels));
  main_.push_back(std::make_unique<ReLU>());
  main_.push_back(std::make_unique<Conv2d>(name + ".conv2", mid_channels, mid_channels, 3,
                                           stride, 1, init));
  main_.push_back(std::make_unique<BatchNorm2d>(name + ".bn2", mid_channels));
  main_.push_back(std::make_unique<ReLU>());
  main_.push_back(std::make_unique<Conv2d>(name + ".conv3", mid_channels, out_channels, 1,
                                           1, 0, init));
  main_.push_back(std::make_unique<BatchNorm2d>(name + ".bn3", out_channels));
  if (stride != 1 || in_channels != out_channels) {
    skip_.push_back(std::make_unique<Conv2d>(name + ".downsample.conv", in_channels,
                                             out_channels, 1, stride, 0, init));
    skip_.push_back(std::make_unique<BatchNorm2d>(name + ".downsample.bn", out_channels));
  }
}

FeatureMap Bottleneck::forward(const FeatureMap& x, bool record) {
  if (record) input_ = x;
  FeatureMap m = x;
  for (auto& layer : main_) m = layer->forward(m, record);
  FeatureMap s = x;
  for (auto& layer : skip_) s = layer->forward(s, record);
  require(m.data.rows() == s.data.rows() && m.data.cols() == s.data.cols(),
          "Bottleneck: main/skip shape mismatch");
  FeatureMap y = std::move(m);
  y.data += s.data;
  y.data = y.data.cwiseMax(0.0f);
  if (record) relu_mask_ = y.data;
  return y;
}

FeatureMap Bottleneck::backward(const FeatureMap& dy) {
  require(relu_mask_.size() > 0, "Bottleneck: backward without recorded forward");
  FeatureMap dz = dy;
  dz.data = dy.data.cwiseProduct((relu_mask_.array() > 0.0f).cast<float>().matrix());

  FeatureMap dmain = dz;
  for (auto it = main_.rbegin(); it != main_.rend(); ++it)
    dmain = (*it)->backward(dmain);

  FeatureMap dskip = dz;
  for (auto it = skip_.rbegin(); it != skip_.rend(); ++it)
    dskip = (*it)->backward(dskip);

  FeatureMap dx = std::move(dmain);
  dx.data += dskip.data;
  return dx;
}

void Bottleneck::collect(std::vector<Param*>& params, std::vector<Buffer*>& buffers) {
  for (auto& layer : main_) layer->collect(params, buffers);
  for (auto& layer : skip_) layer->collect(params, buffers);
}

void Bottleneck::set_training(bool training) {
  for (auto& layer : main_) layer->set_training(training);
  for (auto& layer : skip_) layer->set_training(training);
}

}  // namespace usyf::nn
