#pragma once

#include <span>
#include <vector>

#include "usyf/common.hpp"

namespace usyf {

struct LossParams {
  double temperature = 0.07;
  double margin = 0.10;
  double momentum_coefficient = 0.999;
};

inline void validate_loss_params(const LossParams& p) {
  require(p.temperature > 0.0, "loss params: temperature must be > 0");
  require(p.margin >= 0.0, "loss params: margin must be >= 0");
  require(p.momentum_coefficient >= 0.0 && p.momentum_coefficient <= 1.0,
          "loss params: momentum coefficient must be in [0, 1]");
}

template <typename T>
struct LossResult {
  T loss;
  std::vector<T> grad_query;  // d(loss)/d(f_q); keys are treated as constants
};

// Contrastive loss with a margin subtracted from the positive similarity:
//
//   L = -log( exp((s+ - m)/t) / (exp((s+ - m)/t) + sum_i exp(s_i/t)) )
//
// with s+ = f_q . f_k+ and s_i = f_q . f_neg_i, computed with log-sum-exp
// stabilization. `negatives` is a row-major (num_negatives x dim) matrix and
// may be empty, in which case the loss is exactly zero.
template <typename T>
LossResult<T> margin_nce_loss(std::span<const T> f_q, std::span<const T> f_k_plus,
                              std::span<const T> negatives, std::size_t num_negatives,
                              const LossParams& params);

extern template LossResult<float> margin_nce_loss<float>(std::span<const float>,
                                                         std::span<const float>,
                                                         std::span<const float>,
                                                         std::size_t, const LossParams&);
extern template LossResult<double> margin_nce_loss<double>(std::span<const double>,
                                                           std::span<const double>,
                                                           std::span<const double>,
                                                           std::size_t, const LossParams&);

// Batched form used by the training step: row-major queries and keys
// (batch x dim), shared negatives (num_negatives x dim). Loss is the
// arithmetic mean over queries and the gradient carries the 1/batch factor.
struct BatchLossResult {
  double mean_loss;
  std::vector<float> grad_queries;  // batch x dim, row-major
};

BatchLossResult margin_nce_batch(std::span<const float> queries,
                                 std::span<const float> keys,
                                 std::span<const float> negatives, std::size_t batch,
                                 std::size_t num_negatives, std::size_t dim,
                                 const LossParams& params);

// Convenience overload for a list of negative embeddings.
template <typename T>
LossResult<T> margin_nce_loss(const std::vector<T>& f_q, const std::vector<T>& f_k_plus,
                              const std::vector<std::vector<T>>& negatives,
                              const LossParams& params) {
  std::vector<T> flat;
  flat.reserve(negatives.size() * f_q.size());
  for (const auto& n : negatives) {
    require(n.size() == f_q.size(), "margin_nce_loss: negative dimension mismatch");
    flat.insert(flat.end(), n.begin(), n.end());
  }
  return margin_nce_loss<T>(std::span<const T>(f_q), std::span<const T>(f_k_plus),
                            std::span<const T>(flat), negatives.size(), params);
}

}  // namespace usyf
