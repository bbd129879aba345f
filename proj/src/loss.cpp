#include "usyf/loss.hpp"

#include <algorithm>
#include <cmath>

namespace usyf {

template <typename T>
LossResult<T> margin_nce_loss(std::span<const T> f_q, std::span<const T> f_k_plus,
                              std::span<const T> negatives, std::size_t num_negatives,
                              const LossParams& params) {
  validate_loss_params(params);
  const std::size_t dim = f_q.size();
  require(f_k_plus.size() == dim, "margin_nce_loss: positive key dimension mismatch");
  require(negatives.size() == num_negatives * dim,
          "margin_nce_loss: negatives matrix shape mismatch");

  const T tau = static_cast<T>(params.temperature);
  const T margin = static_cast<T>(params.margin);

  auto dot = [dim](std::span<const T> a, const T* b) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < dim; ++i)
      acc += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
    return static_cast<T>(acc);
  };

  // Logits: positive first, then the negatives.
  std::vector<T> logits(1 + num_negatives);
  logits[0] = (dot(f_q, f_k_plus.data()) - margin) / tau;
  for (std::size_t i = 0; i < num_negatives; ++i)
    logits[1 + i] = dot(f_q, negatives.data() + i * dim) / tau;

  const T max_logit = *std::max_element(logits.begin(), logits.end());
  T sum_exp = 0;
  for (T l : logits) sum_exp += std::exp(l - max_logit);
  const T log_z = max_logit + std::log(sum_exp);

  LossResult<T> result;
  result.loss = log_z - logits[0];

  // dL/ds+ = (p+ - 1)/tau, dL/ds_i = p_i/tau; chain through the dot products.
  result.grad_query.assign(dim, T(0));
  const T p_pos = std::exp(logits[0] - log_z);
  const T w_pos = (p_pos - T(1)) / tau;
  for (std::size_t d = 0; d < dim; ++d) result.grad_query[d] += w_pos * f_k_plus[d];
  for (std::size_t i = 0; i < num_negatives; ++i) {
    const T w = std::exp(logits[1 + i] - log_z) / tau;
    const T* neg = negatives.data() + i * dim;
    for (std::size_t d = 0; d < dim; ++d) result.grad_query[d] += w * neg[d];
  }
  return result;
}

BatchLossResult margin_nce_batch(std::span<const float> queries,
                                 std::span<const float> keys,
                                 std::span<const float> negatives, std::size_t batch,
                                 std::size_t num_negatives, std::size_t dim,
                                 const LossParams& params) {
  validate_loss_params(params);
  require(queries.size() == batch * dim, "margin_nce_batch: queries shape mismatch");
  require(keys.size() == batch * dim, "margin_nce_batch: keys shape mismatch");
  require(negatives.size() == num_negatives * dim,
          "margin_nce_batch: negatives shape mismatch");
  require(batch >= 1, "margin_nce_batch: empty batch");

  BatchLossResult out;
  out.grad_queries.assign(batch * dim, 0.0f);
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const auto r = margin_nce_loss<float>(queries.subspan(b * dim, dim),
                                          keys.subspan(b * dim, dim), negatives,
                                          num_negatives, params);
    total += r.loss;
    const float inv_b = 1.0f / static_cast<float>(batch);
    for (std::size_t d = 0; d < dim; ++d)
      out.grad_queries[b * dim + d] = r.grad_query[d] * inv_b;
  }
  out.mean_loss = total / static_cast<double>(batch);
  return out;
}

template LossResult<float> margin_nce_loss<float>(std::span<const float>,
                                                  std::span<const float>,
                                                  std::span<const float>, std::size_t,
                                                  const LossParams&);
template LossResult<double> margin_nce_loss<double>(std::span<const double>,
                                                    std::span<const double>,
                                                    std::span<const double>, std::size_t,
                                                    const LossParams&);

}  // namespace usyf
