#include <doctest.h>

#include <cmath>
#include <deque>
#include <random>

#include "usyf/common.hpp"
#include "usyf/embedding.hpp"
#include "usyf/encoder.hpp"
#include "usyf/loss.hpp"
#include "usyf/queue.hpp"
#include "usyf/rng.hpp"

using namespace usyf;

namespace {

std::vector<double> random_unit(RngStream& rng, int dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.normal();
  return l2_normalize(v);
}

// Independent oracle: plain softmax cross-entropy of the logits against
// index 0, computed without the log-sum-exp path used by the implementation.
double cross_entropy_oracle(const std::vector<double>& logits) {
  long double denom = 0.0L;
  for (double l : logits) denom += std::exp(static_cast<long double>(l));
  return static_cast<double>(-(static_cast<long double>(logits[0]) - std::log(denom)));
}

}  // namespace

TEST_CASE("l2_normalize: examples and norm oracle") {
  const std::vector<double> v({3.0, 4.0});
  const auto unit = l2_normalize(v);
  CHECK(unit[0] == doctest::Approx(0.6));
  CHECK(unit[1] == doctest::Approx(0.8));

  const auto again = l2_normalize(unit);
  CHECK(again[0] == doctest::Approx(unit[0]).epsilon(1e-12));
  CHECK(again[1] == doctest::Approx(unit[1]).epsilon(1e-12));

  RngStream rng(3);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(17);
    for (auto& e : x) e = rng.normal() * 10.0;
    const auto n = l2_normalize(x);
    long double sq = 0.0L;
    for (double e : n) sq += static_cast<long double>(e) * e;
    CHECK(std::fabs(std::sqrt(static_cast<double>(sq)) - 1.0) < 1e-6);
  }

  const std::vector<double> zero(8, 0.0);
  CHECK_THROWS_AS(l2_normalize(zero), ContractError);
}

TEST_CASE("cosine_score: examples and symmetry") {
  RngStream rng(5);
  const auto v = random_unit(rng, 16);
  CHECK(cosine_score<double>(v, v) == doctest::Approx(1.0));
  auto neg = v;
  for (auto& x : neg) x = -x;
  CHECK(cosine_score<double>(v, neg) == doctest::Approx(-1.0));

  std::vector<double> e1(4, 0.0), e2(4, 0.0);
  e1[0] = 1.0;
  e2[1] = 1.0;
  CHECK(cosine_score<double>(e1, e2) == 0.0);

  const auto w = random_unit(rng, 16);
  CHECK(cosine_score<double>(v, w) == cosine_score<double>(w, v));

  std::vector<double> short_vec(3, 1.0);
  CHECK_THROWS_AS(cosine_score<double>(v, short_vec), ContractError);
}

TEST_CASE("margin_nce_loss: no negatives means zero loss") {
  RngStream rng(7);
  for (double m : {0.0, 0.1, 0.5}) {
    for (double tau : {0.07, 1.0, 3.0}) {
      const auto q = random_unit(rng, 8);
      const auto k = random_unit(rng, 8);
      const auto r = margin_nce_loss<double>(q, k, {}, {tau, m, 0.999});
      CHECK(r.loss == 0.0);
      for (double g : r.grad_query) CHECK(g == 0.0);
    }
  }
}

TEST_CASE("margin_nce_loss: scalar arithmetic oracle") {
  // s+ = 1, one negative with s- = 0, m = 0, tau = 1: loss = log(1 + e^-1).
  const std::vector<double> q = {1.0, 0.0};
  const std::vector<double> k = {1.0, 0.0};
  const std::vector<std::vector<double>> negs = {{0.0, 1.0}};
  const auto r = margin_nce_loss<double>(q, k, negs, {1.0, 0.0, 0.999});
  CHECK(r.loss == doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-12));
  CHECK(r.loss == doctest::Approx(0.313262).epsilon(1e-5));
}

TEST_CASE("margin_nce_loss: m=0 equals softmax cross-entropy on 1000 instances") {
  RngStream rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 8, num_neg = 16;
    const auto q = random_unit(rng, dim);
    const auto k = random_unit(rng, dim);
    std::vector<std::vector<double>> negs;
    for (int i = 0; i < num_neg; ++i) negs.push_back(random_unit(rng, dim));
    const double tau = 0.07;
    const auto r = margin_nce_loss<double>(q, k, negs, {tau, 0.0, 0.999});

    std::vector<double> logits;
    logits.push_back(cosine_score<double>(q, k) / tau);
    for (const auto& n : negs) logits.push_back(cosine_score<double>(q, n) / tau);
    CHECK(std::fabs(r.loss - cross_entropy_oracle(logits)) < 1e-6);
  }
}

TEST_CASE("margin_nce_loss: analytic gradient matches central differences") {
  RngStream rng(13);
  const LossParams params{0.07, 0.1, 0.999};
  const int dim = 8, num_neg = 16;
  double max_rel_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto q = random_unit(rng, dim);
    const auto k = random_unit(rng, dim);
    std::vector<double> negs_flat;
    for (int i = 0; i < num_neg; ++i) {
      const auto n = random_unit(rng, dim);
      negs_flat.insert(negs_flat.end(), n.begin(), n.end());
    }
    const auto r = margin_nce_loss<double>(q, k, negs_flat, num_neg, params);
    const double h = 1e-4;
    for (int d = 0; d < dim; ++d) {
      auto qp = q, qm = q;
      qp[d] += h;
      qm[d] -= h;
      const double lp = margin_nce_loss<double>(qp, k, negs_flat, num_neg, params).loss;
      const double lm = margin_nce_loss<double>(qm, k, negs_flat, num_neg, params).loss;
      const double fd = (lp - lm) / (2 * h);
      const double denom = std::max({std::fabs(fd), std::fabs(r.grad_query[d]), 1e-8});
      max_rel_err = std::max(max_rel_err, std::fabs(fd - r.grad_query[d]) / denom);
    }
  }
  CHECK(max_rel_err < 1e-4);
}

TEST_CASE("margin_nce_loss: loss is nondecreasing in the margin") {
  RngStream rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto q = random_unit(rng, 8);
    const auto k = random_unit(rng, 8);
    std::vector<std::vector<double>> negs;
    for (int i = 0; i < 8; ++i) negs.push_back(random_unit(rng, 8));
    double prev = -1.0;
    for (double m : {0.0, 0.05, 0.1, 0.15, 0.2, 0.5}) {
      const double loss = margin_nce_loss<double>(q, k, negs, {0.07, m, 0.999}).loss;
      CHECK(loss >= prev);
      prev = loss;
    }
  }
}

TEST_CASE("margin_nce_loss: temperature limit follows the sign of the gap") {
  const std::vector<double> q = {1.0, 0.0};
  const std::vector<double> k = {1.0, 0.0};

  // s+ - m = 0.9 > s- = 0.2: loss collapses to 0 as tau shrinks.
  std::vector<std::vector<double>> weak = {{0.2, std::sqrt(1.0 - 0.04)}};
  const double low = margin_nce_loss<double>(q, k, weak, {1e-3, 0.1, 0.999}).loss;
  CHECK(low < 1e-6);

  // s+ - m = 0.9 < s- = 0.95: loss blows up as tau shrinks.
  std::vector<std::vector<double>> strong = {{0.95, std::sqrt(1.0 - 0.95 * 0.95)}};
  const double high = margin_nce_loss<double>(q, k, strong, {1e-3, 0.1, 0.999}).loss;
  CHECK(high > 25.0);
}

TEST_CASE("margin_nce_loss: parameter and shape contracts") {
  const std::vector<double> q = {1.0, 0.0};
  const std::vector<double> k = {1.0, 0.0};
  CHECK_THROWS_AS(margin_nce_loss<double>(q, k, {}, {0.0, 0.1, 0.999}), ContractError);
  CHECK_THROWS_AS(margin_nce_loss<double>(q, k, {}, {-1.0, 0.1, 0.999}), ContractError);
  const std::vector<double> bad_k = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(margin_nce_loss<double>(q, bad_k, {}, {0.07, 0.1, 0.999}),
                  ContractError);
  const std::vector<std::vector<double>> bad_negs = {{1.0}};
  CHECK_THROWS_AS(margin_nce_loss<double>(q, k, bad_negs, {0.07, 0.1, 0.999}),
                  ContractError);
}

TEST_CASE("margin_nce_batch agrees with the per-query loss") {
  RngStream rng(19);
  const std::size_t batch = 6, dim = 8, num_neg = 16;
  std::vector<float> queries, keys, negs;
  auto fill_unit = [&](std::vector<float>& dst) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.normal();
    const auto u = l2_normalize(v);
    for (double x : u) dst.push_back(static_cast<float>(x));
  };
  for (std::size_t b = 0; b < batch; ++b) fill_unit(queries);
  for (std::size_t b = 0; b < batch; ++b) fill_unit(keys);
  for (std::size_t i = 0; i < num_neg; ++i) fill_unit(negs);

  const LossParams params{0.07, 0.1, 0.999};
  const auto batched =
      margin_nce_batch(queries, keys, negs, batch, num_neg, dim, params);

  double mean = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const auto single = margin_nce_loss<float>(
        std::span<const float>(queries.data() + b * dim, dim),
        std::span<const float>(keys.data() + b * dim, dim), negs, num_neg, params);
    mean += single.loss;
    for (std::size_t d = 0; d < dim; ++d)
      CHECK(batched.grad_queries[b * dim + d] ==
            doctest::Approx(single.grad_query[d] / batch).epsilon(1e-6));
  }
  CHECK(batched.mean_loss == doctest::Approx(mean / batch).epsilon(1e-9));
}

TEST_CASE("momentum_update: fixed points and forced value") {
  std::vector<double> mom = {1.0, 2.0, 3.0};
  const std::vector<double> enc = {4.0, 5.0, 6.0};

  auto m1 = mom;
  momentum_update(std::span<double>(m1), std::span<const double>(enc), 1.0);
  CHECK(m1 == mom);  // mc = 1 leaves the momentum weights unchanged

  auto m0 = mom;
  momentum_update(std::span<double>(m0), std::span<const double>(enc), 0.0);
  CHECK(m0 == enc);  // mc = 0 copies the encoder

  std::vector<double> z = {0.0};
  const std::vector<double> one = {1.0};
  momentum_update(std::span<double>(z), std::span<const double>(one), 0.999);
  CHECK(z[0] == doctest::Approx(0.001).epsilon(1e-12));

  std::vector<double> short_vec = {0.0};
  CHECK_THROWS_AS(
      momentum_update(std::span<double>(short_vec), std::span<const double>(enc), 0.5),
      ContractError);
}

TEST_CASE("momentum_update: geometric convergence to a fixed target") {
  RngStream rng(23);
  const int dim = 64;
  std::vector<double> mom(dim), target(dim);
  for (auto& x : mom) x = rng.normal();
  for (auto& x : target) x = rng.normal();

  double initial = 0.0;
  for (int i = 0; i < dim; ++i)
    initial += (mom[i] - target[i]) * (mom[i] - target[i]);
  initial = std::sqrt(initial);

  const double mc = 0.999;
  const int steps = 1000;
  for (int t = 0; t < steps; ++t)
    momentum_update(std::span<double>(mom), std::span<const double>(target), mc);

  double remaining = 0.0;
  for (int i = 0; i < dim; ++i)
    remaining += (mom[i] - target[i]) * (mom[i] - target[i]);
  remaining = std::sqrt(remaining);

  const double expected = std::pow(mc, steps) * initial;
  CHECK(std::fabs(remaining - expected) / expected < 1e-6);
}

TEST_CASE("queue: FIFO semantics on the worked example") {
  NegativeQueue q(4, 2);
  const auto push1 = [&](float tag) {
    const std::vector<float> e = {tag, -tag};
    q.push(e, 1);
  };
  push1(1.0f);  // a
  push1(2.0f);  // b
  push1(3.0f);  // c
  push1(4.0f);  // d
  const std::vector<float> ef = {5.0f, -5.0f, 6.0f, -6.0f};
  q.push(ef, 2);
  const auto snap = q.snapshot();
  const std::vector<float> expected = {3.0f, -3.0f, 4.0f, -4.0f,
                                       5.0f, -5.0f, 6.0f, -6.0f};
  CHECK(snap == expected);
  CHECK(q.size() == 4);
}

TEST_CASE("queue: warm-up length and oversized batch rejection") {
  NegativeQueue q(4, 3);
  const std::vector<float> two(6, 1.0f);
  q.push(two, 2);
  CHECK(q.size() == 2);
  const std::vector<float> five(15, 1.0f);
  CHECK_THROWS_AS(q.push(five, 5), ContractError);
}

TEST_CASE("queue: randomized pushes match a reference deque") {
  RngStream rng(29);
  const std::size_t capacity = 16, dim = 3;
  NegativeQueue q(capacity, dim);
  std::deque<std::vector<float>> oracle;
  float counter = 0.0f;
  for (int round = 0; round < 500; ++round) {
    const std::size_t batch = 1 + rng.uniform_int(8);  // batch sizes 1..8
    std::vector<float> flat;
    for (std::size_t i = 0; i < batch; ++i) {
      std::vector<float> e(dim);
      for (auto& x : e) x = counter++;
      oracle.push_back(e);
      flat.insert(flat.end(), e.begin(), e.end());
    }
    q.push(flat, batch);
    while (oracle.size() > capacity) oracle.pop_front();

    REQUIRE(q.size() <= capacity);
    REQUIRE(q.size() == oracle.size());
    const auto snap = q.snapshot();
    for (std::size_t i = 0; i < oracle.size(); ++i)
      for (std::size_t d = 0; d < dim; ++d)
        REQUIRE(snap[i * dim + d] == oracle[i][d]);
  }
}

TEST_CASE("queue: random fill produces unit vectors at capacity") {
  NegativeQueue q(8, 16);
  RngStream rng(31);
  q.fill_random(rng);
  CHECK(q.size() == 8);
  const auto snap = q.snapshot();
  for (int i = 0; i < 8; ++i) {
    const std::span<const float> e(snap.data() + i * 16, 16);
    CHECK(is_unit_norm(e, 1e-5));
  }
}
