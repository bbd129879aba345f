#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "usyf/common.hpp"

namespace usyf {

// Unit-L2 feature vector; the default training dimension is 512.
using Embedding = std::vector<float>;

template <typename T>
std::vector<T> l2_normalize(std::span<const T> v) {
  long double sq = 0.0L;
  for (T x : v) sq += static_cast<long double>(x) * x;
  require(sq > 0.0L, "l2_normalize: degenerate input (zero vector)");
  const T inv = static_cast<T>(1.0L / std::sqrt(sq));
  std::vector<T> out(v.begin(), v.end());
  for (T& x : out) x *= inv;
  return out;
}

inline std::vector<float> l2_normalize(const std::vector<float>& v) {
  return l2_normalize(std::span<const float>(v));
}
inline std::vector<double> l2_normalize(const std::vector<double>& v) {
  return l2_normalize(std::span<const double>(v));
}

template <typename T>
double cosine_score(std::span<const T> a, std::span<const T> b) {
  require(a.size() == b.size(), "cosine_score: dimension mismatch");
  long double dot = 0.0L;
  for (size_t i = 0; i < a.size(); ++i)
    dot += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
  return static_cast<double>(dot);
}

inline double cosine_score(const std::vector<float>& a, const std::vector<float>& b) {
  return cosine_score(std::span<const float>(a), std::span<const float>(b));
}

inline bool is_unit_norm(std::span<const float> v, double tol = 1e-5) {
  long double sq = 0.0L;
  for (float x : v) sq += static_cast<long double>(x) * x;
  return std::fabs(std::sqrt(static_cast<double>(sq)) - 1.0) <= tol;
}

}  // namespace usyf
