#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "usyf/rng.hpp"

namespace usyf {

// Fixed-capacity FIFO of key embeddings. Entries leave in exactly the order
// they entered; pushing a batch onto a full queue evicts the oldest batch.
class NegativeQueue {
 public:
  NegativeQueue(std::size_t capacity, std::size_t dim);

  std::size_t capacity() const { return capacity_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return size_; }

  // batch is row-major (batch_size x dim). batch_size must not exceed the
  // capacity.
  void push(std::span<const float> batch, std::size_t batch_size);

  // Entries oldest to newest, row-major (size() x dim).
  std::vector<float> snapshot() const;

  // Fills to capacity with random unit vectors (pre-training warm state).
  void fill_random(RngStream& rng);

  // Raw state for checkpointing; storage is the ring buffer as stored.
  const std::vector<float>& storage() const { return storage_; }
  std::size_t cursor() const { return cursor_; }
  static NegativeQueue restore(std::size_t capacity, std::size_t dim,
                               std::vector<float> storage, std::size_t cursor,
                               std::size_t size);

 private:
  std::size_t capacity_;
  std::size_t dim_;
  std::size_t size_ = 0;    // valid entries, <= capacity
  std::size_t cursor_ = 0;  // next write slot
  std::vector<float> storage_;
};

}  // namespace usyf
