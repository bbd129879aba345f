#include "usyf/queue.hpp"

#include <cmath>
#include <cstring>

#include "usyf/common.hpp"
#include "usyf/embedding.hpp"

namespace usyf {

NegativeQueue::NegativeQueue(std::size_t capacity, std::size_t dim)
    : capacity_(capacity), dim_(dim), storage_(capacity * dim, 0.0f) {
  require(capacity >= 1, "NegativeQueue: capacity must be >= 1");
  require(dim >= 1, "NegativeQueue: dim must be >= 1");
}

void NegativeQueue::push(std::span<const float> batch, std::size_t batch_size) {
  require(batch_size <= capacity_,
          "NegativeQueue::push: batch larger than queue capacity");
  require(batch.size() == batch_size * dim_, "NegativeQueue::push: batch shape mismatch");
  for (std::size_t i = 0; i < batch_size; ++i) {
    std::memcpy(storage_.data() + cursor_ * dim_, batch.data() + i * dim_,
                dim_ * sizeof(float));
    cursor_ = (cursor_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
  }
}

std::vector<float> NegativeQueue::snapshot() const {
  std::vector<float> out(size_ * dim_);
  // Oldest entry sits at cursor_ when full, at 0 otherwise.
  const std::size_t start = (size_ == capacity_) ? cursor_ : 0;
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t slot = (start + i) % capacity_;
    std::memcpy(out.data() + i * dim_, storage_.data() + slot * dim_,
                dim_ * sizeof(float));
  }
  return out;
}

void NegativeQueue::fill_random(RngStream& rng) {
  std::vector<float> entry(dim_);
  for (std::size_t i = 0; i < capacity_; ++i) {
    for (auto& x : entry) x = static_cast<float>(rng.normal());
    const auto unit = l2_normalize(entry);
    std::memcpy(storage_.data() + i * dim_, unit.data(), dim_ * sizeof(float));
  }
  size_ = capacity_;
  cursor_ = 0;
}

NegativeQueue NegativeQueue::restore(std::size_t capacity, std::size_t dim,
                                     std::vector<float> storage, std::size_t cursor,
                                     std::size_t size) {
  require(storage.size() == capacity * dim, "NegativeQueue::restore: storage size mismatch");
  require(cursor < capacity || (cursor == 0 && capacity > 0),
          "NegativeQueue::restore: cursor out of range");
  require(size <= capacity, "NegativeQueue::restore: size exceeds capacity");
  NegativeQueue q(capacity, dim);
  q.storage_ = std::move(storage);
  q.cursor_ = cursor;
  q.size_ = size;
  return q;
}

}  // namespace usyf
