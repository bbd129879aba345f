#pragma once

#include <memory>
#include <string>
#include <vector>

#include "usyf/config.hpp"
#include "usyf/dataset.hpp"
#include "usyf/generator.hpp"
#include "usyf/metrics.hpp"
#include "usyf/queue.hpp"
#include "usyf/score_io.hpp"

namespace usyf {

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double mean_loss = 0.0;
  double val_accuracy = 0.0;
  int steps = 0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> log;  // epochs executed by this run segment
  bool stopped_early = false;
};

// Held-out verification set built from the mock generator: clean renders
// (quantized to 8-bit like stored data), half genuine pairs (same identity,
// fresh appearance draws) interleaved with half impostor pairs so contiguous
// folds stay balanced.
struct EvalPairSet {
  std::vector<std::vector<uint8_t>> images;
  std::vector<IndexPair> pairs;
};

EvalPairSet make_mock_eval_pairs(const Generator& generator, int pair_count,
                                 uint64_t seed);

class Encoder;

// Embeds every image (eval mode) and scores each pair by cosine similarity.
std::vector<VerificationPair> score_pairs(Encoder& encoder, const EvalPairSet& set,
                                          int batch_size = 64);

// Renders each identity 'renders_per_identity' times into a record file;
// record seeds let latents be re-derived for audit.
Dataset generate_mock_dataset(const Generator& generator, int identity_count,
                              int renders_per_identity, uint64_t seed);

// The end-to-end training loop: fixed identity pool, per-epoch shuffle,
// pair generation + augmentation, query encoding, momentum update, key
// encoding, queue update, contrastive loss, SGD step; per-epoch validation
// and checkpointing.
class Trainer {
 public:
  explicit Trainer(const Config& config);
  ~Trainer();

  // Runs the remaining epochs. When out_dir is nonempty, writes
  // ckpt-<epoch>.bin + ckpt-last.bin every checkpoint_every epochs and
  // appends one JSON line per epoch to <out_dir>/log.jsonl.
  TrainResult run(const std::string& out_dir = "");

  void load(const std::string& checkpoint_path);

  Encoder& encoder();
  const NegativeQueue& queue() const;
  int next_epoch() const;
  int steps_per_epoch() const;
  double evaluate_validation();

  // Identity visit order for one epoch (test hook; the underlying pool is
  // fixed across epochs, only the order changes).
  std::vector<uint32_t> epoch_identity_order(int epoch) const;

  // Embeddings produced by the most recent training step (test hooks for the
  // queue-provenance check: only key-path embeddings may enter the queue).
  const std::vector<float>& last_query_embeddings() const;
  const std::vector<float>& last_key_embeddings() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Serialization of one epoch record as a JSON object (single line).
std::string epoch_record_to_json(const EpochRecord& record);
EpochRecord epoch_record_from_json(const std::string& line);
std::vector<EpochRecord> read_training_log(const std::string& path);

}  // namespace usyf
