#include "usyf/trainer.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <utility>

#include "usyf/augment.hpp"
#include "usyf/checkpoint.hpp"
#include "usyf/common.hpp"
#include "usyf/embedding.hpp"
#include "usyf/encoder.hpp"
#include "usyf/loss.hpp"
#include "usyf/schedule.hpp"

namespace usyf {

namespace {

// Tags for deriving independent random streams from the root seed. Every
// per-sample stream depends only on (seed, epoch, position), so resumed runs
// replay the exact same data.
constexpr uint64_t kTagIdentityPool = 0x10;
constexpr uint64_t kTagShuffle = 0x11;
constexpr uint64_t kTagSample = 0x12;
constexpr uint64_t kTagInit = 0x13;
constexpr uint64_t kTagQueue = 0x14;
constexpr uint64_t kTagVal = 0x15;
constexpr uint64_t kTagShuffleBn = 0x16;
constexpr uint64_t kTagDatasetIdentity = 0x17;
constexpr uint64_t kTagRender = 0x18;
constexpr uint64_t kTagEvalGenuine = 0x19;
constexpr uint64_t kTagEvalImpostor = 0x1a;

struct PairBatch {
  std::vector<float> queries;  // batch * kImageValues
  std::vector<float> keys;
};

std::vector<float> draw_identity(RngStream& rng) {
  std::vector<float> z(kIdentityDim);
  for (auto& x : z) x = static_cast<float>(rng.normal());
  return z;
}

// Renders are quantized to 8 bits before use, matching stored datasets.
FaceImage quantized(const FaceImage& image) { return image_from_u8(image_to_u8(image)); }

class PairSource {
 public:
  virtual ~PairSource() = default;
  virtual int identity_count() const = 0;
  virtual std::vector<uint32_t> epoch_order(int epoch) const = 0;
  virtual PairBatch make_batch(int epoch, int step, int batch_size) const = 0;
};

class MockPairSource : public PairSource {
 public:
  MockPairSource(const Config& config, const Generator& generator)
      : config_(config),
        generator_(generator),
        policy_(policy_from_config(config)),
        identities_(sample_identity_latents(
            static_cast<std::size_t>(config.identity_count),
            derive_seed(config.seed, {kTagIdentityPool}))) {}

  int identity_count() const override { return config_.identity_count; }

  std::vector<uint32_t> epoch_order(int epoch) const override {
    std::vector<uint32_t> order(identities_.size());
    std::iota(order.begin(), order.end(), 0u);
    RngStream rng(derive_seed(config_.seed, {kTagShuffle, static_cast<uint64_t>(epoch)}));
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = rng.uniform_int(i);
      std::swap(order[i - 1], order[j]);
    }
    return order;
  }

  PairBatch make_batch(int epoch, int step, int batch_size) const override {
    const auto order = epoch_order(epoch);
    PairBatch batch;
    batch.queries.resize(static_cast<std::size_t>(batch_size) * kImageValues);
    batch.keys.resize(static_cast<std::size_t>(batch_size) * kImageValues);
    const bool vary_appearance = config_.pair_mode == "appearance_varying";
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < batch_size; ++j) {
      const std::size_t g = static_cast<std::size_t>(step) * batch_size + j;
      const auto& z_id = identities_[order[g]];
      RngStream rng(derive_seed(
          config_.seed, {kTagSample, static_cast<uint64_t>(epoch), static_cast<uint64_t>(g)}));
      FaceImage q, k;
      if (vary_appearance) {
        PairSample sample = generate_pair(generator_, z_id, rng);
        q = quantized(sample.query);
        k = quantized(sample.key);
      } else {
        // Appearance-fixed baseline: one render, two augmented views.
        const auto appearance = sample_appearance(rng);
        q = quantized(generator_.render(make_generator_input(z_id, appearance)));
        k = q;
      }
      q = rand_augment(q, policy_, rng);
      k = rand_augment(k, policy_, rng);
      std::copy(q.pixels.begin(), q.pixels.end(),
                batch.queries.begin() + static_cast<std::size_t>(j) * kImageValues);
      std::copy(k.pixels.begin(), k.pixels.end(),
                batch.keys.begin() + static_cast<std::size_t>(j) * kImageValues);
    }
    return batch;
  }

 private:
  const Config& config_;
  const Generator& generator_;
  AugmentationPolicy policy_;
  std::vector<std::vector<float>> identities_;
};

class DatasetPairSource : public PairSource {
 public:
  explicit DatasetPairSource(const Config& config)
      : config_(config), policy_(policy_from_config(config)) {
    data_ = read_dataset(config.dataset);
    require(data_.height == kImageSize && data_.width == kImageSize &&
                data_.channels == kImageChannels,
            "dataset source: record dims must be 112x112x3");
    const int rpi = config.renders_per_identity;
    require(rpi >= 1, "dataset source: renders_per_identity must be >= 1");
    require(!data_.records.empty(), "dataset source: empty dataset");
    require(data_.records.size() % static_cast<std::size_t>(rpi) == 0,
            "dataset source: record count not divisible by renders_per_identity");
    identity_count_ = static_cast<int>(data_.records.size()) / rpi;
    // Renders of one identity share the identity seed.
    for (int i = 0; i < identity_count_; ++i)
      for (int r = 1; r < rpi; ++r)
        require(data_.records[static_cast<std::size_t>(i) * rpi + r].seed ==
                    data_.records[static_cast<std::size_t>(i) * rpi].seed,
                "dataset source: inconsistent identity grouping (record seeds differ)");
  }

  int identity_count() const override { return identity_count_; }

  std::vector<uint32_t> epoch_order(int epoch) const override {
    std::vector<uint32_t> order(static_cast<std::size_t>(identity_count_));
    std::iota(order.begin(), order.end(), 0u);
    RngStream rng(derive_seed(config_.seed, {kTagShuffle, static_cast<uint64_t>(epoch)}));
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = rng.uniform_int(i);
      std::swap(order[i - 1], order[j]);
    }
    return order;
  }

  PairBatch make_batch(int epoch, int step, int batch_size) const override {
    const auto order = epoch_order(epoch);
    const int rpi = config_.renders_per_identity;
    const bool vary_appearance = config_.pair_mode == "appearance_varying" && rpi >= 2;
    PairBatch batch;
    batch.queries.resize(static_cast<std::size_t>(batch_size) * kImageValues);
    batch.keys.resize(static_cast<std::size_t>(batch_size) * kImageValues);
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < batch_size; ++j) {
      const std::size_t g = static_cast<std::size_t>(step) * batch_size + j;
      const std::size_t base = static_cast<std::size_t>(order[g]) * rpi;
      RngStream rng(derive_seed(
          config_.seed, {kTagSample, static_cast<uint64_t>(epoch), static_cast<uint64_t>(g)}));
      std::size_t r1 = rng.uniform_int(static_cast<uint64_t>(rpi));
      std::size_t r2 = r1;
      if (vary_appearance) {
        r2 = rng.uniform_int(static_cast<uint64_t>(rpi - 1));
        if (r2 >= r1) ++r2;
      }
      FaceImage q = image_from_u8(data_.records[base + r1].pixels);
      FaceImage k = image_from_u8(data_.records[base + r2].pixels);
      q = rand_augment(q, policy_, rng);
      k = rand_augment(k, policy_, rng);
      std::copy(q.pixels.begin(), q.pixels.end(),
                batch.queries.begin() + static_cast<std::size_t>(j) * kImageValues);
      std::copy(k.pixels.begin(), k.pixels.end(),
                batch.keys.begin() + static_cast<std::size_t>(j) * kImageValues);
    }
    return batch;
  }

 private:
  const Config& config_;
  AugmentationPolicy policy_;
  Dataset data_;
  int identity_count_ = 0;
};

}  // namespace

EvalPairSet make_mock_eval_pairs(const Generator& generator, int pair_count,
                                 uint64_t seed) {
  require(pair_count >= 2 && pair_count % 2 == 0,
          "make_mock_eval_pairs: pair_count must be even and >= 2");
  const int n_each = pair_count / 2;
  EvalPairSet set;
  set.images.resize(static_cast<std::size_t>(pair_count) * 2);
  set.pairs.resize(static_cast<std::size_t>(pair_count));

#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < n_each; ++j) {
    {  // genuine pair: one identity, two appearance draws
      RngStream rng(derive_seed(seed, {kTagEvalGenuine, static_cast<uint64_t>(j)}));
      const auto z_id = draw_identity(rng);
      const PairSample sample = generate_pair(generator, z_id, rng);
      const std::size_t idx = static_cast<std::size_t>(2 * j) * 2;
      set.images[idx] = image_to_u8(sample.query);
      set.images[idx + 1] = image_to_u8(sample.key);
      set.pairs[static_cast<std::size_t>(2 * j)] = {idx, idx + 1, true};
    }
    {  // impostor pair: two fresh identities, one render each
      RngStream rng(derive_seed(seed, {kTagEvalImpostor, static_cast<uint64_t>(j)}));
      const auto id_a = draw_identity(rng);
      const auto id_b = draw_identity(rng);
      const auto app_a = sample_appearance(rng);
      const auto app_b = sample_appearance(rng);
      const std::size_t idx = static_cast<std::size_t>(2 * j + 1) * 2;
      set.images[idx] = image_to_u8(generator.render(make_generator_input(id_a, app_a)));
      set.images[idx + 1] =
          image_to_u8(generator.render(make_generator_input(id_b, app_b)));
      set.pairs[static_cast<std::size_t>(2 * j + 1)] = {idx, idx + 1, false};
    }
  }
  return set;
}

std::vector<VerificationPair> score_pairs(Encoder& encoder, const EvalPairSet& set,
                                          int batch_size) {
  require(batch_size >= 1, "score_pairs: batch_size must be >= 1");
  encoder.set_training(false);
  const int dim = encoder.embed_dim();
  std::vector<float> embeddings(set.images.size() * static_cast<std::size_t>(dim));
  std::vector<float> buffer;
  for (std::size_t start = 0; start < set.images.size();
       start += static_cast<std::size_t>(batch_size)) {
    const int n = static_cast<int>(
        std::min<std::size_t>(batch_size, set.images.size() - start));
    buffer.assign(static_cast<std::size_t>(n) * kImageValues, 0.0f);
    for (int i = 0; i < n; ++i) {
      const auto img = image_from_u8(set.images[start + i]);
      std::copy(img.pixels.begin(), img.pixels.end(),
                buffer.begin() + static_cast<std::size_t>(i) * kImageValues);
    }
    const auto out = encoder.forward(buffer, n, false);
    std::copy(out.begin(), out.end(),
              embeddings.begin() + start * static_cast<std::size_t>(dim));
  }
  encoder.set_training(true);

  std::vector<VerificationPair> scored(set.pairs.size());
  for (std::size_t i = 0; i < set.pairs.size(); ++i) {
    const auto& p = set.pairs[i];
    const std::span<const float> a(embeddings.data() + p.a * dim, static_cast<size_t>(dim));
    const std::span<const float> b(embeddings.data() + p.b * dim, static_cast<size_t>(dim));
    scored[i] = {cosine_score(a, b), p.genuine};
  }
  return scored;
}

Dataset generate_mock_dataset(const Generator& generator, int identity_count,
                              int renders_per_identity, uint64_t seed) {
  require(identity_count >= 1, "generate_mock_dataset: identity_count must be >= 1");
  require(renders_per_identity >= 1,
          "generate_mock_dataset: renders_per_identity must be >= 1");
  Dataset dataset;
  dataset.records.resize(static_cast<std::size_t>(identity_count) * renders_per_identity);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < identity_count; ++i) {
    // The record seed is the identity seed shared by all renders of identity
    // i; z_id regenerates from it directly, the appearance of render r from
    // derive_seed(record_seed, {kTagRender, r}).
    const uint64_t id_seed =
        derive_seed(seed, {kTagDatasetIdentity, static_cast<uint64_t>(i)});
    RngStream id_rng(id_seed);
    const auto z_id = draw_identity(id_rng);
    for (int r = 0; r < renders_per_identity; ++r) {
      RngStream app_rng(derive_seed(id_seed, {kTagRender, static_cast<uint64_t>(r)}));
      const auto appearance = sample_appearance(app_rng);
      const FaceImage img = generator.render(make_generator_input(z_id, appearance));
      auto& record =
          dataset.records[static_cast<std::size_t>(i) * renders_per_identity + r];
      record.seed = id_seed;
      record.pixels = image_to_u8(img);
    }
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// Trainer

struct Trainer::Impl {
  Config config;
  LossParams loss_params;
  MockGenerator mock;
  std::unique_ptr<PairSource> source;
  std::unique_ptr<Encoder> encoder;
  std::unique_ptr<Encoder> momentum_encoder;
  std::unique_ptr<SgdOptimizer> optimizer;
  std::unique_ptr<NegativeQueue> queue;
  PlateauScheduler plateau;
  int next_epoch = 0;
  EvalPairSet val_set;
  bool val_ready = false;

  explicit Impl(const Config& cfg)
      : config(cfg),
        loss_params(loss_params_from_config(cfg)),
        plateau(PlateauConfig{cfg.lr, cfg.plateau_patience, cfg.plateau_stop_patience,
                              cfg.max_epochs}) {
    validate_train_config(config);
    if (config.source == "mock")
      source = std::make_unique<MockPairSource>(config, mock);
    else
      source = std::make_unique<DatasetPairSource>(config);

    const uint64_t init_seed = derive_seed(config.seed, {kTagInit});
    const BackboneSpec spec = backbone_from_config(config);
    encoder = std::make_unique<Encoder>(spec, init_seed);
    // The momentum encoder starts as an exact copy of the encoder (same
    // deterministic initialization).
    momentum_encoder = std::make_unique<Encoder>(spec, init_seed);
    optimizer = std::make_unique<SgdOptimizer>(encoder->params(), config.sgd_momentum,
                                               config.weight_decay);
    queue = std::make_unique<NegativeQueue>(static_cast<std::size_t>(config.queue_size),
                                            static_cast<std::size_t>(config.embedding_dim));
    RngStream queue_rng(derive_seed(config.seed, {kTagQueue}));
    queue->fill_random(queue_rng);
  }

  int steps_per_epoch() const { return source->identity_count() / config.batch_size; }

  double validate() {
    if (!val_ready) {
      val_set = make_mock_eval_pairs(mock, config.val_pairs,
                                     derive_seed(config.seed, {kTagVal}));
      val_ready = true;
    }
    const auto scored = score_pairs(*encoder, val_set, std::min(config.batch_size, 64));
    return tenfold_accuracy(scored, config.val_folds);
  }

  void train_step(int epoch, int step) {
    const int batch = config.batch_size;
    const int dim = config.embedding_dim;
    PairBatch pair_batch = source->make_batch(epoch, step, batch);

    encoder->zero_grad();
    const auto f_q = encoder->forward(pair_batch.queries, batch, true);
    momentum_update(*momentum_encoder, *encoder, config.momentum_coefficient);

    std::vector<float> f_k;
    if (config.shuffle_bn) {
      // Decouples the key encoder's batch statistics from the pairing by
      // encoding the keys in a shuffled order.
      std::vector<uint32_t> perm(static_cast<std::size_t>(batch));
      std::iota(perm.begin(), perm.end(), 0u);
      RngStream rng(derive_seed(config.seed, {kTagShuffleBn, static_cast<uint64_t>(epoch),
                                              static_cast<uint64_t>(step)}));
      for (std::size_t i = perm.size(); i > 1; --i) {
        const auto j = rng.uniform_int(i);
        std::swap(perm[i - 1], perm[j]);
      }
      std::vector<float> shuffled(pair_batch.keys.size());
      for (int i = 0; i < batch; ++i)
        std::copy_n(pair_batch.keys.begin() + static_cast<std::size_t>(perm[i]) * kImageValues,
                    kImageValues,
                    shuffled.begin() + static_cast<std::size_t>(i) * kImageValues);
      const auto shuffled_emb = momentum_encoder->forward(shuffled, batch, false);
      f_k.resize(shuffled_emb.size());
      for (int i = 0; i < batch; ++i)
        std::copy_n(shuffled_emb.begin() + static_cast<std::size_t>(i) * dim, dim,
                    f_k.begin() + static_cast<std::size_t>(perm[i]) * dim);
    } else {
      f_k = momentum_encoder->forward(pair_batch.keys, batch, false);
    }

    queue->push(f_k, static_cast<std::size_t>(batch));
    const auto negatives = queue->snapshot();
    const auto loss = margin_nce_batch(f_q, f_k, negatives,
                                       static_cast<std::size_t>(batch), queue->size(),
                                       static_cast<std::size_t>(dim), loss_params);
    encoder->backward(loss.grad_queries, batch);
    optimizer->step(current_lr_);
    step_loss_sum_ += loss.mean_loss;
    last_query_embeddings_ = f_q;
    last_key_embeddings_ = std::move(f_k);
  }

  double current_lr_ = 0.0;
  double step_loss_sum_ = 0.0;
  std::vector<float> last_query_embeddings_;
  std::vector<float> last_key_embeddings_;

  CheckpointData snapshot_state() const {
    CheckpointData data;
    data.config_hash = config_hash(config);
    data.config_text = serialize_config(config);
    data.next_epoch = next_epoch;
    data.queue_cursor = queue->cursor();
    data.queue_size = queue->size();
    data.plateau = plateau.state();
    auto add_params = [&](const char* prefix, const std::vector<const nn::Param*>& params) {
      for (const auto* p : params)
        data.tensors.emplace_back(std::string(prefix) + p->name,
                                  std::vector<float>(p->value.data(),
                                                     p->value.data() + p->value.size()));
    };
    add_params("enc.", std::as_const(*encoder).params());
    add_params("mom.", std::as_const(*momentum_encoder).params());
    auto add_buffers = [&](const char* prefix, Encoder& e) {
      for (nn::Buffer* b : e.buffers())
        data.tensors.emplace_back(std::string(prefix) + b->name,
                                  std::vector<float>(b->value.data(),
                                                     b->value.data() + b->value.size()));
    };
    add_buffers("encbuf.", *encoder);
    add_buffers("mombuf.", *momentum_encoder);
    const auto& params = optimizer->params();
    const auto& velocity = optimizer->velocities();
    for (std::size_t i = 0; i < params.size(); ++i)
      data.tensors.emplace_back("vel." + params[i]->name,
                                std::vector<float>(velocity[i].data(),
                                                   velocity[i].data() + velocity[i].size()));
    data.tensors.emplace_back("queue.storage", queue->storage());
    return data;
  }

  void restore_state(const CheckpointData& data) {
    require(data.config_hash == config_hash(config),
            "checkpoint: config does not match the current run configuration");
    std::map<std::string, const std::vector<float>*> by_name;
    for (const auto& [name, values] : data.tensors) by_name[name] = &values;
    auto load_into = [&](const std::string& name, float* dst, std::size_t size) {
      const auto it = by_name.find(name);
      require(it != by_name.end(), "checkpoint: missing tensor " + name);
      require(it->second->size() == size, "checkpoint: size mismatch for " + name);
      std::copy(it->second->begin(), it->second->end(), dst);
    };
    for (nn::Param* p : encoder->params())
      load_into("enc." + p->name, p->value.data(), static_cast<std::size_t>(p->value.size()));
    for (nn::Param* p : momentum_encoder->params())
      load_into("mom." + p->name, p->value.data(), static_cast<std::size_t>(p->value.size()));
    for (nn::Buffer* b : encoder->buffers())
      load_into("encbuf." + b->name, b->value.data(),
                static_cast<std::size_t>(b->value.size()));
    for (nn::Buffer* b : momentum_encoder->buffers())
      load_into("mombuf." + b->name, b->value.data(),
                static_cast<std::size_t>(b->value.size()));
    const auto& params = optimizer->params();
    auto& velocity = optimizer->velocities();
    for (std::size_t i = 0; i < params.size(); ++i)
      load_into("vel." + params[i]->name, velocity[i].data(),
                static_cast<std::size_t>(velocity[i].size()));
    const auto it = by_name.find("queue.storage");
    require(it != by_name.end(), "checkpoint: missing tensor queue.storage");
    *queue = NegativeQueue::restore(static_cast<std::size_t>(config.queue_size),
                                    static_cast<std::size_t>(config.embedding_dim),
                                    *it->second, data.queue_cursor, data.queue_size);
    plateau.restore(data.plateau);
    next_epoch = data.next_epoch;
  }
};

Trainer::Trainer(const Config& config) : impl_(std::make_unique<Impl>(config)) {}
Trainer::~Trainer() = default;

Encoder& Trainer::encoder() { return *impl_->encoder; }
const NegativeQueue& Trainer::queue() const { return *impl_->queue; }
int Trainer::next_epoch() const { return impl_->next_epoch; }
int Trainer::steps_per_epoch() const { return impl_->steps_per_epoch(); }
double Trainer::evaluate_validation() { return impl_->validate(); }

std::vector<uint32_t> Trainer::epoch_identity_order(int epoch) const {
  return impl_->source->epoch_order(epoch);
}

const std::vector<float>& Trainer::last_query_embeddings() const {
  return impl_->last_query_embeddings_;
}
const std::vector<float>& Trainer::last_key_embeddings() const {
  return impl_->last_key_embeddings_;
}

void Trainer::load(const std::string& checkpoint_path) {
  impl_->restore_state(load_checkpoint(checkpoint_path));
}

TrainResult Trainer::run(const std::string& out_dir) {
  Impl& im = *impl_;
  const Config& cfg = im.config;
  const bool step_mode = cfg.scheduler == "step";
  const int target = step_mode ? cfg.epochs : cfg.max_epochs;

  TrainResult result;
  if (im.next_epoch >= target) return result;
  require(im.steps_per_epoch() >= 1,
          "train: identity_count must be >= batch_size for a nonempty epoch");

  std::ofstream log_file;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    log_file.open(out_dir + "/log.jsonl", std::ios::app);
    if (!log_file) throw IoError("train: cannot open log file in " + out_dir);
  }

  const int steps = im.steps_per_epoch();
  for (int epoch = im.next_epoch; epoch < target; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    im.current_lr_ =
        step_mode ? step_lr(epoch, cfg.lr, cfg.step_milestones) : im.plateau.lr();
    im.step_loss_sum_ = 0.0;
    for (int s = 0; s < steps; ++s) im.train_step(epoch, s);

    EpochRecord record;
    record.epoch = epoch;
    record.lr = im.current_lr_;
    record.steps = steps;
    record.mean_loss = im.step_loss_sum_ / steps;
    record.val_accuracy = im.validate();
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    bool stop = false;
    if (!step_mode) stop = im.plateau.observe(record.val_accuracy, epoch).second;
    im.next_epoch = epoch + 1;
    result.log.push_back(record);

    if (!out_dir.empty()) {
      log_file << epoch_record_to_json(record) << "\n";
      log_file.flush();
      const bool last = (epoch + 1 == target) || stop;
      if ((epoch + 1) % cfg.checkpoint_every == 0 || last) {
        const auto state = im.snapshot_state();
        char name[64];
        std::snprintf(name, sizeof(name), "/ckpt-%04d.bin", epoch + 1);
        save_checkpoint(state, out_dir + name);
        save_checkpoint(state, out_dir + "/ckpt-last.bin");
      }
    }
    if (stop) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

std::string epoch_record_to_json(const EpochRecord& record) {
  nlohmann::json j;
  j["epoch"] = record.epoch;
  j["lr"] = record.lr;
  j["mean_loss"] = record.mean_loss;
  j["val_accuracy"] = record.val_accuracy;
  j["steps"] = record.steps;
  j["seconds"] = record.seconds;
  return j.dump();
}

EpochRecord epoch_record_from_json(const std::string& line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) throw FormatError("training log: bad JSON line: " + line);
  EpochRecord record;
  record.epoch = j.at("epoch").get<int>();
  record.lr = j.at("lr").get<double>();
  record.mean_loss = j.at("mean_loss").get<double>();
  record.val_accuracy = j.at("val_accuracy").get<double>();
  record.steps = j.at("steps").get<int>();
  record.seconds = j.at("seconds").get<double>();
  return record;
}

std::vector<EpochRecord> read_training_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open training log: " + path);
  std::vector<EpochRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(epoch_record_from_json(line));
  }
  return records;
}

}  // namespace usyf
