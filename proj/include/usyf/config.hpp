#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usyf/augment.hpp"
#include "usyf/encoder.hpp"
#include "usyf/loss.hpp"

namespace usyf {

// One flat key=value namespace shared by every subcommand; unknown keys are
// rejected. Precedence: config file < --set overrides < --seed flag.
struct Config {
  uint64_t seed = 1;

  // Training loop.
  int identity_count = 100000;
  int epochs = 40;
  int max_epochs = 200;
  int batch_size = 512;
  double lr = 0.1;
  double sgd_momentum = 0.9;
  double weight_decay = 5e-4;
  std::string scheduler = "step";  // step | plateau
  std::vector<int> step_milestones = {8, 16, 24, 32};
  int plateau_patience = 10;
  int plateau_stop_patience = 20;

  // Loss.
  double temperature = 0.07;
  double margin = 0.10;
  double momentum_coefficient = 0.999;

  // Augmentation policy.
  int ra_num_ops = 4;
  int ra_magnitude = 16;
  std::string ra_ops;  // comma-separated op names; empty = default space
  double flip_p = 0.5;

  // Contrastive machinery.
  int queue_size = 32768;
  int embedding_dim = 512;
  bool shuffle_bn = false;

  // Backbone.
  std::string backbone = "resnet50";  // resnet50 | small4
  std::vector<int> backbone_widths = {16, 32, 64, 128};

  // Pair sourcing.
  std::string pair_mode = "appearance_varying";  // | appearance_fixed
  std::string source = "mock";                   // mock | dataset
  std::string dataset;

  // Validation signal.
  int val_pairs = 600;
  int val_folds = 10;

  // Checkpointing.
  int checkpoint_every = 1;
  std::string resume;

  // generate inputs.
  int renders_per_identity = 1;
  int emit_pairs = 0;

  // extract inputs.
  std::string model;
  std::string input;

  // evaluate inputs.
  std::string scores;
  std::string embeddings;
  std::string pairs;
  bool tenfold = false;

  // borda inputs.
  std::string table;
  std::string tie_break = "later_wins";

  // leakage inputs.
  std::string anchor;
  std::string rr;
  std::string rs;
};

// Applies `key = value`; throws ContractError naming the key when unknown or
// unparsable.
void apply_config_override(Config& config, const std::string& key,
                           const std::string& value);

// Flat `key = value` text, '#' comments allowed.
Config parse_config_text(const std::string& text);
Config load_config_file(const std::string& path);

// Canonical serialization (fixed key order); also the basis of the hash.
std::string serialize_config(const Config& config);
uint64_t config_hash(const Config& config);

// Cross-field contract checks for training runs.
void validate_train_config(const Config& config);

AugmentationPolicy policy_from_config(const Config& config);
BackboneSpec backbone_from_config(const Config& config);
LossParams loss_params_from_config(const Config& config);

}  // namespace usyf
