#include "usyf/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "usyf/common.hpp"

namespace usyf {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ContractError("config key '" + key + "': expected integer, got '" + value + "'");
  }
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const uint64_t v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ContractError("config key '" + key + "': expected unsigned integer, got '" +
                        value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ContractError("config key '" + key + "': expected number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  throw ContractError("config key '" + key + "': expected boolean, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_int(key, item));
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream ss;
  for (size_t i = 0; i < v.size(); ++i) ss << (i ? "," : "") << v[i];
  return ss.str();
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using Setter = std::function<void(Config&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed", [](Config& c, const std::string& k, const std::string& v) { c.seed = parse_u64(k, v); }},
      {"identity_count", [](Config& c, const std::string& k, const std::string& v) { c.identity_count = parse_int(k, v); }},
      {"epochs", [](Config& c, const std::string& k, const std::string& v) { c.epochs = parse_int(k, v); }},
      {"max_epochs", [](Config& c, const std::string& k, const std::string& v) { c.max_epochs = parse_int(k, v); }},
      {"batch_size", [](Config& c, const std::string& k, const std::string& v) { c.batch_size = parse_int(k, v); }},
      {"lr", [](Config& c, const std::string& k, const std::string& v) { c.lr = parse_real(k, v); }},
      {"sgd_momentum", [](Config& c, const std::string& k, const std::string& v) { c.sgd_momentum = parse_real(k, v); }},
      {"weight_decay", [](Config& c, const std::string& k, const std::string& v) { c.weight_decay = parse_real(k, v); }},
      {"scheduler", [](Config& c, const std::string&, const std::string& v) { c.scheduler = v; }},
      {"step_milestones", [](Config& c, const std::string& k, const std::string& v) { c.step_milestones = parse_int_list(k, v); }},
      {"plateau_patience", [](Config& c, const std::string& k, const std::string& v) { c.plateau_patience = parse_int(k, v); }},
      {"plateau_stop_patience", [](Config& c, const std::string& k, const std::string& v) { c.plateau_stop_patience = parse_int(k, v); }},
      {"temperature", [](Config& c, const std::string& k, const std::string& v) { c.temperature = parse_real(k, v); }},
      {"margin", [](Config& c, const std::string& k, const std::string& v) { c.margin = parse_real(k, v); }},
      {"momentum_coefficient", [](Config& c, const std::string& k, const std::string& v) { c.momentum_coefficient = parse_real(k, v); }},
      {"ra_num_ops", [](Config& c, const std::string& k, const std::string& v) { c.ra_num_ops = parse_int(k, v); }},
      {"ra_magnitude", [](Config& c, const std::string& k, const std::string& v) { c.ra_magnitude = parse_int(k, v); }},
      {"ra_ops", [](Config& c, const std::string&, const std::string& v) { c.ra_ops = v; }},
      {"flip_p", [](Config& c, const std::string& k, const std::string& v) { c.flip_p = parse_real(k, v); }},
      {"queue_size", [](Config& c, const std::string& k, const std::string& v) { c.queue_size = parse_int(k, v); }},
      {"embedding_dim", [](Config& c, const std::string& k, const std::string& v) { c.embedding_dim = parse_int(k, v); }},
      {"shuffle_bn", [](Config& c, const std::string& k, const std::string& v) { c.shuffle_bn = parse_bool(k, v); }},
      {"backbone", [](Config& c, const std::string&, const std::string& v) { c.backbone = v; }},
      {"backbone_widths", [](Config& c, const std::string& k, const std::string& v) { c.backbone_widths = parse_int_list(k, v); }},
      {"pair_mode", [](Config& c, const std::string&, const std::string& v) { c.pair_mode = v; }},
      {"source", [](Config& c, const std::string&, const std::string& v) { c.source = v; }},
      {"dataset", [](Config& c, const std::string&, const std::string& v) { c.dataset = v; }},
      {"val_pairs", [](Config& c, const std::string& k, const std::string& v) { c.val_pairs = parse_int(k, v); }},
      {"val_folds", [](Config& c, const std::string& k, const std::string& v) { c.val_folds = parse_int(k, v); }},
      {"checkpoint_every", [](Config& c, const std::string& k, const std::string& v) { c.checkpoint_every = parse_int(k, v); }},
      {"resume", [](Config& c, const std::string&, const std::string& v) { c.resume = v; }},
      {"renders_per_identity", [](Config& c, const std::string& k, const std::string& v) { c.renders_per_identity = parse_int(k, v); }},
      {"emit_pairs", [](Config& c, const std::string& k, const std::string& v) { c.emit_pairs = parse_int(k, v); }},
      {"model", [](Config& c, const std::string&, const std::string& v) { c.model = v; }},
      {"input", [](Config& c, const std::string&, const std::string& v) { c.input = v; }},
      {"scores", [](Config& c, const std::string&, const std::string& v) { c.scores = v; }},
      {"embeddings", [](Config& c, const std::string&, const std::string& v) { c.embeddings = v; }},
      {"pairs", [](Config& c, const std::string&, const std::string& v) { c.pairs = v; }},
      {"tenfold", [](Config& c, const std::string& k, const std::string& v) { c.tenfold = parse_bool(k, v); }},
      {"table", [](Config& c, const std::string&, const std::string& v) { c.table = v; }},
      {"tie_break", [](Config& c, const std::string&, const std::string& v) { c.tie_break = v; }},
      {"anchor", [](Config& c, const std::string&, const std::string& v) { c.anchor = v; }},
      {"rr", [](Config& c, const std::string&, const std::string& v) { c.rr = v; }},
      {"rs", [](Config& c, const std::string&, const std::string& v) { c.rs = v; }},
  };
  return table;
}

}  // namespace

void apply_config_override(Config& config, const std::string& key,
                           const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ContractError("unknown config key '" + key + "'");
  it->second(config, key, value);
}

Config parse_config_text(const std::string& text) {
  Config config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractError("config line " + std::to_string(lineno) +
                          ": expected key = value");
    apply_config_override(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const Config& c) {
  std::ostringstream out;
  out << "seed = " << c.seed << "\n";
  out << "identity_count = " << c.identity_count << "\n";
  out << "epochs = " << c.epochs << "\n";
  out << "max_epochs = " << c.max_epochs << "\n";
  out << "batch_size = " << c.batch_size << "\n";
  out << "lr = " << format_real(c.lr) << "\n";
  out << "sgd_momentum = " << format_real(c.sgd_momentum) << "\n";
  out << "weight_decay = " << format_real(c.weight_decay) << "\n";
  out << "scheduler = " << c.scheduler << "\n";
  out << "step_milestones = " << join_ints(c.step_milestones) << "\n";
  out << "plateau_patience = " << c.plateau_patience << "\n";
  out << "plateau_stop_patience = " << c.plateau_stop_patience << "\n";
  out << "temperature = " << format_real(c.temperature) << "\n";
  out << "margin = " << format_real(c.margin) << "\n";
  out << "momentum_coefficient = " << format_real(c.momentum_coefficient) << "\n";
  out << "ra_num_ops = " << c.ra_num_ops << "\n";
  out << "ra_magnitude = " << c.ra_magnitude << "\n";
  out << "ra_ops = " << c.ra_ops << "\n";
  out << "flip_p = " << format_real(c.flip_p) << "\n";
  out << "queue_size = " << c.queue_size << "\n";
  out << "embedding_dim = " << c.embedding_dim << "\n";
  out << "shuffle_bn = " << (c.shuffle_bn ? 1 : 0) << "\n";
  out << "backbone = " << c.backbone << "\n";
  out << "backbone_widths = " << join_ints(c.backbone_widths) << "\n";
  out << "pair_mode = " << c.pair_mode << "\n";
  out << "source = " << c.source << "\n";
  out << "dataset = " << c.dataset << "\n";
  out << "val_pairs = " << c.val_pairs << "\n";
  out << "val_folds = " << c.val_folds << "\n";
  out << "checkpoint_every = " << c.checkpoint_every << "\n";
  out << "resume = " << c.resume << "\n";
  out << "renders_per_identity = " << c.renders_per_identity << "\n";
  out << "emit_pairs = " << c.emit_pairs << "\n";
  out << "model = " << c.model << "\n";
  out << "input = " << c.input << "\n";
  out << "scores = " << c.scores << "\n";
  out << "embeddings = " << c.embeddings << "\n";
  out << "pairs = " << c.pairs << "\n";
  out << "tenfold = " << (c.tenfold ? 1 : 0) << "\n";
  out << "table = " << c.table << "\n";
  out << "tie_break = " << c.tie_break << "\n";
  out << "anchor = " << c.anchor << "\n";
  out << "rr = " << c.rr << "\n";
  out << "rs = " << c.rs << "\n";
  return out.str();
}

uint64_t config_hash(const Config& config) {
  // Session plumbing is excluded from the run identity: resuming a
  // checkpoint for more epochs must hash identically to the original run.
  Config canonical = config;
  canonical.resume.clear();
  canonical.epochs = 0;
  canonical.max_epochs = 0;
  canonical.checkpoint_every = 1;
  const std::string text = serialize_config(canonical);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void validate_train_config(const Config& c) {
  require(c.identity_count >= 1, "config: identity_count must be >= 1");
  require(c.epochs >= 0, "config: epochs must be >= 0");
  require(c.max_epochs >= 1, "config: max_epochs must be >= 1");
  require(c.batch_size >= 1, "config: batch_size must be >= 1");
  require(c.queue_size >= 1, "config: queue_size must be >= 1");
  require(c.queue_size % c.batch_size == 0,
          "config: batch_size must divide queue_size");
  require(c.batch_size <= c.queue_size, "config: batch_size must not exceed queue_size");
  require(c.embedding_dim >= 1, "config: embedding_dim must be >= 1");
  require(c.lr > 0.0, "config: lr must be > 0");
  require(c.sgd_momentum >= 0.0 && c.sgd_momentum < 1.0,
          "config: sgd_momentum must be in [0, 1)");
  require(c.weight_decay >= 0.0, "config: weight_decay must be >= 0");
  require(c.scheduler == "step" || c.scheduler == "plateau",
          "config: scheduler must be step or plateau");
  for (size_t i = 1; i < c.step_milestones.size(); ++i)
    require(c.step_milestones[i - 1] < c.step_milestones[i],
            "config: step_milestones must be strictly increasing");
  require(c.plateau_patience > 0, "config: plateau_patience must be positive");
  require(c.plateau_stop_patience > 0, "config: plateau_stop_patience must be positive");
  require(c.pair_mode == "appearance_varying" || c.pair_mode == "appearance_fixed",
          "config: pair_mode must be appearance_varying or appearance_fixed");
  require(c.source == "mock" || c.source == "dataset",
          "config: source must be mock or dataset");
  if (c.source == "dataset")
    require(!c.dataset.empty(), "config: dataset path required when source = dataset");
  require(c.val_folds >= 2, "config: val_folds must be >= 2");
  require(c.val_pairs > 0 && c.val_pairs % c.val_folds == 0,
          "config: val_pairs must be a positive multiple of val_folds");
  require(c.checkpoint_every >= 1, "config: checkpoint_every must be >= 1");
  validate_loss_params(loss_params_from_config(c));
  validate_backbone_spec(backbone_from_config(c));
  validate_policy(policy_from_config(c));
}

AugmentationPolicy policy_from_config(const Config& c) {
  AugmentationPolicy policy;
  policy.num_ops = c.ra_num_ops;
  policy.magnitude = c.ra_magnitude;
  policy.flip_probability = c.flip_p;
  if (!c.ra_ops.empty()) {
    policy.op_space.clear();
    std::string item;
    std::istringstream ss(c.ra_ops);
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) policy.op_space.push_back(augment_op_from_string(item));
    }
  }
  return policy;
}

BackboneSpec backbone_from_config(const Config& c) {
  BackboneSpec spec;
  spec.arch = c.backbone;
  spec.widths = c.backbone_widths;
  spec.embed_dim = c.embedding_dim;
  return spec;
}

LossParams loss_params_from_config(const Config& c) {
  return {c.temperature, c.margin, c.momentum_coefficient};
}

}  // namespace usyf
