#include "usyf/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "usyf/borda.hpp"
#include "usyf/checkpoint.hpp"
#include "usyf/common.hpp"
#include "usyf/config.hpp"
#include "usyf/dataset.hpp"
#include "usyf/embedding.hpp"
#include "usyf/encoder.hpp"
#include "usyf/leakage.hpp"
#include "usyf/metrics.hpp"
#include "usyf/score_io.hpp"
#include "usyf/trainer.hpp"

namespace usyf::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::string out_dir = "out";
  bool seed_given = false;
  uint64_t seed = 0;
};

Config resolve_config(const Invocation& inv) {
  Config config;
  if (!inv.config_path.empty()) config = load_config_file(inv.config_path);
  for (const auto& kv : inv.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ContractError("--set expects key=value, got '" + kv + "'");
    apply_config_override(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (inv.seed_given) config.seed = inv.seed;
  return config;
}

std::string hex64(uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Every run echoes its fully-resolved config and a machine-readable manifest
// into the output directory.
void write_run_artifacts(const Invocation& inv, const Config& config,
                         const std::vector<std::string>& inputs,
                         const std::vector<std::string>& outputs) {
  std::filesystem::create_directories(inv.out_dir);
  {
    std::ofstream out(inv.out_dir + "/resolved_config.txt");
    if (!out) throw IoError("cannot write resolved config in " + inv.out_dir);
    out << serialize_config(config);
  }
  nlohmann::json manifest;
  manifest["subcommand"] = inv.subcommand;
  manifest["version"] = kVersion;
  manifest["config_hash"] = hex64(config_hash(config));
  manifest["inputs"] = inputs;
  // Outputs are recorded relative to the run directory so identical runs
  // into different directories stay byte-identical.
  std::vector<std::string> output_names;
  for (const auto& o : outputs)
    output_names.push_back(std::filesystem::path(o).filename().string());
  manifest["outputs"] = output_names;
  std::ofstream out(inv.out_dir + "/manifest.json");
  if (!out) throw IoError("cannot write manifest in " + inv.out_dir);
  out << manifest.dump(2) << "\n";
}

void require_input(const std::string& path, const std::string& what) {
  if (path.empty()) throw ContractError("config key '" + what + "' is required");
  if (!std::filesystem::exists(path))
    throw IoError("missing input file for '" + what + "': " + path);
}

// Rebuilds the query encoder stored in a training checkpoint.
std::unique_ptr<Encoder> encoder_from_checkpoint(const std::string& path) {
  const CheckpointData data = load_checkpoint(path);
  const Config config = parse_config_text(data.config_text);
  auto encoder =
      std::make_unique<Encoder>(backbone_from_config(config), /*init_seed=*/0);
  std::map<std::string, const std::vector<float>*> by_name;
  for (const auto& [name, values] : data.tensors) by_name[name] = &values;
  for (nn::Param* p : encoder->params()) {
    const auto it = by_name.find("enc." + p->name);
    require(it != by_name.end(), "checkpoint: missing tensor enc." + p->name);
    require(it->second->size() == static_cast<std::size_t>(p->value.size()),
            "checkpoint: size mismatch for enc." + p->name);
    std::copy(it->second->begin(), it->second->end(), p->value.data());
  }
  for (nn::Buffer* b : encoder->buffers()) {
    const auto it = by_name.find("encbuf." + b->name);
    require(it != by_name.end(), "checkpoint: missing tensor encbuf." + b->name);
    require(it->second->size() == static_cast<std::size_t>(b->value.size()),
            "checkpoint: size mismatch for encbuf." + b->name);
    std::copy(it->second->begin(), it->second->end(), b->value.data());
  }
  return encoder;
}

int cmd_generate(const Invocation& inv, const Config& config) {
  require(config.identity_count >= 1, "config key 'identity_count' must be >= 1");
  require(config.renders_per_identity >= 1,
          "config key 'renders_per_identity' must be >= 1");
  MockGenerator generator;
  const Dataset dataset = generate_mock_dataset(
      generator, config.identity_count, config.renders_per_identity, config.seed);
  std::filesystem::create_directories(inv.out_dir);
  const std::string dataset_path = inv.out_dir + "/dataset.usyf";
  write_dataset(dataset, dataset_path);
  std::vector<std::string> outputs = {dataset_path};

  if (config.emit_pairs > 0) {
    const int n = config.emit_pairs;
    require(n % 2 == 0, "config key 'emit_pairs' must be even");
    require(config.renders_per_identity >= 2,
            "config key 'renders_per_identity' must be >= 2 to emit genuine pairs");
    const int rpi = config.renders_per_identity;
    require(config.identity_count >= n / 2 + n,
            "config key 'identity_count' too small for the requested emit_pairs");
    std::vector<IndexPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    int impostor_base = n / 2;  // identities after the genuine block
    for (int j = 0; j < n / 2; ++j) {
      const std::size_t g = static_cast<std::size_t>(j) * rpi;
      pairs.push_back({g, g + 1, true});
      const std::size_t a = static_cast<std::size_t>(impostor_base + 2 * j) * rpi;
      const std::size_t b = static_cast<std::size_t>(impostor_base + 2 * j + 1) * rpi;
      pairs.push_back({a, b, false});
    }
    const std::string pairs_path = inv.out_dir + "/pairs.tsv";
    write_pairs(pairs, pairs_path);
    outputs.push_back(pairs_path);
  }
  write_run_artifacts(inv, config, {}, outputs);
  std::cout << "generate: wrote " << dataset.records.size() << " records to "
            << dataset_path << "\n";
  return kExitOk;
}

int cmd_train(const Invocation& inv, const Config& config) {
  if (!config.dataset.empty() && config.source == "dataset")
    require_input(config.dataset, "dataset");
  Trainer trainer(config);
  if (!config.resume.empty()) {
    require_input(config.resume, "resume");
    trainer.load(config.resume);
  }
  std::filesystem::create_directories(inv.out_dir);
  write_run_artifacts(inv, config, {config.dataset, config.resume},
                      {inv.out_dir + "/log.jsonl", inv.out_dir + "/ckpt-last.bin"});
  const TrainResult result = trainer.run(inv.out_dir);
  std::cout << "train: " << result.log.size() << " epochs";
  if (!result.log.empty()) {
    const auto& last = result.log.back();
    std::cout << ", final mean loss " << last.mean_loss << ", val accuracy "
              << last.val_accuracy;
  }
  if (result.stopped_early) std::cout << " (stopped early)";
  std::cout << "\n";
  return kExitOk;
}

int cmd_extract(const Invocation& inv, const Config& config) {
  require_input(config.model, "model");
  require_input(config.input, "input");
  auto encoder = encoder_from_checkpoint(config.model);
  encoder->set_training(false);
  const Dataset dataset = read_dataset(config.input);
  require(!dataset.records.empty(), "extract: dataset has no records");
  require(dataset.height == kImageSize && dataset.width == kImageSize &&
              dataset.channels == kImageChannels,
          "extract: dataset record dims must be 112x112x3");

  const int dim = encoder->embed_dim();
  std::vector<std::vector<float>> embeddings;
  embeddings.reserve(dataset.records.size());
  const int batch_size = 64;
  std::vector<float> buffer;
  for (std::size_t start = 0; start < dataset.records.size();
       start += static_cast<std::size_t>(batch_size)) {
    const int n = static_cast<int>(
        std::min<std::size_t>(batch_size, dataset.records.size() - start));
    buffer.assign(static_cast<std::size_t>(n) * kImageValues, 0.0f);
    for (int i = 0; i < n; ++i) {
      const auto img = image_from_u8(dataset.records[start + i].pixels);
      std::copy(img.pixels.begin(), img.pixels.end(),
                buffer.begin() + static_cast<std::size_t>(i) * kImageValues);
    }
    const auto out = encoder->forward(buffer, n, false);
    for (int i = 0; i < n; ++i)
      embeddings.emplace_back(out.begin() + static_cast<std::size_t>(i) * dim,
                              out.begin() + static_cast<std::size_t>(i + 1) * dim);
  }
  std::filesystem::create_directories(inv.out_dir);
  const std::string emb_path = inv.out_dir + "/embeddings.txt";
  write_embeddings(embeddings, emb_path);
  write_run_artifacts(inv, config, {config.model, config.input}, {emb_path});
  std::cout << "extract: " << embeddings.size() << " embeddings of dim " << dim
            << " to " << emb_path << "\n";
  return kExitOk;
}

int cmd_evaluate(const Invocation& inv, const Config& config) {
  ScoreSet scores;
  std::optional<double> tenfold;
  std::vector<std::string> inputs;
  if (!config.scores.empty()) {
    require_input(config.scores, "scores");
    inputs.push_back(config.scores);
    scores = read_score_csv(config.scores);
  } else {
    require_input(config.embeddings, "embeddings");
    require_input(config.pairs, "pairs");
    inputs = {config.embeddings, config.pairs};
    const auto embeddings = read_embeddings(config.embeddings);
    const auto pairs = read_pairs(config.pairs);
    require(!pairs.empty(), "evaluate: empty pairs file");
    std::vector<VerificationPair> scored;
    scored.reserve(pairs.size());
    for (const auto& p : pairs) {
      require(p.a < embeddings.size() && p.b < embeddings.size(),
              "evaluate: pair index out of range");
      const double s = cosine_score(embeddings[p.a], embeddings[p.b]);
      scored.push_back({s, p.genuine});
      (p.genuine ? scores.genuine : scores.impostor).push_back(s);
    }
    if (config.tenfold) tenfold = tenfold_accuracy(scored, config.val_folds);
  }

  VerificationReport report = make_verification_report(scores);
  report.tenfold_accuracy = tenfold;

  std::filesystem::create_directories(inv.out_dir);
  const std::string report_path = inv.out_dir + "/report.json";
  const std::string scores_path = inv.out_dir + "/scores.csv";
  const std::string hist_path = inv.out_dir + "/histogram.csv";
  nlohmann::json j;
  j["eer"] = report.eer;
  j["eer_threshold"] = report.eer_threshold;
  j["fmr10"] = report.fmr10;
  j["fmr10_threshold"] = report.fmr10_threshold;
  j["fmr100"] = report.fmr100;
  j["fmr100_threshold"] = report.fmr100_threshold;
  j["fmr1000"] = report.fmr1000;
  j["fmr1000_threshold"] = report.fmr1000_threshold;
  if (report.tenfold_accuracy) j["tenfold_accuracy"] = *report.tenfold_accuracy;
  {
    std::ofstream out(report_path);
    if (!out) throw IoError("cannot write " + report_path);
    out << j.dump(2) << "\n";
  }
  write_score_csv(scores, scores_path);
  write_histogram_csv(scores, hist_path);
  write_run_artifacts(inv, config, inputs, {report_path, scores_path, hist_path});
  std::cout << "evaluate: EER " << report.eer << ", FMR10 " << report.fmr10
            << ", FMR100 " << report.fmr100 << ", FMR1000 " << report.fmr1000;
  if (report.tenfold_accuracy) std::cout << ", 10-fold " << *report.tenfold_accuracy;
  std::cout << "\n";
  return kExitOk;
}

int cmd_borda(const Invocation& inv, const Config& config) {
  require_input(config.table, "table");
  const AccuracyTable table = read_accuracy_table_csv(config.table);
  const auto counts = borda(table, tie_break_from_string(config.tie_break));
  std::filesystem::create_directories(inv.out_dir);
  const std::string counts_path = inv.out_dir + "/borda.csv";
  write_borda_csv(table, counts, counts_path);
  write_run_artifacts(inv, config, {config.table}, {counts_path});
  for (std::size_t r = 0; r < counts.size(); ++r)
    std::cout << (table.row_labels.empty() ? std::to_string(r) : table.row_labels[r])
              << "," << counts[r] << "\n";
  return kExitOk;
}

int cmd_leakage(const Invocation& inv, const Config& config) {
  require_input(config.anchor, "anchor");
  require_input(config.rr, "rr");
  require_input(config.rs, "rs");
  const ScoreSet anchor = read_score_csv(config.anchor);
  const auto rr = read_score_list(config.rr);
  const auto rs = read_score_list(config.rs);
  const LeakageReport report = leakage_report(rr, rs, anchor);

  std::filesystem::create_directories(inv.out_dir);
  const std::string report_path = inv.out_dir + "/leakage.json";
  nlohmann::json j;
  j["fmr100_threshold"] = report.fmr100_threshold;
  j["fmr1000_threshold"] = report.fmr1000_threshold;
  j["rr_above_fmr100_pct"] = report.rr_above_fmr100_pct;
  j["rr_above_fmr1000_pct"] = report.rr_above_fmr1000_pct;
  j["rs_above_fmr100_pct"] = report.rs_above_fmr100_pct;
  j["rs_above_fmr1000_pct"] = report.rs_above_fmr1000_pct;
  {
    std::ofstream out(report_path);
    if (!out) throw IoError("cannot write " + report_path);
    out << j.dump(2) << "\n";
  }
  write_run_artifacts(inv, config, {config.anchor, config.rr, config.rs}, {report_path});
  std::cout << "leakage: R-R " << report.rr_above_fmr100_pct << "% / "
            << report.rr_above_fmr1000_pct << "%, R-S " << report.rs_above_fmr100_pct
            << "% / " << report.rs_above_fmr1000_pct
            << "% above FMR100/FMR1000 thresholds\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"contrastive face-embedding training and verification toolkit"};
  app.require_subcommand(1);

  Invocation inv;
  const std::vector<std::string> names = {"generate", "train",  "extract",
                                          "evaluate", "borda",  "leakage"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", inv.config_path, "flat key=value config file");
    sub->add_option("--set", inv.overrides, "config override key=value (repeatable)");
    sub->add_option("--out", inv.out_dir, "output directory");
    sub->add_option("--seed", inv.seed, "root random seed")
        ->each([&inv](const std::string&) { inv.seed_given = true; });
    sub->callback([&inv, name]() { inv.subcommand = name; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitBadConfig;
  }

  try {
    const Config config = resolve_config(inv);
    if (inv.subcommand == "generate") return cmd_generate(inv, config);
    if (inv.subcommand == "train") return cmd_train(inv, config);
    if (inv.subcommand == "extract") return cmd_extract(inv, config);
    if (inv.subcommand == "evaluate") return cmd_evaluate(inv, config);
    if (inv.subcommand == "borda") return cmd_borda(inv, config);
    if (inv.subcommand == "leakage") return cmd_leakage(inv, config);
    std::cerr << "unknown subcommand\n";
    return kExitBadConfig;
  } catch (const ContractError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitMissingFile;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace usyf::cli
