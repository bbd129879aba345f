#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "usyf/cli.hpp"
#include "usyf/score_io.hpp"
#include "usyf/trainer.hpp"

using namespace usyf;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("usyf_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string p(const std::string& name) const { return (path / name).string(); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::string& path) {
  return nlohmann::json::parse(read_file(path));
}

const std::string kFixtures = std::string(USYF_SOURCE_DIR) + "/fixtures";

}  // namespace

TEST_CASE("cli: borda on the committed queue-size fixture") {
  TempDir tmp;
  const int rc = cli::run({"borda", "--set", "table=" + kFixtures + "/queue_size_accuracy.csv",
                           "--out", tmp.p("run")});
  REQUIRE(rc == cli::kExitOk);
  const std::string counts = read_file(tmp.p("run") + "/borda.csv");
  CHECK(counts ==
        "label,borda_count\n512,8\n1024,7\n2048,14\n4096,24\n8192,22\n16384,17\n"
        "32768,30\n65536,18\n");
  CHECK(std::filesystem::exists(tmp.p("run") + "/manifest.json"));
  CHECK(std::filesystem::exists(tmp.p("run") + "/resolved_config.txt"));

  const auto manifest = read_json(tmp.p("run") + "/manifest.json");
  CHECK(manifest.at("subcommand") == "borda");
  CHECK(manifest.contains("config_hash"));
  CHECK(manifest.contains("inputs"));
}

TEST_CASE("cli: idempotent re-runs produce byte-identical outputs") {
  TempDir tmp;
  const std::vector<std::string> args = {
      "borda", "--set", "table=" + kFixtures + "/margin_accuracy.csv", "--out",
      tmp.p("a")};
  REQUIRE(cli::run(args) == cli::kExitOk);
  auto args2 = args;
  args2.back() = tmp.p("b");
  REQUIRE(cli::run(args2) == cli::kExitOk);
  CHECK(read_file(tmp.p("a") + "/borda.csv") == read_file(tmp.p("b") + "/borda.csv"));
  CHECK(read_file(tmp.p("a") + "/manifest.json") ==
        read_file(tmp.p("b") + "/manifest.json"));
  CHECK(read_file(tmp.p("a") + "/resolved_config.txt") ==
        read_file(tmp.p("b") + "/resolved_config.txt"));
}

TEST_CASE("cli: evaluate on a separable score fixture reports zero EER") {
  TempDir tmp;
  {
    ScoreSet s;
    for (int i = 0; i < 20; ++i) {
      s.genuine.push_back(0.6 + 0.01 * i);
      s.impostor.push_back(-0.5 + 0.01 * i);
    }
    write_score_csv(s, tmp.p("scores.csv"));
  }
  const int rc = cli::run({"evaluate", "--set", "scores=" + tmp.p("scores.csv"), "--out",
                           tmp.p("eval")});
  REQUIRE(rc == cli::kExitOk);
  const auto report = read_json(tmp.p("eval") + "/report.json");
  CHECK(report.at("eer").get<double>() == 0.0);
  CHECK(report.at("fmr1000").get<double>() == 0.0);
  CHECK(std::filesystem::exists(tmp.p("eval") + "/scores.csv"));
  CHECK(std::filesystem::exists(tmp.p("eval") + "/histogram.csv"));
}

TEST_CASE("cli: bad config key exits 2 and names the key") {
  TempDir tmp;
  CHECK(cli::run({"train", "--set", "learning_rate=0.1", "--out", tmp.p("x")}) ==
        cli::kExitBadConfig);
  CHECK(cli::run({"evaluate", "--set", "scores", "--out", tmp.p("y")}) ==
        cli::kExitBadConfig);
  CHECK(cli::run({"borda", "--out", tmp.p("z")}) == cli::kExitBadConfig);
}

TEST_CASE("cli: missing input file exits 3") {
  TempDir tmp;
  CHECK(cli::run({"borda", "--set", "table=" + tmp.p("nope.csv"), "--out", tmp.p("o")}) ==
        cli::kExitMissingFile);
  CHECK(cli::run({"evaluate", "--set", "scores=" + tmp.p("nope.csv"), "--out",
                  tmp.p("o2")}) == cli::kExitMissingFile);
}

TEST_CASE("cli: train with epochs=0 writes a valid empty log") {
  TempDir tmp;
  const int rc = cli::run({"train", "--set", "identity_count=16", "--set", "epochs=0",
                           "--set", "batch_size=8", "--set", "queue_size=16", "--set",
                           "embedding_dim=8", "--set", "backbone=small4", "--set",
                           "backbone_widths=4,4,8,8", "--set", "val_pairs=20", "--out",
                           tmp.p("train0")});
  REQUIRE(rc == cli::kExitOk);
  CHECK(std::filesystem::exists(tmp.p("train0") + "/log.jsonl"));
  CHECK(read_training_log(tmp.p("train0") + "/log.jsonl").empty());
}

TEST_CASE("cli: generate, train, extract, evaluate round trip") {
  TempDir tmp;
  // 28 identities x 2 renders; enough for 8 emitted pairs (4 genuine from
  // identities 0..3, impostors from 4..11).
  REQUIRE(cli::run({"generate", "--set", "identity_count=28", "--set",
                    "renders_per_identity=2", "--set", "emit_pairs=8", "--seed", "5",
                    "--out", tmp.p("data")}) == cli::kExitOk);
  REQUIRE(std::filesystem::exists(tmp.p("data") + "/dataset.usyf"));
  REQUIRE(std::filesystem::exists(tmp.p("data") + "/pairs.tsv"));
  const auto pairs = read_pairs(tmp.p("data") + "/pairs.tsv");
  REQUIRE(pairs.size() == 8);

  REQUIRE(cli::run({"train", "--set", "identity_count=16", "--set", "epochs=1", "--set",
                    "batch_size=8", "--set", "queue_size=16", "--set",
                    "embedding_dim=8", "--set", "backbone=small4", "--set",
                    "backbone_widths=4,4,8,8", "--set", "val_pairs=20", "--set",
                    "lr=0.05", "--out", tmp.p("run")}) == cli::kExitOk);
  REQUIRE(std::filesystem::exists(tmp.p("run") + "/ckpt-last.bin"));
  CHECK(read_training_log(tmp.p("run") + "/log.jsonl").size() == 1);

  REQUIRE(cli::run({"extract", "--set", "model=" + tmp.p("run") + "/ckpt-last.bin",
                    "--set", "input=" + tmp.p("data") + "/dataset.usyf", "--out",
                    tmp.p("emb")}) == cli::kExitOk);
  const auto embeddings = read_embeddings(tmp.p("emb") + "/embeddings.txt");
  REQUIRE(embeddings.size() == 56);
  CHECK(embeddings[0].size() == 8);

  REQUIRE(cli::run({"evaluate", "--set",
                    "embeddings=" + tmp.p("emb") + "/embeddings.txt", "--set",
                    "pairs=" + tmp.p("data") + "/pairs.tsv", "--set", "tenfold=1",
                    "--set", "val_folds=2", "--out", tmp.p("eval")}) == cli::kExitOk);
  const auto report = read_json(tmp.p("eval") + "/report.json");
  CHECK(report.contains("eer"));
  CHECK(report.contains("tenfold_accuracy"));
}

TEST_CASE("cli: leakage subcommand end to end") {
  TempDir tmp;
  {
    ScoreSet anchor;
    for (int i = 0; i < 100; ++i) anchor.genuine.push_back(0.9995);
    for (int i = 0; i < 1000; ++i)
      anchor.impostor.push_back(static_cast<double>(i) / 1000.0);
    write_score_csv(anchor, tmp.p("anchor.csv"));
    std::ofstream rr(tmp.p("rr.txt")), rs(tmp.p("rs.txt"));
    for (int i = 0; i < 1000; ++i) rr << 0.2 << "\n";
    for (int i = 0; i < 1000; ++i) rs << (i < 31 ? 0.995 : 0.5) << "\n";
  }
  REQUIRE(cli::run({"leakage", "--set", "anchor=" + tmp.p("anchor.csv"), "--set",
                    "rr=" + tmp.p("rr.txt"), "--set", "rs=" + tmp.p("rs.txt"), "--out",
                    tmp.p("leak")}) == cli::kExitOk);
  const auto report = read_json(tmp.p("leak") + "/leakage.json");
  CHECK(report.at("rs_above_fmr100_pct").get<double>() == 3.1);
  CHECK(report.at("rr_above_fmr100_pct").get<double>() == 0.0);
}
