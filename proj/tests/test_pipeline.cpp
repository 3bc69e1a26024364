#include "bli/pipeline.hpp"
#include "bli/synth.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace bli;
using bli::testing::TempDir;

namespace {

SynthData write_instance(const std::filesystem::path& dir, std::size_t n = 300, Eigen::Index d = 10) {
  SynthSpec spec;
  spec.n_words = n;
  spec.dim = d;
  const SynthData data = generate(spec);
  write_synth(data, dir);
  save_dictionary(gold_slice(data, 0, 50), dir / "seed.txt");
  save_dictionary(gold_slice(data, 50, n), dir / "test.txt");
  return data;
}

RunConfig base_config(const std::filesystem::path& data, const std::filesystem::path& out) {
  return parse_config(std::nullopt, {{"src", (data / "src.vec").string()},
                                     {"tgt", (data / "tgt.vec").string()},
                                     {"output_dir", out.string()},
                                     {"test_dict", (data / "test.txt").string()},
                                     {"dict_top_pairs", "300"}});
}

std::vector<std::vector<std::string>> csv_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BLI_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("semi-supervised alignment recovers a noiseless rotation end to end") {
  TempDir dir;
  write_instance(dir / "data");
  RunConfig c = base_config(dir / "data", dir / "out");
  c.seed_dict = dir / "data" / "seed.txt";
  const PipelineOutcome o = run_pipeline(c);
  REQUIRE(o.reports.size() == 1);
  CHECK(o.reports[0].p_at.at(1) == 100.0);
  CHECK(o.reports[0].n_evaluated == 250);
  for (const char* name : {"src-tgt/mapping.txt", "src-tgt/dictionary.tsv", "src-tgt/train.log",
                           "report.json", "report.txt"}) {
    CHECK(std::filesystem::exists(dir / "out" / name));
  }
  const Checkpoint cp = load_checkpoint(dir / "out" / "src-tgt" / "mapping.txt");
  CHECK(orthogonality_error(cp.w) <= 1e-6);
}

TEST_CASE("both directions produce two reports with transposed mappings") {
  TempDir dir;
  write_instance(dir / "data");
  RunConfig c = base_config(dir / "data", dir / "out");
  c.seed_dict = dir / "data" / "seed.txt";
  c.direction = Direction::Both;
  const PipelineOutcome o = run_pipeline(c);
  REQUIRE(o.reports.size() == 2);
  CHECK(o.reports[0].direction == "src-tgt");
  CHECK(o.reports[1].direction == "tgt-src");
  CHECK(o.reports[1].p_at.at(1) == 100.0);
  const Checkpoint f = load_checkpoint(dir / "out" / "src-tgt" / "mapping.txt");
  const Checkpoint b = load_checkpoint(dir / "out" / "tgt-src" / "mapping.txt");
  CHECK((f.w.w * b.w.w - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("a missing source file fails validation before any work") {
  TempDir dir;
  write_instance(dir / "data");
  RunConfig c = base_config(dir / "data", dir / "out");
  c.seed_dict = dir / "data" / "seed.txt";
  c.src = dir / "data" / "absent.vec";
  CHECK_THROWS_AS(run_pipeline(c), ValidationError);
  CHECK_FALSE(std::filesystem::exists(dir / "out"));
}

TEST_CASE("self-sup-re without a checkpoint trains, saves, then refines") {
  TempDir dir;
  write_instance(dir / "data", 200, 6);
  RunConfig c = base_config(dir / "data", dir / "out");
  c.method = Method::SelfSupRe;
  c.adversarial.epochs = 1;
  c.adversarial.steps_per_epoch = 50;
  c.adversarial.hidden = 16;
  c.adversarial.validation_words = 50;
  c.s_anchor_pairs = 100;
  std::ostringstream progress;
  const PipelineOutcome o = run_pipeline(c, &progress);
  const auto sub = dir / "out" / "src-tgt";
  CHECK(std::filesystem::exists(sub / "adversarial_mapping.txt"));
  CHECK(std::filesystem::exists(sub / "losses.csv"));
  CHECK(std::filesystem::exists(sub / "validation.csv"));
  CHECK(std::filesystem::exists(sub / "mapping.txt"));
  const std::string text = progress.str();
  REQUIRE(text.find("adversarial") != std::string::npos);
  CHECK(text.find("adversarial") < text.find("refinement"));
  REQUIRE(o.reports.size() == 1);
  CHECK(o.reports[0].method == Method::SelfSupRe);

  // A second run reuses the saved mapping and skips adversarial training.
  RunConfig again = c;
  again.output_dir = dir / "out2";
  again.adversarial_checkpoint = sub / "adversarial_mapping.txt";
  std::ostringstream progress2;
  run_pipeline(again, &progress2);
  CHECK(progress2.str().find("adversarial training") == std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "out2" / "src-tgt" / "losses.csv"));
  CHECK(bli::testing::read_file(dir / "out2" / "src-tgt" / "mapping.txt") ==
        bli::testing::read_file(sub / "mapping.txt"));
}

TEST_CASE("PCA of a perfect alignment puts each pair on the same point") {
  TempDir dir;
  const SynthData data = write_instance(dir / "data", 100, 8);
  const SeedDictionary pairs = gold_slice(data, 0, 20);
  pca_export(data.true_mapping, data.src, data.tgt, pairs, dir / "pca.csv");
  const auto rows = csv_rows(dir / "pca.csv");
  REQUIRE(rows.size() == 40);
  double mean1 = 0, mean2 = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(rows[i][0] == pairs.pairs[i].source);
    CHECK(rows[i][1] == "src");
    CHECK(rows[20 + i][1] == "tgt");
    CHECK(std::abs(std::stod(rows[i][2]) - std::stod(rows[20 + i][2])) <= 1e-6);
    CHECK(std::abs(std::stod(rows[i][3]) - std::stod(rows[20 + i][3])) <= 1e-6);
  }
  for (const auto& r : rows) {
    mean1 += std::stod(r[2]);
    mean2 += std::stod(r[3]);
  }
  CHECK(std::abs(mean1 / 40) <= 1e-9);
  CHECK(std::abs(mean2 / 40) <= 1e-9);

  CHECK_THROWS_AS(pca_export(data.true_mapping, data.src, data.tgt, gold_slice(data, 0, 2),
                             dir / "few.csv"),
                  Error);
}

TEST_CASE("command-line exit codes") {
  TempDir dir;
  write_instance(dir / "data");
  const std::string data = (dir / "data").string();
  const std::string common = " --src " + data + "/src.vec --tgt " + data + "/tgt.vec";

  CHECK(run_cli("align" + common + " --seed-dict " + data + "/seed.txt --test-dict " + data +
                "/test.txt --output-dir " + (dir / "out").string() + " --dict-top-pairs 300") == 0);
  CHECK(std::filesystem::exists(dir / "out" / "report.json"));
  CHECK(run_cli("eval" + common + " --checkpoint " + data + "/true_mapping.txt --test-dict " + data +
                "/test.txt") == 0);
  CHECK(run_cli("synth --output-dir " + (dir / "synth").string() + " --n-words 50 --dim 4") == 0);
  CHECK(std::filesystem::exists(dir / "synth" / "seed.txt"));

  CHECK(run_cli("") == 1);
  CHECK(run_cli("align --ksls-k 10") == 1);
  CHECK(run_cli("align --config " + data + "/missing.cfg") == 1);
  CHECK(run_cli("align" + common + " --output-dir " + (dir / "o").string()) == 1);
  CHECK(run_cli("eval" + common + " --checkpoint " + data + "/nope.txt --test-dict " + data +
                "/test.txt") == 1);

  bli::testing::write_file(dir / "bad.txt", "bli-mapping 3 0 0\n1 0\n");
  CHECK(run_cli("eval" + common + " --checkpoint " + (dir / "bad.txt").string() + " --test-dict " +
                data + "/test.txt") == 2);
}
