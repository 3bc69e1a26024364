// Command-line front end.
//
//   bli_align align  --config run.cfg [--key value ...]
//   bli_align induce --src a.vec --tgt b.vec --checkpoint mapping.txt --output-dir out
//   bli_align eval   --src a.vec --tgt b.vec --checkpoint mapping.txt --test-dict test.txt
//   bli_align synth  --output-dir data [--n-words 2000 --dim 50 ...]
//   bli_align pca    --src a.vec --tgt b.vec --checkpoint mapping.txt --pairs pairs.txt --output pca.csv
//
// Exit status: 0 on success, 1 on invalid arguments or configuration,
// 2 on a failure while computing.

#include "bli/csls.hpp"
#include "bli/pipeline.hpp"
#include "bli/synth.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <map>

namespace {

struct SetsOptions {
  std::string src;
  std::string tgt;
  std::string src_lang = "src";
  std::string tgt_lang = "tgt";
  std::size_t max_vocab = 200000;
  bool normalize = true;
  std::string checkpoint;
};

void add_sets_options(CLI::App* cmd, SetsOptions& o, bool need_checkpoint) {
  cmd->add_option("--src", o.src, "Source embeddings")->required();
  cmd->add_option("--tgt", o.tgt, "Target embeddings")->required();
  cmd->add_option("--src-lang", o.src_lang, "Source language tag");
  cmd->add_option("--tgt-lang", o.tgt_lang, "Target language tag");
  cmd->add_option("--max-vocab", o.max_vocab, "Words kept per language");
  cmd->add_option("--normalize", o.normalize, "Unit-normalize vectors (true/false)");
  auto* cp = cmd->add_option("--checkpoint", o.checkpoint, "Mapping checkpoint");
  if (need_checkpoint) cp->required();
}

void require_exists(const std::string& path, const char* what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw bli::ValidationError(std::string(what) + ": no such file " + path);
  }
}

std::pair<bli::EmbeddingSet, bli::EmbeddingSet> load_sets(const SetsOptions& o) {
  require_exists(o.src, "--src");
  require_exists(o.tgt, "--tgt");
  if (!o.checkpoint.empty()) require_exists(o.checkpoint, "--checkpoint");
  auto src = bli::load_embeddings(o.src, o.max_vocab, o.src_lang);
  auto tgt = bli::load_embeddings(o.tgt, o.max_vocab, o.tgt_lang);
  if (o.normalize) {
    src = bli::normalize(src);
    tgt = bli::normalize(tgt);
  }
  return {std::move(src), std::move(tgt)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilingual lexicon induction by embedding-space alignment"};
  app.require_subcommand(1);

  // align: every config key is also a flag (--csls-k for csls_k, ...).
  auto* align = app.add_subcommand("align", "Train a mapping and induce a dictionary");
  std::string config_file;
  align->add_option("--config", config_file, "Key-value configuration file");
  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> flag_options;
  for (const auto& key : bli::config_keys()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    flag_options.emplace_back(key, align->add_option("--" + flag, flag_values[key]));
  }

  auto* induce = app.add_subcommand("induce", "Induce a dictionary from a checkpoint");
  SetsOptions induce_sets;
  std::string induce_out;
  int induce_k = 10;
  std::size_t induce_pairs = 50000;
  bool induce_mutual = false;
  add_sets_options(induce, induce_sets, true);
  induce->add_option("--output-dir", induce_out, "Directory for dictionary.tsv")->required();
  induce->add_option("--csls-k", induce_k, "CSLS neighborhood size");
  induce->add_option("--dict-top-pairs", induce_pairs, "Maximum number of pairs");
  induce->add_flag("--mutual-only", induce_mutual, "Keep mutual nearest neighbors only");

  auto* eval = app.add_subcommand("eval", "P@1/5/10 of a checkpoint on a test dictionary");
  SetsOptions eval_sets;
  std::string eval_dict;
  std::string eval_method = "semi-sup";
  std::string eval_out;
  int eval_k = 10;
  add_sets_options(eval, eval_sets, true);
  eval->add_option("--test-dict", eval_dict, "Gold dictionary")->required();
  eval->add_option("--method", eval_method, "Method tag for the report row");
  eval->add_option("--csls-k", eval_k, "CSLS neighborhood size");
  eval->add_option("--output-dir", eval_out, "Directory for report.json");

  auto* synth = app.add_subcommand("synth", "Write a synthetic embedding pair");
  bli::SynthSpec spec;
  std::string synth_out;
  std::size_t seed_size = 100;
  synth->add_option("--output-dir", synth_out, "Output directory")->required();
  synth->add_option("--n-words", spec.n_words, "Words per language");
  synth->add_option("--dim", spec.dim, "Dimension");
  synth->add_option("--noise-sigma", spec.noise_sigma, "Target noise standard deviation");
  synth->add_option("--rotation-seed", spec.rotation_seed, "Seed of the true rotation");
  synth->add_option("--data-seed", spec.data_seed, "Seed of the samples");
  synth->add_option("--hubness-factor", spec.hubness_factor, "Axis-0 stretch");
  synth->add_option("--seed-size", seed_size, "Gold pairs written to seed.txt; the rest go to test.txt");

  auto* pca = app.add_subcommand("pca", "Two-dimensional PCA coordinates of aligned pairs");
  SetsOptions pca_sets;
  std::string pca_pairs;
  std::string pca_out;
  add_sets_options(pca, pca_sets, true);
  pca->add_option("--pairs", pca_pairs, "Word pairs to project")->required();
  pca->add_option("--output", pca_out, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*align) {
      std::vector<bli::Setting> overrides;
      for (const auto& [key, opt] : flag_options) {
        if (opt->count() > 0) overrides.emplace_back(key, flag_values[key]);
      }
      std::optional<std::filesystem::path> file;
      if (!config_file.empty()) file = config_file;
      const bli::RunConfig config = bli::parse_config(file, overrides);
      config.validate();
      const auto outcome = bli::run_pipeline(config, &std::cerr);
      if (!outcome.reports.empty()) std::cout << bli::render_table(outcome.reports);
    } else if (*induce) {
      auto [src, tgt] = load_sets(induce_sets);
      const auto cp = bli::load_checkpoint(induce_sets.checkpoint);
      const auto index = bli::build_index(cp.w.apply(src.vectors()), tgt.vectors(), induce_k);
      const auto dict = bli::induce_dictionary(index, src.words(), tgt.words(), induce_pairs,
                                               induce_mutual, src.lang_tag() + "-" + tgt.lang_tag());
      std::filesystem::create_directories(induce_out);
      bli::save_dictionary(dict, std::filesystem::path(induce_out) / "dictionary.tsv");
      std::cerr << "[induce] " << dict.entries.size() << " pairs\n";
    } else if (*eval) {
      require_exists(eval_dict, "--test-dict");
      const bli::Method method = bli::parse_method(eval_method);
      auto [src, tgt] = load_sets(eval_sets);
      const auto cp = bli::load_checkpoint(eval_sets.checkpoint);
      const auto test = bli::load_dictionary(eval_dict, src, tgt);
      const int ns[] = {1, 5, 10};
      const auto report = bli::evaluate(cp.w, src, tgt, test, ns, eval_k, method);
      std::cout << bli::render_table({report});
      if (!eval_out.empty()) {
        std::filesystem::create_directories(eval_out);
        std::ofstream(std::filesystem::path(eval_out) / "report.json") << bli::to_record({report});
      }
    } else if (*synth) {
      const auto data = bli::generate(spec);
      bli::write_synth(data, synth_out);
      const auto dir = std::filesystem::path(synth_out);
      bli::save_dictionary(bli::gold_slice(data, 0, seed_size), dir / "seed.txt");
      bli::save_dictionary(bli::gold_slice(data, seed_size, spec.n_words), dir / "test.txt");
    } else if (*pca) {
      require_exists(pca_pairs, "--pairs");
      auto [src, tgt] = load_sets(pca_sets);
      const auto cp = bli::load_checkpoint(pca_sets.checkpoint);
      const auto pairs = bli::load_dictionary(pca_pairs, src, tgt);
      bli::pca_export(cp.w, src, tgt, pairs, pca_out);
    }
  } catch (const bli::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
