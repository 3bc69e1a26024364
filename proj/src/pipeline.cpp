#include "bli/pipeline.hpp"

#include "bli/csls.hpp"
#include "bli/synth.hpp"
#include "text_util.hpp"

#include <array>
#include <fstream>
#include <ostream>

namespace bli {
namespace {

constexpr std::array<int, 3> kPrecisionAt = {1, 5, 10};

struct DirectionJob {
  const EmbeddingSet* src;
  const EmbeddingSet* tgt;
  SeedDictionary seed;
  SeedDictionary test;
  bool backward;
};

std::ofstream open_artifact(const std::filesystem::path& path, PipelineOutcome& outcome) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  outcome.artifacts.push_back(path);
  return out;
}

void write_validation(std::ostream& out, const std::vector<ValidationScore>& scores) {
  out << "epoch,mean_csls\n";
  for (const auto& s : scores) out << s.epoch << ',' << detail::format_double(s.mean_csls) << '\n';
}

MappingMatrix run_adversarial_stage(const RunConfig& config, const DirectionJob& job,
                                    const std::filesystem::path& dir, PipelineOutcome& outcome,
                                    std::ostream& log, std::ostream* progress) {
  if (!config.adversarial_checkpoint.empty()) {
    Checkpoint cp = load_checkpoint(config.adversarial_checkpoint);
    if (cp.w.dim() != job.src->dim()) throw Error("adversarial checkpoint dimension mismatch");
    // An orthogonal src->tgt map is inverted by its transpose.
    if (job.backward) cp.w.w.transposeInPlace();
    log << "adversarial mapping loaded from " << config.adversarial_checkpoint.string() << '\n';
    return cp.w;
  }
  if (progress) *progress << "[align] adversarial training " << job.src->lang_tag() << "->"
                          << job.tgt->lang_tag() << '\n';
  const AdversarialResult adv = train_adversarial(*job.src, *job.tgt, config.adversarial);
  save_checkpoint({adv.best, adv.best_score.epoch, adv.best_score.mean_csls},
                  dir / "adversarial_mapping.txt");
  outcome.artifacts.push_back(dir / "adversarial_mapping.txt");
  {
    auto out = open_artifact(dir / "losses.csv", outcome);
    write_loss_curve(out, adv.losses);
  }
  {
    auto out = open_artifact(dir / "validation.csv", outcome);
    write_validation(out, adv.validation);
  }
  log << "adversarial best epoch " << adv.best_score.epoch << " mean_csls "
      << adv.best_score.mean_csls << " orthogonality " << orthogonality_error(adv.best) << '\n';
  return adv.best;
}

}  // namespace

PipelineOutcome run_pipeline(const RunConfig& config, std::ostream* progress) {
  config.validate();
  EmbeddingSet src = load_embeddings(config.src, config.max_vocab, config.src_lang);
  EmbeddingSet tgt = load_embeddings(config.tgt, config.max_vocab, config.tgt_lang);
  if (config.normalize) {
    src = normalize(src);
    tgt = normalize(tgt);
  }
  if (src.dim() != tgt.dim()) throw Error("source and target embeddings differ in dimension");
  if (progress) *progress << "[align] loaded " << src.size() << " + " << tgt.size() << " words\n";

  SeedDictionary seed;
  if (!config.seed_dict.empty()) seed = load_dictionary(config.seed_dict, src, tgt);
  SeedDictionary test;
  if (!config.test_dict.empty()) test = load_dictionary(config.test_dict, src, tgt);

  std::vector<DirectionJob> jobs;
  if (config.direction != Direction::Backward) jobs.push_back({&src, &tgt, seed, test, false});
  if (config.direction != Direction::Forward) {
    jobs.push_back({&tgt, &src, reverse(seed), reverse(test), true});
  }

  PipelineOutcome outcome;
  std::filesystem::create_directories(config.output_dir);
  for (const auto& job : jobs) {
    const std::string tag = job.src->lang_tag() + "-" + job.tgt->lang_tag();
    const auto dir = config.output_dir / tag;
    std::filesystem::create_directories(dir);
    auto log = open_artifact(dir / "train.log", outcome);
    log << "method " << method_tag(config.method) << "\ndirection " << tag << '\n';

    MappingMatrix w;
    InducedDictionary dict;
    double final_score = 0.0;
    switch (config.method) {
      case Method::SemiSup: {
        log << "seed pairs " << job.seed.pairs.size() << " dropped " << job.seed.dropped << '\n';
        if (progress) *progress << "[align] procrustes " << tag << '\n';
        ProcrustesResult r = train_procrustes(*job.src, *job.tgt, job.seed, config.procrustes);
        write_iteration_log(log, r.log);
        w = std::move(r.w);
        dict = std::move(r.dictionary);
        final_score = r.log.back().mean_csls;
        break;
      }
      case Method::SelfSup: {
        w = run_adversarial_stage(config, job, dir, outcome, log, progress);
        const CslsIndex index =
            build_index(w.apply(job.src->vectors()), job.tgt->vectors(), config.procrustes.csls_k);
        dict = induce_dictionary(index, job.src->words(), job.tgt->words(),
                                 config.procrustes.dict_top_pairs,
                                 config.procrustes.export_mutual_only, tag);
        final_score = validation_score(w, *job.src, *job.tgt, config.adversarial);
        break;
      }
      case Method::SelfSupRe: {
        const MappingMatrix adv = run_adversarial_stage(config, job, dir, outcome, log, progress);
        if (progress) *progress << "[align] refinement " << tag << '\n';
        RefineResult r = train_refined(*job.src, *job.tgt, adv, config.refine());
        log << "induced mutual pairs " << r.induced_pairs << " anchors "
            << r.anchors.seed.pairs.size() << '\n';
        if (r.anchors.warning) log << "warning: " << *r.anchors.warning << '\n';
        write_iteration_log(log, r.procrustes.log);
        w = std::move(r.procrustes.w);
        dict = std::move(r.procrustes.dictionary);
        final_score = r.procrustes.log.back().mean_csls;
        break;
      }
    }
    save_checkpoint({w, config.adversarial.epochs, final_score}, dir / "mapping.txt");
    outcome.artifacts.push_back(dir / "mapping.txt");
    save_dictionary(dict, dir / "dictionary.tsv");
    outcome.artifacts.push_back(dir / "dictionary.tsv");

    if (!config.test_dict.empty()) {
      outcome.reports.push_back(evaluate(w, *job.src, *job.tgt, job.test, kPrecisionAt,
                                         config.procrustes.csls_k, config.method));
    }
  }

  if (!outcome.reports.empty()) {
    auto json = open_artifact(config.output_dir / "report.json", outcome);
    json << to_record(outcome.reports);
    auto table = open_artifact(config.output_dir / "report.txt", outcome);
    table << render_table(outcome.reports);
  }
  return outcome;
}

void pca_export(const MappingMatrix& w, const EmbeddingSet& src, const EmbeddingSet& tgt,
                const SeedDictionary& pairs, const std::filesystem::path& out) {
  if (pairs.pairs.size() < 3) throw Error("pca: at least 3 word pairs are required");
  if (src.dim() < 2) throw Error("pca: embeddings need at least 2 dimensions");
  const auto p = static_cast<Eigen::Index>(pairs.pairs.size());
  Matrix stack(2 * p, src.dim());
  for (Eigen::Index i = 0; i < p; ++i) {
    const auto& pair = pairs.pairs[static_cast<std::size_t>(i)];
    stack.row(i) = w.w * src.vectors().row(static_cast<Eigen::Index>(pair.source_row)).transpose();
    stack.row(p + i) = tgt.vectors().row(static_cast<Eigen::Index>(pair.target_row));
  }
  const Eigen::RowVectorXd mean = stack.colwise().mean();
  stack.rowwise() -= mean;
  const SvdResult f = svd(stack);
  const Matrix coords = stack * f.vt.topRows(2).transpose();

  std::ofstream csv(out);
  if (!csv) throw Error("cannot write " + out.string());
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  csv << "word,lang,pc1,pc2\n";
  for (Eigen::Index r = 0; r < 2 * p; ++r) {
    const bool is_src = r < p;
    const auto& pair = pairs.pairs[static_cast<std::size_t>(is_src ? r : r - p)];
    csv << quote(is_src ? pair.source : pair.target) << ','
        << quote(is_src ? src.lang_tag() : tgt.lang_tag()) << ','
        << detail::format_double(coords(r, 0)) << ',' << detail::format_double(coords(r, 1))
        << '\n';
  }
  if (!csv) throw Error("I/O failure writing " + out.string());
}

}  // namespace bli
