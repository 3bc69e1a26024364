#include "bli/procrustes.hpp"

#include <ostream>
#include <set>
#include <utility>

namespace bli {
namespace {

using Anchor = std::pair<std::size_t, std::size_t>;

Matrix gather_rows(const Matrix& m, const std::vector<Anchor>& anchors, bool source) {
  Matrix out(static_cast<Eigen::Index>(anchors.size()), m.cols());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const std::size_t row = source ? anchors[i].first : anchors[i].second;
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(row));
  }
  return out;
}

}  // namespace

void ProcrustesConfig::validate() const {
  if (n_iterations <= 0) throw ValidationError("n_iterations must be positive");
  if (dict_top_pairs == 0) throw ValidationError("dict_top_pairs must be positive");
  if (csls_k <= 0) throw ValidationError("csls_k must be positive");
}

ProcrustesResult train_procrustes(const EmbeddingSet& src, const EmbeddingSet& tgt,
                                  const SeedDictionary& seed, const ProcrustesConfig& config) {
  config.validate();
  if (seed.pairs.empty()) throw Error("procrustes: seed dictionary is empty after resolution");
  if (src.dim() != tgt.dim()) throw Error("procrustes: source and target dimensions differ");

  std::vector<Anchor> seed_anchors;
  std::set<Anchor> seen;
  for (const auto& p : seed.pairs) {
    if (p.source_row >= src.size() || p.target_row >= tgt.size()) {
      throw Error("procrustes: seed pair '" + p.source + "' / '" + p.target +
                  "' does not resolve against the embeddings");
    }
    if (seen.emplace(p.source_row, p.target_row).second) {
      seed_anchors.emplace_back(p.source_row, p.target_row);
    }
  }
  if (seed_anchors.size() > config.dict_top_pairs) seed_anchors.resize(config.dict_top_pairs);

  ProcrustesResult result;
  std::vector<Anchor> anchors = seed_anchors;
  for (int it = 1; it <= config.n_iterations; ++it) {
    if (anchors.empty()) {
      throw Error("procrustes: anchor dictionary collapsed to 0 pairs at iteration " +
                  std::to_string(it));
    }
    const Matrix xa = gather_rows(src.vectors(), anchors, true);
    const Matrix ya = gather_rows(tgt.vectors(), anchors, false);
    result.w = procrustes_solve(xa, ya);

    const CslsIndex index = build_index(result.w.apply(src.vectors()), tgt.vectors(), config.csls_k);
    const std::vector<ScoredPair> induced = induce_pairs(index, config.dict_top_pairs, config.mutual_only);

    IterationLog entry;
    entry.iteration = it;
    entry.anchor_count = anchors.size();
    entry.residual = (result.w.apply(xa) - ya).norm();
    double total = 0.0;
    for (const auto& p : induced) total += p.score;
    entry.mean_csls = induced.empty() ? 0.0 : total / static_cast<double>(induced.size());
    result.log.push_back(entry);

    if (it == config.n_iterations) {
      result.dictionary = induce_dictionary(index, src.words(), tgt.words(), config.dict_top_pairs,
                                            config.export_mutual_only,
                                            src.lang_tag() + "-" + tgt.lang_tag());
      break;
    }
    if (induced.empty()) {
      throw Error("procrustes: no pairs induced at iteration " + std::to_string(it));
    }
    anchors = seed_anchors;
    std::set<Anchor> in_set(anchors.begin(), anchors.end());
    for (const auto& p : induced) {
      if (anchors.size() >= config.dict_top_pairs) break;
      if (in_set.emplace(p.source, p.target).second) anchors.emplace_back(p.source, p.target);
    }
  }
  return result;
}

void write_iteration_log(std::ostream& out, const std::vector<IterationLog>& log) {
  out << "iteration anchors mean_csls residual\n";
  for (const auto& e : log) {
    out << e.iteration << ' ' << e.anchor_count << ' ' << e.mean_csls << ' ' << e.residual << '\n';
  }
}

}  // namespace bli
