#include "bli/refine.hpp"

#include <algorithm>

namespace bli {

void RefineConfig::validate() const {
  procrustes.validate();
  if (s_anchor_pairs == 0) throw ValidationError("s_anchor_pairs must be positive");
  if (s_anchor_pairs > procrustes.dict_top_pairs) {
    throw ValidationError("s_anchor_pairs must not exceed dict_top_pairs");
  }
}

AnchorSelection select_anchor_pairs(const InducedDictionary& dict, const EmbeddingSet& src,
                                    const EmbeddingSet& tgt, std::size_t s) {
  if (s == 0) throw Error("refine: s must be positive");
  struct Candidate {
    DictionaryPair pair;
    double score;
  };
  std::vector<Candidate> candidates;
  AnchorSelection out;
  for (const auto& e : dict.entries) {
    auto srow = src.find(e.source);
    auto trow = tgt.find(e.target);
    if (!srow || !trow) {
      ++out.seed.dropped;
      continue;
    }
    candidates.push_back({{e.source, e.target, *srow, *trow}, e.score});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.pair.source_row != b.pair.source_row) return a.pair.source_row < b.pair.source_row;
    return a.score > b.score;
  });
  if (candidates.size() <= s) {
    out.warning = "requested " + std::to_string(s) + " anchor pairs and the dictionary has " +
                  std::to_string(candidates.size()) + "; using all of them";
  } else {
    candidates.resize(s);
  }
  for (auto& c : candidates) out.seed.pairs.push_back(std::move(c.pair));
  return out;
}

RefineResult train_refined(const EmbeddingSet& src, const EmbeddingSet& tgt,
                           const MappingMatrix& adversarial_w, const RefineConfig& config) {
  config.validate();
  if (orthogonality_error(adversarial_w) > 1e-3) {
    throw Error("refine: adversarial mapping is not orthogonal (error " +
                std::to_string(orthogonality_error(adversarial_w)) + ")");
  }
  const CslsIndex index =
      build_index(adversarial_w.apply(src.vectors()), tgt.vectors(), config.procrustes.csls_k);
  const InducedDictionary induced =
      induce_dictionary(index, src.words(), tgt.words(), config.procrustes.dict_top_pairs, true,
                        src.lang_tag() + "-" + tgt.lang_tag());
  if (induced.entries.empty()) {
    throw Error("refine: the adversarial mapping induced an empty dictionary");
  }
  RefineResult result;
  result.induced_pairs = induced.entries.size();
  result.anchors = select_anchor_pairs(induced, src, tgt, config.s_anchor_pairs);
  result.procrustes = train_procrustes(src, tgt, result.anchors.seed, config.procrustes);
  return result;
}

}  // namespace bli
