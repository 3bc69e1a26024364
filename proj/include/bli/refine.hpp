#pragma once

// Refinement of an adversarial mapping: the most frequent mutual CSLS pairs
// it induces become a pseudo-seed for the Procrustes loop.

#include "bli/procrustes.hpp"

#include <optional>
#include <string>

namespace bli {

struct RefineConfig {
  /// Number of high-frequency induced pairs used as anchors.
  std::size_t s_anchor_pairs = 5000;
  ProcrustesConfig procrustes;

  void validate() const;
};

struct AnchorSelection {
  SeedDictionary seed;
  /// Set when s is at least the dictionary size.
  std::optional<std::string> warning;
};

/// Keeps the s pairs whose source words are most frequent (lowest row);
/// equal ranks are ordered by descending CSLS score.
AnchorSelection select_anchor_pairs(const InducedDictionary& dict, const EmbeddingSet& src,
                                    const EmbeddingSet& tgt, std::size_t s);

struct RefineResult {
  ProcrustesResult procrustes;
  AnchorSelection anchors;
  /// Size of the mutual dictionary induced under the adversarial mapping.
  std::size_t induced_pairs = 0;
};

RefineResult train_refined(const EmbeddingSet& src, const EmbeddingSet& tgt,
                           const MappingMatrix& adversarial_w, const RefineConfig& config);

}  // namespace bli
