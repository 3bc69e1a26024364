#pragma once

// Semi-supervised alignment: Procrustes on seed anchors, then repeated
// rounds of (induce mutual CSLS pairs -> re-solve).

#include "bli/csls.hpp"
#include "bli/embeddings.hpp"
#include "bli/geometry.hpp"

#include <iosfwd>
#include <vector>

namespace bli {

struct ProcrustesConfig {
  int n_iterations = 5;
  std::size_t dict_top_pairs = 50000;
  int csls_k = 10;
  /// Mutual-nearest filtering for regenerated anchors.
  bool mutual_only = true;
  /// Mutual-nearest filtering for the exported dictionary.
  bool export_mutual_only = false;

  /// Throws ValidationError on a non-positive field.
  void validate() const;
};

struct IterationLog {
  int iteration = 0;
  std::size_t anchor_count = 0;
  /// Mean CSLS of the mutual pairs induced under this iteration's W.
  double mean_csls = 0.0;
  /// |X_anchor W^T - Y_anchor|_F on this iteration's anchors.
  double residual = 0.0;
};

struct ProcrustesResult {
  MappingMatrix w;
  InducedDictionary dictionary;
  std::vector<IterationLog> log;
};

/// Iteration 1 solves on `seed`; later iterations solve on the seed pairs
/// plus the mutual CSLS pairs induced under the previous W, capped at
/// dict_top_pairs anchors.
ProcrustesResult train_procrustes(const EmbeddingSet& src, const EmbeddingSet& tgt,
                                  const SeedDictionary& seed, const ProcrustesConfig& config);

/// "iteration anchors mean_csls residual" per line, with a header.
void write_iteration_log(std::ostream& out, const std::vector<IterationLog>& log);

}  // namespace bli
