#pragma once

// Cross-domain similarity local scaling.
//
// For a mapped source row s and a target row t,
//   CSLS(s, t) = 2 cos(s, t) - r_src(s) - r_tgt(t)
// where r_src(s) is the mean cosine between s and its k nearest target rows
// and r_tgt(t) the mean cosine between t and its k nearest mapped source rows.
// All neighbor searches are exact full scans, processed in row blocks so the
// n x m similarity matrix is never materialized.

#include "bli/common.hpp"
#include "bli/embeddings.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bli {

struct ScoredPair {
  std::size_t source = 0;
  std::size_t target = 0;
  double score = 0.0;

  friend bool operator==(const ScoredPair&, const ScoredPair&) = default;
};

class CslsIndex {
 public:
  const Matrix& mapped_source() const { return mapped_src_; }
  const Matrix& target() const { return tgt_; }
  int k() const { return k_; }
  /// r_src: mean similarity of each mapped source row to its k nearest targets.
  const Vector& source_penalty() const { return r_src_; }
  /// r_tgt: mean similarity of each target row to its k nearest mapped sources.
  const Vector& target_penalty() const { return r_tgt_; }

  std::size_t source_count() const { return static_cast<std::size_t>(mapped_src_.rows()); }
  std::size_t target_count() const { return static_cast<std::size_t>(tgt_.rows()); }

  double cosine(std::size_t i, std::size_t j) const;
  /// CSLS scores of the source rows [begin, end) against every target row.
  Matrix score_block(std::size_t begin, std::size_t end) const;

 private:
  friend CslsIndex build_index(Matrix mapped_src, Matrix tgt, int k);

  Matrix mapped_src_;
  Matrix tgt_;
  int k_ = 0;
  Vector r_src_;
  Vector r_tgt_;
};

/// Normalizes the rows of both matrices and computes the neighborhood
/// penalties. Throws if k exceeds either opposing row count.
CslsIndex build_index(Matrix mapped_src, Matrix tgt, int k);

/// Checks bounds and evaluates the CSLS formula for one pair.
double csls_score(const CslsIndex& index, std::size_t i, std::size_t j);

/// Full n x m CSLS matrix. Intended for small instances.
Matrix csls_matrix(const CslsIndex& index);

/// Highest-CSLS target for each source row in [0, count). Ties go to the
/// lowest target row.
std::vector<ScoredPair> best_targets(const CslsIndex& index, std::size_t count);

/// The n best targets for each requested source row, best first.
std::vector<std::vector<std::size_t>> top_targets(const CslsIndex& index,
                                                  std::span<const std::size_t> source_rows,
                                                  std::size_t n);

/// Per-source argmax candidates, optionally restricted to mutual nearest
/// neighbors, sorted by descending score and truncated to top_pairs.
std::vector<ScoredPair> induce_pairs(const CslsIndex& index, std::size_t top_pairs,
                                     bool mutual_only);

InducedDictionary induce_dictionary(const CslsIndex& index,
                                    const std::vector<std::string>& src_words,
                                    const std::vector<std::string>& tgt_words,
                                    std::size_t top_pairs, bool mutual_only,
                                    std::string direction = {});

}  // namespace bli
