#pragma once

#include "bli/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace bli {

struct PipelineOutcome {
  std::vector<EvalReport> reports;
  std::vector<std::filesystem::path> artifacts;
};

/// Loads both embedding sets and runs the configured method for each
/// requested direction. Per direction, writes under
/// <output_dir>/<src_lang>-<tgt_lang>/:
///   mapping.txt, dictionary.tsv, train.log
///   adversarial_mapping.txt, losses.csv, validation.csv (adversarial methods)
/// and, when a test dictionary is given, <output_dir>/report.{json,txt}.
/// Progress lines go to `progress` when non-null.
PipelineOutcome run_pipeline(const RunConfig& config, std::ostream* progress = nullptr);

/// Projects the mapped source vectors W x and target vectors y of the given
/// pairs onto their top two principal components and writes
/// "word,lang,pc1,pc2" rows (all sources first, then all targets).
void pca_export(const MappingMatrix& w, const EmbeddingSet& src, const EmbeddingSet& tgt,
                const SeedDictionary& pairs, const std::filesystem::path& out);

}  // namespace bli
