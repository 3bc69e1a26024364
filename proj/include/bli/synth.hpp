#pragma once

// Synthetic bilingual embedding pairs with a known ground-truth rotation.

#include "bli/embeddings.hpp"
#include "bli/geometry.hpp"

#include <cstdint>
#include <filesystem>

namespace bli {

struct SynthSpec {
  std::size_t n_words = 2000;
  Eigen::Index dim = 50;
  double noise_sigma = 0.0;
  std::uint64_t rotation_seed = 1;
  std::uint64_t data_seed = 2;
  /// Axis 0 of the source samples is scaled by (1 + hubness_factor) before
  /// normalization, concentrating vectors around one direction.
  double hubness_factor = 0.0;
};

struct SynthData {
  EmbeddingSet src;  // words "w_i", tag "src"
  EmbeddingSet tgt;  // words "w_i'", tag "tgt"
  MappingMatrix true_mapping;
  /// (w_i, w_i') for every i.
  SeedDictionary gold;
};

/// src rows are unit Gaussian samples; tgt rows are normalize(Q x + noise).
/// Deterministic in the two seeds.
SynthData generate(const SynthSpec& spec);

/// Subset of the gold dictionary covering rows [begin, end).
SeedDictionary gold_slice(const SynthData& data, std::size_t begin, std::size_t end);

/// Writes src.vec, tgt.vec, gold.txt and true_mapping.txt into `dir`.
void write_synth(const SynthData& data, const std::filesystem::path& dir);

}  // namespace bli
