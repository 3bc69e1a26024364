#pragma once

// Monolingual embedding sets and bilingual dictionaries: loading,
// normalization and persistence.

#include "bli/common.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bli {

/// Vocabulary in frequency-rank order plus one dense vector per word.
/// Immutable after construction.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  /// Throws Error if the row count differs from the word count, a word is
  /// repeated, the dimension is zero or a component is not finite.
  EmbeddingSet(std::vector<std::string> words, Matrix vectors, std::string lang_tag = {});

  const std::vector<std::string>& words() const { return words_; }
  const Matrix& vectors() const { return vectors_; }
  const std::string& lang_tag() const { return lang_tag_; }
  std::size_t size() const { return words_.size(); }
  Eigen::Index dim() const { return vectors_.cols(); }

  /// Row of `word`, which is also its frequency rank.
  std::optional<std::size_t> find(std::string_view word) const;

 private:
  std::vector<std::string> words_;
  Matrix vectors_;
  std::string lang_tag_;
  std::unordered_map<std::string, std::size_t> rows_;
};

struct DictionaryPair {
  std::string source;
  std::string target;
  std::size_t source_row = 0;
  std::size_t target_row = 0;
};

/// Anchor pairs resolved against a source and a target EmbeddingSet.
struct SeedDictionary {
  std::vector<DictionaryPair> pairs;
  /// Lines whose source or target word was out of vocabulary.
  std::size_t dropped = 0;
};

struct InducedEntry {
  std::string source;
  std::string target;
  double score = 0.0;

  friend bool operator==(const InducedEntry&, const InducedEntry&) = default;
};

/// Dictionary produced by CSLS retrieval, sorted by descending score.
struct InducedDictionary {
  std::string direction;
  std::vector<InducedEntry> entries;
};

/// Reads a text embedding file ("count dim" header, then "token f_1 ... f_dim").
/// Keeps the first min(count, max_vocab) distinct tokens in file order.
EmbeddingSet load_embeddings(const std::filesystem::path& path, std::size_t max_vocab,
                             std::string lang_tag = {});

void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);

/// Rescales every row to unit Euclidean norm. Throws on a zero row.
EmbeddingSet normalize(const EmbeddingSet& set);

/// Reads "source target" lines (TAB or space separated). Pairs with an
/// out-of-vocabulary word are counted in `dropped`.
SeedDictionary load_dictionary(const std::filesystem::path& path, const EmbeddingSet& src,
                               const EmbeddingSet& tgt);

/// Swaps the roles of source and target in every pair.
SeedDictionary reverse(const SeedDictionary& dict);

void save_dictionary(const InducedDictionary& dict, const std::filesystem::path& path);
void save_dictionary(const SeedDictionary& dict, const std::filesystem::path& path);

/// Reads a file written by save_dictionary(InducedDictionary).
InducedDictionary load_induced_dictionary(const std::filesystem::path& path,
                                          std::string direction = {});

}  // namespace bli
