#include "bli/embeddings.hpp"

#include "text_util.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace bli {

EmbeddingSet::EmbeddingSet(std::vector<std::string> words, Matrix vectors, std::string lang_tag)
    : words_(std::move(words)), vectors_(std::move(vectors)), lang_tag_(std::move(lang_tag)) {
  if (static_cast<std::size_t>(vectors_.rows()) != words_.size()) {
    throw Error("embedding set has " + std::to_string(words_.size()) + " words but " +
                std::to_string(vectors_.rows()) + " vectors");
  }
  if (vectors_.cols() <= 0) throw Error("embedding dimension must be positive");
  if (!vectors_.allFinite()) throw Error("embedding set contains non-finite values");
  rows_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!rows_.emplace(words_[i], i).second) throw Error("duplicate word '" + words_[i] + "'");
  }
}

std::optional<std::size_t> EmbeddingSet::find(std::string_view word) const {
  auto it = rows_.find(std::string(word));
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

EmbeddingSet load_embeddings(const std::filesystem::path& path, std::size_t max_vocab,
                             std::string lang_tag) {
  if (max_vocab == 0) throw Error("max_vocab must be positive");
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file " + path.string());

  const std::string where = path.string() + ":";
  std::string line;
  if (!std::getline(in, line)) throw Error(where + " empty file");
  auto header = detail::split_whitespace(line);
  long long count = 0;
  long long dim = 0;
  if (header.size() != 2 || !detail::parse_integer(header[0], count) ||
      !detail::parse_integer(header[1], dim) || count < 0 || dim <= 0) {
    throw Error(where + "1: malformed header, expected \"<count> <dim>\"");
  }

  const std::size_t wanted = std::min<std::size_t>(static_cast<std::size_t>(count), max_vocab);
  std::vector<std::string> words;
  words.reserve(wanted);
  Matrix vectors(static_cast<Eigen::Index>(wanted), dim);
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t line_no = 1;
  std::size_t rows_read = 0;

  while (words.size() < wanted && rows_read < static_cast<std::size_t>(count) &&
         std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    ++rows_read;
    auto fields = detail::split_whitespace(line);
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw Error(where + std::to_string(line_no) + ": dimension mismatch, expected " +
                  std::to_string(dim) + " values, found " + std::to_string(fields.size() - 1));
    }
    std::string token(fields[0]);
    if (seen.contains(token)) continue;
    const auto row = static_cast<Eigen::Index>(words.size());
    for (long long c = 0; c < dim; ++c) {
      double value = 0.0;
      if (!detail::parse_double(fields[static_cast<std::size_t>(c) + 1], value)) {
        throw Error(where + std::to_string(line_no) + ": cannot parse value '" +
                    std::string(fields[static_cast<std::size_t>(c) + 1]) + "'");
      }
      if (!std::isfinite(value)) {
        throw Error(where + std::to_string(line_no) + ": non-finite value");
      }
      vectors(row, c) = value;
    }
    seen.emplace(token, words.size());
    words.push_back(std::move(token));
  }
  if (words.empty()) throw Error(where + " no embeddings found");
  if (words.size() < wanted && rows_read < static_cast<std::size_t>(count)) {
    throw Error(where + " truncated file: header promises " + std::to_string(count) +
                " rows, found " + std::to_string(rows_read));
  }
  vectors.conservativeResize(static_cast<Eigen::Index>(words.size()), Eigen::NoChange);
  return EmbeddingSet(std::move(words), std::move(vectors), std::move(lang_tag));
}

void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << set.size() << ' ' << set.dim() << '\n';
  const Matrix& v = set.vectors();
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << set.words()[i];
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      out << ' ' << detail::format_double(v(static_cast<Eigen::Index>(i), c));
    }
    out << '\n';
  }
  if (!out) throw Error("I/O failure writing " + path.string());
}

EmbeddingSet normalize(const EmbeddingSet& set) {
  Matrix v = set.vectors();
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    const double norm = v.row(r).norm();
    if (norm == 0.0) {
      throw Error("zero-norm vector for word '" + set.words()[static_cast<std::size_t>(r)] + "'");
    }
    v.row(r) /= norm;
  }
  return EmbeddingSet(set.words(), std::move(v), set.lang_tag());
}

SeedDictionary load_dictionary(const std::filesystem::path& path, const EmbeddingSet& src,
                               const EmbeddingSet& tgt) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dictionary file " + path.string());
  SeedDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (detail::split_whitespace(line).empty()) continue;
    auto fields = line.find('\t') != std::string::npos ? detail::split_tabs(line)
                                                        : detail::split_whitespace(line);
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": expected \"source<TAB>target\"");
    }
    auto s = src.find(fields[0]);
    auto t = tgt.find(fields[1]);
    if (!s || !t) {
      ++dict.dropped;
      continue;
    }
    dict.pairs.push_back({std::string(fields[0]), std::string(fields[1]), *s, *t});
  }
  return dict;
}

SeedDictionary reverse(const SeedDictionary& dict) {
  SeedDictionary out;
  out.dropped = dict.dropped;
  out.pairs.reserve(dict.pairs.size());
  for (const auto& p : dict.pairs) {
    out.pairs.push_back({p.target, p.source, p.target_row, p.source_row});
  }
  return out;
}

void save_dictionary(const InducedDictionary& dict, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& e : dict.entries) {
    out << e.source << '\t' << e.target << '\t' << detail::format_double(e.score) << '\n';
  }
  if (!out) throw Error("I/O failure writing " + path.string());
}

void save_dictionary(const SeedDictionary& dict, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& p : dict.pairs) out << p.source << '\t' << p.target << '\n';
  if (!out) throw Error("I/O failure writing " + path.string());
}

InducedDictionary load_induced_dictionary(const std::filesystem::path& path,
                                          std::string direction) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dictionary file " + path.string());
  InducedDictionary dict{std::move(direction), {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    auto fields = detail::split_tabs(line);
    double score = 0.0;
    if (fields.size() != 3 || !detail::parse_double(fields[2], score)) {
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": expected \"source<TAB>target<TAB>score\"");
    }
    dict.entries.push_back({std::string(fields[0]), std::string(fields[1]), score});
  }
  return dict;
}

}  // namespace bli
