#include "bli/csls.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

namespace bli {
namespace {

constexpr Eigen::Index kBlockEntries = Eigen::Index{1} << 22;

Eigen::Index block_rows(Eigen::Index columns) {
  return std::max<Eigen::Index>(1, kBlockEntries / std::max<Eigen::Index>(1, columns));
}

void normalize_rows(Matrix& m, const char* what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double norm = m.row(r).norm();
    if (!(norm > 0.0)) {
      throw Error(std::string("csls: zero or non-finite ") + what + " row " + std::to_string(r));
    }
    m.row(r) /= norm;
  }
}

// Mean of the k largest cosines between each query row and all key rows.
Vector mean_top_k(const Matrix& queries, const Matrix& keys, int k) {
  Vector out(queries.rows());
  const Eigen::Index step = block_rows(keys.rows());
  std::vector<double> row(static_cast<std::size_t>(keys.rows()));
  for (Eigen::Index begin = 0; begin < queries.rows(); begin += step) {
    const Eigen::Index len = std::min(step, queries.rows() - begin);
    const Matrix sims = queries.middleRows(begin, len) * keys.transpose();
    for (Eigen::Index q = 0; q < len; ++q) {
      for (Eigen::Index j = 0; j < keys.rows(); ++j) {
        row[static_cast<std::size_t>(j)] = std::clamp(sims(q, j), -1.0, 1.0);
      }
      std::nth_element(row.begin(), row.begin() + (k - 1), row.end(), std::greater<>());
      std::sort(row.begin(), row.begin() + k, std::greater<>());
      out(begin + q) = std::accumulate(row.begin(), row.begin() + k, 0.0) / k;
    }
  }
  return out;
}

}  // namespace

double CslsIndex::cosine(std::size_t i, std::size_t j) const {
  const auto r = static_cast<Eigen::Index>(i);
  const auto c = static_cast<Eigen::Index>(j);
  return std::clamp(mapped_src_.row(r).dot(tgt_.row(c)), -1.0, 1.0);
}

Matrix CslsIndex::score_block(std::size_t begin, std::size_t end) const {
  const auto b = static_cast<Eigen::Index>(begin);
  const auto len = static_cast<Eigen::Index>(end - begin);
  Matrix s = (mapped_src_.middleRows(b, len) * tgt_.transpose()).cwiseMax(-1.0).cwiseMin(1.0);
  s *= 2.0;
  s.colwise() -= r_src_.segment(b, len);
  s.rowwise() -= r_tgt_.transpose();
  return s;
}

CslsIndex build_index(Matrix mapped_src, Matrix tgt, int k) {
  if (k <= 0) throw Error("csls: k must be positive");
  if (mapped_src.cols() != tgt.cols()) throw Error("csls: source and target dimensions differ");
  if (static_cast<Eigen::Index>(k) > tgt.rows()) {
    throw Error("csls: k = " + std::to_string(k) + " exceeds target vocabulary of " +
                std::to_string(tgt.rows()));
  }
  if (static_cast<Eigen::Index>(k) > mapped_src.rows()) {
    throw Error("csls: k = " + std::to_string(k) + " exceeds source vocabulary of " +
                std::to_string(mapped_src.rows()));
  }
  normalize_rows(mapped_src, "source");
  normalize_rows(tgt, "target");

  CslsIndex index;
  index.k_ = k;
  index.r_src_ = mean_top_k(mapped_src, tgt, k);
  index.r_tgt_ = mean_top_k(tgt, mapped_src, k);
  index.mapped_src_ = std::move(mapped_src);
  index.tgt_ = std::move(tgt);
  return index;
}

double csls_score(const CslsIndex& index, std::size_t i, std::size_t j) {
  if (i >= index.source_count() || j >= index.target_count()) {
    throw Error("csls: index (" + std::to_string(i) + ", " + std::to_string(j) +
                ") out of range");
  }
  return 2.0 * index.cosine(i, j) - index.source_penalty()(static_cast<Eigen::Index>(i)) -
         index.target_penalty()(static_cast<Eigen::Index>(j));
}

Matrix csls_matrix(const CslsIndex& index) { return index.score_block(0, index.source_count()); }

std::vector<ScoredPair> best_targets(const CslsIndex& index, std::size_t count) {
  count = std::min(count, index.source_count());
  std::vector<ScoredPair> out;
  out.reserve(count);
  const auto step = static_cast<std::size_t>(block_rows(index.target().rows()));
  for (std::size_t begin = 0; begin < count; begin += step) {
    const std::size_t end = std::min(count, begin + step);
    const Matrix block = index.score_block(begin, end);
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      Eigen::Index best = 0;
      // maxCoeff returns the first maximal index, i.e. the lowest target row.
      const double score = block.row(r).maxCoeff(&best);
      out.push_back({begin + static_cast<std::size_t>(r), static_cast<std::size_t>(best), score});
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> top_targets(const CslsIndex& index,
                                                  std::span<const std::size_t> source_rows,
                                                  std::size_t n) {
  const std::size_t m = index.target_count();
  n = std::min(n, m);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(source_rows.size());
  std::vector<std::size_t> order(m);
  for (std::size_t row : source_rows) {
    if (row >= index.source_count()) throw Error("csls: source row out of range");
    const Matrix scores = index.score_block(row, row + 1);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double sa = scores(0, static_cast<Eigen::Index>(a));
                        const double sb = scores(0, static_cast<Eigen::Index>(b));
                        return sa > sb || (sa == sb && a < b);
                      });
    out.emplace_back(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

std::vector<ScoredPair> induce_pairs(const CslsIndex& index, std::size_t top_pairs,
                                     bool mutual_only) {
  if (top_pairs == 0) throw Error("csls: top_pairs must be positive");
  std::vector<ScoredPair> candidates = best_targets(index, index.source_count());

  if (mutual_only) {
    // Best source for every target, scanning target blocks against all sources.
    const std::size_t m = index.target_count();
    std::vector<std::size_t> best_source(m, 0);
    std::vector<double> best_score(m, -std::numeric_limits<double>::infinity());
    const auto step = static_cast<std::size_t>(block_rows(index.target().rows()));
    for (std::size_t begin = 0; begin < index.source_count(); begin += step) {
      const std::size_t end = std::min(index.source_count(), begin + step);
      const Matrix block = index.score_block(begin, end);
      for (Eigen::Index r = 0; r < block.rows(); ++r) {
        for (std::size_t j = 0; j < m; ++j) {
          const double s = block(r, static_cast<Eigen::Index>(j));
          if (s > best_score[j]) {
            best_score[j] = s;
            best_source[j] = begin + static_cast<std::size_t>(r);
          }
        }
      }
    }
    std::erase_if(candidates,
                  [&](const ScoredPair& p) { return best_source[p.target] != p.source; });
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const ScoredPair& a, const ScoredPair& b) { return a.score > b.score; });
  if (candidates.size() > top_pairs) candidates.resize(top_pairs);
  return candidates;
}

InducedDictionary induce_dictionary(const CslsIndex& index,
                                    const std::vector<std::string>& src_words,
                                    const std::vector<std::string>& tgt_words,
                                    std::size_t top_pairs, bool mutual_only,
                                    std::string direction) {
  if (src_words.size() != index.source_count() || tgt_words.size() != index.target_count()) {
    throw Error("csls: word lists do not match the index");
  }
  InducedDictionary dict{std::move(direction), {}};
  for (const auto& p : induce_pairs(index, top_pairs, mutual_only)) {
    dict.entries.push_back({src_words[p.source], tgt_words[p.target], p.score});
  }
  return dict;
}

}  // namespace bli
