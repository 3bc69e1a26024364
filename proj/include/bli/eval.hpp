#pragma once

// P@N evaluation against a gold dictionary and result-table rendering.

#include "bli/embeddings.hpp"
#include "bli/geometry.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bli {

enum class Method { SemiSup, SelfSup, SelfSupRe };

std::string_view method_tag(Method m);
/// Accepts the table tags ("Semi-sup", ...) and the CLI spellings ("semi-sup", ...).
Method parse_method(std::string_view text);

struct EvalReport {
  std::string direction;
  Method method = Method::SemiSup;
  /// N -> accuracy in percent.
  std::map<int, double> p_at;
  std::size_t n_evaluated = 0;
  std::size_t n_skipped = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Ranks every target word by CSLS under w for each distinct test source
/// word; a source word scores a hit at N when any of its gold targets is in
/// its top N. `ns` must be ascending.
EvalReport evaluate(const MappingMatrix& w, const EmbeddingSet& src, const EmbeddingSet& tgt,
                    const SeedDictionary& test_dict, std::span<const int> ns, int csls_k,
                    Method method = Method::SemiSup);

/// Tab-separated table: one row per method, a column group per direction,
/// one column per N inside each group.
std::string render_table(const std::vector<EvalReport>& reports);

/// JSON record holding every field of every report, keys in sorted order.
std::string to_record(const std::vector<EvalReport>& reports);
std::vector<EvalReport> parse_record(std::string_view text);

}  // namespace bli
