#include "bli/eval.hpp"

#include "bli/csls.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <set>

namespace bli {

std::string_view method_tag(Method m) {
  switch (m) {
    case Method::SemiSup: return "Semi-sup";
    case Method::SelfSup: return "Self-sup";
    case Method::SelfSupRe: return "Self-sup-re";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "semi-sup") return Method::SemiSup;
  if (lower == "self-sup") return Method::SelfSup;
  if (lower == "self-sup-re") return Method::SelfSupRe;
  throw ValidationError("unknown method '" + std::string(text) +
                        "' (expected semi-sup, self-sup or self-sup-re)");
}

EvalReport evaluate(const MappingMatrix& w, const EmbeddingSet& src, const EmbeddingSet& tgt,
                    const SeedDictionary& test_dict, std::span<const int> ns, int csls_k,
                    Method method) {
  if (ns.empty()) throw Error("evaluate: no N values given");
  if (!std::is_sorted(ns.begin(), ns.end()) || ns.front() <= 0) {
    throw Error("evaluate: N values must be positive and ascending");
  }
  // Distinct source rows with the set of their gold target rows.
  std::map<std::size_t, std::set<std::size_t>> gold;
  for (const auto& p : test_dict.pairs) gold[p.source_row].insert(p.target_row);
  if (gold.empty()) throw Error("evaluate: no evaluable test words");

  std::vector<std::size_t> rows;
  rows.reserve(gold.size());
  for (const auto& [row, targets] : gold) rows.push_back(row);

  const CslsIndex index = build_index(w.apply(src.vectors()), tgt.vectors(), csls_k);
  const auto ranked = top_targets(index, rows, static_cast<std::size_t>(ns.back()));

  std::vector<std::size_t> hits(ns.size(), 0);
  for (std::size_t q = 0; q < rows.size(); ++q) {
    const auto& targets = gold[rows[q]];
    const auto& top = ranked[q];
    std::size_t first_hit = top.size();
    for (std::size_t r = 0; r < top.size(); ++r) {
      if (targets.contains(top[r])) {
        first_hit = r;
        break;
      }
    }
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (first_hit < static_cast<std::size_t>(ns[i])) ++hits[i];
    }
  }

  EvalReport report;
  report.direction = src.lang_tag() + "-" + tgt.lang_tag();
  report.method = method;
  report.n_evaluated = rows.size();
  report.n_skipped = test_dict.dropped;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    report.p_at[ns[i]] = 100.0 * static_cast<double>(hits[i]) / static_cast<double>(rows.size());
  }
  return report;
}

std::string render_table(const std::vector<EvalReport>& reports) {
  std::vector<std::string> directions;
  std::set<int> ns;
  std::set<Method> methods;
  for (const auto& r : reports) {
    if (std::find(directions.begin(), directions.end(), r.direction) == directions.end()) {
      directions.push_back(r.direction);
    }
    for (const auto& [n, v] : r.p_at) ns.insert(n);
    methods.insert(r.method);
  }

  std::string out;
  for (const auto& d : directions) {
    out += '\t';
    out += d;
    out += std::string(ns.empty() ? 0 : ns.size() - 1, '\t');
  }
  out += '\n';
  for (std::size_t i = 0; i < directions.size(); ++i) {
    for (int n : ns) out += "\tP@" + std::to_string(n);
  }
  out += '\n';
  for (Method m : methods) {
    out += method_tag(m);
    for (const auto& d : directions) {
      const EvalReport* found = nullptr;
      for (const auto& r : reports) {
        if (r.method == m && r.direction == d) found = &r;
      }
      for (int n : ns) {
        out += '\t';
        if (found != nullptr && found->p_at.contains(n)) {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.1f", found->p_at.at(n));
          out += buf;
        } else {
          out += '-';
        }
      }
    }
    out += '\n';
  }
  return out;
}

std::string to_record(const std::vector<EvalReport>& reports) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json p_at = nlohmann::json::object();
    for (const auto& [n, v] : r.p_at) p_at[std::to_string(n)] = v;
    list.push_back({{"direction", r.direction},
                    {"method", std::string(method_tag(r.method))},
                    {"n_evaluated", r.n_evaluated},
                    {"n_skipped", r.n_skipped},
                    {"p_at", p_at}});
  }
  return nlohmann::json{{"reports", list}}.dump(2) + "\n";
}

std::vector<EvalReport> parse_record(std::string_view text) {
  std::vector<EvalReport> out;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& item : doc.at("reports")) {
      EvalReport r;
      r.direction = item.at("direction").get<std::string>();
      r.method = parse_method(item.at("method").get<std::string>());
      r.n_evaluated = item.at("n_evaluated").get<std::size_t>();
      r.n_skipped = item.at("n_skipped").get<std::size_t>();
      for (const auto& [key, value] : item.at("p_at").items()) {
        r.p_at[std::stoi(key)] = value.get<double>();
      }
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report record: ") + e.what());
  }
  return out;
}

}  // namespace bli
