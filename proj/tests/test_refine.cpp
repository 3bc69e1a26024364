#include "bli/refine.hpp"
#include "bli/synth.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <numbers>

using namespace bli;
using bli::testing::oracle_identity_p_at_1;

namespace {

EmbeddingSet named(const std::string& prefix, std::size_t n) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) words.push_back(prefix + std::to_string(i));
  return EmbeddingSet(words, Matrix::Identity(Eigen::Index(n), Eigen::Index(n)));
}

SynthData instance() {
  SynthSpec spec;
  spec.n_words = 1000;
  spec.dim = 30;
  return generate(spec);
}

RefineConfig small(std::size_t s) {
  RefineConfig c;
  c.s_anchor_pairs = s;
  return c;
}

}  // namespace

TEST_CASE("selection keeps the most frequent source words") {
  const EmbeddingSet src = named("s", 12);
  const EmbeddingSet tgt = named("t", 12);
  InducedDictionary dict;
  // Ten pairs whose source ranks are 9, 2, 7, 0, 5, 11, 3, 8, 1, 6.
  for (int r : {9, 2, 7, 0, 5, 11, 3, 8, 1, 6}) {
    dict.entries.push_back({"s" + std::to_string(r), "t" + std::to_string(r), 1.0 - r * 0.01});
  }
  const AnchorSelection sel = select_anchor_pairs(dict, src, tgt, 3);
  REQUIRE(sel.seed.pairs.size() == 3);
  CHECK(sel.seed.pairs[0].source == "s0");
  CHECK(sel.seed.pairs[1].source == "s1");
  CHECK(sel.seed.pairs[2].source == "s2");
  CHECK_FALSE(sel.warning.has_value());
}

TEST_CASE("asking for at least the whole dictionary takes all of it and warns") {
  const EmbeddingSet src = named("s", 5);
  const EmbeddingSet tgt = named("t", 5);
  InducedDictionary dict{"", {{"s3", "t1", 0.2}, {"s1", "t3", 0.4}}};
  for (std::size_t s : {2u, 10u}) {
    const AnchorSelection sel = select_anchor_pairs(dict, src, tgt, s);
    CHECK(sel.seed.pairs.size() == 2);
    CHECK(sel.warning.has_value());
  }
}

TEST_CASE("pairs sharing a source rank keep the higher score first") {
  const EmbeddingSet src = named("s", 4);
  const EmbeddingSet tgt = named("t", 4);
  InducedDictionary dict{"", {{"s1", "t0", 0.1}, {"s1", "t2", 0.9}, {"s0", "t3", 0.5}}};
  const AnchorSelection sel = select_anchor_pairs(dict, src, tgt, 2);
  REQUIRE(sel.seed.pairs.size() == 2);
  CHECK(sel.seed.pairs[0].source == "s0");
  CHECK(sel.seed.pairs[1].target == "t2");
}

TEST_CASE("s = 0 is rejected") {
  CHECK_THROWS_AS(small(0).validate(), ValidationError);
  RefineConfig c = small(100);
  c.procrustes.dict_top_pairs = 50;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK_NOTHROW(small(100).validate());
}

TEST_CASE("refining the true rotation is a no-op") {
  const SynthData data = instance();
  const RefineResult r = train_refined(data.src, data.tgt, data.true_mapping, small(500));
  CHECK((r.procrustes.w.w - data.true_mapping.w).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(oracle_identity_p_at_1(r.procrustes.w.w, data.src.vectors(), data.tgt.vectors(), 0, 1000, 10) ==
        100.0);
  CHECK(r.anchors.seed.pairs.size() == 500);
  CHECK(orthogonality_error(r.procrustes.w) <= 1e-6);
}

TEST_CASE("refinement repairs a 5 degree perturbation") {
  // Low dimension and a dense vocabulary, so a 5 degree error costs P@1.
  SynthSpec spec;
  spec.n_words = 1000;
  spec.dim = 4;
  const SynthData data = generate(spec);
  Matrix g = Matrix::Identity(4, 4);
  const double a = 5.0 * std::numbers::pi / 180.0;
  g(0, 0) = std::cos(a);
  g(0, 1) = -std::sin(a);
  g(1, 0) = std::sin(a);
  g(1, 1) = std::cos(a);
  const MappingMatrix perturbed{data.true_mapping.w * g};
  const double before =
      oracle_identity_p_at_1(perturbed.w, data.src.vectors(), data.tgt.vectors(), 0, 1000, 10);
  REQUIRE(before < 100.0);
  const RefineResult r = train_refined(data.src, data.tgt, perturbed, small(500));
  const double after =
      oracle_identity_p_at_1(r.procrustes.w.w, data.src.vectors(), data.tgt.vectors(), 0, 1000, 10);
  MESSAGE("P@1 before " << before << " after " << after);
  CHECK(after > before);
  CHECK(orthogonality_error(r.procrustes.w) <= 1e-6);
}

TEST_CASE("a non-orthogonal adversarial mapping is rejected") {
  const SynthData data = instance();
  CHECK_THROWS_AS(train_refined(data.src, data.tgt, {1.1 * data.true_mapping.w}, small(100)), Error);
}

TEST_CASE("refinement is deterministic") {
  const SynthData data = instance();
  std::mt19937_64 rng(5);
  const MappingMatrix start{random_orthogonal(30, rng)};
  const RefineResult a = train_refined(data.src, data.tgt, start, small(200));
  const RefineResult b = train_refined(data.src, data.tgt, start, small(200));
  CHECK(a.procrustes.w.w == b.procrustes.w.w);
  CHECK(a.procrustes.dictionary.entries == b.procrustes.dictionary.entries);
}
