#include "bli/synth.hpp"

#include "bli/adversarial.hpp"

#include <random>

namespace bli {

SynthData generate(const SynthSpec& spec) {
  if (spec.n_words < 2) throw Error("synth: n_words must be at least 2");
  if (spec.dim < 2) throw Error("synth: dim must be at least 2");
  if (spec.noise_sigma < 0.0 || spec.hubness_factor < 0.0) {
    throw Error("synth: noise_sigma and hubness_factor must be non-negative");
  }
  const auto n = static_cast<Eigen::Index>(spec.n_words);
  const Eigen::Index d = spec.dim;

  std::mt19937_64 rotation_rng(spec.rotation_seed);
  const Matrix q = random_orthogonal(d, rotation_rng);

  std::mt19937_64 rng(spec.data_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) x(r, c) = normal(rng);
  }
  x.col(0) *= 1.0 + spec.hubness_factor;
  x.rowwise().normalize();

  Matrix y = x * q.transpose();
  if (spec.noise_sigma > 0.0) {
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) y(r, c) += spec.noise_sigma * normal(rng);
    }
  }
  y.rowwise().normalize();

  std::vector<std::string> src_words;
  std::vector<std::string> tgt_words;
  src_words.reserve(spec.n_words);
  tgt_words.reserve(spec.n_words);
  SeedDictionary gold;
  for (std::size_t i = 0; i < spec.n_words; ++i) {
    src_words.push_back("w_" + std::to_string(i));
    tgt_words.push_back("w_" + std::to_string(i) + "'");
    gold.pairs.push_back({src_words.back(), tgt_words.back(), i, i});
  }
  return {EmbeddingSet(std::move(src_words), std::move(x), "src"),
          EmbeddingSet(std::move(tgt_words), std::move(y), "tgt"), MappingMatrix{q},
          std::move(gold)};
}

SeedDictionary gold_slice(const SynthData& data, std::size_t begin, std::size_t end) {
  end = std::min(end, data.gold.pairs.size());
  SeedDictionary out;
  if (begin < end) {
    out.pairs.assign(data.gold.pairs.begin() + static_cast<std::ptrdiff_t>(begin),
                     data.gold.pairs.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

void write_synth(const SynthData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_embeddings(data.src, dir / "src.vec");
  save_embeddings(data.tgt, dir / "tgt.vec");
  save_dictionary(data.gold, dir / "gold.txt");
  save_checkpoint({data.true_mapping, 0, 0.0}, dir / "true_mapping.txt");
}

}  // namespace bli
