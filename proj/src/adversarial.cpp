#include "bli/adversarial.hpp"

#include "bli/csls.hpp"
#include "text_util.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

namespace bli {
namespace {

Matrix sample_rows(const Matrix& m, std::size_t pool, int count, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pool - 1);
  Matrix out(count, m.cols());
  for (int i = 0; i < count; ++i) out.row(i) = m.row(static_cast<Eigen::Index>(pick(rng)));
  return out;
}

}  // namespace

void AdversarialConfig::validate() const {
  if (epochs < 0) throw ValidationError("epochs must be non-negative");
  if (steps_per_epoch <= 0) throw ValidationError("steps_per_epoch must be positive");
  if (batch_size <= 0) throw ValidationError("batch_size must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must lie in (0, 1)");
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
  if (!(lr_decay > 0.0) || !(lr_shrink > 0.0)) {
    throw ValidationError("lr_decay and lr_shrink must be positive");
  }
  if (!(label_smoothing >= 0.0 && label_smoothing < 0.5)) {
    throw ValidationError("label_smoothing must lie in [0, 0.5)");
  }
  if (hidden <= 0) throw ValidationError("hidden must be positive");
  if (!(input_dropout >= 0.0 && input_dropout < 1.0)) {
    throw ValidationError("input_dropout must lie in [0, 1)");
  }
  if (validation_words == 0 || validation_vocab == 0) {
    throw ValidationError("validation_words and validation_vocab must be positive");
  }
  if (csls_k <= 0) throw ValidationError("csls_k must be positive");
  if (log_interval <= 0) throw ValidationError("log_interval must be positive");
}

double validation_score(const MappingMatrix& w, const EmbeddingSet& src, const EmbeddingSet& tgt,
                        const AdversarialConfig& config) {
  const auto ns = static_cast<Eigen::Index>(std::min(config.validation_vocab, src.size()));
  const auto nt = static_cast<Eigen::Index>(std::min(config.validation_vocab, tgt.size()));
  const CslsIndex index =
      build_index(w.apply(src.vectors().topRows(ns)), tgt.vectors().topRows(nt), config.csls_k);
  const auto best = best_targets(index, config.validation_words);
  double total = 0.0;
  for (const auto& p : best) total += p.score;
  return total / static_cast<double>(best.size());
}

AdversarialResult train_adversarial(const EmbeddingSet& src, const EmbeddingSet& tgt,
                                    const AdversarialConfig& config) {
  config.validate();
  if (src.dim() != tgt.dim()) throw Error("adversarial: source and target dimensions differ");
  const std::size_t src_pool =
      config.sample_top_n == 0 ? src.size() : std::min(config.sample_top_n, src.size());
  const std::size_t tgt_pool =
      config.sample_top_n == 0 ? tgt.size() : std::min(config.sample_top_n, tgt.size());
  if (src_pool < static_cast<std::size_t>(config.batch_size) ||
      tgt_pool < static_cast<std::size_t>(config.batch_size)) {
    throw Error("adversarial: vocabulary smaller than the batch size");
  }

  Rng rng(config.rng_seed);
  MappingMatrix w = config.init == MappingInit::Identity
                        ? MappingMatrix::identity(src.dim())
                        : MappingMatrix{random_orthogonal(src.dim(), rng)};
  Discriminator disc({src.dim(), config.hidden, config.input_dropout, config.leaky_slope}, rng);
  const RetractionConfig retraction{config.beta};

  AdversarialResult result;
  result.validation.push_back({0, validation_score(w, src, tgt, config)});
  result.best = w;
  result.best_score = result.validation.front();

  double lr = config.learning_rate;
  long long step = 0;
  double sum_d = 0.0;
  double sum_g = 0.0;
  int in_interval = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (int s = 0; s < config.steps_per_epoch; ++s) {
      ++step;
      const MappingMatrix previous = w;
      double ld = 0.0;
      double lw = 0.0;
      try {
        Matrix xs = sample_rows(src.vectors(), src_pool, config.batch_size, rng);
        Matrix ys = sample_rows(tgt.vectors(), tgt_pool, config.batch_size, rng);
        ld = sgd_step_discriminator(disc, w, xs, ys, lr, config.label_smoothing, rng);
        xs = sample_rows(src.vectors(), src_pool, config.batch_size, rng);
        ys = sample_rows(tgt.vectors(), tgt_pool, config.batch_size, rng);
        lw = sgd_step_generator(disc, w, xs, ys, lr, config.label_smoothing, retraction);
      } catch (const TrainingDiverged&) {
        throw;
      } catch (const Error& e) {
        throw TrainingDiverged(std::string(e.what()) + " at step " + std::to_string(step),
                               previous, step);
      }
      if (!w.w.allFinite()) {
        throw TrainingDiverged("adversarial: mapping diverged at step " + std::to_string(step),
                               previous, step);
      }
      sum_d += ld;
      sum_g += lw;
      if (++in_interval == config.log_interval) {
        result.losses.push_back({step, sum_d / in_interval, sum_g / in_interval,
                                 orthogonality_error(w)});
        sum_d = sum_g = 0.0;
        in_interval = 0;
      }
    }
    const ValidationScore score{epoch, validation_score(w, src, tgt, config)};
    result.validation.push_back(score);
    if (score.mean_csls > result.best_score.mean_csls) {
      result.best = w;
      result.best_score = score;
    } else {
      lr *= config.lr_shrink;
    }
    lr *= config.lr_decay;
  }

  result.best = retract_until(std::move(result.best), retraction, config.final_orthogonality_tol,
                              config.max_final_retractions);
  result.last = retract_until(std::move(w), retraction, config.final_orthogonality_tol,
                              config.max_final_retractions);
  return result;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const Matrix& w = checkpoint.w.w;
  out << "bli-mapping " << w.rows() << ' ' << checkpoint.epoch << ' '
      << detail::format_double(checkpoint.validation_score) << '\n';
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      if (c > 0) out << ' ';
      out << detail::format_double(w(r, c));
    }
    out << '\n';
  }
  if (!out) throw Error("I/O failure writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::string line;
  std::getline(in, line);
  const auto header = detail::split_whitespace(line);
  long long d = 0;
  Checkpoint cp;
  if (header.size() != 4 || header[0] != "bli-mapping" || !detail::parse_integer(header[1], d) ||
      d <= 0 || !detail::parse_integer(header[2], cp.epoch) ||
      !detail::parse_double(header[3], cp.validation_score)) {
    throw Error(path.string() + ":1: malformed checkpoint header");
  }
  cp.w.w.resize(d, d);
  for (long long r = 0; r < d; ++r) {
    if (!std::getline(in, line)) throw Error(path.string() + ": truncated checkpoint");
    const auto fields = detail::split_whitespace(line);
    if (fields.size() != static_cast<std::size_t>(d)) {
      throw Error(path.string() + ":" + std::to_string(r + 2) + ": expected " + std::to_string(d) +
                  " values");
    }
    for (long long c = 0; c < d; ++c) {
      if (!detail::parse_double(fields[static_cast<std::size_t>(c)], cp.w.w(r, c)) ||
          !std::isfinite(cp.w.w(r, c))) {
        throw Error(path.string() + ":" + std::to_string(r + 2) + ": bad value");
      }
    }
  }
  return cp;
}

void write_loss_curve(std::ostream& out, const std::vector<LossRecord>& losses) {
  out << "step,discriminator_loss,generator_loss,orthogonality\n";
  for (const auto& l : losses) {
    out << l.step << ',' << detail::format_double(l.discriminator_loss) << ','
        << detail::format_double(l.generator_loss) << ',' << detail::format_double(l.orthogonality)
        << '\n';
  }
}

}  // namespace bli
