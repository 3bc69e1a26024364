#pragma once

// Self-supervised alignment: a linear generator W trained against the
// discriminator, with an orthogonal retraction after every generator step.

#include "bli/discriminator.hpp"
#include "bli/embeddings.hpp"
#include "bli/geometry.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace bli {

enum class MappingInit { Identity, RandomOrthogonal };

struct AdversarialConfig {
  int epochs = 5;
  int steps_per_epoch = 100000;
  int batch_size = 32;
  double beta = 0.001;
  double learning_rate = 0.1;
  /// Multiplied into the learning rate after every epoch.
  double lr_decay = 0.98;
  /// Multiplied into the learning rate when the validation score fails to improve.
  double lr_shrink = 0.5;
  /// Batches are drawn from this many most frequent words; 0 means all.
  std::size_t sample_top_n = 0;
  double label_smoothing = 0.1;
  std::uint64_t rng_seed = 0;
  MappingInit init = MappingInit::Identity;

  Eigen::Index hidden = 2048;
  double input_dropout = 0.1;
  double leaky_slope = 0.2;

  /// Source words whose translations feed the validation score.
  std::size_t validation_words = 500;
  /// Vocabulary cap (per side) for the validation CSLS index.
  std::size_t validation_vocab = 10000;
  int csls_k = 10;
  /// A loss record is kept every log_interval steps (averaged over the interval).
  int log_interval = 1000;
  /// The returned mapping is retracted until its orthogonality error is
  /// at most this value.
  double final_orthogonality_tol = 1e-3;
  int max_final_retractions = 20000;

  void validate() const;
};

struct ValidationScore {
  int epoch = 0;
  /// Mean CSLS of the best translations of the most frequent source words.
  double mean_csls = 0.0;
};

struct LossRecord {
  long long step = 0;
  double discriminator_loss = 0.0;
  double generator_loss = 0.0;
  double orthogonality = 0.0;
};

struct AdversarialResult {
  MappingMatrix best;
  /// Mapping after the final step, with the same closing retraction sweep.
  MappingMatrix last;
  ValidationScore best_score;
  /// Entry 0 is the initial mapping, entry e the mapping after epoch e.
  std::vector<ValidationScore> validation;
  std::vector<LossRecord> losses;
};

/// Training stopped because a loss or gradient became non-finite.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, MappingMatrix last_finite, long long step)
      : Error(what), last_finite_(std::move(last_finite)), step_(step) {}
  const MappingMatrix& last_finite() const { return last_finite_; }
  long long step() const { return step_; }

 private:
  MappingMatrix last_finite_;
  long long step_;
};

/// Unsupervised model-selection score for a mapping.
double validation_score(const MappingMatrix& w, const EmbeddingSet& src, const EmbeddingSet& tgt,
                        const AdversarialConfig& config);

AdversarialResult train_adversarial(const EmbeddingSet& src, const EmbeddingSet& tgt,
                                    const AdversarialConfig& config);

/// Mapping checkpoint: a header line "bli-mapping <d> <epoch> <score>"
/// followed by d rows of d values, written so they reload bit-exactly.
struct Checkpoint {
  MappingMatrix w;
  int epoch = 0;
  double validation_score = 0.0;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// CSV with header "step,discriminator_loss,generator_loss,orthogonality".
void write_loss_curve(std::ostream& out, const std::vector<LossRecord>& losses);

}  // namespace bli
