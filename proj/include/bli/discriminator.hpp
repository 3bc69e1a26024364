#pragma once

// Fully connected discriminator for adversarial alignment:
//   input(d) -> dropout -> hidden -> LeakyReLU -> hidden -> LeakyReLU -> 1 -> logistic
// The output is P(source = 1 | z), the probability that z is a mapped
// source embedding rather than a target embedding.

#include "bli/common.hpp"
#include "bli/geometry.hpp"

#include <cstdint>
#include <random>

namespace bli {

using Rng = std::mt19937_64;

struct DiscriminatorShape {
  Eigen::Index input_dim = 300;
  Eigen::Index hidden = 2048;
  double input_dropout = 0.1;
  double leaky_slope = 0.2;
};

/// Gradient (or parameter) block with the same layout as the network.
struct DiscriminatorParams {
  Matrix w1;  // hidden x input_dim
  Vector b1;
  Matrix w2;  // hidden x hidden
  Vector b2;
  Vector w3;  // hidden (single output unit)
  double b3 = 0.0;

  bool all_finite() const;
};

struct DiscriminatorGradient {
  DiscriminatorParams params;
  /// d loss / d input rows, already multiplied through the dropout mask.
  Matrix inputs;
};

class Discriminator {
 public:
  /// All parameters zero.
  explicit Discriminator(const DiscriminatorShape& shape);
  /// Weights and biases uniform in +-1/sqrt(fan_in).
  Discriminator(const DiscriminatorShape& shape, Rng& rng);

  const DiscriminatorShape& shape() const { return shape_; }
  DiscriminatorParams& params() { return params_; }
  const DiscriminatorParams& params() const { return params_; }
  std::size_t parameter_count() const;

  /// P(source = 1 | z) for one vector. Dropout is applied only in train mode.
  double forward(const Vector& z, bool train_mode, Rng& rng) const;

  /// Output logits for a batch of rows. `rng` is required in train mode.
  Vector logits(const Matrix& inputs, bool train_mode, Rng* rng) const;

  /// Gradient of sum_i weight_i * BCE(sigmoid(logit_i), target_i) with
  /// respect to the parameters and the (pre-dropout) inputs. The weighted
  /// loss is stored in `loss` when non-null. Parameter gradients are left
  /// empty when `parameter_gradients` is false.
  DiscriminatorGradient backward(const Matrix& inputs, const Vector& targets,
                                 const Vector& weights, bool train_mode, Rng* rng,
                                 double* loss, bool parameter_gradients = true) const;

  void apply_gradient(const DiscriminatorParams& grad, double learning_rate);

 private:
  DiscriminatorShape shape_;
  DiscriminatorParams params_;
};

/// Weighted binary cross-entropy on logits: sum_i w_i * -[t_i log p_i + (1-t_i) log(1-p_i)].
double weighted_bce(const Vector& logits, const Vector& targets, const Vector& weights);

double sigmoid(double x);

// Losses over a batch of source rows (mapped by w inside) and target rows.
// `smoothing` s sets the discriminator targets to 1-s (source) and s (target);
// the generator loss uses the flipped targets. s = 0 gives the plain
// cross-entropy losses. Both are evaluated with dropout off.

double discriminator_loss(const Discriminator& disc, const MappingMatrix& w,
                          const Matrix& src_batch, const Matrix& tgt_batch,
                          double smoothing = 0.0);

double generator_loss(const Discriminator& disc, const MappingMatrix& w, const Matrix& src_batch,
                      const Matrix& tgt_batch, double smoothing = 0.0);

/// Gradient of discriminator_loss with respect to the discriminator parameters.
DiscriminatorParams discriminator_loss_gradient(const Discriminator& disc,
                                                const MappingMatrix& w,
                                                const Matrix& src_batch,
                                                const Matrix& tgt_batch, double smoothing = 0.0);

/// Gradient of generator_loss with respect to W. Only the mapped-source term
/// depends on W.
Matrix generator_loss_gradient(const Discriminator& disc, const MappingMatrix& w,
                               const Matrix& src_batch, const Matrix& tgt_batch,
                               double smoothing = 0.0);

/// One SGD step on the discriminator loss with dropout active. Returns the
/// loss on the batch before the update. Throws on a non-finite gradient.
double sgd_step_discriminator(Discriminator& disc, const MappingMatrix& w,
                              const Matrix& src_batch, const Matrix& tgt_batch,
                              double learning_rate, double smoothing, Rng& rng);

/// W <- W - lr * dL_W/dW followed by one orthogonal retraction. Returns the
/// generator loss before the update. Throws on a non-finite gradient.
double sgd_step_generator(const Discriminator& disc, MappingMatrix& w, const Matrix& src_batch,
                          const Matrix& tgt_batch, double learning_rate, double smoothing,
                          const RetractionConfig& retraction);

}  // namespace bli
