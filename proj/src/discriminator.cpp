#include "bli/discriminator.hpp"

#include <cmath>

namespace bli {
namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

Matrix leaky(const Matrix& h, double slope) {
  return h.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

Matrix leaky_derivative(const Matrix& h, double slope) {
  return h.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; });
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  Matrix mask(rows, cols);
  if (rate <= 0.0) {
    mask.setOnes();
    return mask;
  }
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) mask(r, c) = keep(rng) ? scale : 0.0;
  }
  return mask;
}

struct Activations {
  Matrix input;  // after dropout
  Matrix mask;   // empty when dropout is off
  Matrix h1, a1, h2, a2;
  Vector logits;
};

Activations run_forward(const Discriminator& disc, const Matrix& inputs, bool train_mode,
                        Rng* rng) {
  const auto& p = disc.params();
  const auto& shape = disc.shape();
  if (inputs.cols() != shape.input_dim) {
    throw Error("discriminator: input dimension " + std::to_string(inputs.cols()) +
                ", expected " + std::to_string(shape.input_dim));
  }
  if (!inputs.allFinite()) throw Error("discriminator: non-finite input");
  Activations act;
  if (train_mode && shape.input_dropout > 0.0) {
    if (rng == nullptr) throw Error("discriminator: train mode requires an rng");
    act.mask = dropout_mask(inputs.rows(), inputs.cols(), shape.input_dropout, *rng);
    act.input = inputs.cwiseProduct(act.mask);
  } else {
    act.input = inputs;
  }
  act.h1 = act.input * p.w1.transpose();
  act.h1.rowwise() += p.b1.transpose();
  act.a1 = leaky(act.h1, shape.leaky_slope);
  act.h2 = act.a1 * p.w2.transpose();
  act.h2.rowwise() += p.b2.transpose();
  act.a2 = leaky(act.h2, shape.leaky_slope);
  act.logits = act.a2 * p.w3;
  act.logits.array() += p.b3;
  return act;
}

struct LabeledBatch {
  Matrix inputs;
  Vector targets;
  Vector weights;
};

// Rows [W x ; y] with per-row targets and 1/n, 1/m weights.
LabeledBatch make_batch(const MappingMatrix& w, const Matrix& src_batch, const Matrix& tgt_batch,
                        double source_target, double target_target) {
  if (src_batch.rows() == 0 || tgt_batch.rows() == 0) throw Error("adversarial: empty batch");
  const Eigen::Index n = src_batch.rows();
  const Eigen::Index m = tgt_batch.rows();
  LabeledBatch b;
  b.inputs.resize(n + m, tgt_batch.cols());
  b.inputs.topRows(n) = w.apply(src_batch);
  b.inputs.bottomRows(m) = tgt_batch;
  b.targets.resize(n + m);
  b.targets.head(n).setConstant(source_target);
  b.targets.tail(m).setConstant(target_target);
  b.weights.resize(n + m);
  b.weights.head(n).setConstant(1.0 / static_cast<double>(n));
  b.weights.tail(m).setConstant(1.0 / static_cast<double>(m));
  return b;
}

LabeledBatch discriminator_batch(const MappingMatrix& w, const Matrix& src_batch,
                                 const Matrix& tgt_batch, double smoothing) {
  return make_batch(w, src_batch, tgt_batch, 1.0 - smoothing, smoothing);
}

LabeledBatch generator_batch(const MappingMatrix& w, const Matrix& src_batch,
                             const Matrix& tgt_batch, double smoothing) {
  return make_batch(w, src_batch, tgt_batch, smoothing, 1.0 - smoothing);
}

}  // namespace

bool DiscriminatorParams::all_finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite() &&
         w3.allFinite() && std::isfinite(b3);
}

Discriminator::Discriminator(const DiscriminatorShape& shape) : shape_(shape) {
  if (shape.input_dim <= 0 || shape.hidden <= 0) {
    throw Error("discriminator: dimensions must be positive");
  }
  if (shape.input_dropout < 0.0 || shape.input_dropout >= 1.0) {
    throw Error("discriminator: dropout rate must lie in [0, 1)");
  }
  params_.w1 = Matrix::Zero(shape.hidden, shape.input_dim);
  params_.b1 = Vector::Zero(shape.hidden);
  params_.w2 = Matrix::Zero(shape.hidden, shape.hidden);
  params_.b2 = Vector::Zero(shape.hidden);
  params_.w3 = Vector::Zero(shape.hidden);
  params_.b3 = 0.0;
}

Discriminator::Discriminator(const DiscriminatorShape& shape, Rng& rng) : Discriminator(shape) {
  auto fill = [&rng](auto& block, Eigen::Index fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = u(rng);
  };
  fill(params_.w1, shape.input_dim);
  fill(params_.b1, shape.input_dim);
  fill(params_.w2, shape.hidden);
  fill(params_.b2, shape.hidden);
  fill(params_.w3, shape.hidden);
  std::uniform_real_distribution<double> u(-1.0 / std::sqrt(static_cast<double>(shape.hidden)),
                                           1.0 / std::sqrt(static_cast<double>(shape.hidden)));
  params_.b3 = u(rng);
}

std::size_t Discriminator::parameter_count() const {
  const auto d = static_cast<std::size_t>(shape_.input_dim);
  const auto h = static_cast<std::size_t>(shape_.hidden);
  return d * h + h + h * h + h + h + 1;
}

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double Discriminator::forward(const Vector& z, bool train_mode, Rng& rng) const {
  const Vector l = logits(z.transpose(), train_mode, &rng);
  return sigmoid(l(0));
}

Vector Discriminator::logits(const Matrix& inputs, bool train_mode, Rng* rng) const {
  return run_forward(*this, inputs, train_mode, rng).logits;
}

DiscriminatorGradient Discriminator::backward(const Matrix& inputs, const Vector& targets,
                                              const Vector& weights, bool train_mode, Rng* rng,
                                              double* loss, bool parameter_gradients) const {
  const Activations act = run_forward(*this, inputs, train_mode, rng);
  if (loss != nullptr) *loss = weighted_bce(act.logits, targets, weights);

  const double slope = shape_.leaky_slope;
  const Vector dlogits =
      weights.cwiseProduct(act.logits.unaryExpr([](double v) { return sigmoid(v); }) - targets);

  DiscriminatorGradient g;
  const Matrix dh2 = (dlogits * params_.w3.transpose()).cwiseProduct(leaky_derivative(act.h2, slope));
  const Matrix dh1 = (dh2 * params_.w2).cwiseProduct(leaky_derivative(act.h1, slope));
  if (parameter_gradients) {
    g.params.w3 = act.a2.transpose() * dlogits;
    g.params.b3 = dlogits.sum();
    g.params.w2 = dh2.transpose() * act.a1;
    g.params.b2 = dh2.colwise().sum().transpose();
    g.params.w1 = dh1.transpose() * act.input;
    g.params.b1 = dh1.colwise().sum().transpose();
  }
  g.inputs = dh1 * params_.w1;
  if (act.mask.size() != 0) g.inputs = g.inputs.cwiseProduct(act.mask);
  return g;
}

void Discriminator::apply_gradient(const DiscriminatorParams& grad, double learning_rate) {
  params_.w1 -= learning_rate * grad.w1;
  params_.b1 -= learning_rate * grad.b1;
  params_.w2 -= learning_rate * grad.w2;
  params_.b2 -= learning_rate * grad.b2;
  params_.w3 -= learning_rate * grad.w3;
  params_.b3 -= learning_rate * grad.b3;
}

double weighted_bce(const Vector& logits, const Vector& targets, const Vector& weights) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double l = logits(i);
    const double t = targets(i);
    total += weights(i) * (t * softplus(-l) + (1.0 - t) * softplus(l));
  }
  return total;
}

double discriminator_loss(const Discriminator& disc, const MappingMatrix& w,
                          const Matrix& src_batch, const Matrix& tgt_batch, double smoothing) {
  const LabeledBatch b = discriminator_batch(w, src_batch, tgt_batch, smoothing);
  return weighted_bce(disc.logits(b.inputs, false, nullptr), b.targets, b.weights);
}

double generator_loss(const Discriminator& disc, const MappingMatrix& w, const Matrix& src_batch,
                      const Matrix& tgt_batch, double smoothing) {
  const LabeledBatch b = generator_batch(w, src_batch, tgt_batch, smoothing);
  return weighted_bce(disc.logits(b.inputs, false, nullptr), b.targets, b.weights);
}

DiscriminatorParams discriminator_loss_gradient(const Discriminator& disc,
                                                const MappingMatrix& w,
                                                const Matrix& src_batch,
                                                const Matrix& tgt_batch, double smoothing) {
  const LabeledBatch b = discriminator_batch(w, src_batch, tgt_batch, smoothing);
  return disc.backward(b.inputs, b.targets, b.weights, false, nullptr, nullptr).params;
}

Matrix generator_loss_gradient(const Discriminator& disc, const MappingMatrix& w,
                               const Matrix& src_batch, const Matrix& tgt_batch,
                               double smoothing) {
  const LabeledBatch b = generator_batch(w, src_batch, tgt_batch, smoothing);
  const DiscriminatorGradient g =
      disc.backward(b.inputs, b.targets, b.weights, false, nullptr, nullptr, false);
  // z_i = W x_i, so dL/dW = sum_i (dL/dz_i) x_i^T over the source rows.
  return g.inputs.topRows(src_batch.rows()).transpose() * src_batch;
}

double sgd_step_discriminator(Discriminator& disc, const MappingMatrix& w,
                              const Matrix& src_batch, const Matrix& tgt_batch,
                              double learning_rate, double smoothing, Rng& rng) {
  const LabeledBatch b = discriminator_batch(w, src_batch, tgt_batch, smoothing);
  double loss = 0.0;
  const DiscriminatorGradient g = disc.backward(b.inputs, b.targets, b.weights, true, &rng, &loss);
  if (!g.params.all_finite() || !std::isfinite(loss)) {
    throw Error("adversarial: non-finite discriminator gradient (loss " + std::to_string(loss) +
                ")");
  }
  disc.apply_gradient(g.params, learning_rate);
  return loss;
}

double sgd_step_generator(const Discriminator& disc, MappingMatrix& w, const Matrix& src_batch,
                          const Matrix& tgt_batch, double learning_rate, double smoothing,
                          const RetractionConfig& retraction) {
  const LabeledBatch b = generator_batch(w, src_batch, tgt_batch, smoothing);
  double loss = 0.0;
  const DiscriminatorGradient g =
      disc.backward(b.inputs, b.targets, b.weights, false, nullptr, &loss, false);
  const Matrix grad = g.inputs.topRows(src_batch.rows()).transpose() * src_batch;
  if (!grad.allFinite() || !std::isfinite(loss)) {
    throw Error("adversarial: non-finite generator gradient (loss " + std::to_string(loss) + ")");
  }
  w.w -= learning_rate * grad;
  w = orthogonal_retraction(w, retraction);
  return loss;
}

}  // namespace bli
