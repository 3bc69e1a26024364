#include "bli/discriminator.hpp"

#include "doctest.h"
#include "flat_params.hpp"
#include "test_util.hpp"

using namespace bli;
using bli::testing::central_difference;
using bli::testing::flatten;
using bli::testing::gaussian;
using bli::testing::max_relative_error;
using bli::testing::unflatten;

namespace {

DiscriminatorShape small_shape(Eigen::Index d = 4, Eigen::Index hidden = 8, double dropout = 0.1) {
  DiscriminatorShape s;
  s.input_dim = d;
  s.hidden = hidden;
  s.input_dropout = dropout;
  return s;
}

double leaky(double x, double slope) { return x > 0 ? x : slope * x; }

// Scalar forward pass with explicit loops (no dropout).
double hand_probability(const DiscriminatorParams& p, const std::vector<double>& z, double slope) {
  const auto h = std::size_t(p.b1.size());
  std::vector<double> a1(h), a2(h);
  for (std::size_t i = 0; i < h; ++i) {
    double s = p.b1(Eigen::Index(i));
    for (std::size_t j = 0; j < z.size(); ++j) s += p.w1(Eigen::Index(i), Eigen::Index(j)) * z[j];
    a1[i] = leaky(s, slope);
  }
  for (std::size_t i = 0; i < h; ++i) {
    double s = p.b2(Eigen::Index(i));
    for (std::size_t j = 0; j < h; ++j) s += p.w2(Eigen::Index(i), Eigen::Index(j)) * a1[j];
    a2[i] = leaky(s, slope);
  }
  double out = p.b3;
  for (std::size_t i = 0; i < h; ++i) out += p.w3(Eigen::Index(i)) * a2[i];
  return 1.0 / (1.0 + std::exp(-out));
}

}  // namespace

TEST_CASE("a zero discriminator outputs one half") {
  Discriminator disc(small_shape());
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const Vector z = gaussian(4, 1, rng);
    CHECK(disc.forward(z, false, rng) == 0.5);
    CHECK(disc.forward(z, true, rng) == 0.5);
  }
}

TEST_CASE("eval mode is deterministic and outputs stay in (0, 1)") {
  Rng rng(2);
  Discriminator disc(small_shape(6, 16), rng);
  for (int t = 0; t < 50; ++t) {
    const Vector z = gaussian(6, 1, rng) * (1 + t);
    Rng a(5), b(77);
    const double p = disc.forward(z, false, a);
    CHECK(p == disc.forward(z, false, b));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    const double q = disc.forward(z, true, a);
    CHECK(q > 0.0);
    CHECK(q < 1.0);
  }
}

TEST_CASE("forward rejects non-finite input") {
  Rng rng(3);
  Discriminator disc(small_shape(), rng);
  Vector z = Vector::Zero(4);
  z(2) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(disc.forward(z, false, rng), Error);
}

TEST_CASE("forward matches a scalar evaluation") {
  Rng rng(4);
  Discriminator disc(small_shape(3, 5), rng);
  const Matrix zs = gaussian(8, 3, rng);
  for (Eigen::Index r = 0; r < 8; ++r) {
    std::vector<double> z = {zs(r, 0), zs(r, 1), zs(r, 2)};
    CHECK(std::abs(disc.forward(zs.row(r).transpose(), false, rng) -
                   hand_probability(disc.params(), z, 0.2)) <= 1e-12);
  }
}

TEST_CASE("losses at one half equal 2 ln 2") {
  Discriminator disc(small_shape());
  Rng rng(5);
  const Matrix src = gaussian(7, 4, rng);
  const Matrix tgt = gaussian(11, 4, rng);
  const MappingMatrix w = MappingMatrix::identity(4);
  const double expected = 2.0 * std::log(2.0);
  for (double s : {0.0, 0.1, 0.3}) {
    CHECK(std::abs(discriminator_loss(disc, w, src, tgt, s) - expected) <= 1e-9);
    CHECK(std::abs(generator_loss(disc, w, src, tgt, s) - expected) <= 1e-9);
  }
}

TEST_CASE("a confident correct discriminator drives L_D toward zero") {
  Discriminator disc(small_shape(2, 2, 0.0));
  auto& p = disc.params();
  // Logit = 50 * (relu(z0) - relu(-z0)) roughly; source rows have z0 > 0.
  p.w1 << 1, 0, -1, 0;
  p.w2 << 1, 0, 0, 1;
  p.w3 << 50, -50;
  Matrix src(2, 2), tgt(2, 2);
  src << 1, 0, 2, 1;
  tgt << -1, 0, -2, 1;
  CHECK(discriminator_loss(disc, MappingMatrix::identity(2), src, tgt) < 1e-9);
  CHECK(generator_loss(disc, MappingMatrix::identity(2), src, tgt) > 30.0);
}

TEST_CASE("hand-set 2+2 instance matches a scalar computation") {
  Discriminator disc(small_shape(2, 2, 0.0));
  auto& p = disc.params();
  p.w1 << 0.5, -0.25, 0.75, 1.0;
  p.b1 << 0.1, -0.2;
  p.w2 << 1.5, -0.5, 0.25, 0.8;
  p.b2 << 0.05, -0.3;
  p.w3 << 1.2, -0.7;
  p.b3 = 0.15;
  MappingMatrix w{Matrix(2, 2)};
  w.w << 0.8, -0.6, 0.6, 0.8;
  Matrix src(2, 2), tgt(2, 2);
  src << 1.0, 0.0, -0.3, 0.9;
  tgt << 0.2, -1.0, 0.7, 0.7;

  std::vector<double> ps, qs;
  for (Eigen::Index r = 0; r < 2; ++r) {
    // W x, element by element.
    const std::vector<double> wx = {w.w(0, 0) * src(r, 0) + w.w(0, 1) * src(r, 1),
                                    w.w(1, 0) * src(r, 0) + w.w(1, 1) * src(r, 1)};
    ps.push_back(hand_probability(p, wx, 0.2));
    qs.push_back(hand_probability(p, {tgt(r, 0), tgt(r, 1)}, 0.2));
  }
  const double hand_d = -(std::log(ps[0]) + std::log(ps[1])) / 2 -
                        (std::log(1 - qs[0]) + std::log(1 - qs[1])) / 2;
  const double hand_w = -(std::log(1 - ps[0]) + std::log(1 - ps[1])) / 2 -
                        (std::log(qs[0]) + std::log(qs[1])) / 2;
  CHECK(std::abs(discriminator_loss(disc, w, src, tgt) - hand_d) <= 1e-9);
  CHECK(std::abs(generator_loss(disc, w, src, tgt) - hand_w) <= 1e-9);

  // L_D + L_W = -mean[log p + log(1-p)] - mean[log q + log(1-q)].
  double sum = 0;
  for (int i = 0; i < 2; ++i) sum -= (std::log(ps[i]) + std::log(1 - ps[i])) / 2;
  for (int i = 0; i < 2; ++i) sum -= (std::log(qs[i]) + std::log(1 - qs[i])) / 2;
  CHECK(std::abs(discriminator_loss(disc, w, src, tgt) + generator_loss(disc, w, src, tgt) - sum) <=
        1e-9);

  // Smoothed targets: source 1-s, target s.
  const double s = 0.1;
  double smoothed = 0;
  for (int i = 0; i < 2; ++i) {
    smoothed -= ((1 - s) * std::log(ps[i]) + s * std::log(1 - ps[i])) / 2;
    smoothed -= (s * std::log(qs[i]) + (1 - s) * std::log(1 - qs[i])) / 2;
  }
  CHECK(std::abs(discriminator_loss(disc, w, src, tgt, s) - smoothed) <= 1e-9);
}

TEST_CASE("weighted_bce is stable for large logits") {
  Vector logits(3), targets(3), weights(3);
  logits << 800, -800, 0;
  targets << 1, 0, 1;
  weights << 1, 1, 1;
  CHECK(weighted_bce(logits, targets, weights) == doctest::Approx(std::log(2.0)));
  targets << 0, 1, 1;
  CHECK(weighted_bce(logits, targets, weights) == doctest::Approx(1600 + std::log(2.0)));
}

TEST_CASE("discriminator gradient matches finite differences") {
  for (double s : {0.0, 0.1}) {
    Rng rng(6);
    Discriminator disc(small_shape(4, 8), rng);
    const Matrix src = gaussian(5, 4, rng);
    const Matrix tgt = gaussian(6, 4, rng);
    MappingMatrix w{random_orthogonal(4, rng)};
    const DiscriminatorParams analytic = discriminator_loss_gradient(disc, w, src, tgt, s);
    const Vector numeric = central_difference<Vector>(
        flatten(disc.params()),
        [&](const Vector& v) {
          Discriminator copy = disc;
          unflatten(v, copy.params());
          return discriminator_loss(copy, w, src, tgt, s);
        },
        1e-4);
    const double err = max_relative_error(flatten(analytic), numeric);
    MESSAGE("discriminator gradient max relative error " << err);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("generator gradient matches finite differences") {
  for (double s : {0.0, 0.1}) {
    Rng rng(7);
    Discriminator disc(small_shape(4, 8), rng);
    const Matrix src = gaussian(5, 4, rng);
    const Matrix tgt = gaussian(6, 4, rng);
    const MappingMatrix w{random_orthogonal(4, rng)};
    const Matrix analytic = generator_loss_gradient(disc, w, src, tgt, s);
    const Matrix numeric = central_difference<Matrix>(
        w.w, [&](const Matrix& m) { return generator_loss(disc, {m}, src, tgt, s); }, 1e-4);
    const double err = max_relative_error(analytic, numeric);
    MESSAGE("generator gradient max relative error " << err);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("the target term of L_W carries no gradient in W") {
  Rng rng(8);
  Discriminator disc(small_shape(4, 8), rng);
  const Matrix src = gaussian(5, 4, rng);
  const MappingMatrix w{random_orthogonal(4, rng)};
  const Matrix a = generator_loss_gradient(disc, w, src, gaussian(6, 4, rng));
  const Matrix b = generator_loss_gradient(disc, w, src, gaussian(9, 4, rng));
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("at one half the shared output bias has zero generator gradient") {
  Discriminator disc(small_shape(4, 8));
  Rng rng(9);
  const Matrix src = gaussian(5, 4, rng);
  const Matrix tgt = gaussian(3, 4, rng);
  const MappingMatrix w = MappingMatrix::identity(4);
  for (double s : {0.0, 0.1, 0.2}) {
    auto at = [&](double b3) {
      Discriminator copy = disc;
      copy.params().b3 = b3;
      return generator_loss(copy, w, src, tgt, s);
    };
    const double eps = 1e-4;
    CHECK(std::abs((at(eps) - at(-eps)) / (2 * eps)) <= 1e-9);
  }
}

TEST_CASE("learning rate zero leaves the discriminator unchanged") {
  Rng rng(10);
  Discriminator disc(small_shape(), rng);
  const DiscriminatorParams before = disc.params();
  const Matrix src = gaussian(4, 4, rng);
  const Matrix tgt = gaussian(4, 4, rng);
  sgd_step_discriminator(disc, MappingMatrix::identity(4), src, tgt, 0.0, 0.1, rng);
  CHECK(flatten(disc.params()) == flatten(before));
}

TEST_CASE("one small step decreases L_D on a separable batch") {
  Rng rng(11);
  Discriminator disc(small_shape(4, 8, 0.0), rng);
  Matrix src = gaussian(8, 4, rng).cwiseAbs();
  Matrix tgt = -gaussian(8, 4, rng).cwiseAbs();
  const MappingMatrix w = MappingMatrix::identity(4);
  const double before = discriminator_loss(disc, w, src, tgt);
  sgd_step_discriminator(disc, w, src, tgt, 0.01, 0.0, rng);
  CHECK(discriminator_loss(disc, w, src, tgt) < before);
}

TEST_CASE("a zero-gradient generator step keeps an orthogonal W") {
  Discriminator disc(small_shape());
  Rng rng(12);
  MappingMatrix w{random_orthogonal(4, rng)};
  const Matrix before = w.w;
  sgd_step_generator(disc, w, gaussian(5, 4, rng), gaussian(5, 4, rng), 0.1, 0.1, {0.001});
  // w3 = 0 blocks every gradient path into W.
  CHECK((w.w - before).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("non-finite parameters abort the step") {
  Rng rng(13);
  Discriminator disc(small_shape(), rng);
  disc.params().w2(0, 0) = std::numeric_limits<double>::quiet_NaN();
  MappingMatrix w = MappingMatrix::identity(4);
  CHECK_THROWS_AS(sgd_step_discriminator(disc, w, gaussian(3, 4, rng), gaussian(3, 4, rng), 0.1, 0.1, rng),
                  Error);
  CHECK_THROWS_AS(sgd_step_generator(disc, w, gaussian(3, 4, rng), gaussian(3, 4, rng), 0.1, 0.1, {0.001}),
                  Error);
}

TEST_CASE("parameter count") {
  CHECK(Discriminator(small_shape(4, 8)).parameter_count() == 4 * 8 + 8 + 8 * 8 + 8 + 8 + 1);
  DiscriminatorShape full;
  full.input_dim = 300;
  CHECK(Discriminator(full).parameter_count() ==
        300u * 2048 + 2048 + 2048u * 2048 + 2048 + 2048 * 1 + 1);
}

TEST_CASE("random initialization is bounded by the fan-in") {
  Rng rng(14);
  Discriminator disc(small_shape(9, 16), rng);
  const auto& p = disc.params();
  CHECK(p.w1.cwiseAbs().maxCoeff() <= 1.0 / 3.0);
  CHECK(p.w2.cwiseAbs().maxCoeff() <= 0.25);
  CHECK(p.w3.cwiseAbs().maxCoeff() <= 0.25);
  CHECK(p.w1.cwiseAbs().maxCoeff() > 0.0);
}
