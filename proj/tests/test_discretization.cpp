#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "chtumor/grid.hpp"
#include "chtumor/operators.hpp"

using namespace chtumor;

namespace {

constexpr double kPi = 3.14159265358979323846;

Field random_field(const Grid& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Field f(g);
  for (std::size_t i = 0; i < g.cells(); ++i) f[i] = d(rng);
  return f;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("laplacian annihilates constants") {
  for (const Grid& g : {Grid(1, 64), Grid(2, 16)}) {
    const Field f(g, 3.7);
    const Field lf = laplacian_apply(f);
    for (std::size_t i = 0; i < g.cells(); ++i) CHECK(lf[i] == 0.0);
  }
}

TEST_CASE("laplacian reproduces -pi^2 cos(pi x) at second order") {
  auto err_at = [](int n) {
    const Grid g(1, n);
    const Field f =
        Field::from_function(g, [](double x, double) { return std::cos(kPi * x); });
    const Field lf = laplacian_apply(f);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i)
      worst = std::max(worst,
                       std::fabs(lf[i] + kPi * kPi * f[i]));
    return worst;
  };
  const double e256 = err_at(256);
  CHECK(e256 <= 1e-3);
  const double e512 = err_at(512);
  const double ratio = e256 / e512;
  CHECK(ratio >= 3.7);
  CHECK(ratio <= 4.3);

  // same in 2D: cos(pi x)cos(pi y) has eigenvalue 2 pi^2
  const Grid g2(2, 64);
  const Field f2 = Field::from_function(g2, [](double x, double y) {
    return std::cos(kPi * x) * std::cos(kPi * y);
  });
  const Field lf2 = laplacian_apply(f2);
  double worst2 = 0.0;
  for (std::size_t i = 0; i < g2.cells(); ++i)
    worst2 = std::max(worst2, std::fabs(lf2[i] + 2.0 * kPi * kPi * f2[i]));
  CHECK(worst2 <= 2e-2);
}

TEST_CASE("discrete divergence theorem holds for random fields") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const Grid g = trial % 2 == 0 ? Grid(1, 64) : Grid(2, 16);
    const Field f = random_field(g, rng);
    const Field lf = laplacian_apply(f);
    double total = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) total += lf[i];
    total *= std::pow(g.h, g.dim);
    CHECK(std::fabs(total) <= 1e-12 * std::max(1.0, norm_H(f)));
  }
}

TEST_CASE("laplacian is self-adjoint in the H inner product") {
  std::mt19937 rng(7);
  for (const Grid& g : {Grid(1, 64), Grid(2, 16)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Field f = random_field(g, rng);
      const Field gg = random_field(g, rng);
      const Field lf = laplacian_apply(f);
      const Field lg = laplacian_apply(gg);
      const double a = inner_H(lf, gg);
      const double b = inner_H(f, lg);
      CHECK(std::fabs(a - b) <=
            1e-12 * (1.0 + norm_H(lf) * norm_H(gg) + norm_H(f) * norm_H(lg)));
    }
  }
}

TEST_CASE("H and V norms on reference fields") {
  const Grid g(1, 128);
  const Field one(g, 1.0);
  CHECK(norm_H(one) == doctest::Approx(1.0));
  CHECK(norm_V(one) == doctest::Approx(1.0));
  CHECK(inner_H(one, one) == doctest::Approx(1.0));

  const Field fx = Field::from_function(g, [](double x, double) { return x; });
  const double nv2 = norm_V(fx) * norm_V(fx);
  CHECK(std::fabs(nv2 - 4.0 / 3.0) <= 1e-3);

  const Field c2(Grid(2, 32), 1.0);
  CHECK(norm_H(c2) == doctest::Approx(1.0));
  CHECK(norm_V(c2) == doctest::Approx(1.0));
}

TEST_CASE("grad_sq is the summation-by-parts square of the gradient") {
  std::mt19937 rng(31);
  for (const Grid& g : {Grid(1, 64), Grid(2, 16)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Field f = random_field(g, rng);
      const double a = grad_sq(f);
      Field lf = laplacian_apply(f);
      lf *= -1.0;
      const double b = inner_H(lf, f);
      CHECK(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a)));
      CHECK(a >= 0.0);
    }
  }
}

TEST_CASE("mismatched grids are rejected") {
  const Field a(Grid(1, 64), 1.0);
  const Field b(Grid(1, 128), 1.0);
  CHECK_THROWS((void)inner_H(a, b));
}

TEST_CASE("riesz inverse solves (-lap + 1)w = f") {
  const Grid g(1, 256);
  const Field one(g, 1.0);
  const Field w1 = riesz_inverse(one);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.cells(); ++i)
    worst = std::max(worst, std::fabs(w1[i] - 1.0));
  CHECK(worst <= 1e-12);

  const Field f = Field::from_function(g, [](double x, double) {
    return (1.0 + kPi * kPi) * std::cos(kPi * x);
  });
  const Field w = riesz_inverse(f);
  const Field target =
      Field::from_function(g, [](double x, double) { return std::cos(kPi * x); });
  CHECK(max_abs_diff(w, target) <= 1e-3);

  // linearity on an eigenfield
  const Grid g64(1, 64);
  const Field e = Field::from_function(
      g64, [](double x, double) { return std::cos(kPi * x); });
  Field e2 = e;
  e2 *= 2.0;
  Field we = riesz_inverse(e);
  we *= 2.0;
  const Field we2 = riesz_inverse(e2);
  CHECK(max_abs_diff(we, we2) <= 1e-12);

  // 2D path (conjugate gradients)
  const Grid g2(2, 32);
  const Field one2(g2, 1.0);
  const Field w2 = riesz_inverse(one2);
  double worst2 = 0.0;
  for (std::size_t i = 0; i < g2.cells(); ++i)
    worst2 = std::max(worst2, std::fabs(w2[i] - 1.0));
  CHECK(worst2 <= 1e-10);
}

TEST_CASE("dual pairing through the inverse riesz map is symmetric") {
  std::mt19937 rng(17);
  for (const Grid& g : {Grid(1, 64), Grid(2, 16)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Field f = random_field(g, rng);
      const Field h = random_field(g, rng);
      const double a = inner_H(f, riesz_inverse(h));
      const double b = inner_H(h, riesz_inverse(f));
      CHECK(std::fabs(a - b) <= 1e-10 * (1.0 + std::fabs(a) + std::fabs(b)));
    }
  }
}

TEST_CASE("dual norm is dominated by the H norm") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid g = trial % 2 == 0 ? Grid(1, 64) : Grid(2, 16);
    const Field f = random_field(g, rng);
    CHECK(norm_Vstar(f) <= norm_H(f) + 1e-12);
  }
}

TEST_CASE("dual norm of the first cosine mode matches the analytic value") {
  const Grid g(1, 256);
  const Field f =
      Field::from_function(g, [](double x, double) { return std::cos(kPi * x); });
  const double expect = std::sqrt(0.5 / (1.0 + kPi * kPi));
  CHECK(std::fabs(norm_Vstar(f) - expect) <= 1e-3);
  const Field one(g, 1.0);
  CHECK(norm_Vstar(one) == doctest::Approx(1.0));
}

TEST_CASE("space-time norms use left-endpoint samples") {
  const Grid g(1, 32);
  SUBCASE("constant in time") {
    const Field two(g, 2.0);
    const std::vector<Field> samples(5, two);
    const double dt = 0.25;  // T = 1
    CHECK(bochner_norm(samples, dt, BochnerNorm::L2_H) ==
          doctest::Approx(2.0));
    CHECK(bochner_norm(samples, dt, BochnerNorm::Linf_H) ==
          doctest::Approx(2.0));
    CHECK(bochner_norm(samples, dt, BochnerNorm::L2_V) ==
          doctest::Approx(2.0));
    CHECK(bochner_norm(samples, dt, BochnerNorm::L2_Vstar) ==
          doctest::Approx(2.0));
    CHECK(bochner_norm(samples, dt, BochnerNorm::Linf_Vstar) ==
          doctest::Approx(2.0));
  }
  SUBCASE("linear ramp approaches the integral of t^2") {
    const int K = 1000;
    const double dt = 1e-3;
    std::vector<Field> samples;
    samples.reserve(K + 1);
    for (int k = 0; k <= K; ++k) samples.emplace_back(g, k * dt);
    const double l2 = bochner_norm(samples, dt, BochnerNorm::L2_H);
    CHECK(std::fabs(l2 - 1.0 / std::sqrt(3.0)) <= 1e-3);
    const double linf = bochner_norm(samples, dt, BochnerNorm::Linf_H);
    CHECK(linf == doctest::Approx(1.0 - dt));
  }
  SUBCASE("too few samples") {
    const std::vector<Field> samples(1, Field(g, 1.0));
    CHECK_THROWS((void)bochner_norm(samples, 0.1, BochnerNorm::L2_H));
  }
}
