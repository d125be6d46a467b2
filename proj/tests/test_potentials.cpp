#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "chtumor/potentials.hpp"

using namespace chtumor;

namespace {

double fd_central(const std::function<double(double)>& f, double r,
                  double h = 1e-6) {
  return (f(r + h) - f(r - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("double-well split: convex part, smooth part, derivatives") {
  const PotentialSpec dw = PotentialSpec::double_well();
  CHECK(eval_Bhat(dw, 1.0) == doctest::Approx(0.0));
  CHECK(eval_Bhat(dw, -1.0) == doctest::Approx(0.0));
  // the convex branch ((r^2-1)^+)^2/4 vanishes inside the well
  CHECK(eval_Bhat(dw, 0.0) == doctest::Approx(0.0));
  CHECK(eval_Bhat(dw, 2.0) == doctest::Approx(2.25));
  CHECK(eval_pihat(dw, 0.0) == doctest::Approx(0.25));
  CHECK(eval_F(dw, 0.0) == doctest::Approx(0.25));
  CHECK(eval_F(dw, 1.0) == doctest::Approx(0.0));
  CHECK(eval_B(dw, 0.0) == doctest::Approx(0.0));
  CHECK(eval_B(dw, 2.0) == doctest::Approx(6.0));
  CHECK(eval_B(dw, -1.0) == doctest::Approx(0.0));
  CHECK(eval_B0(dw, 2.0) == doctest::Approx(6.0));
  CHECK(eval_B0(dw, -1.0) == doctest::Approx(0.0));
  CHECK(eval_pi(dw, 0.0) == doctest::Approx(0.0));
  CHECK(eval_pi(dw, 0.5) == doctest::Approx(-0.375));
  CHECK(dw.lipschitz_L == doctest::Approx(2.0));
}

TEST_CASE("indicator envelope equals squared distance over 2 epsilon") {
  const PotentialSpec ind = PotentialSpec::regularized_indicator(0.1);
  CHECK(eval_Bhat(ind, 1.2) == doctest::Approx(0.2));
  CHECK(eval_Bhat(ind, 0.5) == doctest::Approx(0.0));
  CHECK(eval_B(ind, 0.5) == doctest::Approx(0.0));
  CHECK(eval_B(ind, 1.2) == doctest::Approx(2.0));
  CHECK(eval_B(ind, -1.3) == doctest::Approx(-3.0));
  CHECK(eval_B0(ind, 0.9) == doctest::Approx(0.0));
  CHECK(eval_B0(ind, 1.0) == doctest::Approx(0.0));
  CHECK(eval_B0(ind, -1.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)eval_B0(ind, 1.1), std::domain_error);

  // brute-force prox: envelope(r) = min_s (r-s)^2/(2 eps) over s in [-1,1]
  for (double r : {-1.7, -1.05, 0.3, 1.4, 2.6}) {
    double best = 1e300;
    for (int k = 0; k <= 200000; ++k) {
      const double s = -1.0 + 2.0 * k / 200000.0;
      best = std::min(best, (r - s) * (r - s) / (2.0 * ind.epsilon));
    }
    CHECK(eval_Bhat(ind, r) == doctest::Approx(best).epsilon(1e-8));
  }
}

TEST_CASE("logarithmic barrier: domain, clamp, endpoint continuity") {
  const PotentialSpec lg = PotentialSpec::logarithmic(2.0);
  CHECK(eval_Bhat(lg, 0.0) == doctest::Approx(0.0));
  CHECK(eval_B(lg, 0.0) == doctest::Approx(0.0));
  CHECK(eval_Bhat(lg, 1.0) == doctest::Approx(2.0 * std::log(2.0)));
  CHECK_THROWS_AS((void)eval_Bhat(lg, 1.0000001), std::domain_error);
  CHECK_THROWS_AS((void)eval_B(lg, -1.0000001), std::domain_error);
  CHECK_THROWS_AS((void)eval_B0(lg, 1.0), std::domain_error);
  CHECK(std::isfinite(eval_B(lg, 1.0)));
  CHECK(eval_B(lg, 1.0) == doctest::Approx(eval_B(lg, 1.0 - 1e-9)));
  CHECK(eval_pi(lg, 0.5) == doctest::Approx(-2.0));
  CHECK(eval_pi(lg, 2.0) == doctest::Approx(-4.0));
  CHECK(eval_pi(lg, 3.0) == doctest::Approx(eval_pi(lg, 2.0)));
  CHECK(lg.lipschitz_L == doctest::Approx(4.0));
}

TEST_CASE("linear-slope variant: pi is -L r on [-1,1] with a Lipschitz cap") {
  const PotentialSpec nu = PotentialSpec::nonuniqueness(2.0);
  CHECK(eval_pi(nu, 0.5) == doctest::Approx(-1.0));
  CHECK(eval_pi(nu, 0.0) == doctest::Approx(0.0));
  CHECK(eval_pi(nu, 1.0) == doctest::Approx(-2.0));
  CHECK(eval_pi(nu, -1.0) == doctest::Approx(2.0));
  CHECK(eval_pi(nu, 3.0) == doctest::Approx(0.0));
  CHECK(eval_pihat(nu, 0.0) == doctest::Approx(1.0));
  // C^0 joins of pihat at |r| = 1 and 2
  CHECK(eval_pihat(nu, 1.0 - 1e-9) ==
        doctest::Approx(eval_pihat(nu, 1.0 + 1e-9)).epsilon(1e-6));
  CHECK(eval_pihat(nu, 2.0 - 1e-9) ==
        doctest::Approx(eval_pihat(nu, 2.0 + 1e-9)).epsilon(1e-6));
  CHECK(eval_B(nu, 1.5) == doctest::Approx(0.5 / nu.epsilon));
  CHECK(eval_B0(nu, 0.9) == doctest::Approx(0.0));
  CHECK(nu.lipschitz_L == doctest::Approx(2.0));
}

TEST_CASE("eval_B matches central differences of eval_Bhat at smooth points") {
  struct Case {
    PotentialSpec spec;
    std::vector<double> points;
  };
  const std::vector<Case> cases = {
      {PotentialSpec::double_well(), {-1.7, -0.3, 0.4, 1.9}},
      {PotentialSpec::logarithmic(2.0), {-0.6, 0.0, 0.3}},
      {PotentialSpec::regularized_indicator(0.1), {-1.5, -0.5, 0.7, 1.8}},
      {PotentialSpec::nonuniqueness(2.0, 0.1), {-1.5, 0.5, 1.8}},
  };
  for (const Case& c : cases) {
    for (double r : c.points) {
      const double fd =
          fd_central([&](double t) { return eval_Bhat(c.spec, t); }, r);
      const double b = eval_B(c.spec, r);
      CHECK(std::fabs(fd - b) <= 1e-6 * std::max(1.0, std::fabs(b)));
      const double fdp =
          fd_central([&](double t) { return eval_B(c.spec, t); }, r);
      const double bp = eval_B_prime(c.spec, r);
      CHECK(std::fabs(fdp - bp) <= 1e-4 * std::max(1.0, std::fabs(bp)));
      const double fpi =
          fd_central([&](double t) { return eval_pihat(c.spec, t); }, r);
      const double pi = eval_pi(c.spec, r);
      CHECK(std::fabs(fpi - pi) <= 1e-6 * std::max(1.0, std::fabs(pi)));
    }
  }
}

TEST_CASE("B is monotone on 10^4 random pairs per family") {
  std::mt19937 rng(42);
  const std::vector<PotentialSpec> specs = {
      PotentialSpec::double_well(), PotentialSpec::logarithmic(2.0),
      PotentialSpec::regularized_indicator(1e-3),
      PotentialSpec::nonuniqueness(2.0)};
  for (const PotentialSpec& s : specs) {
    const bool log_family = s.family == PotentialFamily::Logarithmic;
    std::uniform_real_distribution<double> d(log_family ? -0.999 : -3.0,
                                             log_family ? 0.999 : 3.0);
    for (int k = 0; k < 10000; ++k) {
      const double r = d(rng), t = d(rng);
      CHECK((eval_B(s, r) - eval_B(s, t)) * (r - t) >= -1e-12);
    }
  }
}

TEST_CASE("F = Bhat + pihat stays nonnegative on the evaluable domain") {
  const PotentialSpec dw = PotentialSpec::double_well();
  const PotentialSpec lg = PotentialSpec::logarithmic(2.0);
  const PotentialSpec ind = PotentialSpec::regularized_indicator(1e-3);
  const PotentialSpec nu = PotentialSpec::nonuniqueness(2.0);
  for (int k = 0; k <= 6000; ++k) {
    const double r = -3.0 + 6.0 * k / 6000.0;
    CHECK(eval_F(dw, r) >= 0.0);
    CHECK(eval_F(ind, r) >= 0.0);
    if (std::fabs(r) <= 1.0) {
      CHECK(eval_F(lg, r) >= 0.0);
      CHECK(eval_F(nu, r) >= 0.0);  // guaranteed on the physical range only
    }
  }
}

TEST_CASE("pi is Lipschitz with the advertised constant") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  const std::vector<PotentialSpec> specs = {
      PotentialSpec::double_well(), PotentialSpec::logarithmic(2.0),
      PotentialSpec::regularized_indicator(1e-3),
      PotentialSpec::nonuniqueness(2.0)};
  for (const PotentialSpec& s : specs) {
    for (int k = 0; k < 10000; ++k) {
      const double r = d(rng), t = d(rng);
      CHECK(std::fabs(eval_pi(s, r) - eval_pi(s, t)) <=
            s.lipschitz_L * std::fabs(r - t) + 1e-12);
    }
  }
}

TEST_CASE("envelope at r = 1.5 scales like 1/epsilon") {
  const double eps[] = {1e-1, 1e-2, 1e-3};
  double prev_bhat = 0.0, prev_b = 0.0;
  for (int i = 0; i < 3; ++i) {
    const PotentialSpec ind = PotentialSpec::regularized_indicator(eps[i]);
    const double bhat = eval_Bhat(ind, 1.5);
    const double b = eval_B(ind, 1.5);
    CHECK(bhat == doctest::Approx(0.125 / eps[i]));
    if (i > 0) {
      CHECK(bhat > prev_bhat);
      CHECK(bhat / prev_bhat == doctest::Approx(10.0).epsilon(0.01));
      CHECK(b / prev_b == doctest::Approx(10.0).epsilon(0.01));
    }
    prev_bhat = bhat;
    prev_b = b;
  }
}

TEST_CASE("minimum-modulus growth surrogate is small for the double well") {
  const PotentialSpec dw = PotentialSpec::double_well();
  double worst = 0.0;
  for (int k = 0; k <= 20000; ++k) {
    const double r = -10.0 + 20.0 * k / 20000.0;
    worst = std::max(worst,
                     std::fabs(eval_B0(dw, r)) / (eval_Bhat(dw, r) + 1.0));
  }
  MESSAGE("max |B0|/(Bhat+1) on [-10,10]: ", worst);
  CHECK(worst < 5.0);
}

TEST_CASE("factories reject out-of-range parameters") {
  CHECK_THROWS_AS(PotentialSpec::logarithmic(0.0), std::invalid_argument);
  CHECK_THROWS_AS(PotentialSpec::regularized_indicator(-1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(PotentialSpec::nonuniqueness(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ProliferationSpec::constant(-0.5), std::invalid_argument);
  CHECK_THROWS_AS(ProliferationSpec::smooth_bump(0.0, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProliferationSpec::smooth_bump(0.0, 1.0, -1.0),
                  std::invalid_argument);
}

TEST_CASE("proliferation families: values, bounds, Lipschitz") {
  const ProliferationSpec zero = ProliferationSpec::constant(0.0);
  const ProliferationSpec c7 = ProliferationSpec::constant(0.7);
  const ProliferationSpec sq = ProliferationSpec::clipped_sqrt_f(1.0);
  const ProliferationSpec bump = ProliferationSpec::smooth_bump(0.2, 0.5, 2.0);

  CHECK(eval_p(zero, -5.0) == doctest::Approx(0.0));
  CHECK(eval_p(zero, 17.3) == doctest::Approx(0.0));
  CHECK(eval_p(c7, 3.0) == doctest::Approx(0.7));
  CHECK(eval_p(sq, 2.0) == doctest::Approx(0.0));
  CHECK(eval_p(sq, -1.0) == doctest::Approx(0.0));
  // at r = 0 the clipped profile equals sqrt(F(0)) of the quartic well
  CHECK(eval_p(sq, 0.0) == doctest::Approx(0.5));
  CHECK(eval_p(bump, 0.2) == doctest::Approx(2.0));
  CHECK(eval_p(bump, 0.7) == doctest::Approx(0.0));
  CHECK(eval_p(bump, -0.3) == doctest::Approx(0.0));

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (const ProliferationSpec* s : {&zero, &c7, &sq, &bump}) {
    for (int k = 0; k < 10000; ++k) {
      const double r = d(rng), t = d(rng);
      const double pr = eval_p(*s, r);
      CHECK(pr >= 0.0);
      CHECK(pr <= s->bound + 1e-12);
      CHECK(std::fabs(pr - eval_p(*s, t)) <=
            s->lipschitz * std::fabs(r - t) + 1e-12);
    }
  }

  for (double r : {-0.6, 0.1, 0.45}) {
    const double fd = fd_central([&](double t) { return eval_p(sq, t); }, r);
    CHECK(std::fabs(fd - eval_p_prime(sq, r)) <= 1e-5);
    const double fdb =
        fd_central([&](double t) { return eval_p(bump, t); }, r);
    CHECK(std::fabs(fdb - eval_p_prime(bump, r)) <= 1e-4);
  }
}
