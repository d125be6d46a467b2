#include "chtumor/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chtumor {
namespace {

constexpr double kLogClamp = 1e-9;

double clamp1(double r) { return std::clamp(r, -1.0, 1.0); }

[[noreturn]] void domain_err(const char* what, double r) {
  throw std::domain_error(std::string(what) + " undefined at r = " +
                          std::to_string(r));
}

double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

// max |d/ds exp(1 - 1/(1-s^2))| over (-1,1); shape constant of the bump.
double bump_slope_sup() {
  static const double sup = [] {
    double m = 0.0;
    const int N = 2000000;
    for (int i = 1; i < N; ++i) {
      const double s = static_cast<double>(i) / N;
      const double u = 1.0 - s * s;
      const double g = std::exp(1.0 - 1.0 / u) * 2.0 * s / (u * u);
      m = std::max(m, g);
    }
    return m * (1.0 + 1e-6);
  }();
  return sup;
}

double bump01(double s) {
  const double u = 1.0 - s * s;
  return u > 0.0 ? std::exp(1.0 - 1.0 / u) : 0.0;
}

double bump01_prime(double s) {
  const double u = 1.0 - s * s;
  return u > 0.0 ? bump01(s) * (-2.0 * s / (u * u)) : 0.0;
}

}  // namespace

PotentialSpec PotentialSpec::double_well() {
  PotentialSpec s;
  s.family = PotentialFamily::DoubleWell;
  s.lipschitz_L = 2.0;  // sup |3r^2 - 1| on [-1,1]
  return s;
}

PotentialSpec PotentialSpec::logarithmic(double kappa) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("logarithmic potential needs kappa > 0");
  PotentialSpec s;
  s.family = PotentialFamily::Logarithmic;
  s.kappa = kappa;
  s.lipschitz_L = 2.0 * kappa;
  return s;
}

PotentialSpec PotentialSpec::regularized_indicator(double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("indicator potential needs epsilon > 0");
  PotentialSpec s;
  s.family = PotentialFamily::RegularizedIndicator;
  s.epsilon = epsilon;
  s.lipschitz_L = 8.0;  // sup |12r^2 - 4| on [-1,1]
  return s;
}

PotentialSpec PotentialSpec::nonuniqueness(double L, double epsilon) {
  if (!(L > 0.0)) throw std::invalid_argument("nonuniqueness slope L must be positive");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("indicator potential needs epsilon > 0");
  PotentialSpec s;
  s.family = PotentialFamily::NonUniqueness;
  s.L = L;
  s.epsilon = epsilon;
  s.lipschitz_L = L;
  return s;
}

double eval_Bhat(const PotentialSpec& s, double r) {
  switch (s.family) {
    case PotentialFamily::DoubleWell: {
      const double t = std::max(0.0, r * r - 1.0);
      return 0.25 * t * t;
    }
    case PotentialFamily::Logarithmic: {
      if (std::fabs(r) > 1.0) domain_err("logarithmic potential", r);
      return xlogx(1.0 - r) + xlogx(1.0 + r);
    }
    case PotentialFamily::RegularizedIndicator:
    case PotentialFamily::NonUniqueness: {
      const double d = std::fabs(r) > 1.0 ? std::fabs(r) - 1.0 : 0.0;
      return d * d / (2.0 * s.epsilon);
    }
  }
  return 0.0;
}

double eval_B(const PotentialSpec& s, double r) {
  switch (s.family) {
    case PotentialFamily::DoubleWell: {
      const double t = std::max(0.0, r * r - 1.0);
      return r * t;
    }
    case PotentialFamily::Logarithmic: {
      if (std::fabs(r) > 1.0) domain_err("logarithmic potential", r);
      const double rc = std::clamp(r, -1.0 + kLogClamp, 1.0 - kLogClamp);
      return std::log((1.0 + rc) / (1.0 - rc));
    }
    case PotentialFamily::RegularizedIndicator:
    case PotentialFamily::NonUniqueness:
      return (r - clamp1(r)) / s.epsilon;
  }
  return 0.0;
}

double eval_B_prime(const PotentialSpec& s, double r) {
  switch (s.family) {
    case PotentialFamily::DoubleWell:
      return r * r > 1.0 ? 3.0 * r * r - 1.0 : 0.0;
    case PotentialFamily::Logarithmic: {
      if (std::fabs(r) > 1.0) domain_err("logarithmic potential", r);
      const double rc = std::clamp(r, -1.0 + kLogClamp, 1.0 - kLogClamp);
      return 2.0 / (1.0 - rc * rc);
    }
    case PotentialFamily::RegularizedIndicator:
    case PotentialFamily::NonUniqueness:
      return std::fabs(r) > 1.0 ? 1.0 / s.epsilon : 0.0;
  }
  return 0.0;
}

double eval_B0(const PotentialSpec& s, double r) {
  switch (s.family) {
    case PotentialFamily::DoubleWell: {
      const double t = std::max(0.0, r * r - 1.0);
      return r * t;
    }
    case PotentialFamily::Logarithmic:
      if (std::fabs(r) >= 1.0)
        domain_err("exact logarithmic subdifferential", r);
      return std::log((1.0 + r) / (1.0 - r));
    case PotentialFamily::RegularizedIndicator:
    case PotentialFamily::NonUniqueness:
      if (std::fabs(r) > 1.0) domain_err("indicator subdifferential", r);
      return 0.0;
  }
  return 0.0;
}

double eval_pihat(const PotentialSpec& s, double r) {
  switch (s.family) {
    case PotentialFamily::DoubleWell: {
      const double t = std::max(0.0, 1.0 - r * r);
      return 0.25 * t * t;
    }
    case PotentialFamily::Logarithmic: {
      const double a = std::fabs(r);
      return a <= 1.0 ? s.kappa * (1.0 - r * r)
                      : -2.0 * s.kappa * (a - 1.0);
    }
    case PotentialFamily::RegularizedIndicator: {
      const double t = std::max(0.0, 1.0 - r * r);
      return t * t;
    }
    case PotentialFamily::NonUniqueness: {
      const double a = std::fabs(r);
      if (a <= 1.0) return 0.5 * s.L * (1.0 - r * r);
      if (a <= 2.0) {
        const double t = a - 2.0;
        return 0.5 * s.L * (t * t - 1.0);
      }
      return -0.5 * s.L;
    }
  }
  return 0.0;
}

double eval_pi(const PotentialSpec& s, double r) {
  switch (s.family) {
    case PotentialFamily::DoubleWell:
      return std::fabs(r) < 1.0 ? -r * (1.0 - r * r) : 0.0;
    case PotentialFamily::Logarithmic:
      return -2.0 * s.kappa * clamp1(r);
    case PotentialFamily::RegularizedIndicator:
      return std::fabs(r) < 1.0 ? -4.0 * r * (1.0 - r * r) : 0.0;
    case PotentialFamily::NonUniqueness: {
      const double a = std::fabs(r);
      if (a <= 1.0) return -s.L * r;
      if (a <= 2.0) return (r > 0.0 ? 1.0 : -1.0) * s.L * (a - 2.0);
      return 0.0;
    }
  }
  return 0.0;
}

double eval_pi_prime(const PotentialSpec& s, double r) {
  switch (s.family) {
    case PotentialFamily::DoubleWell:
      return std::fabs(r) < 1.0 ? 3.0 * r * r - 1.0 : 0.0;
    case PotentialFamily::Logarithmic:
      return std::fabs(r) < 1.0 ? -2.0 * s.kappa : 0.0;
    case PotentialFamily::RegularizedIndicator:
      return std::fabs(r) < 1.0 ? 12.0 * r * r - 4.0 : 0.0;
    case PotentialFamily::NonUniqueness: {
      const double a = std::fabs(r);
      if (a <= 1.0) return -s.L;
      if (a <= 2.0) return s.L;
      return 0.0;
    }
  }
  return 0.0;
}

double eval_F(const PotentialSpec& s, double r) {
  return eval_Bhat(s, r) + eval_pihat(s, r);
}

std::string potential_name(const PotentialSpec& s) {
  switch (s.family) {
    case PotentialFamily::DoubleWell:
      return "double_well";
    case PotentialFamily::Logarithmic:
      return "logarithmic";
    case PotentialFamily::RegularizedIndicator:
      return "indicator";
    case PotentialFamily::NonUniqueness:
      return "nonuniq";
  }
  return "?";
}

ProliferationSpec ProliferationSpec::constant(double value) {
  if (!(value >= 0.0))
    throw std::invalid_argument("proliferation rate must be nonnegative");
  ProliferationSpec s;
  s.kind = ProliferationKind::Constant;
  s.value = value;
  s.bound = value;
  s.lipschitz = 0.0;
  return s;
}

ProliferationSpec ProliferationSpec::clipped_sqrt_f(double scale) {
  if (!(scale >= 0.0))
    throw std::invalid_argument("proliferation scale must be nonnegative");
  ProliferationSpec s;
  s.kind = ProliferationKind::ClippedSqrtF;
  s.scale = scale;
  s.bound = 0.5 * scale;  // max of scale*(1-r^2)/2
  s.lipschitz = scale;    // sup |scale * r| on (-1,1)
  return s;
}

ProliferationSpec ProliferationSpec::smooth_bump(double center, double width,
                                                 double height) {
  if (!(width > 0.0)) throw std::invalid_argument("bump width must be positive");
  if (!(height >= 0.0))
    throw std::invalid_argument("bump height must be nonnegative");
  ProliferationSpec s;
  s.kind = ProliferationKind::SmoothBump;
  s.center = center;
  s.width = width;
  s.height = height;
  s.bound = height;
  s.lipschitz = height * bump_slope_sup() / width;
  return s;
}

double eval_p(const ProliferationSpec& s, double r) {
  switch (s.kind) {
    case ProliferationKind::Constant:
      return s.value;
    case ProliferationKind::ClippedSqrtF:
      // sqrt of the quartic double well on |r|<1: scale*(1-r^2)/2.
      return std::fabs(r) < 1.0 ? 0.5 * s.scale * (1.0 - r * r) : 0.0;
    case ProliferationKind::SmoothBump:
      return s.height * bump01((r - s.center) / s.width);
  }
  return 0.0;
}

double eval_p_prime(const ProliferationSpec& s, double r) {
  switch (s.kind) {
    case ProliferationKind::Constant:
      return 0.0;
    case ProliferationKind::ClippedSqrtF:
      return std::fabs(r) < 1.0 ? -s.scale * r : 0.0;
    case ProliferationKind::SmoothBump:
      return s.height * bump01_prime((r - s.center) / s.width) / s.width;
  }
  return 0.0;
}

std::string proliferation_name(const ProliferationSpec& s) {
  switch (s.kind) {
    case ProliferationKind::Constant:
      return "constant";
    case ProliferationKind::ClippedSqrtF:
      return "clipped_sqrt_f";
    case ProliferationKind::SmoothBump:
      return "smooth_bump";
  }
  return "?";
}

}  // namespace chtumor
