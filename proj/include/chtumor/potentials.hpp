#pragma once

#include <string>

// Potential families F = Bhat + pihat with B = d/dr Bhat (Yosida-regularized
// where Bhat is an indicator), the minimum-modulus selection B0 of the exact
// graph, and the proliferation function p. All evaluations are pure
// functions of (spec, r) and safe for concurrent use.
namespace chtumor {

enum class PotentialFamily {
  DoubleWell,            // Bhat = ((r^2-1)^+)^2/4, pihat = ((1-r^2)^+)^2/4
  Logarithmic,           // Bhat = (1-r)ln(1-r)+(1+r)ln(1+r), pihat ~ kappa(1-r^2)
  RegularizedIndicator,  // Bhat = indicator of [-1,1], Yosida level epsilon
  NonUniqueness          // indicator Bhat, pi(r) = -L r on [-1,1], capped
};

struct PotentialSpec {
  PotentialFamily family = PotentialFamily::DoubleWell;
  double kappa = 2.0;    // Logarithmic barrier weight
  double epsilon = 1e-3; // Yosida regularization level for indicator-type Bhat
  double L = 2.0;        // NonUniqueness slope of pi on [-1,1]
  double lipschitz_L = 2.0;  // Lipschitz constant of pi, derived per family

  static PotentialSpec double_well();
  static PotentialSpec logarithmic(double kappa = 2.0);
  static PotentialSpec regularized_indicator(double epsilon = 1e-3);
  static PotentialSpec nonuniqueness(double L, double epsilon = 1e-3);
};

// Convex part (Moreau-Yosida envelope for indicator-type families).
double eval_Bhat(const PotentialSpec& s, double r);
// Derivative of the (regularized) convex part; monotone. The logarithmic
// family clamps r to [-1+1e-9, 1-1e-9] so Newton iterates stay finite.
double eval_B(const PotentialSpec& s, double r);
double eval_B_prime(const PotentialSpec& s, double r);
// Minimum-modulus element of the exact (unregularized) graph.
double eval_B0(const PotentialSpec& s, double r);
double eval_pihat(const PotentialSpec& s, double r);
double eval_pi(const PotentialSpec& s, double r);
double eval_pi_prime(const PotentialSpec& s, double r);
double eval_F(const PotentialSpec& s, double r);

std::string potential_name(const PotentialSpec& s);

enum class ProliferationKind { Constant, ClippedSqrtF, SmoothBump };

struct ProliferationSpec {
  ProliferationKind kind = ProliferationKind::Constant;
  double value = 1.0;   // Constant
  double scale = 1.0;   // ClippedSqrtF: p = scale * sqrt(F_dw(r)) on |r|<1
  double center = 0.0, width = 1.0, height = 1.0;  // SmoothBump
  double bound = 1.0;      // sup of p
  double lipschitz = 0.0;  // Lipschitz constant of p

  static ProliferationSpec constant(double value);
  static ProliferationSpec clipped_sqrt_f(double scale);
  static ProliferationSpec smooth_bump(double center, double width,
                                       double height);
  bool is_constant() const { return kind == ProliferationKind::Constant; }
};

double eval_p(const ProliferationSpec& s, double r);
double eval_p_prime(const ProliferationSpec& s, double r);

std::string proliferation_name(const ProliferationSpec& s);

}  // namespace chtumor
