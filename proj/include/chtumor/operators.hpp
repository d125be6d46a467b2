#pragma once

#include <vector>

#include "chtumor/grid.hpp"

// Discrete Neumann Laplacian and the H / V / V* norm machinery.
//
// H inner product: (f,g)_H = sum f*g*h^dim.
// Gradient values live on faces (forward differences). Two quadratures:
//  - grad_sq: interior faces only; equals inner_H(-laplacian_apply(f), f)
//    exactly (summation by parts), used by the energy functional.
//  - norm_V: interior faces plus half-weight boundary faces carrying the
//    adjacent interior value (trapezoid repair), second-order accurate for
//    fields that need not satisfy the Neumann condition.
// V* norm: ||f||_*^2 = (f, (-Lap+I)^{-1} f)_H via riesz_inverse.
namespace chtumor {

Field laplacian_apply(const Field& f);

double inner_H(const Field& f, const Field& g);
double norm_H(const Field& f);
double grad_sq(const Field& f);
double norm_V(const Field& f);

// Solves (-Lap + I) w = f to ||residual||_H <= lin_tol*||f||_H.
// 1D: cached tridiagonal LDL^T factorization per grid (read-shared).
// 2D: conjugate gradients on the SPD operator.
Field riesz_inverse(const Field& f, double lin_tol = 1e-12);
double norm_Vstar(const Field& f, double lin_tol = 1e-12);

enum class BochnerNorm { L2_H, L2_V, L2_Vstar, Linf_H, Linf_Vstar };

// Space-time norms over uniformly spaced samples f(0), f(dt), ..., f(K*dt).
// L^2 in time: left-endpoint rectangle rule; L^inf in time: max over the
// same left-endpoint samples (the final sample only marks the interval end).
// Needs at least two samples.
double bochner_norm(const std::vector<Field>& samples, double dt,
                    BochnerNorm which);

}  // namespace chtumor
