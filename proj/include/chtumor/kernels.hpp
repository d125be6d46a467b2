#pragma once

#include <cstddef>
#include <string>

// Low-level array kernels used by the discrete operators and the inner
// solver loops. Each kernel has a portable scalar implementation and an
// AVX2 implementation; the backend is chosen once at runtime (CPU probe,
// overridable via the CHTUMOR_SIMD environment variable or force_backend).
namespace chtumor::kernels {

enum class Backend { Scalar, Avx2 };

Backend active();
const char* backend_name();
bool avx2_available();
// Test hook. Throws std::invalid_argument if the backend is unavailable.
// Not safe to call while other threads run kernels.
void force_backend(Backend b);

double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
// y += a*x
void axpy(double a, const double* x, double* y, std::size_t n);
// z = a*x + b*y
void lincomb(double a, const double* x, double b, const double* y, double* z,
             std::size_t n);
// sum over i < n-1 of (x[i+1] - x[i])^2
double sq_diff_sum(const double* x, std::size_t n);
// sum over i < n of (b[i] - a[i])^2
double sq_diff_sum_pair(const double* a, const double* b, std::size_t n);
// Mirror-ghost Neumann Laplacian, out = lap(f) * inv_h2.
void laplacian1d(const double* f, double* out, std::size_t n, double inv_h2);
void laplacian2d(const double* f, double* out, std::size_t nx, std::size_t ny,
                 double inv_h2);

namespace detail {
struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*lincomb)(double, const double*, double, const double*, double*,
                  std::size_t);
  double (*sq_diff_sum)(const double*, std::size_t);
  double (*sq_diff_sum_pair)(const double*, const double*, std::size_t);
  void (*laplacian1d)(const double*, double*, std::size_t, double);
  void (*laplacian2d)(const double*, double*, std::size_t, std::size_t,
                      double);
};
extern const Ops scalar_ops;
// All-null when the translation unit was built without AVX2 support.
extern const Ops avx2_ops;
}  // namespace detail

}  // namespace chtumor::kernels
