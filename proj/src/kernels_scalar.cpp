#include "chtumor/kernels.hpp"

#include <cmath>

namespace chtumor::kernels::detail {
namespace {

double s_dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double s_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double s_max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void s_axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_lincomb(double a, const double* x, double b, const double* y, double* z,
               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

double s_sq_diff_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = x[i + 1] - x[i];
    acc += d * d;
  }
  return acc;
}

double s_sq_diff_sum_pair(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = b[i] - a[i];
    acc += d * d;
  }
  return acc;
}

void s_laplacian1d(const double* f, double* out, std::size_t n,
                   double inv_h2) {
  if (n == 1) {
    out[0] = 0.0;
    return;
  }
  out[0] = (f[1] - f[0]) * inv_h2;
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = (f[i - 1] + f[i + 1] - 2.0 * f[i]) * inv_h2;
  out[n - 1] = (f[n - 2] - f[n - 1]) * inv_h2;
}

void s_laplacian2d(const double* f, double* out, std::size_t nx,
                   std::size_t ny, double inv_h2) {
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const double* row = f + iy * nx;
    double* orow = out + iy * nx;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double c = row[ix];
      double acc = 0.0;
      if (ix > 0) acc += row[ix - 1] - c;
      if (ix + 1 < nx) acc += row[ix + 1] - c;
      if (iy > 0) acc += f[(iy - 1) * nx + ix] - c;
      if (iy + 1 < ny) acc += f[(iy + 1) * nx + ix] - c;
      orow[ix] = acc * inv_h2;
    }
  }
}

}  // namespace

const Ops scalar_ops = {s_dot,          s_sum,
                        s_max_abs,      s_axpy,
                        s_lincomb,      s_sq_diff_sum,
                        s_sq_diff_sum_pair, s_laplacian1d,
                        s_laplacian2d};

}  // namespace chtumor::kernels::detail
