#include "chtumor/kernels.hpp"

#ifdef CHT_BUILD_AVX2

#include <immintrin.h>

namespace chtumor::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double v_dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double v_sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double v_max_abs(const double* x, std::size_t n) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    m = _mm256_max_pd(m, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
  __m128d lo = _mm256_castpd256_pd128(m);
  __m128d hi = _mm256_extractf128_pd(m, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  double r = _mm_cvtsd_f64(_mm_max_sd(lo, sh));
  for (; i < n; ++i) {
    const double a = x[i] < 0 ? -x[i] : x[i];
    if (a > r) r = a;
  }
  return r;
}

void v_axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void v_lincomb(double a, const double* x, double b, const double* y, double* z,
               std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    t = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t);
    _mm256_storeu_pd(z + i, t);
  }
  for (; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

double v_sq_diff_sum(const double* x, std::size_t n) {
  if (n < 2) return 0.0;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t m = n - 1;
  for (; i + 4 <= m; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i + 1), _mm256_loadu_pd(x + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double r = hsum(acc);
  for (; i < m; ++i) {
    const double d = x[i + 1] - x[i];
    r += d * d;
  }
  return r;
}

double v_sq_diff_sum_pair(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(b + i), _mm256_loadu_pd(a + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) {
    const double d = b[i] - a[i];
    r += d * d;
  }
  return r;
}

void v_laplacian1d(const double* f, double* out, std::size_t n,
                   double inv_h2) {
  if (n == 1) {
    out[0] = 0.0;
    return;
  }
  const __m256d vh = _mm256_set1_pd(inv_h2);
  const __m256d two = _mm256_set1_pd(2.0);
  out[0] = (f[1] - f[0]) * inv_h2;
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    __m256d c = _mm256_loadu_pd(f + i);
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(f + i - 1),
                              _mm256_loadu_pd(f + i + 1));
    s = _mm256_fnmadd_pd(two, c, s);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(s, vh));
  }
  for (; i + 1 < n; ++i)
    out[i] = (f[i - 1] + f[i + 1] - 2.0 * f[i]) * inv_h2;
  out[n - 1] = (f[n - 2] - f[n - 1]) * inv_h2;
}

void v_laplacian2d(const double* f, double* out, std::size_t nx,
                   std::size_t ny, double inv_h2) {
  const __m256d vh = _mm256_set1_pd(inv_h2);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const double* row = f + iy * nx;
    const double* up = iy > 0 ? row - nx : nullptr;
    const double* dn = iy + 1 < ny ? row + nx : nullptr;
    double* orow = out + iy * nx;

    auto edge = [&](std::size_t ix) {
      const double c = row[ix];
      double acc = 0.0;
      if (ix > 0) acc += row[ix - 1] - c;
      if (ix + 1 < nx) acc += row[ix + 1] - c;
      if (up) acc += up[ix] - c;
      if (dn) acc += dn[ix] - c;
      orow[ix] = acc * inv_h2;
    };

    edge(0);
    std::size_t ix = 1;
    if (nx >= 2) {
      for (; ix + 4 <= nx - 1; ix += 4) {
        // difference form, so constants map to exactly zero
        __m256d c = _mm256_loadu_pd(row + ix);
        __m256d acc =
            _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(row + ix - 1), c),
                          _mm256_sub_pd(_mm256_loadu_pd(row + ix + 1), c));
        if (up)
          acc = _mm256_add_pd(acc, _mm256_sub_pd(_mm256_loadu_pd(up + ix), c));
        if (dn)
          acc = _mm256_add_pd(acc, _mm256_sub_pd(_mm256_loadu_pd(dn + ix), c));
        _mm256_storeu_pd(orow + ix, _mm256_mul_pd(acc, vh));
      }
      for (; ix + 1 < nx; ++ix) edge(ix);
      if (nx > 1) edge(nx - 1);
    }
  }
}

}  // namespace

const Ops avx2_ops = {v_dot,          v_sum,
                      v_max_abs,      v_axpy,
                      v_lincomb,      v_sq_diff_sum,
                      v_sq_diff_sum_pair, v_laplacian1d,
                      v_laplacian2d};

}  // namespace chtumor::kernels::detail

#else

namespace chtumor::kernels::detail {
const Ops avx2_ops = {nullptr, nullptr, nullptr, nullptr, nullptr,
                      nullptr, nullptr, nullptr, nullptr};
}  // namespace chtumor::kernels::detail

#endif
