#include "chtumor/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>

namespace chtumor::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

std::atomic<const detail::Ops*> g_ops{nullptr};
std::atomic<Backend> g_backend{Backend::Scalar};
std::once_flag g_once;

void resolve() {
  Backend want = Backend::Avx2;
  if (const char* env = std::getenv("CHTUMOR_SIMD")) {
    const std::string v(env);
    if (v == "scalar")
      want = Backend::Scalar;
    else if (v == "avx2")
      want = Backend::Avx2;
    else if (v != "auto" && !v.empty())
      throw std::invalid_argument("CHTUMOR_SIMD must be scalar, avx2 or auto, got '" + v + "'");
  }
  if (want == Backend::Avx2 && avx2_available()) {
    g_ops.store(&detail::avx2_ops);
    g_backend.store(Backend::Avx2);
  } else {
    g_ops.store(&detail::scalar_ops);
    g_backend.store(Backend::Scalar);
  }
}

inline const detail::Ops& ops() {
  std::call_once(g_once, resolve);
  return *g_ops.load(std::memory_order_relaxed);
}

}  // namespace

bool avx2_available() {
  return detail::avx2_ops.dot != nullptr && cpu_has_avx2();
}

Backend active() {
  ops();
  return g_backend.load(std::memory_order_relaxed);
}

const char* backend_name() {
  return active() == Backend::Avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
  ops();
  if (b == Backend::Avx2) {
    if (!avx2_available())
      throw std::invalid_argument("AVX2 backend unavailable on this host");
    g_ops.store(&detail::avx2_ops);
  } else {
    g_ops.store(&detail::scalar_ops);
  }
  g_backend.store(b);
}

double dot(const double* x, const double* y, std::size_t n) {
  return ops().dot(x, y, n);
}
double sum(const double* x, std::size_t n) { return ops().sum(x, n); }
double max_abs(const double* x, std::size_t n) { return ops().max_abs(x, n); }
void axpy(double a, const double* x, double* y, std::size_t n) {
  ops().axpy(a, x, y, n);
}
void lincomb(double a, const double* x, double b, const double* y, double* z,
             std::size_t n) {
  ops().lincomb(a, x, b, y, z, n);
}
double sq_diff_sum(const double* x, std::size_t n) {
  return ops().sq_diff_sum(x, n);
}
double sq_diff_sum_pair(const double* a, const double* b, std::size_t n) {
  return ops().sq_diff_sum_pair(a, b, n);
}
void laplacian1d(const double* f, double* out, std::size_t n, double inv_h2) {
  ops().laplacian1d(f, out, n, inv_h2);
}
void laplacian2d(const double* f, double* out, std::size_t nx, std::size_t ny,
                 double inv_h2) {
  ops().laplacian2d(f, out, nx, ny, inv_h2);
}

}  // namespace chtumor::kernels
