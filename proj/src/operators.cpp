#include "chtumor/operators.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

#include "chtumor/kernels.hpp"

namespace chtumor {
namespace {

double pow_dim(double h, int dim) { return dim == 1 ? h : h * h; }

// Gradient face sums. With trapezoid=true the first and last face of each
// line are counted once more at half weight (boundary-face surrogate).
double grad_face_sum(const Field& f, bool trapezoid) {
  const Grid& g = f.grid();
  const std::size_t n = static_cast<std::size_t>(g.n);
  const double* v = f.data();
  double total = 0.0;
  if (g.dim == 1) {
    total = kernels::sq_diff_sum(v, n);
    if (trapezoid) {
      const double d0 = v[1] - v[0];
      const double d1 = v[n - 1] - v[n - 2];
      total += 0.5 * (d0 * d0 + d1 * d1);
    }
  } else {
    for (std::size_t iy = 0; iy < n; ++iy) {
      const double* row = v + iy * n;
      double s = kernels::sq_diff_sum(row, n);
      if (trapezoid) {
        const double d0 = row[1] - row[0];
        const double d1 = row[n - 1] - row[n - 2];
        s += 0.5 * (d0 * d0 + d1 * d1);
      }
      total += s;
    }
    double first = 0.0, last = 0.0;
    for (std::size_t iy = 0; iy + 1 < n; ++iy) {
      const double s =
          kernels::sq_diff_sum_pair(v + iy * n, v + (iy + 1) * n, n);
      total += s;
      if (iy == 0) first = s;
      if (iy + 2 == n) last = s;
    }
    if (trapezoid) total += 0.5 * (first + last);
  }
  return total;
}

}  // namespace

Field laplacian_apply(const Field& f) {
  const Grid& g = f.grid();
  Field out(g);
  const double inv_h2 = 1.0 / (g.h * g.h);
  if (g.dim == 1)
    kernels::laplacian1d(f.data(), out.data(), f.size(), inv_h2);
  else
    kernels::laplacian2d(f.data(), out.data(), static_cast<std::size_t>(g.n),
                         static_cast<std::size_t>(g.n), inv_h2);
  out.require_finite("laplacian");
  return out;
}

double inner_H(const Field& f, const Field& g) {
  require_same_grid(f, g);
  return kernels::dot(f.data(), g.data(), f.size()) *
         pow_dim(f.grid().h, f.grid().dim);
}

double norm_H(const Field& f) { return std::sqrt(inner_H(f, f)); }

double grad_sq(const Field& f) {
  const Grid& g = f.grid();
  return grad_face_sum(f, false) * pow_dim(g.h, g.dim) / (g.h * g.h);
}

double norm_V(const Field& f) {
  const Grid& g = f.grid();
  const double gpart =
      grad_face_sum(f, true) * pow_dim(g.h, g.dim) / (g.h * g.h);
  return std::sqrt(gpart + inner_H(f, f));
}

namespace {

// Factorization of the 1D operator (-Lap + I): symmetric tridiagonal LDL^T.
struct Tridiag {
  std::vector<double> d;  // pivots
  std::vector<double> l;  // subdiagonal multipliers

  explicit Tridiag(const Grid& g) {
    const std::size_t n = static_cast<std::size_t>(g.n);
    const double ih2 = 1.0 / (g.h * g.h);
    d.resize(n);
    l.resize(n - 1);
    std::vector<double> diag(n, 1.0 + 2.0 * ih2);
    diag[0] = diag[n - 1] = 1.0 + ih2;
    const double off = -ih2;
    d[0] = diag[0];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      l[i] = off / d[i];
      d[i + 1] = diag[i + 1] - l[i] * off;
    }
  }

  void solve(const double* b, double* x, std::size_t n) const {
    x[0] = b[0];
    for (std::size_t i = 1; i < n; ++i) x[i] = b[i] - l[i - 1] * x[i - 1];
    for (std::size_t i = 0; i < n; ++i) x[i] /= d[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= l[i] * x[i + 1];
  }
};

std::shared_ptr<const Tridiag> tridiag_for(const Grid& g) {
  static std::mutex mtx;
  static std::map<std::tuple<int, double>, std::shared_ptr<const Tridiag>>
      cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_tuple(g.n, g.extent);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto fac = std::make_shared<const Tridiag>(g);
  cache.emplace(key, fac);
  return fac;
}

// w = (-Lap + I) f
void apply_A(const Field& f, Field& out) {
  const Grid& g = f.grid();
  const double inv_h2 = 1.0 / (g.h * g.h);
  if (g.dim == 1)
    kernels::laplacian1d(f.data(), out.data(), f.size(), inv_h2);
  else
    kernels::laplacian2d(f.data(), out.data(), static_cast<std::size_t>(g.n),
                         static_cast<std::size_t>(g.n), inv_h2);
  kernels::lincomb(1.0, f.data(), -1.0, out.data(), out.data(), f.size());
}

Field riesz_cg(const Field& f, double lin_tol) {
  const std::size_t n = f.size();
  Field w(f.grid());
  Field r = f;
  Field p = r;
  Field Ap(f.grid());
  double rr = kernels::dot(r.data(), r.data(), n);
  const double stop = lin_tol * lin_tol * rr;
  if (rr == 0.0) return w;
  const std::size_t max_it = 40 * n + 200;
  for (std::size_t it = 0; it < max_it; ++it) {
    apply_A(p, Ap);
    const double pAp = kernels::dot(p.data(), Ap.data(), n);
    const double a = rr / pAp;
    kernels::axpy(a, p.data(), w.data(), n);
    kernels::axpy(-a, Ap.data(), r.data(), n);
    const double rr_new = kernels::dot(r.data(), r.data(), n);
    if (rr_new <= stop) return w;
    kernels::lincomb(1.0, r.data(), rr_new / rr, p.data(), p.data(), n);
    rr = rr_new;
  }
  throw std::runtime_error(
      "riesz_inverse: conjugate gradients stalled, residual " +
      std::to_string(std::sqrt(rr)));
}

}  // namespace

Field riesz_inverse(const Field& f, double lin_tol) {
  f.require_finite("riesz_inverse input");
  const Grid& g = f.grid();
  if (g.dim == 1) {
    auto fac = tridiag_for(g);
    Field w(g);
    fac->solve(f.data(), w.data(), f.size());
    return w;
  }
  return riesz_cg(f, lin_tol);
}

double norm_Vstar(const Field& f, double lin_tol) {
  const double v = inner_H(f, riesz_inverse(f, lin_tol));
  return std::sqrt(std::max(0.0, v));
}

double bochner_norm(const std::vector<Field>& samples, double dt,
                    BochnerNorm which) {
  if (samples.size() < 2)
    throw std::invalid_argument(
        "bochner_norm needs at least two uniformly spaced samples, got " +
        std::to_string(samples.size()));
  if (!(dt > 0.0)) throw std::invalid_argument("bochner_norm: dt must be positive");
  const std::size_t K = samples.size() - 1;  // left endpoints 0..K-1
  double acc = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const Field& f = samples[k];
    double val = 0.0;
    switch (which) {
      case BochnerNorm::L2_H:
        acc += inner_H(f, f) * dt;
        break;
      case BochnerNorm::L2_V:
        val = norm_V(f);
        acc += val * val * dt;
        break;
      case BochnerNorm::L2_Vstar:
        val = norm_Vstar(f);
        acc += val * val * dt;
        break;
      case BochnerNorm::Linf_H:
        acc = std::max(acc, norm_H(f));
        break;
      case BochnerNorm::Linf_Vstar:
        acc = std::max(acc, norm_Vstar(f));
        break;
    }
  }
  switch (which) {
    case BochnerNorm::L2_H:
    case BochnerNorm::L2_V:
    case BochnerNorm::L2_Vstar:
      return std::sqrt(acc);
    default:
      return acc;
  }
}

}  // namespace chtumor
