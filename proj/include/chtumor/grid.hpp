#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace chtumor {

// Uniform cell-centered grid on (0, extent)^dim with homogeneous Neumann
// boundary handling via mirror ghost cells.
struct Grid {
  int dim = 1;
  int n = 4;          // cells per axis
  double extent = 1.0;
  double h = 0.25;    // extent / n

  Grid() = default;
  Grid(int dim_, int n_, double extent_ = 1.0);

  std::size_t cells() const {
    return dim == 1 ? static_cast<std::size_t>(n)
                    : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }
  // Cell-center coordinate along one axis.
  double coord(int i) const { return (i + 0.5) * h; }

  bool operator==(const Grid& o) const {
    return dim == o.dim && n == o.n && extent == o.extent;
  }
};

class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g, double value = 0.0);
  // 1D: f(x); 2D: f(x, y) (y ignored in 1D).
  static Field from_function(const Grid& g,
                             const std::function<double(double, double)>& f);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double a);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double a, Field f) { return f *= a; }

  // Throws std::runtime_error naming `what` if any entry is NaN/Inf.
  void require_finite(const char* what) const;

  // One row per cell: "x,value" (1D) or "x,y,value" (2D, column-major:
  // outer loop over x, inner over y). 17 significant digits.
  void write_csv(std::ostream& os) const;

 private:
  Grid grid_;
  std::vector<double> v_;
};

void require_same_grid(const Field& a, const Field& b);

}  // namespace chtumor
