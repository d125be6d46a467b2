#include "chtumor/grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "chtumor/kernels.hpp"

namespace chtumor {

Grid::Grid(int dim_, int n_, double extent_)
    : dim(dim_), n(n_), extent(extent_) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("grid dim must be 1 or 2, got " +
                                std::to_string(dim));
  if (n < 4)
    throw std::invalid_argument("grid needs n >= 4 cells per axis, got " +
                                std::to_string(n));
  if (!(extent > 0.0))
    throw std::invalid_argument("grid extent must be positive");
  h = extent / n;
}

Field::Field(const Grid& g, double value) : grid_(g), v_(g.cells(), value) {
  require_finite("constant field");
}

Field Field::from_function(const Grid& g,
                           const std::function<double(double, double)>& f) {
  Field out(g);
  if (g.dim == 1) {
    for (int i = 0; i < g.n; ++i) out.v_[i] = f(g.coord(i), 0.0);
  } else {
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix)
        out.v_[static_cast<std::size_t>(ix) + static_cast<std::size_t>(g.n) * iy] =
            f(g.coord(ix), g.coord(iy));
  }
  out.require_finite("field from function");
  return out;
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o);
  kernels::axpy(1.0, o.data(), data(), size());
  require_finite("field sum");
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o);
  kernels::axpy(-1.0, o.data(), data(), size());
  require_finite("field difference");
  return *this;
}

Field& Field::operator*=(double a) {
  kernels::lincomb(a, data(), 0.0, data(), data(), size());
  require_finite("scaled field");
  return *this;
}

void Field::require_finite(const char* what) const {
  for (double x : v_)
    if (!std::isfinite(x))
      throw std::runtime_error(std::string(what) + " has a non-finite entry");
}

void Field::write_csv(std::ostream& os) const {
  char buf[128];
  if (grid_.dim == 1) {
    for (int i = 0; i < grid_.n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid_.coord(i), v_[i]);
      os << buf;
    }
  } else {
    for (int ix = 0; ix < grid_.n; ++ix)
      for (int iy = 0; iy < grid_.n; ++iy) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid_.coord(ix),
                      grid_.coord(iy),
                      v_[static_cast<std::size_t>(ix) +
                         static_cast<std::size_t>(grid_.n) * iy]);
        os << buf;
      }
  }
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("fields live on different grids");
}

}  // namespace chtumor
