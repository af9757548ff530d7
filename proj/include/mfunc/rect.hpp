#pragma once

#include <stdexcept>

namespace mfunc {

//! Closed axis-parallel rectangle in the z-plane.
struct Rect {
  double x0, x1, y0, y1;

  Rect(double x_lo, double x_hi, double y_lo, double y_hi)
      : x0(x_lo), x1(x_hi), y0(y_lo), y1(y_hi) {
    if (x1 < x0 || y1 < y0) throw std::invalid_argument("Rect: degenerate orientation");
  }

  double area() const { return (x1 - x0) * (y1 - y0); }

  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }

  Rect reflected_y() const { return Rect(x0, x1, -y1, -y0); }
};

}  // namespace mfunc
