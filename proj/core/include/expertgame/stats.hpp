#pragma once

#include <cmath>
#include <span>

#include "expertgame/errors.hpp"

namespace expertgame {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit fit_line(std::span<const double> xs,
                        std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw Error("line fit needs two or more matched points");
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw Error("degenerate abscissae in line fit");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

/// Slope of log(y) against log(x); ys must be positive.
inline double fit_loglog_slope(std::span<const double> xs,
                               std::span<const double> ys) {
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0 && ys[i] > 0.0))
      throw Error("log-log fit needs positive data");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  return fit_line(lx, ly).slope;
}

/// Least-squares scale through the origin: argmin_c sum (y - c s)^2.
inline double fit_scale(std::span<const double> shapes,
                        std::span<const double> values) {
  if (shapes.size() != values.size() || shapes.empty())
    throw Error("scale fit needs matched nonempty data");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    num += shapes[i] * values[i];
    den += shapes[i] * shapes[i];
  }
  if (den == 0.0) throw Error("degenerate shapes in scale fit");
  return num / den;
}

/// Smallest c with y <= c s pointwise.
inline double fit_envelope(std::span<const double> shapes,
                           std::span<const double> values) {
  if (shapes.size() != values.size() || shapes.empty())
    throw Error("envelope fit needs matched nonempty data");
  double c = 0.0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (!(shapes[i] > 0.0)) throw Error("envelope fit needs positive shapes");
    c = std::max(c, values[i] / shapes[i]);
  }
  return c;
}

}  // namespace expertgame
