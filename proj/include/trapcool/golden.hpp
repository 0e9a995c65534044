#pragma once

#include <cmath>
#include <utility>

namespace trapcool {

struct Minimum1D {
  double x;
  double f;
};

/// Golden-section search for a minimum of f on [a, b], stopping when the
/// bracket is narrower than tol. Assumes f is unimodal on the bracket.
template <typename F>
Minimum1D golden_section_minimize(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  if (b < a) std::swap(a, b);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? Minimum1D{c, fc} : Minimum1D{d, fd};
}

/// Scans n+1 equispaced points on [a, b] and refines the best one with
/// golden-section search inside its neighbouring cells. Tolerates a
/// multimodal f as long as basins are wider than a grid cell.
template <typename F>
Minimum1D scan_then_golden(F&& f, double a, double b, int n, double tol) {
  int best = 0;
  double best_f = f(a);
  for (int i = 1; i <= n; ++i) {
    const double fi = f(a + (b - a) * i / n);
    if (fi < best_f) {
      best_f = fi;
      best = i;
    }
  }
  const double lo = a + (b - a) * std::max(best - 1, 0) / n;
  const double hi = a + (b - a) * std::min(best + 1, n) / n;
  Minimum1D m = golden_section_minimize(f, lo, hi, tol);
  const double x_best = a + (b - a) * best / n;
  if (best_f < m.f) return {x_best, best_f};
  return m;
}

}  // namespace trapcool
