#pragma once

// Test-only oracles, independent of the library's evaluation paths.

#include <cmath>
#include <functional>

namespace oracles {

// five-point central difference, O(h^4)
inline double diff5(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

// exact sup of the middle-thirds Cantor measure over windows of width `len`:
// recursion over the self-similar structure. M(len) = max_y nu([y, y+len]).
inline double cantor_window_mass(double len, int depth = 48) {
  if (len >= 1.0) return 1.0;
  if (depth == 0) return len > 0 ? 1.0 : 0.0;
  // best window inside one third, or straddling the middle gap
  double inside = 0.5 * cantor_window_mass(3.0 * len, depth - 1);
  double straddle = 0.0;
  if (len > 1.0 / 3.0) {
    // cover [t, t+len] across the gap (1/3, 2/3); mass is the right tail of
    // the left copy plus the left tail of the right copy
    // tail(s) = nu([s, 1]); scan a few candidate alignments
    std::function<double(double, int)> tail = [&](double s, int d) -> double {
      if (s <= 0.0) return 1.0;
      if (s >= 1.0) return 0.0;
      if (d == 0) return 0.5;
      if (s < 1.0 / 3.0) return 0.5 * tail(3.0 * s, d - 1) + 0.5;
      if (s > 2.0 / 3.0) return 0.5 * tail(3.0 * s - 2.0, d - 1);
      return 0.5;
    };
    for (int i = 0; i <= 64; ++i) {
      double t = 2.0 / 3.0 - len + (len - 1.0 / 3.0) * i / 64.0;
      if (t < 0.0 || t + len > 1.0) continue;
      double mass = 0.5 * (1.0 - tail(3.0 * (t + len) - 2.0, depth - 1)) +
                    0.5 * tail(3.0 * t, depth - 1);
      straddle = std::max(straddle, mass);
    }
  }
  return std::max(inside, straddle);
}

// Fourier transform of the middle-thirds Cantor measure via the infinite
// Bernoulli-convolution product F_q = prod_k (1 + exp(4 pi i q / 3^k)) / 2.
inline double cantor_fourier_modulus(double q) {
  double mod = 1.0;
  double arg = q;
  for (int k = 0; k < 64; ++k) {
    arg /= 3.0;
    mod *= std::abs(std::cos(2.0 * M_PI * arg));
    if (std::abs(arg) < 1e-12) break;
  }
  return mod;
}

}  // namespace oracles
