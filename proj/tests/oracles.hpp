#pragma once

// Reference computations that share no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

/// Composite 5-point Gauss-Legendre on [lo, hi] with `panels` equal panels.
inline double gauss_legendre(const Fn& g, double lo, double hi, int panels = 4000) {
  static constexpr std::array<double, 5> nodes = {0.0, -0.5384693101056831, 0.5384693101056831,
                                                  -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> weights = {0.5688888888888889, 0.4786286704993665,
                                                    0.4786286704993665, 0.2369268850561891,
                                                    0.2369268850561891};
  const long double h = (static_cast<long double>(hi) - lo) / panels;
  long double sum = 0.0L;
  for (int i = 0; i < panels; ++i) {
    const long double mid = lo + (i + 0.5L) * h;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      sum += weights[k] * g(static_cast<double>(mid + 0.5L * h * nodes[k]));
  }
  return static_cast<double>(0.5L * h * sum);
}

/// Gauss-Legendre in log coordinates, for integrands spread over decades.
inline double gauss_legendre_log(const Fn& g, double lo, double hi, int panels = 4000) {
  return gauss_legendre([&g](double t) { return g(std::exp(t)) * std::exp(t); }, std::log(lo),
                        std::log(hi), panels);
}

/// A_m(r,R;f) for differentiable m, by Gauss-Legendre on f·m'.
inline double mean(const Fn& f, const Fn& m, const Fn& dm, double r, double R,
                   int panels = 4000) {
  return gauss_legendre([&](double x) { return f(x) * dm(x); }, r, R, panels) / (m(R) - m(r));
}

/// max of f over `count` uniform points of [lo, hi].
inline double grid_max(const Fn& f, double lo, double hi, long count = 1'000'000) {
  double best = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < count; ++i) best = std::max(best, f(lo + (hi - lo) * i / (count - 1)));
  return best;
}

/// Central difference of a scalar function.
inline double central_difference(const Fn& F, double x, double h) {
  return (F(x + h) - F(x - h)) / (2.0 * h);
}

/// Damped oscillation sum_k amp_k e^{-decay_k x} cos(freq_k x + phase_k).
struct DampedOscillation {
  std::vector<double> amp, decay, freq, phase;

  double operator()(double x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k)
      s += amp[k] * std::exp(-decay[k] * x) * std::cos(freq[k] * x + phase[k]);
    return s;
  }
};

}  // namespace oracle
