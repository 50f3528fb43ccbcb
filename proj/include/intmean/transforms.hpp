#pragma once

#include <memory>
#include <string>
#include <vector>

#include "intmean/func1d.hpp"
#include "intmean/stieltjes.hpp"

namespace intmean {

/// Increasing weight n with n(a) > 0 and n -> +inf at b.
struct WeightN {
  Function1D n;

  /// Sampling checks of the weight's hypotheses; returns problems found.
  std::vector<std::string> check(const GridSpec& grid = {}) const;
};

/// A constructed function (the majorant mean D, the double envelope h, or
/// the d/Q of the duality) plus what was done to build it.
struct TransformResult {
  Function1D fn;
  std::vector<std::string> log;
  std::vector<std::string> warnings;

  double operator()(double x) const { return fn(x); }
  bool ok() const { return warnings.empty(); }
};

/// D(R) = A_m(a, R; right envelope of f); D(a) is the envelope value at a.
TransformResult decreasing_majorant_mean(const Function1D& f, const Measure1D& m,
                                         const QuadratureConfig& cfg = {},
                                         const GridSpec& grid = {});

/// h(R) = left_max[n · right_max[f]](R) / n(R).
TransformResult weighted_double_envelope(const Function1D& f, const WeightN& n,
                                         const GridSpec& grid = {});

/// d from Q on [r0, +inf): majorant mean of Q(x)/x with m = ln.
TransformResult d_from_Q(const Function1D& Q, double r0, const QuadratureConfig& cfg = {},
                         const GridSpec& grid = {});

/// Q from d on [r0, +inf): left_max[x · right_max[d]].
TransformResult Q_from_d(const Function1D& d, double r0, const GridSpec& grid = {});

/// Heuristic check that g(x) -> 0 along geometric samples from `start`.
bool appears_to_vanish(const Function1D& g, double start);

}  // namespace intmean
