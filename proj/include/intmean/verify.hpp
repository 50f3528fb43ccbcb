#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "intmean/func1d.hpp"
#include "intmean/stieltjes.hpp"
#include "intmean/transforms.hpp"

namespace intmean {

enum class Verdict { holds, violated, inconclusive };

const char* to_string(Verdict v);

struct Witness {
  std::optional<double> r;
  std::optional<double> R;
  std::optional<double> x;
};

/// Outcome of a numerical check of one inequality, monotonicity claim or limit.
///
/// For a <=-type property LHS <= RHS, worst_slack is the maximum of LHS - RHS
/// over all samples; the property holds when every sample satisfies
/// LHS - RHS <= 1e-8 * (1 + |RHS|).
struct VerifyReport {
  std::string property_id;
  Verdict verdict = Verdict::inconclusive;
  double worst_slack = 0.0;
  double slack_budget = 0.0;  // budget at the worst sample
  std::optional<Witness> witness;
  long samples_used = 0;
  std::vector<std::string> notes;
  std::vector<double> sequence;  // sampled values for decay checks

  bool holds() const { return verdict == Verdict::holds; }
};

/// One report per line: `<id> <verdict> worst_slack=... samples=... [witness]`.
std::string to_line(const VerifyReport& report);
/// Multi-line `key: value` report.
std::string to_key_value(const VerifyReport& report);

/// Slack budget for a <=-check against right-hand side `rhs`.
double slack_budget(double rhs);

/// Random (r, R) pairs with lo <= r < R <= hi, drawn uniformly in m-coordinates.
struct PairSampling {
  int count = 200;
  std::uint64_t seed = 1;
  double lo = 0.0;
  double hi = 0.0;
};

struct SamplePair {
  double r;
  double R;
};

/// Deterministic for a given seed and measure.
std::vector<SamplePair> sample_pairs(const Measure1D& m, const PairSampling& sampling);

VerifyReport check_mean_monotonicity(const Function1D& f, const Measure1D& m,
                                     const std::vector<double>& r_grid,
                                     const std::vector<double>& R_grid,
                                     const QuadratureConfig& cfg = {}, const GridSpec& grid = {});

/// sup over the r-grid of A_m(r,R;f) equals A_m(a,R;f); the witness holds
/// the maximizing grid r.
VerifyReport check_sup_identity(const Function1D& f, const Measure1D& m, double R,
                                const std::vector<double>& r_grid,
                                const QuadratureConfig& cfg = {}, const GridSpec& grid = {});

VerifyReport check_majorant_inequality(const Function1D& f, const Measure1D& m,
                                       const PairSampling& sampling,
                                       const QuadratureConfig& cfg = {},
                                       const GridSpec& grid = {});

VerifyReport check_pointwise_mean_bound(const Function1D& f, const WeightN& n,
                                        const Measure1D& m, const PairSampling& sampling,
                                        const QuadratureConfig& cfg = {},
                                        const GridSpec& grid = {});

enum class CorollaryDirection { dQ, Qd };

VerifyReport check_corollary_bounds(const Function1D& Q, const Function1D& d, double r0,
                                    CorollaryDirection direction, const PairSampling& sampling,
                                    const QuadratureConfig& cfg = {});

struct DecaySchedule {
  double start = 1.0;
  double ratio = 10.0;
  int steps = 4;
  double threshold = 0.0;

  void validate() const;
  /// Parses "start:ratio:steps:threshold".
  static DecaySchedule parse(const std::string& text);
};

VerifyReport estimate_decay(const Function1D& g, const DecaySchedule& schedule);

VerifyReport finite_difference_check(const Function1D& f, const Measure1D& m, double r, double R,
                                     const QuadratureConfig& cfg = {});

}  // namespace intmean
