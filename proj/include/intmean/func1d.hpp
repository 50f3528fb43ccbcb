#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "intmean/error.hpp"

namespace intmean {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Half-open interval [a, b); b may be +inf.
struct Domain {
  double a = 0.0;
  double b = kInf;

  Domain() = default;
  Domain(double a_, double b_);

  bool unbounded() const { return b == kInf; }
  bool contains(double x) const { return x >= a && x < b; }
  /// Width used to scale tolerances and geometric scans: max(1, |a|).
  double scale() const;
};

enum class TailMode { vanishing, bounded_by, unknown };

struct Tail {
  TailMode mode = TailMode::unknown;
  double bound = 0.0;  // only meaningful for bounded_by

  static Tail vanishing() { return {TailMode::vanishing, 0.0}; }
  static Tail bounded_by(double v) { return {TailMode::bounded_by, v}; }
  static Tail unknown() { return {TailMode::unknown, 0.0}; }
};

enum class Monotonicity { increasing, decreasing, constant, none };

const char* to_string(Monotonicity m);

/// A real function on a half-open interval plus the metadata the envelope
/// and transform code needs (tail behaviour at b, declared monotonicity).
class Function1D {
 public:
  using Callable = std::function<double(double)>;

  Function1D() = default;
  Function1D(Callable fn, Domain domain, Tail tail = Tail::unknown(),
             Monotonicity hint = Monotonicity::none, bool locally_bounded = true);

  /// Checked evaluation: domain membership and a finite result.
  double operator()(double x) const;
  /// Unchecked evaluation, for hot loops whose nodes are already in the domain.
  double raw(double x) const { return fn_(x); }

  const Domain& domain() const { return domain_; }
  const Tail& tail() const { return tail_; }
  Monotonicity hint() const { return hint_; }
  bool locally_bounded() const { return locally_bounded_; }
  const std::string& name() const { return name_; }

  Function1D& with_name(std::string name) {
    name_ = std::move(name);
    return *this;
  }
  Function1D& with_tail(Tail tail) {
    tail_ = tail;
    return *this;
  }
  Function1D& with_hint(Monotonicity hint) {
    hint_ = hint;
    return *this;
  }

 private:
  Callable fn_;
  Domain domain_;
  Tail tail_;
  Monotonicity hint_ = Monotonicity::none;
  bool locally_bounded_ = true;
  std::string name_;
};

double evaluate(const Function1D& f, double x);

enum class Spacing { automatic, uniform, geometric };

struct GridSpec {
  int node_count = 4097;
  Spacing spacing = Spacing::automatic;
  /// Golden-section restarts around each sampled local maximum; 0 disables.
  int refinement_rounds = 3;
  /// Relative sup accuracy; the absolute target is eps_sup * max(1, |max|).
  double eps_sup = 1e-9;

  void validate() const;
  double absolute_eps(double magnitude) const;
};

/// Grid nodes on [lo, hi], both included. `automatic` picks geometric spacing
/// when hi/lo > 100 (lo > 0) or when `unbounded_domain` is set.
std::vector<double> make_nodes(double lo, double hi, int count, Spacing spacing,
                               bool unbounded_domain = false);

/// Maximizes f on [lo, hi] by golden-section search; returns {x, f(x)}.
struct Peak {
  double x;
  double value;
};
Peak golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                        double x_tol);

struct SupEstimate {
  double value = 0.0;
  double argmax = 0.0;
  /// Upper end of the explicitly gridded range; beyond it only the tail scan.
  double cutoff = 0.0;
  /// bounded_by tail whose declared bound was not reached by the grid max.
  bool tail_bound_not_attained = false;
};

/// sup of f over [r, b).
SupEstimate right_maximization(const Function1D& f, double r, const GridSpec& grid = {});
/// sup of f over [a, r].
SupEstimate left_maximization(const Function1D& f, double r, const GridSpec& grid = {});

Monotonicity classify_monotonicity(const Function1D& f, const GridSpec& grid = {});

enum class Side { right, left };

/// Right (suffix-max) or left (prefix-max) maximization of a function,
/// tabulated on a refined grid.
///
/// Table values are exact suffix/prefix maxima of the refined samples, so the
/// table is monotone without tolerance. Between nodes a query combines the
/// bracketing table values with the source value at x, which is exact for
/// sources monotone inside each cell (peaks found during refinement become
/// nodes of their own).
class Envelope {
 public:
  Envelope(Function1D source, Side side, const GridSpec& grid);

  double operator()(double x) const;

  Side side() const { return side_; }
  const Function1D& source() const { return source_; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> samples() const { return samples_; }
  std::span<const double> values() const { return values_; }
  /// Upper end of the table; beyond it queries fall back on the tail estimate.
  double table_end() const { return nodes_.back(); }
  double tail_sup() const { return tail_sup_; }
  double eps() const { return eps_; }
  int refined_peaks() const { return refined_peaks_; }
  bool tail_bound_not_attained() const { return tail_bound_not_attained_; }
  double sup() const;

  /// The envelope as a Function1D with monotonicity hint and the source tail.
  Function1D as_function() const;

 private:
  Function1D source_;
  Side side_;
  GridSpec grid_;
  std::vector<double> nodes_;
  std::vector<double> samples_;
  std::vector<double> values_;
  double tail_sup_ = -kInf;
  double eps_ = 0.0;
  int refined_peaks_ = 0;
  bool tail_bound_not_attained_ = false;
};

Envelope envelope_function(const Function1D& f, Side side, const GridSpec& grid = {});

namespace detail {

/// Geometric scan of f beyond `from` used to certify a vanishing or bounded
/// tail on [from, +inf).
struct TailScan {
  double cutoff;    // end of the explicitly gridded range
  double tail_sup;  // max of scanned samples beyond cutoff
  double scan_max;  // max |f| over all scanned samples
};
TailScan scan_tail(const Function1D& f, double from, const GridSpec& grid);

inline constexpr int kHorizonDoublings = 40;
inline constexpr int kTailDoublings = 64;
inline constexpr double kOverflowGuard = 1e300;

}  // namespace detail

}  // namespace intmean
