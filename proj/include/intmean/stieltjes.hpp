#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "intmean/func1d.hpp"

namespace intmean {

/// A strictly increasing weight m on [a, b), optionally with its derivative.
class Measure1D {
 public:
  using Callable = std::function<double(double)>;

  Measure1D() = default;
  Measure1D(Callable m, std::optional<Callable> derivative, Domain domain,
            bool diverges_at_b = false);

  double operator()(double x) const;
  bool has_derivative() const { return derivative_.has_value(); }
  double derivative(double x) const;

  const Domain& domain() const { return domain_; }
  bool diverges_at_b() const { return diverges_; }
  const std::string& name() const { return name_; }
  Measure1D& with_name(std::string name) {
    name_ = std::move(name);
    return *this;
  }

  static Measure1D identity(Domain domain);
  static Measure1D log(Domain domain);

 private:
  Callable m_;
  std::optional<Callable> derivative_;
  Domain domain_;
  bool diverges_ = false;
  std::string name_;
};

/// Sampling-based regularity checks; returns a list of problems found.
std::vector<std::string> check_measure(const Measure1D& m, int samples = 257);

struct QuadratureConfig {
  double atol = 1e-10;
  double rtol = 1e-9;
  int max_halvings = 20;
  int base_panels = 64;

  void validate() const;
};

struct MeanValue {
  double value = 0.0;
  double est_error = 0.0;
  long panels_used = 0;
};

using Integrand = std::function<double(double)>;

/// ∫_r^R g dm. Uses adaptive Simpson on g·m' when m' is available, otherwise
/// refined midpoint Riemann–Stieltjes sums.
MeanValue stieltjes_integral(const Integrand& g, const Measure1D& m, double r, double R,
                             const QuadratureConfig& cfg = {});
MeanValue stieltjes_integral(const Function1D& g, const Measure1D& m, double r, double R,
                             const QuadratureConfig& cfg = {});

/// A_m(r, R; f) = ∫_r^R f dm / (m(R) - m(r)).
MeanValue integral_mean(const Function1D& f, const Measure1D& m, double r, double R,
                        const QuadratureConfig& cfg = {});

/// ∂A_m/∂r = m'(r) (m(R)-m(r))^-2 ∫_r^R (f(x) - f(r)) dm(x).
double mean_partial_r(const Function1D& f, const Measure1D& m, double r, double R,
                      const QuadratureConfig& cfg = {});
/// ∂A_m/∂R = m'(R) (m(R)-m(r))^-2 ∫_r^R (f(R) - f(x)) dm(x).
double mean_partial_R(const Function1D& f, const Measure1D& m, double r, double R,
                      const QuadratureConfig& cfg = {});

/// Fixed-partition midpoint Riemann–Stieltjes sum Σ g(ξ_i)(m(x_{i+1}) - m(x_i)).
/// Shares no code with the adaptive path; used to re-check witnesses.
double midpoint_stieltjes_sum(const Integrand& g, const Measure1D& m, double r, double R,
                              long panels = 1'000'000);

}  // namespace intmean
