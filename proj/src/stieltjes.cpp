#include "intmean/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <utility>

namespace intmean {

Measure1D::Measure1D(Callable m, std::optional<Callable> derivative, Domain domain,
                     bool diverges_at_b)
    : m_(std::move(m)), derivative_(std::move(derivative)), domain_(domain), diverges_(diverges_at_b) {}

double Measure1D::operator()(double x) const {
  const double v = m_(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "measure is non-finite at x = " << x;
    throw Error(ErrorKind::non_finite, os.str());
  }
  return v;
}

double Measure1D::derivative(double x) const {
  if (!derivative_) throw Error(ErrorKind::missing_derivative, "measure has no derivative");
  const double v = (*derivative_)(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "measure derivative is non-finite at x = " << x;
    throw Error(ErrorKind::non_finite, os.str());
  }
  return v;
}

Measure1D Measure1D::identity(Domain domain) {
  Measure1D m([](double x) { return x; }, Callable([](double) { return 1.0; }), domain,
              domain.unbounded());
  m.with_name("x");
  return m;
}

Measure1D Measure1D::log(Domain domain) {
  if (!(domain.a > 0.0)) throw Error(ErrorKind::invalid_argument, "ln measure needs a > 0");
  Measure1D m([](double x) { return std::log(x); }, Callable([](double x) { return 1.0 / x; }),
              domain, domain.unbounded());
  m.with_name("ln(x)");
  return m;
}

std::vector<std::string> check_measure(const Measure1D& m, int samples) {
  std::vector<std::string> problems;
  const Domain& dom = m.domain();
  const double hi = dom.unbounded()
                        ? dom.a + dom.scale() * std::ldexp(1.0, detail::kHorizonDoublings)
                        : dom.b - 1e-10 * (dom.b - dom.a);
  const auto xs = make_nodes(dom.a, hi, samples, Spacing::automatic, dom.unbounded());
  try {
    double prev = m(xs.front());
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double cur = m(xs[i]);
      if (!(cur > prev)) {
        std::ostringstream os;
        os.precision(10);
        os << "m is not strictly increasing near x = " << xs[i];
        problems.push_back(os.str());
        break;
      }
      prev = cur;
    }
    if (m.has_derivative()) {
      for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(m.derivative(xs[i]) > 0.0)) {
          std::ostringstream os;
          os.precision(10);
          os << "m' is not positive at x = " << xs[i];
          problems.push_back(os.str());
          break;
        }
      }
    }
    // Right continuity at a: m(a + h) -> m(a).
    const double w = xs[1] - xs[0];
    const double jump0 = std::abs(m(dom.a + 1e-6 * w) - m(dom.a));
    const double jump1 = std::abs(m(dom.a + 1e-9 * w) - m(dom.a));
    const double scale = std::max(1.0, std::abs(m(xs[1]) - m(dom.a)));
    if (jump1 > 1e-4 * scale && jump1 > 0.5 * jump0)
      problems.push_back("m does not look right-continuous at a");
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  return problems;
}

void QuadratureConfig::validate() const {
  if (!(atol > 0.0) || !(rtol > 0.0))
    throw Error(ErrorKind::invalid_argument, "quadrature tolerances must be positive");
  if (max_halvings < 1) throw Error(ErrorKind::invalid_argument, "max_halvings must be >= 1");
  if (base_panels < 1) throw Error(ErrorKind::invalid_argument, "base_panels must be >= 1");
}

namespace {

void check_interval(const Measure1D& m, double r, double R) {
  if (!(r < R)) {
    std::ostringstream os;
    os.precision(17);
    os << "integration interval needs r < R, got r = " << r << ", R = " << R;
    throw Error(ErrorKind::invalid_argument, os.str());
  }
  const Domain& dom = m.domain();
  if (r < dom.a || !(R < dom.b)) {
    std::ostringstream os;
    os.precision(17);
    os << "[" << r << ", " << R << "] not inside [" << dom.a << ", " << dom.b << ")";
    throw Error(ErrorKind::domain_violation, os.str());
  }
}

double finite_or_throw(double v, double x, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite " << what << " at x = " << x;
    throw Error(ErrorKind::non_finite, os.str());
  }
  return v;
}

// Partition point i of `panels` (geometric over wide positive ranges).
double partition_point(double r, double R, long panels, long i) {
  if (i == 0) return r;
  if (i == panels) return R;
  const double t = static_cast<double>(i) / static_cast<double>(panels);
  if (r > 0.0 && R / r > 100.0) return std::exp(std::log(r) + (std::log(R) - std::log(r)) * t);
  return r + (R - r) * t;
}

class AdaptiveSimpson {
 public:
  AdaptiveSimpson(const std::function<double(double)>& h, int max_depth)
      : h_(h), max_depth_(max_depth) {}

  struct Result {
    double value;
    double error;
  };

  Result integrate(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = eval(lm), frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    ++panels_;
    // Roundoff floor: the difference cannot be resolved below a few ulps.
    const double floor = 64.0 * 2.220446049250313e-16 * (std::abs(left) + std::abs(right));
    if (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= floor || !(lm > a && rm < b)) {
      return {left + right + delta / 15.0, std::abs(delta) / 15.0};
    }
    if (depth >= max_depth_) {
      // Accepted provisionally; the caller checks the summed error.
      if (!exhausted_) exhausted_ = std::make_pair(a, b);
      return {left + right + delta / 15.0, std::abs(delta) / 15.0};
    }
    const Result l = integrate(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1);
    const Result r = integrate(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    return {l.value + r.value, l.error + r.error};
  }

  double eval(double x) { return finite_or_throw(h_(x), x, "integrand"); }
  long panels() const { return panels_; }
  /// First panel that reached the depth limit unresolved, if any.
  const std::optional<std::pair<double, double>>& exhausted() const { return exhausted_; }

 private:
  const std::function<double(double)>& h_;
  int max_depth_;
  long panels_ = 0;
  std::optional<std::pair<double, double>> exhausted_;
};

MeanValue simpson_path(const Integrand& g, const Measure1D& m, double r, double R,
                       const QuadratureConfig& cfg) {
  const std::function<double(double)> h = [&](double x) { return g(x) * m.derivative(x); };
  AdaptiveSimpson simpson(h, cfg.max_halvings);
  std::vector<double> xs(static_cast<std::size_t>(cfg.base_panels) + 1);
  for (long i = 0; i <= cfg.base_panels; ++i) xs[i] = partition_point(r, R, cfg.base_panels, i);
  const std::size_t n = xs.size() - 1;
  std::vector<double> fl(n), fm(n), fr(n), whole(n);
  double estimate = 0.0;
  double prev_right = simpson.eval(xs[0]);
  for (std::size_t i = 0; i < n; ++i) {
    fl[i] = prev_right;
    fm[i] = simpson.eval(0.5 * (xs[i] + xs[i + 1]));
    fr[i] = simpson.eval(xs[i + 1]);
    prev_right = fr[i];
    whole[i] = (xs[i + 1] - xs[i]) / 6.0 * (fl[i] + 4.0 * fm[i] + fr[i]);
    estimate += whole[i];
  }
  const double tol = std::max(cfg.atol, cfg.rtol * std::abs(estimate));
  MeanValue out;
  double total = 0.0, error = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double share = tol / static_cast<double>(n);
    const auto res = simpson.integrate(xs[i], xs[i + 1], fl[i], fm[i], fr[i], whole[i], share, 1);
    total += res.value;
    error += res.error;
  }
  // Panels at the depth limit (kinks, mostly) are fine as long as the summed
  // estimate still meets the requested tolerance.
  if (simpson.exhausted() && error > std::max(cfg.atol, cfg.rtol * std::abs(total))) {
    std::ostringstream os;
    os.precision(10);
    os << "adaptive Simpson did not converge on [" << simpson.exhausted()->first << ", "
       << simpson.exhausted()->second << "] after " << cfg.max_halvings
       << " halvings (estimated error " << error << ")";
    throw Error(ErrorKind::quadrature, os.str());
  }
  out.value = total;
  out.est_error = error;
  out.panels_used = static_cast<long>(n) + simpson.panels();
  return out;
}

double midpoint_sum(const Integrand& g, const Measure1D& m, double r, double R, long panels) {
  long double sum = 0.0L;
  double x_prev = r;
  double m_prev = m(r);
  for (long i = 1; i <= panels; ++i) {
    const double x_next = partition_point(r, R, panels, i);
    const double m_next = m(x_next);
    const double mid = 0.5 * (x_prev + x_next);
    sum += static_cast<long double>(finite_or_throw(g(mid), mid, "integrand")) *
           static_cast<long double>(m_next - m_prev);
    x_prev = x_next;
    m_prev = m_next;
  }
  return static_cast<double>(sum);
}

MeanValue midpoint_path(const Integrand& g, const Measure1D& m, double r, double R,
                        const QuadratureConfig& cfg) {
  long panels = cfg.base_panels;
  double coarse = midpoint_sum(g, m, r, R, panels);
  for (int k = 1; k <= cfg.max_halvings; ++k) {
    panels *= 2;
    const double fine = midpoint_sum(g, m, r, R, panels);
    const double diff = std::abs(fine - coarse);
    if (diff <= std::max(cfg.atol, cfg.rtol * std::abs(fine))) return {fine, diff, panels};
    coarse = fine;
  }
  throw Error(ErrorKind::quadrature, "midpoint Stieltjes sums did not converge");
}

}  // namespace

MeanValue stieltjes_integral(const Integrand& g, const Measure1D& m, double r, double R,
                             const QuadratureConfig& cfg) {
  cfg.validate();
  check_interval(m, r, R);
  return m.has_derivative() ? simpson_path(g, m, r, R, cfg) : midpoint_path(g, m, r, R, cfg);
}

MeanValue stieltjes_integral(const Function1D& g, const Measure1D& m, double r, double R,
                             const QuadratureConfig& cfg) {
  return stieltjes_integral(Integrand([&g](double x) { return g(x); }), m, r, R, cfg);
}

MeanValue integral_mean(const Function1D& f, const Measure1D& m, double r, double R,
                        const QuadratureConfig& cfg) {
  check_interval(m, r, R);
  const double dm = m(R) - m(r);
  if (!(dm > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "degenerate denominator m(R) - m(r) = " << dm << " (m not increasing on [" << r << ", "
       << R << "]?)";
    throw Error(ErrorKind::invalid_argument, os.str());
  }
  MeanValue out = stieltjes_integral(f, m, r, R, cfg);
  out.value /= dm;
  out.est_error /= dm;
  return out;
}

double mean_partial_r(const Function1D& f, const Measure1D& m, double r, double R,
                      const QuadratureConfig& cfg) {
  if (!(r > m.domain().a))
    throw Error(ErrorKind::domain_violation, "partial in r needs a < r");
  const double dm_r = m.derivative(r);
  const double fr = f(r);
  const double dm = m(R) - m(r);
  const auto integral =
      stieltjes_integral(Integrand([&](double x) { return f(x) - fr; }), m, r, R, cfg);
  return dm_r * integral.value / (dm * dm);
}

double mean_partial_R(const Function1D& f, const Measure1D& m, double r, double R,
                      const QuadratureConfig& cfg) {
  if (!(r > m.domain().a))
    throw Error(ErrorKind::domain_violation, "partial in R needs a < r");
  const double dm_R = m.derivative(R);
  const double fR = f(R);
  const double dm = m(R) - m(r);
  const auto integral =
      stieltjes_integral(Integrand([&](double x) { return fR - f(x); }), m, r, R, cfg);
  return dm_R * integral.value / (dm * dm);
}

double midpoint_stieltjes_sum(const Integrand& g, const Measure1D& m, double r, double R,
                              long panels) {
  check_interval(m, r, R);
  if (panels < 1) throw Error(ErrorKind::invalid_argument, "need at least one panel");
  return midpoint_sum(g, m, r, R, panels);
}

}  // namespace intmean
