#include "intmean/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

namespace intmean {

namespace {

constexpr double kRelativeSlack = 1e-8;
constexpr long kOraclePanels = 1'000'000;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

bool is_decreasing(Monotonicity m) {
  return m == Monotonicity::decreasing || m == Monotonicity::constant;
}

/// Collects LHS - RHS over samples and keeps the worst one.
class SlackTracker {
 public:
  explicit SlackTracker(std::string id) { report_.property_id = std::move(id); }

  /// Records a sample of LHS <= RHS; returns false when it exceeds the budget.
  bool add(double lhs, double rhs, Witness at, double budget) {
    ++report_.samples_used;
    const double slack = lhs - rhs;
    if (first_ || slack - budget > worst_excess_) {
      first_ = false;
      worst_excess_ = slack - budget;
      worst_at_ = at;
      report_.slack_budget = budget;
    }
    report_.worst_slack = report_.samples_used == 1 ? slack : std::max(report_.worst_slack, slack);
    if (slack > budget) {
      if (!violation_) violation_ = at;
      return false;
    }
    return true;
  }
  bool add(double lhs, double rhs, Witness at) { return add(lhs, rhs, at, slack_budget(rhs)); }

  const std::optional<Witness>& violation() const { return violation_; }
  VerifyReport& report() { return report_; }

  VerifyReport finish(Verdict verdict) {
    report_.verdict = verdict;
    if (verdict == Verdict::violated) report_.witness = violation_ ? violation_ : worst_at_;
    else if (violation_) report_.witness = violation_;
    return report_;
  }

 private:
  VerifyReport report_;
  bool first_ = true;
  double worst_excess_ = 0.0;
  Witness worst_at_;
  std::optional<Witness> violation_;
};

VerifyReport inconclusive(std::string id, std::string note) {
  VerifyReport r;
  r.property_id = std::move(id);
  r.verdict = Verdict::inconclusive;
  r.notes.push_back(std::move(note));
  return r;
}

double oracle_mean(const Integrand& g, const Measure1D& m, double r, double R) {
  return midpoint_stieltjes_sum(g, m, r, R, kOraclePanels) / (m(R) - m(r));
}

// A violation found through the adaptive path is only reported once the
// brute-force oracle confirms it.
Verdict confirm(SlackTracker& tracker, const std::function<std::pair<double, double>()>& oracle) {
  const auto [lhs, rhs] = oracle();
  if (lhs - rhs > slack_budget(rhs)) {
    tracker.report().notes.push_back("violation confirmed by brute-force oracle: lhs=" + num(lhs) +
                                     " rhs=" + num(rhs));
    return Verdict::violated;
  }
  tracker.report().notes.push_back("adaptive evaluation flagged a violation the brute-force "
                                   "oracle does not confirm: lhs=" +
                                   num(lhs) + " rhs=" + num(rhs));
  return Verdict::inconclusive;
}

double derivative_scale(const Measure1D& m, double r, double R, double mean) {
  const double dm = m(R) - m(r);
  return std::abs(mean) * std::max(m.derivative(r), m.derivative(R)) / dm;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double slack_budget(double rhs) { return kRelativeSlack * (1.0 + std::abs(rhs)); }

std::string to_line(const VerifyReport& report) {
  std::string out = report.property_id + " " + to_string(report.verdict) +
                    " worst_slack=" + num(report.worst_slack) +
                    " budget=" + num(report.slack_budget) +
                    " samples=" + std::to_string(report.samples_used);
  if (report.witness) {
    out += " witness=(";
    bool first = true;
    auto field = [&](const char* name, const std::optional<double>& v) {
      if (!v) return;
      out += (first ? "" : ",") + std::string(name) + "=" + num(*v);
      first = false;
    };
    field("r", report.witness->r);
    field("R", report.witness->R);
    field("x", report.witness->x);
    out += ")";
  }
  return out;
}

std::string to_key_value(const VerifyReport& report) {
  std::ostringstream os;
  os << "property: " << report.property_id << "\n";
  os << "verdict: " << to_string(report.verdict) << "\n";
  os << "worst_slack: " << num(report.worst_slack) << "\n";
  os << "slack_budget: " << num(report.slack_budget) << "\n";
  os << "samples: " << report.samples_used << "\n";
  if (report.witness) {
    if (report.witness->r) os << "witness_r: " << num(*report.witness->r) << "\n";
    if (report.witness->R) os << "witness_R: " << num(*report.witness->R) << "\n";
    if (report.witness->x) os << "witness_x: " << num(*report.witness->x) << "\n";
  }
  if (!report.sequence.empty()) {
    os << "sequence: ";
    for (std::size_t i = 0; i < report.sequence.size(); ++i)
      os << (i ? "," : "") << num(report.sequence[i]);
    os << "\n";
  }
  for (const auto& note : report.notes) os << "note: " << note << "\n";
  return os.str();
}

std::vector<SamplePair> sample_pairs(const Measure1D& m, const PairSampling& sampling) {
  double lo = sampling.lo, hi = sampling.hi;
  const Domain& dom = m.domain();
  if (!(hi > lo)) {
    if (dom.unbounded())
      throw Error(ErrorKind::invalid_argument, "pair sampling on an unbounded domain needs a range");
    lo = dom.a;
    hi = dom.b - 1e-9 * (dom.b - dom.a);
  }
  if (lo < dom.a || !(hi < dom.b))
    throw Error(ErrorKind::domain_violation, "pair sampling range outside the measure's domain");
  if (sampling.count < 1) throw Error(ErrorKind::invalid_argument, "need at least one pair");

  const double m_lo = m(lo), m_hi = m(hi);
  auto inverse = [&](double u) {
    double l = lo, h = hi;
    for (int it = 0; it < 200 && h > l; ++it) {
      const double mid = 0.5 * (l + h);
      if (mid <= l || mid >= h) break;
      (m(mid) < u ? l : h) = mid;
    }
    return 0.5 * (l + h);
  };
  std::mt19937_64 gen(sampling.seed);
  auto uniform01 = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };

  std::vector<SamplePair> pairs;
  pairs.reserve(static_cast<std::size_t>(sampling.count));
  while (static_cast<int>(pairs.size()) < sampling.count) {
    const double x1 = inverse(m_lo + (m_hi - m_lo) * uniform01());
    const double x2 = inverse(m_lo + (m_hi - m_lo) * uniform01());
    if (x1 == x2) continue;
    pairs.push_back({std::min(x1, x2), std::max(x1, x2)});
  }
  return pairs;
}

VerifyReport check_mean_monotonicity(const Function1D& f, const Measure1D& m,
                                     const std::vector<double>& r_grid,
                                     const std::vector<double>& R_grid,
                                     const QuadratureConfig& cfg, const GridSpec& grid) {
  const std::string id = "monotonicity";
  const Monotonicity mono = classify_monotonicity(f, grid);
  if (!is_decreasing(mono))
    return inconclusive(id, std::string("precondition: f is not decreasing (classified ") +
                                to_string(mono) + ")");

  auto rs = r_grid, Rs = R_grid;
  std::sort(rs.begin(), rs.end());
  std::sort(Rs.begin(), Rs.end());
  const std::size_t nr = rs.size(), nR = Rs.size();
  std::vector<std::vector<double>> A(nr, std::vector<double>(nR, std::nan("")));
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nR; ++j)
      if (rs[i] < Rs[j]) A[i][j] = integral_mean(f, m, rs[i], Rs[j], cfg).value;

  SlackTracker tracker(id);
  Verdict verdict = Verdict::holds;
  auto oracle_pair = [&](double r1, double R1, double r0, double R0) {
    const Integrand g = [&f](double x) { return f(x); };
    return std::make_pair(oracle_mean(g, m, r1, R1), oracle_mean(g, m, r0, R0));
  };
  // Along r (fixed R) and along R (fixed r): the later value must not exceed the earlier.
  for (std::size_t j = 0; j < nR && verdict == Verdict::holds; ++j)
    for (std::size_t i = 0; i + 1 < nr; ++i) {
      if (std::isnan(A[i][j]) || std::isnan(A[i + 1][j])) continue;
      if (!tracker.add(A[i + 1][j], A[i][j], {rs[i + 1], Rs[j], std::nullopt})) {
        verdict = confirm(tracker, [&] { return oracle_pair(rs[i + 1], Rs[j], rs[i], Rs[j]); });
        break;
      }
    }
  for (std::size_t i = 0; i < nr && verdict == Verdict::holds; ++i)
    for (std::size_t j = 0; j + 1 < nR; ++j) {
      if (std::isnan(A[i][j]) || std::isnan(A[i][j + 1])) continue;
      if (!tracker.add(A[i][j + 1], A[i][j], {rs[i], Rs[j + 1], std::nullopt})) {
        verdict = confirm(tracker, [&] { return oracle_pair(rs[i], Rs[j + 1], rs[i], Rs[j]); });
        break;
      }
    }

  if (verdict == Verdict::holds && m.has_derivative()) {
    // Signs of the analytic partials at cell midpoints.
    for (std::size_t i = 0; i + 1 < nr && verdict == Verdict::holds; ++i)
      for (std::size_t j = 0; j + 1 < nR; ++j) {
        const double r = 0.5 * (rs[i] + rs[i + 1]);
        const double R = 0.5 * (Rs[j] + Rs[j + 1]);
        if (!(r < R) || !(r > m.domain().a)) continue;
        const double mean = integral_mean(f, m, r, R, cfg).value;
        const double budget = kRelativeSlack * (1.0 + derivative_scale(m, r, R, mean));
        const double dr = mean_partial_r(f, m, r, R, cfg);
        const double dR = mean_partial_R(f, m, r, R, cfg);
        if (!tracker.add(dr, 0.0, {r, R, std::nullopt}, budget) ||
            !tracker.add(dR, 0.0, {r, R, std::nullopt}, budget)) {
          tracker.report().notes.push_back("positive partial derivative: d/dr=" + num(dr) +
                                           " d/dR=" + num(dR));
          verdict = Verdict::violated;
          break;
        }
      }
  } else if (!m.has_derivative()) {
    tracker.report().notes.push_back("m' unavailable: partial-derivative signs not checked");
  }
  return tracker.finish(verdict);
}

VerifyReport check_sup_identity(const Function1D& f, const Measure1D& m, double R,
                                const std::vector<double>& r_grid, const QuadratureConfig& cfg,
                                const GridSpec& grid) {
  const std::string id = "sup-identity";
  const Monotonicity mono = classify_monotonicity(f, grid);
  if (!is_decreasing(mono))
    return inconclusive(id, std::string("precondition: f is not decreasing (classified ") +
                                to_string(mono) + ")");
  const double a = m.domain().a;
  if (!(R > a)) throw Error(ErrorKind::domain_violation, "sup identity needs R > a");

  auto rs = r_grid;
  std::sort(rs.begin(), rs.end());
  rs.erase(std::remove_if(rs.begin(), rs.end(), [&](double r) { return !(r < R) || r < a; }),
           rs.end());
  if (rs.empty()) return inconclusive(id, "no grid point r with a <= r < R");

  const double at_a = integral_mean(f, m, a, R, cfg).value;
  std::vector<double> values;
  for (double r : rs) values.push_back(integral_mean(f, m, r, R, cfg).value);
  const double best = *std::max_element(values.begin(), values.end());
  const double budget = slack_budget(at_a);
  std::size_t arg = 0;
  while (values[arg] < best - budget) ++arg;

  VerifyReport report;
  report.property_id = id;
  report.samples_used = static_cast<long>(values.size()) + 1;
  report.worst_slack = best - at_a;
  report.slack_budget = budget;
  report.notes.push_back("A(a,R) = " + num(at_a) + ", max over grid = " + num(best) +
                         " at r = " + num(rs[arg]));
  const bool bound_ok = best - at_a <= budget;
  const bool argmax_ok = arg == 0;
  // For this property the witness is the maximizing r, whatever the verdict.
  report.witness = Witness{rs[arg], R, std::nullopt};
  if (bound_ok && argmax_ok) {
    report.verdict = Verdict::holds;
  } else {
    if (!argmax_ok) report.notes.push_back("maximum not attained at the smallest grid r");
    const Integrand g = [&f](double x) { return f(x); };
    const double oracle_best = oracle_mean(g, m, rs[arg], R);
    const double oracle_a = oracle_mean(g, m, a, R);
    const bool confirmed = !bound_ok ? oracle_best - oracle_a > budget
                                     : oracle_best > oracle_mean(g, m, rs[0], R) + budget;
    report.verdict = confirmed ? Verdict::violated : Verdict::inconclusive;
    if (!confirmed) report.notes.push_back("brute-force oracle does not confirm the violation");
  }
  return report;
}

VerifyReport check_majorant_inequality(const Function1D& f, const Measure1D& m,
                                       const PairSampling& sampling, const QuadratureConfig& cfg,
                                       const GridSpec& grid) {
  const std::string id = "F1";
  const TransformResult D = decreasing_majorant_mean(f, m, cfg, grid);
  SlackTracker tracker(id);
  Verdict verdict = Verdict::holds;
  for (const auto& [r, R] : sample_pairs(m, sampling)) {
    const double lhs = integral_mean(f, m, r, R, cfg).value;
    const double rhs = D(R);
    if (!tracker.add(lhs, rhs, {r, R, std::nullopt})) {
      verdict = confirm(tracker, [&] {
        const Envelope env(f, Side::right, grid);
        const Integrand g = [&f](double x) { return f(x); };
        const Integrand e = [&env](double x) { return env(x); };
        return std::make_pair(oracle_mean(g, m, r, R), oracle_mean(e, m, m.domain().a, R));
      });
      break;
    }
  }
  for (const auto& w : D.warnings) tracker.report().notes.push_back("hypothesis: " + w);
  return tracker.finish(verdict);
}

VerifyReport check_pointwise_mean_bound(const Function1D& f, const WeightN& n, const Measure1D& m,
                                        const PairSampling& sampling, const QuadratureConfig& cfg,
                                        const GridSpec& grid) {
  const std::string id = "AnmA";
  const TransformResult h = weighted_double_envelope(f, n, grid);
  SlackTracker tracker(id);
  Verdict verdict = Verdict::holds;
  for (const auto& [r, R] : sample_pairs(m, sampling)) {
    const double lhs = f(R);
    const double rhs = integral_mean(h.fn, m, r, R, cfg).value;
    if (!tracker.add(lhs, rhs, {r, R, std::nullopt})) {
      verdict = confirm(tracker, [&] {
        const Integrand g = [&h](double x) { return h(x); };
        return std::make_pair(f(R), oracle_mean(g, m, r, R));
      });
      break;
    }
  }
  for (const auto& w : h.warnings) tracker.report().notes.push_back("hypothesis: " + w);
  return tracker.finish(verdict);
}

VerifyReport check_corollary_bounds(const Function1D& Q, const Function1D& d, double r0,
                                    CorollaryDirection direction, const PairSampling& sampling,
                                    const QuadratureConfig& cfg) {
  const std::string id = direction == CorollaryDirection::dQ ? "dQ" : "Qd";
  if (!(r0 > 0.0)) throw Error(ErrorKind::invalid_argument, "r0 must be positive");
  const Measure1D ln = Measure1D::log(Domain(r0, kInf));
  const Integrand q_over_x = [&Q](double x) { return Q(x) / x; };

  SlackTracker tracker(id);
  Verdict verdict = Verdict::holds;
  for (const auto& [r, R] : sample_pairs(ln, sampling)) {
    // ∫_r^R Q(x)/x² dx = ∫_r^R (Q(x)/x) d ln x
    const double integral = stieltjes_integral(q_over_x, ln, r, R, cfg).value;
    const double bound = d(R) * std::log(R / r);
    const bool ok = direction == CorollaryDirection::dQ
                        ? tracker.add(integral, bound, {r, R, std::nullopt})
                        : tracker.add(bound, integral, {r, R, std::nullopt});
    if (!ok) {
      verdict = confirm(tracker, [&] {
        const double oracle = midpoint_stieltjes_sum(q_over_x, ln, r, R, kOraclePanels);
        return direction == CorollaryDirection::dQ ? std::make_pair(oracle, bound)
                                                   : std::make_pair(bound, oracle);
      });
      break;
    }
  }
  return tracker.finish(verdict);
}

void DecaySchedule::validate() const {
  if (steps < 3) throw Error(ErrorKind::invalid_argument, "decay schedule needs at least 3 steps");
  if (!(ratio > 1.0)) throw Error(ErrorKind::invalid_argument, "decay schedule ratio must be > 1");
  if (!std::isfinite(start) || !std::isfinite(threshold))
    throw Error(ErrorKind::invalid_argument, "decay schedule values must be finite");
}

DecaySchedule DecaySchedule::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 4)
    throw Error(ErrorKind::invalid_argument, "schedule must be start:ratio:steps:threshold");
  DecaySchedule s;
  try {
    std::size_t pos = 0;
    s.start = std::stod(parts[0], &pos);
    if (pos != parts[0].size()) throw std::invalid_argument(parts[0]);
    s.ratio = std::stod(parts[1], &pos);
    if (pos != parts[1].size()) throw std::invalid_argument(parts[1]);
    s.steps = std::stoi(parts[2], &pos);
    if (pos != parts[2].size()) throw std::invalid_argument(parts[2]);
    s.threshold = std::stod(parts[3], &pos);
    if (pos != parts[3].size()) throw std::invalid_argument(parts[3]);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::invalid_argument, "malformed schedule '" + text + "'");
  }
  s.validate();
  return s;
}

VerifyReport estimate_decay(const Function1D& g, const DecaySchedule& schedule) {
  schedule.validate();
  VerifyReport report;
  report.property_id = "decay";
  std::vector<double> xs;
  for (int k = 0; k < schedule.steps; ++k) {
    const double x = schedule.start * std::pow(schedule.ratio, k);
    xs.push_back(x);
    report.sequence.push_back(g(x));
  }
  report.samples_used = schedule.steps;
  const auto& v = report.sequence;

  // Eventually nonincreasing: the second half of the schedule.
  std::optional<std::size_t> rise;
  for (std::size_t k = static_cast<std::size_t>(schedule.steps) / 2; k + 1 < v.size(); ++k) {
    const double tol = 1e-12 * std::max(1.0, std::abs(v[k]));
    if (v[k + 1] > v[k] + tol) {
      rise = k + 1;
      break;
    }
  }
  report.worst_slack = v.back() - schedule.threshold;
  report.slack_budget = 0.0;
  const bool below = v.back() < schedule.threshold;
  if (!rise && below) {
    report.verdict = Verdict::holds;
  } else {
    report.verdict = Verdict::violated;
    report.witness = Witness{std::nullopt, std::nullopt, rise ? xs[*rise] : xs.back()};
    if (rise) report.notes.push_back("sequence increases at x = " + num(xs[*rise]));
    if (!below) report.notes.push_back("final value " + num(v.back()) + " not below threshold " +
                                       num(schedule.threshold));
  }
  return report;
}

VerifyReport finite_difference_check(const Function1D& f, const Measure1D& m, double r, double R,
                                     const QuadratureConfig& cfg) {
  const double a = m.domain().a;
  const double h = 1e-5 * (R - r);
  if (!(r - h > a) || !(R + h < m.domain().b) || !(r < R))
    throw Error(ErrorKind::domain_violation,
                "finite differences need a < r - h and R + h < b, h = 1e-5 (R - r)");
  // Differencing amplifies quadrature noise by 1/h, so the means are computed
  // far below the default tolerance.
  QuadratureConfig tight = cfg;
  tight.rtol = std::min(cfg.rtol, 1e-13);
  tight.atol = std::min(cfg.atol, 1e-15);
  tight.max_halvings = std::max(cfg.max_halvings, 30);

  auto mean = [&](double lo, double hi) { return integral_mean(f, m, lo, hi, tight).value; };
  const double analytic_r = mean_partial_r(f, m, r, R, tight);
  const double analytic_R = mean_partial_R(f, m, r, R, tight);
  const double fd_r = (mean(r + h, R) - mean(r - h, R)) / (2.0 * h);
  const double fd_R = (mean(r, R + h) - mean(r, R - h)) / (2.0 * h);
  const double scale = derivative_scale(m, r, R, mean(r, R));

  auto rel = [&](double x, double y) {
    const double denom = std::max({std::abs(x), std::abs(y), scale, 1e-300});
    return std::abs(x - y) / denom;
  };
  const double err_r = rel(analytic_r, fd_r);
  const double err_R = rel(analytic_R, fd_R);

  VerifyReport report;
  report.property_id = "partials";
  report.samples_used = 2;
  report.slack_budget = 0.0;
  report.worst_slack = std::max(err_r, err_R) - 1e-6;
  report.notes.push_back("d/dr analytic=" + num(analytic_r) + " fd=" + num(fd_r) +
                         " rel_err=" + num(err_r));
  report.notes.push_back("d/dR analytic=" + num(analytic_R) + " fd=" + num(fd_R) +
                         " rel_err=" + num(err_R));
  if (err_r <= 1e-6 && err_R <= 1e-6) {
    report.verdict = Verdict::holds;
  } else {
    report.verdict = Verdict::violated;
    report.witness = Witness{r, R, std::nullopt};
  }
  return report;
}

}  // namespace intmean
