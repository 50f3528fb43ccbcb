#include "intmean/func1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace intmean {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain_violation: return "domain violation";
    case ErrorKind::non_finite: return "non-finite value";
    case ErrorKind::uncertifiable_tail: return "uncertifiable tail";
    case ErrorKind::unbounded_sup: return "unbounded supremum";
    case ErrorKind::quadrature: return "quadrature failure";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::missing_derivative: return "missing derivative";
    case ErrorKind::hypothesis: return "hypothesis violation";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::non_differentiable: return "non-differentiable";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::increasing: return "increasing";
    case Monotonicity::decreasing: return "decreasing";
    case Monotonicity::constant: return "constant";
    case Monotonicity::none: return "neither";
  }
  return "neither";
}

Domain::Domain(double a_, double b_) : a(a_), b(b_) {
  if (!std::isfinite(a) || std::isnan(b) || !(a < b)) {
    std::ostringstream os;
    os << "invalid domain [" << a << ", " << b << "): need finite a < b";
    throw Error(ErrorKind::invalid_argument, os.str());
  }
}

double Domain::scale() const { return std::max(1.0, std::abs(a)); }

Function1D::Function1D(Callable fn, Domain domain, Tail tail, Monotonicity hint,
                       bool locally_bounded)
    : fn_(std::move(fn)),
      domain_(domain),
      tail_(tail),
      hint_(hint),
      locally_bounded_(locally_bounded) {}

double Function1D::operator()(double x) const {
  if (!domain_.contains(x)) {
    std::ostringstream os;
    os.precision(17);
    os << "x = " << x << " outside [" << domain_.a << ", " << domain_.b << ")";
    if (!name_.empty()) os << " of " << name_;
    throw Error(ErrorKind::domain_violation, os.str());
  }
  const double v = fn_(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite value " << v << " at x = " << x;
    if (!name_.empty()) os << " of " << name_;
    throw Error(ErrorKind::non_finite, os.str());
  }
  return v;
}

double evaluate(const Function1D& f, double x) { return f(x); }

void GridSpec::validate() const {
  if (node_count < 3) throw Error(ErrorKind::invalid_argument, "grid needs at least 3 nodes");
  if (!(eps_sup > 0.0)) throw Error(ErrorKind::invalid_argument, "eps_sup must be positive");
  if (refinement_rounds < 0)
    throw Error(ErrorKind::invalid_argument, "refinement rounds must be >= 0");
}

double GridSpec::absolute_eps(double magnitude) const {
  return eps_sup * std::max(1.0, std::abs(magnitude));
}

std::vector<double> make_nodes(double lo, double hi, int count, Spacing spacing,
                               bool unbounded_domain) {
  if (!(hi > lo)) return {lo};
  count = std::max(count, 2);
  bool geometric = spacing == Spacing::geometric;
  if (spacing == Spacing::automatic)
    geometric = unbounded_domain || (lo > 0.0 && hi / lo > 100.0);

  std::vector<double> xs(static_cast<std::size_t>(count));
  const double last = count - 1;
  if (!geometric) {
    for (int i = 0; i < count; ++i) xs[i] = lo + (hi - lo) * (i / last);
  } else if (lo > 0.0) {
    const double l0 = std::log(lo), l1 = std::log(hi);
    for (int i = 0; i < count; ++i) xs[i] = std::exp(l0 + (l1 - l0) * (i / last));
  } else {
    // Shifted geometric spacing for intervals touching or crossing zero.
    const double s = std::max(1.0, std::abs(lo));
    const double span = std::log1p((hi - lo) / s);
    for (int i = 0; i < count; ++i) xs[i] = lo + s * std::expm1(span * (i / last));
  }
  xs.front() = lo;
  xs.back() = hi;
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (std::size_t i = 1; i < xs.size(); ++i) xs[i] = std::max(xs[i], xs[i - 1]);
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

Peak golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                        double x_tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  Peak best{lo, f(lo)};
  auto consider = [&](double x, double v) {
    if (v > best.value) best = {x, v};
  };
  consider(hi, f(hi));
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c), fd = f(d);
  consider(c, fc);
  consider(d, fd);
  for (int it = 0; it < 200 && (hi - lo) > x_tol; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
      consider(c, fc);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
      consider(d, fd);
    }
  }
  return best;
}

namespace {

double checked(const Function1D& f, double x) {
  const double v = f.raw(x);
  if (!std::isfinite(v) || std::abs(v) > detail::kOverflowGuard) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite or overflowing value " << v << " at x = " << x;
    if (!f.name().empty()) os << " of " << f.name();
    const bool overflow = std::isfinite(v) || !f.locally_bounded();
    throw Error(overflow ? ErrorKind::unbounded_sup : ErrorKind::non_finite, os.str());
  }
  return v;
}

double x_tolerance(double lo, double hi) {
  return 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
}

// Golden-section restarts on successively narrower brackets re-centred on the
// best point found so far, all clamped to [lo, hi].
Peak refine_peak(const Function1D& f, double lo, double hi, int rounds) {
  auto eval = [&](double x) { return checked(f, x); };
  Peak best = golden_section_max(eval, lo, hi, x_tolerance(lo, hi));
  double width = hi - lo;
  for (int round = 1; round < rounds; ++round) {
    width *= 0.25;
    const double l = std::max(lo, best.x - width);
    const double h = std::min(hi, best.x + width);
    if (!(h > l)) break;
    const Peak p = golden_section_max(eval, l, h, x_tolerance(l, h));
    if (p.value > best.value) best = p;
  }
  return best;
}

// Indices of sampled local maxima that could hide a higher peak between
// nodes. A peak can exceed its best sample by at most a quarter of the larger
// drop to a neighbour, so candidates whose drops are all below eps are skipped.
std::vector<std::size_t> peak_candidates(std::span<const double> ys, double eps) {
  std::vector<std::size_t> out;
  const std::size_t n = ys.size();
  if (n < 2) return out;
  for (std::size_t j = 0; j < n; ++j) {
    const double left = j > 0 ? ys[j - 1] : -kInf;
    const double right = j + 1 < n ? ys[j + 1] : -kInf;
    if (ys[j] < left || ys[j] < right) continue;
    const double drop = std::max(j > 0 ? ys[j] - left : 0.0, j + 1 < n ? ys[j] - right : 0.0);
    if (drop > eps) out.push_back(j);
  }
  return out;
}

double finite_table_end(const Domain& d) { return d.b - 1e-10 * (d.b - d.a); }

double horizon_from(double from) {
  return from + std::max(1.0, std::abs(from)) * std::ldexp(1.0, detail::kHorizonDoublings);
}

struct GridMax {
  double value;
  double argmax;
};

GridMax sampled_sup(const Function1D& f, std::span<const double> xs, const GridSpec& grid) {
  std::vector<double> ys(xs.size());
  GridMax best{-kInf, xs.front()};
  double magnitude = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ys[i] = checked(f, xs[i]);
    magnitude = std::max(magnitude, std::abs(ys[i]));
    if (ys[i] > best.value) best = {ys[i], xs[i]};
  }
  if (grid.refinement_rounds > 0) {
    const double eps = grid.absolute_eps(magnitude);
    for (std::size_t j : peak_candidates(ys, eps)) {
      const double lo = xs[j > 0 ? j - 1 : 0];
      const double hi = xs[std::min(j + 1, xs.size() - 1)];
      const Peak p = refine_peak(f, lo, hi, grid.refinement_rounds);
      if (p.value > best.value) best = {p.value, p.x};
    }
  }
  return best;
}

}  // namespace

namespace detail {

TailScan scan_tail(const Function1D& f, double from, const GridSpec& grid) {
  const double s = std::max(1.0, std::abs(from));
  const int total = kHorizonDoublings + kTailDoublings;
  std::vector<double> xs, vs;
  xs.reserve(total + 1);
  vs.reserve(total + 1);
  for (int k = 0; k <= total; ++k) {
    const double x = from + s * std::ldexp(1.0, k);
    xs.push_back(x);
    vs.push_back(checked(f, x));
  }
  double magnitude = std::abs(checked(f, from));
  for (int k = 0; k <= kHorizonDoublings; ++k) magnitude = std::max(magnitude, std::abs(vs[k]));
  const double half_eps = 0.5 * grid.absolute_eps(magnitude);

  TailScan out{xs[kHorizonDoublings], -kInf, magnitude};
  if (f.tail().mode == TailMode::vanishing) {
    // Smallest scan node beyond which every scanned sample is below eps/2.
    int k_cut = kHorizonDoublings;
    for (int k = total; k >= 0; --k) {
      if (std::abs(vs[k]) >= half_eps) break;
      if (k <= kHorizonDoublings) k_cut = k;
    }
    out.cutoff = xs[k_cut];
    for (int k = k_cut + 1; k <= total; ++k) out.tail_sup = std::max(out.tail_sup, vs[k]);
  } else {
    for (int k = kHorizonDoublings + 1; k <= total; ++k)
      out.tail_sup = std::max(out.tail_sup, vs[k]);
  }
  return out;
}

}  // namespace detail

SupEstimate right_maximization(const Function1D& f, double r, const GridSpec& grid) {
  grid.validate();
  const Domain& dom = f.domain();
  if (!dom.contains(r)) {
    std::ostringstream os;
    os << "right maximization at r = " << r << " outside [" << dom.a << ", " << dom.b << ")";
    throw Error(ErrorKind::domain_violation, os.str());
  }

  SupEstimate out;
  double hi = 0.0;
  double tail_sup = -kInf;
  if (dom.unbounded()) {
    if (f.tail().mode == TailMode::unknown)
      throw Error(ErrorKind::uncertifiable_tail,
                  "sup over an unbounded interval needs a vanishing or bounded tail");
    const detail::TailScan scan = detail::scan_tail(f, r, grid);
    hi = scan.cutoff;
    tail_sup = scan.tail_sup;
  } else {
    hi = std::max(r, finite_table_end(dom));
  }
  out.cutoff = hi;

  GridMax best{checked(f, r), r};
  if (hi > r) {
    const auto xs = make_nodes(r, hi, grid.node_count, grid.spacing, dom.unbounded());
    best = sampled_sup(f, xs, grid);
  }
  out.value = best.value;
  out.argmax = best.argmax;
  if (tail_sup > out.value) {
    out.value = tail_sup;
    out.argmax = hi;
  }
  if (!std::isfinite(out.value) || out.value > detail::kOverflowGuard)
    throw Error(ErrorKind::unbounded_sup, "supremum exceeds the overflow guard");
  if (f.tail().mode == TailMode::bounded_by &&
      out.value < f.tail().bound - grid.absolute_eps(out.value))
    out.tail_bound_not_attained = true;
  return out;
}

SupEstimate left_maximization(const Function1D& f, double r, const GridSpec& grid) {
  grid.validate();
  const Domain& dom = f.domain();
  if (!dom.contains(r)) {
    std::ostringstream os;
    os << "left maximization at r = " << r << " outside [" << dom.a << ", " << dom.b << ")";
    throw Error(ErrorKind::domain_violation, os.str());
  }
  SupEstimate out;
  out.cutoff = r;
  GridMax best{checked(f, dom.a), dom.a};
  if (r > dom.a) {
    const auto xs = make_nodes(dom.a, r, grid.node_count, grid.spacing, dom.unbounded());
    best = sampled_sup(f, xs, grid);
  }
  if (!std::isfinite(best.value) || best.value > detail::kOverflowGuard)
    throw Error(ErrorKind::unbounded_sup, "supremum exceeds the overflow guard");
  out.value = best.value;
  out.argmax = best.argmax;
  return out;
}

Monotonicity classify_monotonicity(const Function1D& f, const GridSpec& grid) {
  grid.validate();
  const Domain& dom = f.domain();
  const double hi = dom.unbounded() ? horizon_from(dom.a) : finite_table_end(dom);
  const auto xs = make_nodes(dom.a, hi, grid.node_count, grid.spacing, dom.unbounded());
  std::vector<double> ys(xs.size());
  double magnitude = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ys[i] = checked(f, xs[i]);
    magnitude = std::max(magnitude, std::abs(ys[i]));
  }
  const double tol = grid.absolute_eps(magnitude);
  bool up = false, down = false;
  for (std::size_t i = 1; i < ys.size(); ++i) {
    const double diff = ys[i] - ys[i - 1];
    if (diff > tol) up = true;
    if (diff < -tol) down = true;
  }
  if (up && down) return Monotonicity::none;
  if (up) return Monotonicity::increasing;
  if (down) return Monotonicity::decreasing;
  return Monotonicity::constant;
}

Envelope::Envelope(Function1D source, Side side, const GridSpec& grid)
    : source_(std::move(source)), side_(side), grid_(grid) {
  grid_.validate();
  const Domain& dom = source_.domain();

  double hi = 0.0;
  if (!dom.unbounded()) {
    hi = finite_table_end(dom);
  } else if (side_ == Side::right) {
    if (source_.tail().mode == TailMode::unknown)
      throw Error(ErrorKind::uncertifiable_tail,
                  "right envelope on an unbounded interval needs a vanishing or bounded tail");
    const detail::TailScan scan = detail::scan_tail(source_, dom.a, grid_);
    hi = scan.cutoff;
    tail_sup_ = scan.tail_sup;
  } else {
    hi = horizon_from(dom.a);
  }

  nodes_ = make_nodes(dom.a, hi, grid_.node_count, grid_.spacing, dom.unbounded());
  samples_.resize(nodes_.size());
  double magnitude = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    samples_[i] = checked(source_, nodes_[i]);
    magnitude = std::max(magnitude, std::abs(samples_[i]));
  }
  eps_ = grid_.absolute_eps(magnitude);

  if (grid_.refinement_rounds > 0) {
    std::vector<Peak> peaks;
    for (std::size_t j : peak_candidates(samples_, eps_)) {
      const double lo = nodes_[j > 0 ? j - 1 : 0];
      const double up = nodes_[std::min(j + 1, nodes_.size() - 1)];
      const Peak p = refine_peak(source_, lo, up, grid_.refinement_rounds);
      if (p.value > samples_[j]) peaks.push_back(p);
    }
    if (!peaks.empty()) {
      std::vector<std::pair<double, double>> merged;
      merged.reserve(nodes_.size() + peaks.size());
      for (std::size_t i = 0; i < nodes_.size(); ++i) merged.emplace_back(nodes_[i], samples_[i]);
      for (const Peak& p : peaks) merged.emplace_back(p.x, p.value);
      std::sort(merged.begin(), merged.end());
      // A refined point landing on an existing node keeps the larger value.
      std::vector<std::pair<double, double>> unique;
      for (const auto& [x, v] : merged) {
        if (!unique.empty() && unique.back().first == x)
          unique.back().second = std::max(unique.back().second, v);
        else
          unique.emplace_back(x, v);
      }
      nodes_.clear();
      samples_.clear();
      for (const auto& [x, v] : unique) {
        nodes_.push_back(x);
        samples_.push_back(v);
      }
      refined_peaks_ = static_cast<int>(peaks.size());
    }
  }

  values_.resize(samples_.size());
  if (side_ == Side::right) {
    double running = std::max(samples_.back(), tail_sup_);
    for (std::size_t i = samples_.size(); i-- > 0;) {
      running = std::max(running, samples_[i]);
      values_[i] = running;
    }
    if (source_.tail().mode == TailMode::bounded_by &&
        values_.front() < source_.tail().bound - eps_)
      tail_bound_not_attained_ = true;
  } else {
    double running = -kInf;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      running = std::max(running, samples_[i]);
      values_[i] = running;
    }
  }
  if (sup() > detail::kOverflowGuard)
    throw Error(ErrorKind::unbounded_sup, "envelope exceeds the overflow guard");
}

double Envelope::sup() const { return side_ == Side::right ? values_.front() : values_.back(); }

double Envelope::operator()(double x) const {
  const Domain& dom = source_.domain();
  if (!dom.contains(x)) {
    std::ostringstream os;
    os.precision(17);
    os << "envelope query x = " << x << " outside [" << dom.a << ", " << dom.b << ")";
    throw Error(ErrorKind::domain_violation, os.str());
  }
  if (x > nodes_.back()) {
    if (side_ == Side::right) {
      double v = checked(source_, x);
      if (dom.unbounded()) v = std::max(v, tail_sup_);
      return std::min(values_.back(), v);
    }
    if (!dom.unbounded()) return std::max(values_.back(), checked(source_, x));
    const auto xs = make_nodes(nodes_.back(), x, 257, Spacing::automatic, true);
    return std::max(values_.back(), sampled_sup(source_, xs, grid_).value);
  }
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (nodes_[i] == x) return values_[i];
  const double fx = checked(source_, x);
  if (side_ == Side::right) return std::min(values_[i], std::max(values_[i + 1], fx));
  return std::min(values_[i + 1], std::max(values_[i], fx));
}

Function1D Envelope::as_function() const {
  auto shared = std::make_shared<const Envelope>(*this);
  const bool right = side_ == Side::right;
  Function1D fn([shared](double x) { return (*shared)(x); }, source_.domain(),
                right ? source_.tail() : Tail::unknown(),
                right ? Monotonicity::decreasing : Monotonicity::increasing,
                source_.locally_bounded());
  fn.with_name((right ? "right envelope of " : "left envelope of ") +
               (source_.name().empty() ? std::string("f") : source_.name()));
  return fn;
}

Envelope envelope_function(const Function1D& f, Side side, const GridSpec& grid) {
  return Envelope(f, side, grid);
}

}  // namespace intmean
