#include "intmean/transforms.hpp"

#include <cmath>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace intmean {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

/// Thread-safe memo of R -> value. Cleared when it grows past a fixed size.
class MemoTable {
 public:
  template <typename Compute>
  double get(double key, Compute&& compute) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = values_.find(key); it != values_.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard lock(mutex_);
    if (values_.size() >= kMaxEntries) values_.clear();
    values_.emplace(key, v);
    return v;
  }

 private:
  static constexpr std::size_t kMaxEntries = 1 << 16;
  std::mutex mutex_;
  std::unordered_map<double, double> values_;
};

std::string describe(const Envelope& env) {
  std::ostringstream os;
  os.precision(10);
  os << (env.side() == Side::right ? "right" : "left") << " envelope: " << env.nodes().size()
     << " nodes on [" << env.nodes().front() << ", " << env.table_end() << "], "
     << env.refined_peaks() << " refined peaks";
  if (env.side() == Side::right && env.source().domain().unbounded())
    os << ", tail sup beyond table " << env.tail_sup();
  return os.str();
}

TransformResult majorant_mean_impl(const Function1D& f, const Measure1D& m,
                                   const QuadratureConfig& cfg, const GridSpec& grid,
                                   bool check_vanishing) {
  cfg.validate();
  const Domain& dom = f.domain();
  if (m.domain().a != dom.a || m.domain().b < dom.b)
    throw Error(ErrorKind::invalid_argument,
                "measure domain must start at a and cover the function's domain");

  TransformResult out;
  if (f.tail().mode != TailMode::vanishing)
    out.warnings.push_back("f is not declared vanishing at b");
  if (!m.diverges_at_b()) out.warnings.push_back("m is not declared divergent at b");
  if (check_vanishing && dom.unbounded() && !appears_to_vanish(f, dom.a))
    out.warnings.push_back("f does not appear to tend to 0 at b");

  const Envelope env(f, Side::right, grid);
  out.log.push_back(describe(env));
  if (env.tail_bound_not_attained()) out.log.push_back("tail bound not attained by the grid max");

  struct State {
    Function1D envelope;
    Measure1D m;
    QuadratureConfig cfg;
    double a = 0.0;
    MemoTable memo;
  };
  auto state = std::make_shared<State>();
  state->envelope = env.as_function();
  state->m = m;
  state->cfg = cfg;
  state->a = dom.a;
  Function1D fn(
      [state](double R) {
        return state->memo.get(R, [&] {
          if (R == state->a) return state->envelope(R);
          return integral_mean(state->envelope, state->m, state->a, R, state->cfg).value;
        });
      },
      dom, Tail::vanishing(), Monotonicity::decreasing);
  fn.with_name("majorant mean of " + (f.name().empty() ? std::string("f") : f.name()));
  out.fn = std::move(fn);
  out.log.push_back("D(R) = A_m(" + fmt(dom.a) + ", R; right envelope), m = " +
                    (m.name().empty() ? std::string("m") : m.name()));
  return out;
}

struct DoubleEnvelope {
  std::shared_ptr<const Envelope> left;
  std::vector<std::string> log;
};

// left_max[n · right_max[f]] tabulated as an Envelope.
DoubleEnvelope double_envelope_core(const Function1D& f, const Function1D& n,
                                    const GridSpec& grid) {
  DoubleEnvelope out;
  const Envelope right(f, Side::right, grid);
  out.log.push_back(describe(right));
  auto right_fn = right.as_function();
  Function1D weighted([n, right_fn](double x) { return n.raw(x) * right_fn(x); }, f.domain(),
                      Tail::unknown(), Monotonicity::none, f.locally_bounded());
  weighted.with_name("n * right envelope");
  out.left = std::make_shared<const Envelope>(weighted, Side::left, grid);
  out.log.push_back(describe(*out.left));
  return out;
}

}  // namespace

std::vector<std::string> WeightN::check(const GridSpec& grid) const {
  std::vector<std::string> problems;
  const Domain& dom = n.domain();
  try {
    if (!(n(dom.a) > 0.0)) problems.push_back("n(a) must be positive");
    const Monotonicity mono = classify_monotonicity(n, grid);
    if (mono != Monotonicity::increasing && mono != Monotonicity::constant)
      problems.push_back("n is not increasing on sampled nodes");
    if (dom.unbounded()) {
      const double s = dom.scale();
      const double far = n(dom.a + s * 1e12);
      if (!(far > 1e3 * std::max(1.0, std::abs(n(dom.a)))))
        problems.push_back("n does not appear to tend to +inf at b");
    }
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  return problems;
}

bool appears_to_vanish(const Function1D& g, double start) {
  try {
    const double s = std::max(1.0, std::abs(start));
    std::vector<double> v;
    for (int k = 0; k <= 12; ++k) v.push_back(std::abs(g(start + s * std::pow(10.0, k))));
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, x);
    const double last = v.back();
    if (last <= 1e-12) return true;
    for (std::size_t k = v.size() - 4; k + 1 < v.size(); ++k)
      if (v[k + 1] > v[k] * (1.0 + 1e-12)) return false;
    return last <= 0.5 * peak;
  } catch (const Error&) {
    return false;
  }
}

TransformResult decreasing_majorant_mean(const Function1D& f, const Measure1D& m,
                                         const QuadratureConfig& cfg, const GridSpec& grid) {
  return majorant_mean_impl(f, m, cfg, grid, true);
}

TransformResult weighted_double_envelope(const Function1D& f, const WeightN& n,
                                         const GridSpec& grid) {
  const Domain& dom = f.domain();
  if (n.n.domain().a != dom.a || n.n.domain().b < dom.b)
    throw Error(ErrorKind::invalid_argument, "weight domain must start at a and cover f's domain");

  TransformResult out;
  for (auto& p : n.check(grid)) out.warnings.push_back("weight: " + p);
  if (f.tail().mode != TailMode::vanishing)
    out.warnings.push_back("f is not declared vanishing at b");
  if (dom.unbounded() && !appears_to_vanish(f, dom.a))
    out.warnings.push_back("f does not appear to tend to 0 at b");

  DoubleEnvelope core = double_envelope_core(f, n.n, grid);
  out.log = std::move(core.log);
  Function1D weight = n.n;
  auto left = core.left;
  Function1D fn([left, weight](double R) { return (*left)(R) / weight(R); }, dom,
                Tail::vanishing(), Monotonicity::none, true);
  fn.with_name("double envelope of " + (f.name().empty() ? std::string("f") : f.name()));
  out.fn = std::move(fn);
  out.log.push_back("h(R) = left_max[n * right_max[f]](R) / n(R)");
  return out;
}

TransformResult d_from_Q(const Function1D& Q, double r0, const QuadratureConfig& cfg,
                         const GridSpec& grid) {
  if (!(r0 > 0.0)) throw Error(ErrorKind::invalid_argument, "r0 must be positive");
  if (Q.domain().a > r0 || !Q.domain().unbounded())
    throw Error(ErrorKind::invalid_argument, "Q must be defined on [r0, +inf)");
  const Domain dom(r0, kInf);
  Function1D f([Q](double x) { return Q(x) / x; }, dom, Tail::vanishing(), Monotonicity::none,
               Q.locally_bounded());
  f.with_name("Q(x)/x");

  std::vector<std::string> warnings;
  const auto nodes = make_nodes(r0, r0 * 1e12, 65, Spacing::geometric);
  for (double x : nodes) {
    if (Q(x) < 0.0) {
      warnings.push_back("Q takes negative values (at x = " + fmt(x) + ")");
      break;
    }
  }
  const bool vanishes = appears_to_vanish(f, r0);
  if (!vanishes) warnings.push_back("Q(x)/x does not appear to tend to 0");

  TransformResult out = majorant_mean_impl(f, Measure1D::log(dom), cfg, grid, false);
  out.warnings.insert(out.warnings.end(), warnings.begin(), warnings.end());
  out.fn.with_name("d");
  out.log.push_back("d(R) = A_ln(r0, R; right_max[Q(x)/x]), r0 = " + fmt(r0));
  return out;
}

TransformResult Q_from_d(const Function1D& d, double r0, const GridSpec& grid) {
  if (!(r0 > 0.0)) throw Error(ErrorKind::invalid_argument, "r0 must be positive");
  if (d.domain().a > r0 || !d.domain().unbounded())
    throw Error(ErrorKind::invalid_argument, "d must be defined on [r0, +inf)");
  const Domain dom(r0, kInf);
  Function1D f([d](double x) { return d(x); }, dom, Tail::vanishing(), d.hint(),
               d.locally_bounded());
  f.with_name("d");

  TransformResult out;
  if (!d.locally_bounded()) out.warnings.push_back("d is not declared locally bounded");
  const auto nodes = make_nodes(r0, r0 * 1e12, 65, Spacing::geometric);
  for (double x : nodes) {
    if (d(x) < 0.0) {
      out.warnings.push_back("d takes negative values (at x = " + fmt(x) + ")");
      break;
    }
  }
  if (!appears_to_vanish(f, r0)) out.warnings.push_back("d does not appear to tend to 0");

  const Function1D identity([](double x) { return x; }, dom, Tail::unknown(),
                            Monotonicity::increasing);
  DoubleEnvelope core = double_envelope_core(f, identity, grid);
  out.log = std::move(core.log);
  auto left = core.left;
  Function1D fn([left](double R) { return (*left)(R); }, dom, Tail::unknown(),
                Monotonicity::increasing, true);
  fn.with_name("Q");
  out.fn = std::move(fn);
  out.log.push_back("Q(R) = left_max[x * right_max[d]](R), r0 = " + fmt(r0));
  return out;
}

}  // namespace intmean
