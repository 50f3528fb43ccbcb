#include "intmean/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "intmean/expr.hpp"
#include "intmean/stieltjes.hpp"
#include "intmean/transforms.hpp"
#include "intmean/verify.hpp"

namespace intmean::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Options {
  std::string f, m = "ln(x)", n = "x", Q, d, g;
  std::optional<double> a, r0, r, R, lo, hi;
  std::string b = "inf";
  std::string tail = "vanishing";
  double tol = 1e-9;
  int grid = 4097;
  std::uint64_t seed = 1;
  std::string format;
  std::string output;

  std::string side = "right";
  std::string kind;
  std::string of = "f";
  std::string table;
  std::string property;
  std::string schedule;
  int pairs = 200;
  int points = 20;
  bool partials = false;
};

double parse_bound(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity") return kInf;
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw UsageError("--b must be a number or 'inf', got '" + text + "'");
}

Tail parse_tail(const std::string& text) {
  if (text == "vanishing") return Tail::vanishing();
  if (text == "unknown") return Tail::unknown();
  if (text.rfind("bounded:", 0) == 0) {
    try {
      return Tail::bounded_by(std::stod(text.substr(8)));
    } catch (const std::logic_error&) {
    }
  }
  throw UsageError("--tail must be vanishing, unknown or bounded:<value>");
}

/// Resolves the flags into library objects.
class Context {
 public:
  explicit Context(const Options& o) : o_(o) {
    grid_.node_count = o.grid;
    grid_.validate();
    cfg_.rtol = o.tol;
    cfg_.atol = o.tol * 0.1;
    cfg_.validate();
  }

  const GridSpec& grid() const { return grid_; }
  const QuadratureConfig& cfg() const { return cfg_; }

  /// --a/--b; a tabulated --f supplies its own range when --a is absent.
  Domain domain() const {
    if (o_.a) return Domain(*o_.a, parse_bound(o_.b));
    if (!o_.f.empty() && o_.f.front() == '@') return load_csv_function(o_.f.substr(1)).domain();
    if (o_.r0) return Domain(*o_.r0, parse_bound(o_.b));
    throw UsageError("--a is required");
  }
  double r0() const {
    if (o_.r0) return *o_.r0;
    if (o_.a) return *o_.a;
    throw UsageError("--r0 is required");
  }

  Function1D function(const std::string& spec, const std::string& flag, Domain dom) const {
    if (spec.empty()) throw UsageError(flag + " is required");
    if (spec.front() == '@') {
      Function1D fn = load_csv_function(spec.substr(1)).as_function(parse_tail(o_.tail));
      fn.with_name(spec);
      return fn;
    }
    auto ast = std::make_shared<const expr::Expression>(expr::parse_expression(spec));
    Function1D fn([ast](double x) { return (*ast)(x); }, dom, parse_tail(o_.tail));
    fn.with_name(spec);
    return fn;
  }

  Function1D f() const { return function(o_.f, "--f", domain()); }

  Measure1D measure(Domain dom) const {
    const std::string& spec = o_.m;
    if (!spec.empty() && spec.front() == '@') {
      const auto table = std::make_shared<const TabulatedFunction>(load_csv_function(spec.substr(1)));
      Measure1D m([table](double x) { return (*table)(x); }, std::nullopt, table->domain(), false);
      m.with_name(spec);
      return m;
    }
    auto ast = std::make_shared<const expr::Expression>(expr::parse_expression(spec));
    std::optional<Measure1D::Callable> derivative;
    try {
      auto d = std::make_shared<const expr::Expression>(expr::derive_expression(*ast));
      derivative = [d](double x) { return (*d)(x); };
    } catch (const Error&) {
      // Non-differentiable expression: fall back on Stieltjes sums.
    }
    auto eval = [ast](double x) { return (*ast)(x); };
    Measure1D m(eval, derivative, dom, dom.unbounded() && looks_divergent(eval, dom));
    m.with_name(spec);
    return m;
  }

  WeightN weight(Domain dom) const {
    return {function(o_.n, "--n", dom).with_tail(Tail::unknown())};
  }

  std::vector<std::string> measure_problems(const Measure1D& m) const { return check_measure(m); }

 private:
  // m(x) -> +inf, judged from growth over 40 doublings relative to the first one.
  static bool looks_divergent(const std::function<double(double)>& m, const Domain& dom) {
    try {
      const double s = dom.scale();
      const double m0 = m(dom.a);
      const double first = m(dom.a + s) - m0;
      const double far = m(dom.a + s * std::ldexp(1.0, 40)) - m0;
      return first > 0.0 && far > 10.0 * first;
    } catch (const Error&) {
      return false;
    }
  }

  const Options& o_;
  GridSpec grid_;
  QuadratureConfig cfg_;
};

struct Built {
  Function1D fn;
  std::vector<std::string> log;
  std::vector<std::string> warnings;
};

Built build(const std::string& kind, const Options& o, const Context& ctx) {
  if (kind == "f") return {ctx.f(), {}, {}};
  if (kind == "g") return {ctx.function(o.g, "--g", ctx.domain()), {}, {}};
  if (kind == "right-envelope" || kind == "left-envelope") {
    const Envelope env(ctx.f(), kind == "right-envelope" ? Side::right : Side::left, ctx.grid());
    return {env.as_function(), {}, {}};
  }
  TransformResult t;
  if (kind == "majorant") {
    const Domain dom = ctx.domain();
    t = decreasing_majorant_mean(ctx.f(), ctx.measure(dom), ctx.cfg(), ctx.grid());
  } else if (kind == "double-envelope") {
    const Domain dom = ctx.domain();
    t = weighted_double_envelope(ctx.f(), ctx.weight(dom), ctx.grid());
  } else if (kind == "d-from-q") {
    const double r0 = ctx.r0();
    t = d_from_Q(ctx.function(o.Q, "--Q", Domain(o.a ? *o.a : r0, kInf)), r0, ctx.cfg(),
                 ctx.grid());
  } else if (kind == "q-from-d") {
    const double r0 = ctx.r0();
    t = Q_from_d(ctx.function(o.d, "--d", Domain(o.a ? *o.a : r0, kInf)), r0, ctx.grid());
  } else {
    throw UsageError("unknown function kind '" + kind + "'");
  }
  return {t.fn, t.log, t.warnings};
}

void write_table(std::ostream& out, const Function1D& fn, const std::vector<double>& xs,
                 const std::string& label) {
  out << "# x," << label << "\n";
  for (double x : xs) out << num(x) << "," << num(fn(x)) << "\n";
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::holds: return kExitOk;
    case Verdict::violated: return kExitViolated;
    case Verdict::inconclusive: return kExitNumeric;
  }
  return kExitNumeric;
}

void write_report(std::ostream& out, const VerifyReport& report, const std::string& format) {
  if (format == "line") out << to_line(report) << "\n";
  else out << to_key_value(report);
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> xs;
  for (int i = 0; i < count; ++i) xs.push_back(lo + (hi - lo) * i / (count - 1));
  return xs;
}

PairSampling sampling(const Options& o, const Domain& dom) {
  PairSampling s;
  s.count = o.pairs;
  s.seed = o.seed;
  s.lo = o.lo ? *o.lo : dom.a;
  if (o.hi) s.hi = *o.hi;
  else if (!dom.unbounded()) s.hi = dom.b - 1e-9 * (dom.b - dom.a);
  else throw UsageError("--hi is required for pair sampling on an unbounded domain");
  return s;
}

VerifyReport run_verify(const Options& o, const Context& ctx, std::ostream& err) {
  const std::string& p = o.property;
  if (p == "dQ" || p == "Qd") {
    const double r0 = ctx.r0();
    const Domain dom(r0, kInf);
    Function1D Q, d;
    if (p == "dQ") {
      Q = ctx.function(o.Q, "--Q", dom);
      if (!o.d.empty()) {
        d = ctx.function(o.d, "--d", dom);
      } else {
        const auto t = d_from_Q(Q, r0, ctx.cfg(), ctx.grid());
        for (const auto& w : t.warnings) err << "warning: " << w << "\n";
        d = t.fn;
      }
    } else {
      d = ctx.function(o.d, "--d", dom);
      if (!o.Q.empty()) {
        Q = ctx.function(o.Q, "--Q", dom);
      } else {
        const auto t = Q_from_d(d, r0, ctx.grid());
        for (const auto& w : t.warnings) err << "warning: " << w << "\n";
        Q = t.fn;
      }
    }
    return check_corollary_bounds(Q, d, r0,
                                  p == "dQ" ? CorollaryDirection::dQ : CorollaryDirection::Qd,
                                  sampling(o, dom), ctx.cfg());
  }

  const Domain dom = ctx.domain();
  const Function1D f = ctx.f();
  if (p == "AnmA")
    return check_pointwise_mean_bound(f, ctx.weight(dom), ctx.measure(dom), sampling(o, dom),
                                      ctx.cfg(), ctx.grid());

  const Measure1D m = ctx.measure(dom);
  for (const auto& problem : ctx.measure_problems(m)) err << "warning: measure: " << problem << "\n";
  if (p == "F1") return check_majorant_inequality(f, m, sampling(o, dom), ctx.cfg(), ctx.grid());
  if (p == "partials") {
    if (!o.r || !o.R) throw UsageError("--r and --R are required");
    return finite_difference_check(f, m, *o.r, *o.R, ctx.cfg());
  }
  if (p == "sup-identity") {
    if (!o.R) throw UsageError("--R is required");
    std::vector<double> rs;
    for (int k = 0; k < o.points; ++k) rs.push_back(dom.a + (*o.R - dom.a) * k / o.points);
    return check_sup_identity(f, m, *o.R, rs, ctx.cfg(), ctx.grid());
  }
  if (p == "monotonicity") {
    const double lo = o.lo ? *o.lo : dom.a;
    double hi = 0.0;
    if (o.hi) hi = *o.hi;
    else if (!dom.unbounded()) hi = dom.b - 1e-9 * (dom.b - dom.a);
    else throw UsageError("--hi is required on an unbounded domain");
    const auto xs = linspace(lo, hi, std::max(o.points, 2));
    return check_mean_monotonicity(f, m, xs, xs, ctx.cfg(), ctx.grid());
  }
  throw UsageError("unknown property '" + p + "'");
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--a", o.a, "left endpoint a (included)");
  sub->add_option("--b", o.b, "right endpoint b (excluded), number or inf");
  sub->add_option("--tail", o.tail, "tail of f at b: vanishing | unknown | bounded:<v>");
  sub->add_option("--tol", o.tol, "relative quadrature tolerance");
  sub->add_option("--grid", o.grid, "envelope grid nodes");
  sub->add_option("--output", o.output, "write primary output to this file");
}

void add_functions(CLI::App* sub, Options& o) {
  sub->add_option("--f", o.f, "f: expression in x or @file.csv");
  sub->add_option("--m", o.m, "measure m (default ln(x))");
  sub->add_option("--n", o.n, "weight n (default x)");
  sub->add_option("--Q", o.Q, "growth function Q");
  sub->add_option("--d", o.d, "density function d");
  sub->add_option("--r0", o.r0, "left endpoint for the d/Q constructions");
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Integral means, maximization envelopes and their verification"};
  app.name("intmean");
  app.require_subcommand(1, 1);

  auto* mean = app.add_subcommand("mean", "integral mean A_m(r,R;f) and its partials");
  add_common(mean, o);
  add_functions(mean, o);
  mean->add_option("--r", o.r, "left end of the averaging interval")->required();
  mean->add_option("--R", o.R, "right end of the averaging interval")->required();
  mean->add_flag("--partials", o.partials, "also print dA/dr and dA/dR");

  auto* envelope = app.add_subcommand("envelope", "right or left maximization table");
  add_common(envelope, o);
  add_functions(envelope, o);
  envelope->add_option("--side", o.side, "right | left")->check(CLI::IsMember({"right", "left"}));
  envelope->add_option("--table", o.table, "range lo:hi:spacing:count")->required();

  auto* transform = app.add_subcommand("transform", "construct D, h, d or Q");
  add_common(transform, o);
  add_functions(transform, o);
  transform->add_option("--kind", o.kind, "d-from-q | q-from-d | majorant | double-envelope")
      ->required()
      ->check(CLI::IsMember({"d-from-q", "q-from-d", "majorant", "double-envelope"}));
  transform->add_option("--table", o.table, "range lo:hi:spacing:count")->required();

  auto* verify = app.add_subcommand("verify", "numerically verify one property");
  add_common(verify, o);
  add_functions(verify, o);
  verify->add_option("--property", o.property, "property to verify")
      ->required()
      ->check(CLI::IsMember({"monotonicity", "sup-identity", "F1", "AnmA", "dQ", "Qd", "partials"}));
  verify->add_option("--pairs", o.pairs, "number of random (r,R) pairs");
  verify->add_option("--seed", o.seed, "sampling seed");
  verify->add_option("--lo", o.lo, "lower end of the sampling range");
  verify->add_option("--hi", o.hi, "upper end of the sampling range");
  verify->add_option("--r", o.r, "r for the partials check");
  verify->add_option("--R", o.R, "R for the partials or sup-identity check");
  verify->add_option("--points", o.points, "grid points for monotonicity / sup-identity");
  verify->add_option("--format", o.format, "kv | line")->check(CLI::IsMember({"kv", "line"}));

  auto* decay = app.add_subcommand("decay", "check that a function decays along a schedule");
  add_common(decay, o);
  add_functions(decay, o);
  decay->add_option("--g", o.g, "function to check (expression or @file.csv)");
  decay->add_option("--of", o.of, "constructed function to check instead of --g");
  decay->add_option("--schedule", o.schedule, "start:ratio:steps:threshold")->required();
  decay->add_option("--format", o.format, "kv | line")->check(CLI::IsMember({"kv", "line"}));

  auto* table = app.add_subcommand("table", "sample a function on a range");
  add_common(table, o);
  add_functions(table, o);
  table->add_option("--of", o.of,
                    "f | right-envelope | left-envelope | majorant | double-envelope | "
                    "d-from-q | q-from-d");
  table->add_option("--range", o.table, "range lo:hi:spacing:count")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::ostringstream primary;
  int code = kExitOk;
  try {
    const Context ctx(o);
    if (mean->parsed()) {
      const Domain dom = ctx.domain();
      const Function1D f = ctx.f();
      const Measure1D m = ctx.measure(dom);
      const MeanValue v = integral_mean(f, m, *o.r, *o.R, ctx.cfg());
      primary << "r,R,mean,est_error" << (o.partials ? ",d_dr,d_dR" : "") << "\n";
      primary << num(*o.r) << "," << num(*o.R) << "," << num(v.value) << "," << num(v.est_error);
      if (o.partials)
        primary << "," << num(mean_partial_r(f, m, *o.r, *o.R, ctx.cfg())) << ","
                << num(mean_partial_R(f, m, *o.r, *o.R, ctx.cfg()));
      primary << "\n";
    } else if (envelope->parsed()) {
      const Built b = build(o.side == "right" ? "right-envelope" : "left-envelope", o, ctx);
      write_table(primary, b.fn, parse_range(o.table), o.side + "_envelope");
    } else if (transform->parsed()) {
      const Built b = build(o.kind, o, ctx);
      for (const auto& line : b.log) primary << "# " << line << "\n";
      for (const auto& w : b.warnings) {
        primary << "# warning: " << w << "\n";
        err << "warning: " << w << "\n";
      }
      write_table(primary, b.fn, parse_range(o.table), o.kind);
    } else if (verify->parsed()) {
      const VerifyReport report = run_verify(o, ctx, err);
      write_report(primary, report, o.format);
      code = verdict_exit(report.verdict);
    } else if (decay->parsed()) {
      const Built b = build(o.g.empty() ? o.of : "g", o, ctx);
      for (const auto& w : b.warnings) err << "warning: " << w << "\n";
      const VerifyReport report = estimate_decay(b.fn, DecaySchedule::parse(o.schedule));
      write_report(primary, report, o.format);
      code = verdict_exit(report.verdict);
    } else if (table->parsed()) {
      const Built b = build(o.of, o, ctx);
      for (const auto& w : b.warnings) err << "warning: " << w << "\n";
      write_table(primary, b.fn, parse_range(o.table), o.of);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::parse:
      case ErrorKind::invalid_argument:
      case ErrorKind::io:
      case ErrorKind::domain_violation:
        return kExitUsage;
      default:
        return kExitNumeric;
    }
  }

  if (o.output.empty()) {
    out << primary.str();
  } else {
    std::ofstream file(o.output, std::ios::binary);
    if (!file) {
      err << "error: cannot write '" << o.output << "'\n";
      return kExitUsage;
    }
    file << primary.str();
  }
  return code;
}

}  // namespace intmean::cli
