#include <doctest.h>

#include <cmath>
#include <numbers>

#include "intmean/transforms.hpp"
#include "intmean/verify.hpp"
#include "oracles.hpp"

using namespace intmean;

namespace {

const double e = std::numbers::e;

bool has_warning(const TransformResult& t, const std::string& needle) {
  for (const auto& w : t.warnings)
    if (w.find(needle) != std::string::npos) return true;
  return false;
}

WeightN identity_weight(double a) {
  return {Function1D([](double x) { return x; }, Domain(a, kInf))};
}

}  // namespace

TEST_CASE("decreasing_majorant_mean: exp(-x), m = x") {
  const Function1D f([](double x) { return std::exp(-x); }, Domain(0.0, kInf), Tail::vanishing());
  const TransformResult D =
      decreasing_majorant_mean(f, Measure1D::identity(Domain(0.0, kInf)));
  for (double R : {0.5, 1.0, 3.0, 10.0, 40.0}) {
    const double expected = (1.0 - std::exp(-R)) / R;
    CHECK(D(R) == doctest::Approx(expected).epsilon(1e-8));
  }
  CHECK(D(0.0) == doctest::Approx(1.0));
  CHECK(D.fn.hint() == Monotonicity::decreasing);
  CHECK_FALSE(D.log.empty());
}

TEST_CASE("decreasing_majorant_mean: zero function") {
  const Function1D zero([](double) { return 0.0; }, Domain(1.0, kInf), Tail::vanishing());
  const TransformResult D = decreasing_majorant_mean(zero, Measure1D::log(Domain(1.0, kInf)));
  for (double R : {1.0, 2.0, 100.0, 1e6}) CHECK(D(R) == 0.0);
}

TEST_CASE("decreasing_majorant_mean: 1/x, m = ln") {
  const Function1D f([](double x) { return 1.0 / x; }, Domain(1.0, kInf), Tail::vanishing());
  const TransformResult D = decreasing_majorant_mean(f, Measure1D::log(Domain(1.0, kInf)));
  CHECK(D.ok());
  for (double R : {1.5, 10.0, 100.0, 1e3, 1e4, 1e7}) {
    const double expected = (1.0 - 1.0 / R) / std::log(R);
    CHECK(D(R) == doctest::Approx(expected).epsilon(1e-6));
  }
  double prev = D(1.01);
  for (double R = 1.1; R < 1e8; R *= 1.7) {
    const double cur = D(R);
    CHECK(cur <= prev + 1e-9 * std::abs(prev));
    prev = cur;
  }
}

TEST_CASE("decreasing_majorant_mean: non-monotone f uses the envelope") {
  // 2 + sin(3x) is not decreasing; D must average its right envelope.
  const Function1D f([](double x) { return 2.0 + std::sin(3.0 * x); }, Domain(0.0, 10.0));
  const TransformResult D = decreasing_majorant_mean(f, Measure1D::identity(Domain(0.0, 10.0)));
  // The right envelope is 3 up to the last peak of sin(3x) before 10.
  const double last_peak = (std::floor((3.0 * 10.0 - std::numbers::pi / 2) / (2 * std::numbers::pi)) *
                                2 * std::numbers::pi +
                            std::numbers::pi / 2) /
                           3.0;
  CHECK(D(last_peak * 0.9) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(has_warning(D, "vanish"));
}

TEST_CASE("weighted_double_envelope examples") {
  SUBCASE("constant") {
    const Function1D c([](double) { return 0.25; }, Domain(1.0, kInf), Tail::bounded_by(0.25));
    const TransformResult h = weighted_double_envelope(c, identity_weight(1.0));
    for (double R : {1.0, 3.0, 1e3, 1e6}) CHECK(h(R) == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("1/ln on [e, inf)") {
    const Function1D f([](double x) { return 1.0 / std::log(x); }, Domain(e, kInf),
                       Tail::vanishing());
    const TransformResult h = weighted_double_envelope(f, identity_weight(e));
    for (double R : {e, 5.0, 100.0, 1e4, 1e6, std::exp(10.0)})
      CHECK(h(R) == doctest::Approx(1.0 / std::log(R)).epsilon(1e-6));
  }
  SUBCASE("exp(-x) on [1, inf)") {
    const Function1D f([](double x) { return std::exp(-x); }, Domain(1.0, kInf), Tail::vanishing());
    const TransformResult h = weighted_double_envelope(f, identity_weight(1.0));
    for (double R : {1.0, 2.0, 10.0, 1e3}) CHECK(h(R) == doctest::Approx(std::exp(-1.0) / R).epsilon(1e-8));
  }
}

TEST_CASE("weighted_double_envelope: brute-force nested sups") {
  const oracle::DampedOscillation osc{{1.0}, {0.3}, {2.0}, {0.4}};
  const Function1D f([osc](double x) { return osc(x); }, Domain(1.0, kInf), Tail::vanishing());
  const TransformResult h = weighted_double_envelope(f, identity_weight(1.0));
  // Brute force on a fine grid of [1, 30]: right max then weighted prefix max.
  const int N = 200001;
  const double lo = 1.0, hi = 30.0;
  std::vector<double> xs(N), right(N);
  for (int i = 0; i < N; ++i) xs[i] = lo + (hi - lo) * i / (N - 1);
  double run = oracle::grid_max(osc, hi, 60.0, 20001);
  for (int i = N - 1; i >= 0; --i) right[i] = run = std::max(run, osc(xs[i]));
  double prefix = -kInf;
  for (int i = 0; i < N; i += 1) {
    prefix = std::max(prefix, xs[i] * right[i]);
    if (i % 20000 == 0) CHECK(h(xs[i]) == doctest::Approx(prefix / xs[i]).epsilon(1e-6));
  }
}

TEST_CASE("weight checks") {
  CHECK(identity_weight(1.0).check().empty());
  const WeightN bad{Function1D([](double x) { return 1.0 / x; }, Domain(1.0, kInf))};
  CHECK_FALSE(bad.check().empty());
}

TEST_CASE("d_from_Q examples") {
  SUBCASE("sqrt") {
    const Function1D Q([](double x) { return std::sqrt(x); }, Domain(1.0, kInf));
    const TransformResult d = d_from_Q(Q, 1.0);
    CHECK(d.ok());
    CHECK(std::abs(d(e * e) - (1.0 - std::exp(-1.0))) <= 1e-6);
    for (double R : {2.0, 10.0, 1e3, 1e6}) {
      const double expected = 2.0 * (1.0 - 1.0 / std::sqrt(R)) / std::log(R);
      CHECK(d(R) == doctest::Approx(expected).epsilon(1e-6));
    }
    CHECK(d(1.0) == doctest::Approx(1.0));
  }
  SUBCASE("constant") {
    const Function1D Q([](double) { return 3.0; }, Domain(1.0, kInf));
    const TransformResult d = d_from_Q(Q, 1.0);
    for (double R : {2.0, 50.0, 1e5})
      CHECK(d(R) == doctest::Approx(3.0 * (1.0 - 1.0 / R) / std::log(R)).epsilon(1e-6));
  }
  SUBCASE("linear Q fails the sublinearity hypothesis") {
    const Function1D Q([](double x) { return x; }, Domain(1.0, kInf));
    const TransformResult d = d_from_Q(Q, 1.0);
    CHECK_FALSE(d.ok());
    CHECK(d(10.0) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("invalid r0") {
    const Function1D Q([](double x) { return std::sqrt(x); }, Domain(0.0, kInf));
    CHECK_THROWS_AS(d_from_Q(Q, 0.0), Error);
  }
}

TEST_CASE("Q_from_d examples") {
  SUBCASE("1/ln") {
    const Function1D d([](double r) { return 1.0 / std::log(r); }, Domain(e, kInf));
    const TransformResult Q = Q_from_d(d, e);
    CHECK(Q.ok());
    for (double R : {e, 10.0, 1e3, 1e6, 1e9})
      CHECK(Q(R) == doctest::Approx(R / std::log(R)).epsilon(1e-6));
    CHECK(Q(1e6) / 1e6 == doctest::Approx(0.0723824).epsilon(1e-6));
  }
  SUBCASE("1/r") {
    const Function1D d([](double r) { return 1.0 / r; }, Domain(1.0, kInf));
    const TransformResult Q = Q_from_d(d, 1.0);
    for (double R : {1.0, 5.0, 1e4}) CHECK(Q(R) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("constant d fails the vanishing hypothesis") {
    const Function1D d([](double) { return 0.5; }, Domain(1.0, kInf));
    const TransformResult Q = Q_from_d(d, 1.0);
    CHECK_FALSE(Q.ok());
    for (double R : {1.0, 7.0, 1e5}) CHECK(Q(R) == doctest::Approx(0.5 * R).epsilon(1e-12));
  }
}

TEST_CASE("duality sanity: sqrt -> d -> Q is sublinear") {
  const Function1D Q([](double x) { return std::sqrt(x); }, Domain(1.0, kInf));
  const TransformResult d = d_from_Q(Q, 1.0);
  const TransformResult back = Q_from_d(d.fn, 1.0);
  const Function1D ratio([&back](double x) { return back(x) / x; }, Domain(1.0, kInf));
  const VerifyReport decay = estimate_decay(ratio, {10.0, 10.0, 6, 0.2});
  INFO(to_key_value(decay));
  CHECK(decay.holds());
}

TEST_CASE("appears_to_vanish") {
  const Function1D inv([](double x) { return 1.0 / x; }, Domain(1.0, kInf));
  CHECK(appears_to_vanish(inv, 1.0));
  const Function1D one([](double) { return 1.0; }, Domain(1.0, kInf));
  CHECK_FALSE(appears_to_vanish(one, 1.0));
  const Function1D slow([](double x) { return 1.0 / std::log(x); }, Domain(2.0, kInf));
  CHECK(appears_to_vanish(slow, 2.0));
}
