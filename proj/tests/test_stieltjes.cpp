#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "intmean/stieltjes.hpp"
#include "oracles.hpp"

using namespace intmean;

namespace {

const double e = std::numbers::e;

Measure1D square_measure() {
  return Measure1D([](double x) { return x * x; }, [](double x) { return 2.0 * x; },
                   Domain(0.0, kInf), true);
}

Function1D fn(std::function<double(double)> f, Domain d = Domain(0.0, kInf)) {
  return Function1D(std::move(f), d);
}

}  // namespace

TEST_CASE("measure construction and checks") {
  const Measure1D ln = Measure1D::log(Domain(1.0, kInf));
  CHECK(ln(e) == doctest::Approx(1.0));
  CHECK(ln.derivative(2.0) == doctest::Approx(0.5));
  CHECK(ln.diverges_at_b());
  CHECK_THROWS_AS(Measure1D::log(Domain(0.0, kInf)), Error);

  const Measure1D bare([](double x) { return x; }, std::nullopt, Domain(0.0, 1.0));
  CHECK_FALSE(bare.has_derivative());
  try {
    bare.derivative(0.5);
    FAIL("expected missing derivative");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::missing_derivative);
  }

  CHECK(check_measure(ln).empty());
  const Measure1D falling([](double x) { return -x; }, std::nullopt, Domain(0.0, 1.0));
  CHECK_FALSE(check_measure(falling).empty());
}

TEST_CASE("quadrature config validation") {
  QuadratureConfig cfg;
  cfg.rtol = 0.0;
  cfg.atol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.base_panels = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("stieltjes_integral examples") {
  const Measure1D ln = Measure1D::log(Domain(1.0, kInf));
  const auto one = stieltjes_integral([](double) { return 1.0; }, ln, 1.0, e);
  CHECK(std::abs(one.value - 1.0) <= 1e-9);

  const auto two_thirds = stieltjes_integral([](double x) { return x; }, square_measure(), 0.0, 1.0);
  CHECK(std::abs(two_thirds.value - 2.0 / 3.0) <= 1e-9 * 2.0 / 3.0);

  const auto three_quarters = stieltjes_integral([](double x) { return 1.0 / x; }, ln, 1.0, 4.0);
  CHECK(std::abs(three_quarters.value - 0.75) <= 1e-9 * 0.75);
  CHECK(three_quarters.panels_used > 0);
}

TEST_CASE("integral_mean examples") {
  const Measure1D id = Measure1D::identity(Domain(0.0, kInf));
  const Measure1D ln = Measure1D::log(Domain(1.0, kInf));
  for (const auto& [r, R] : {std::pair{0.0, 1.0}, {2.0, 7.5}, {0.1, 0.2}}) {
    CHECK(integral_mean(fn([](double) { return 3.25; }), id, r, R).value ==
          doctest::Approx(3.25).epsilon(1e-12));
  }
  CHECK(integral_mean(fn([](double) { return -2.0; }, Domain(1.0, kInf)), ln, 1.5, 90.0).value ==
        doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(integral_mean(fn([](double x) { return x; }), id, 0.0, 1.0).value ==
        doctest::Approx(0.5).epsilon(1e-12));
  const double v =
      integral_mean(fn([](double x) { return 1.0 / x; }, Domain(1.0, kInf)), ln, 1.0, e * e).value;
  CHECK(std::abs(v - (1.0 - std::exp(-2.0)) / 2.0) <= 1e-9);
  CHECK(v == doctest::Approx(0.4323324).epsilon(1e-7));
}

TEST_CASE("integral_mean errors") {
  const Measure1D id = Measure1D::identity(Domain(0.0, 10.0));
  const Function1D f = fn([](double x) { return x; }, Domain(0.0, 10.0));
  CHECK_THROWS_AS(integral_mean(f, id, 2.0, 2.0), Error);
  CHECK_THROWS_AS(integral_mean(f, id, 3.0, 2.0), Error);
  CHECK_THROWS_AS(integral_mean(f, id, -1.0, 2.0), Error);
  const Measure1D flat([](double) { return 1.0; }, [](double) { return 0.0; }, Domain(0.0, 10.0));
  CHECK_THROWS_AS(integral_mean(f, flat, 1.0, 2.0), Error);
  const Function1D pole = fn([](double x) { return 1.0 / (x - 1.0); }, Domain(0.0, 10.0));
  CHECK_THROWS_AS(integral_mean(pole, id, 0.5, 2.0), Error);
}

TEST_CASE("partials examples") {
  const Measure1D id = Measure1D::identity(Domain(0.0, kInf));
  const Function1D c = fn([](double) { return 4.0; });
  CHECK(mean_partial_r(c, id, 1.0, 3.0) == doctest::Approx(0.0));
  CHECK(mean_partial_R(c, id, 1.0, 3.0) == doctest::Approx(0.0));

  const Function1D neg = fn([](double x) { return -x; });
  for (const auto& [r, R] : {std::pair{1.0, 3.0}, {0.5, 0.6}, {2.0, 40.0}}) {
    CHECK(mean_partial_r(neg, id, r, R) == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(mean_partial_R(neg, id, r, R) == doctest::Approx(-0.5).epsilon(1e-9));
  }
  const Function1D pos = fn([](double x) { return x; });
  CHECK(mean_partial_R(pos, id, 1.0, 3.0) == doctest::Approx(0.5).epsilon(1e-9));

  const Measure1D ln = Measure1D::log(Domain(0.5, kInf));
  const Function1D inv = fn([](double x) { return 1.0 / x; }, Domain(0.5, kInf));
  CHECK(mean_partial_r(inv, ln, 1.0, e) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("partials need r > a and a derivative") {
  const Measure1D id = Measure1D::identity(Domain(0.0, kInf));
  CHECK_THROWS_AS(mean_partial_r(fn([](double x) { return x; }), id, 0.0, 1.0), Error);
  const Measure1D bare([](double x) { return x; }, std::nullopt, Domain(0.0, kInf));
  CHECK_THROWS_AS(mean_partial_r(fn([](double x) { return x; }), bare, 0.5, 1.0), Error);
}

TEST_CASE("midpoint path for measures without a derivative") {
  const Measure1D bare([](double x) { return x * x; }, std::nullopt, Domain(0.0, kInf));
  const auto v = stieltjes_integral([](double x) { return x; }, bare, 0.0, 1.0);
  CHECK(v.value == doctest::Approx(2.0 / 3.0).epsilon(1e-8));

  // A step in m is a point mass: the integral picks up g at the jump.
  const Measure1D step([](double x) { return x < 0.5 ? 0.0 : 1.0; }, std::nullopt,
                       Domain(0.0, 1.0));
  // First-order convergence only, so the default tolerance is out of reach.
  const Integrand cosine = [](double x) { return std::cos(x); };
  QuadratureConfig loose;
  loose.rtol = 1e-6;
  const auto jump = stieltjes_integral(cosine, step, 0.0, 0.9, loose);
  CHECK(jump.value == doctest::Approx(std::cos(0.5)).epsilon(1e-5));
  try {
    stieltjes_integral(cosine, step, 0.0, 0.9);
    FAIL("expected a quadrature error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::quadrature);
  }
}

TEST_CASE("oracle equivalence on the smooth suite") {
  const Measure1D ln = Measure1D::log(Domain(1.0, kInf));
  const Integrand one = [](double) { return 1.0; };
  const Integrand id = [](double x) { return x; };
  const Integrand inv = [](double x) { return 1.0 / x; };
  const auto check = [](const Integrand& g, const Measure1D& m, double r, double R) {
    const double adaptive = stieltjes_integral(g, m, r, R).value;
    const double brute = midpoint_stieltjes_sum(g, m, r, R);
    CHECK(std::abs(adaptive - brute) <= 1e-7 * std::abs(adaptive));
  };
  check(one, ln, 1.0, e);
  check(id, square_measure(), 0.0, 1.0);
  check(inv, ln, 1.0, 4.0);
}

TEST_CASE("property: mean value bounds and additivity") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Measure1D ln = Measure1D::log(Domain(0.5, kInf));
  const QuadratureConfig cfg;
  for (int trial = 0; trial < 40; ++trial) {
    const double w = 0.5 + 4.0 * U(gen), phase = 6.0 * U(gen);
    const oracle::Fn g = [=](double x) { return std::sin(w * x + phase) + 0.3 * std::log(x); };
    const Function1D f(g, Domain(0.5, kInf));
    const double r = 0.5 + 10.0 * U(gen);
    const double R = r + 0.1 + 20.0 * U(gen);
    const double s = r + (R - r) * U(gen);

    const double A = integral_mean(f, ln, r, R, cfg).value;
    const double lo = -oracle::grid_max([&](double x) { return -g(x); }, r, R, 20001);
    const double hi = oracle::grid_max(g, r, R, 20001);
    const double tol = cfg.atol + cfg.rtol * std::max(std::abs(lo), std::abs(hi));
    CHECK(A >= lo - tol - 1e-6);
    CHECK(A <= hi + tol + 1e-6);

    const double whole = stieltjes_integral(f, ln, r, R, cfg).value;
    const double parts = stieltjes_integral(f, ln, r, s, cfg).value +
                         stieltjes_integral(f, ln, s, R, cfg).value;
    CHECK(std::abs(whole - parts) <= 2.0 * (cfg.atol + cfg.rtol * std::abs(whole)));

    const double reference =
        oracle::gauss_legendre([&](double x) { return g(x) / x; }, r, R);
    CHECK(std::abs(whole - reference) <= cfg.atol + cfg.rtol * std::abs(reference));
  }
}

TEST_CASE("property: partials against central differences") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Measure1D m = square_measure();
  const Function1D f = fn([](double x) { return std::exp(-x) * std::cos(x); });
  QuadratureConfig tight;
  tight.rtol = 1e-13;
  tight.atol = 1e-15;
  tight.max_halvings = 30;
  for (int i = 0; i < 20; ++i) {
    const double r = 0.2 + 3.0 * U(gen);
    const double R = r + 0.5 + 3.0 * U(gen);
    const double h = 1e-5 * (R - r);
    const auto A = [&](double rr, double RR) { return integral_mean(f, m, rr, RR, tight).value; };
    const double fd_r = oracle::central_difference([&](double x) { return A(x, R); }, r, h);
    const double fd_R = oracle::central_difference([&](double x) { return A(r, x); }, R, h);
    CHECK(mean_partial_r(f, m, r, R, tight) == doctest::Approx(fd_r).epsilon(1e-6));
    CHECK(mean_partial_R(f, m, r, R, tight) == doctest::Approx(fd_R).epsilon(1e-6));
  }
}

TEST_CASE("geometric panels over many decades") {
  const Measure1D ln = Measure1D::log(Domain(1.0, kInf));
  const auto v = stieltjes_integral([](double x) { return 1.0 / x; }, ln, 1.0, 1e8);
  CHECK(v.value == doctest::Approx(1.0 - 1e-8).epsilon(1e-9));
  const double mean = integral_mean(fn([](double x) { return 1.0 / std::log(x); }, Domain(2.0, kInf)),
                                    Measure1D::log(Domain(2.0, kInf)), 3.0, 1e6)
                          .value;
  const double reference = std::log(std::log(1e6) / std::log(3.0)) / std::log(1e6 / 3.0);
  CHECK(mean == doctest::Approx(reference).epsilon(1e-9));
}

TEST_CASE("depth limit: kinks and jumps resolve, poles do not") {
  const Measure1D id = Measure1D::identity(Domain(0.0, kInf));
  const double c = 1.0 / 3.0;
  const auto kink = stieltjes_integral([c](double x) { return std::abs(x - c); }, id, 0.0, 1.0);
  CHECK(kink.value == doctest::Approx((c * c + (1 - c) * (1 - c)) / 2.0).epsilon(1e-9));
  CHECK(kink.est_error <= 1e-9);

  const auto jump = stieltjes_integral([c](double x) { return x < c ? 0.0 : 1.0; }, id, 0.0, 1.0);
  CHECK(jump.value == doctest::Approx(2.0 / 3.0).epsilon(1e-8));

  try {
    stieltjes_integral([c](double x) { return 1.0 / ((x - c) * (x - c)); }, id, 0.0, 1.0);
    FAIL("expected a quadrature error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::quadrature);
  }
}
