#pragma once

// Expressions with a direct C++ counterpart, shared by the parser tests and
// the acceptance run.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

struct ExprCase {
  std::string text;
  std::function<double(double)> direct;
  bool differentiable;
};

// Evaluated on x in [0.5, 3].
inline const std::vector<ExprCase>& expr_corpus() {
  static const std::vector<ExprCase> cases = {
      {"x", [](double x) { return x; }, true},
      {"1/x", [](double x) { return 1.0 / x; }, true},
      {"exp(-x)", [](double x) { return std::exp(-x); }, true},
      {"ln(x)", [](double x) { return std::log(x); }, true},
      {"sqrt(x)", [](double x) { return std::sqrt(x); }, true},
      {"x^2 - 3*x + 2", [](double x) { return x * x - 3.0 * x + 2.0; }, true},
      {"exp(-x) + x^2*ln(x)", [](double x) { return std::exp(-x) + x * x * std::log(x); }, true},
      {"sin(x)*cos(2*x)", [](double x) { return std::sin(x) * std::cos(2.0 * x); }, true},
      {"1/ln(x + 1)", [](double x) { return 1.0 / std::log(x + 1.0); }, true},
      {"x^0.5 + x^-1.5", [](double x) { return std::pow(x, 0.5) + std::pow(x, -1.5); }, true},
      {"2^x", [](double x) { return std::pow(2.0, x); }, true},
      {"x^x", [](double x) { return std::pow(x, x); }, true},
      {"(1 - 1/x)/ln(x + 2)", [](double x) { return (1.0 - 1.0 / x) / std::log(x + 2.0); }, true},
      {"exp(-x/3)*sin(4*x + 1)", [](double x) { return std::exp(-x / 3.0) * std::sin(4.0 * x + 1.0); }, true},
      {"-x^2", [](double x) { return -(x * x); }, true},
      {"pi*x - e", [](double x) { return std::numbers::pi * x - std::numbers::e; }, true},
      {"2^3^x", [](double x) { return std::pow(2.0, std::pow(3.0, x)); }, true},
      {"abs(x - 1.5)", [](double x) { return std::abs(x - 1.5); }, false},
      {"min(x, 2) + max(1, x^2)", [](double x) { return std::min(x, 2.0) + std::max(1.0, x * x); }, false},
      {"sqrt(1 + x^2)/(x*(x + 1))", [](double x) { return std::sqrt(1.0 + x * x) / (x * (x + 1.0)); }, true},
  };
  return cases;
}
