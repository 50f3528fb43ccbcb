#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "intmean/func1d.hpp"

namespace intmean::cli {

/// Rows of (x, value) with linear interpolation on [x_first, x_last).
class TabulatedFunction {
 public:
  TabulatedFunction(std::vector<double> xs, std::vector<double> values);

  double operator()(double x) const;
  Domain domain() const { return {xs_.front(), xs_.back()}; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& values() const { return values_; }

  Function1D as_function(Tail tail = Tail::unknown()) const;

 private:
  std::vector<double> xs_;
  std::vector<double> values_;
};

/// Parses "x,value" lines; '#' starts a comment line; LF or CRLF.
TabulatedFunction parse_csv_function(const std::string& text, const std::string& origin = "<csv>");
TabulatedFunction load_csv_function(const std::string& path);

/// Sample positions from "lo:hi:spacing:count" (spacing uniform | geometric).
std::vector<double> parse_range(const std::string& spec);

/// Runs one subcommand; args exclude the program name.
/// Exit codes: 0 success/holds, 1 violated, 2 usage error, 3 numeric failure
/// or inconclusive.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace intmean::cli
