#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "intmean/cli.hpp"

namespace intmean::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  try {
    std::size_t pos = 0;
    out = std::stod(t, &pos);
    return pos == t.size();
  } catch (const std::logic_error&) {
    return false;
  }
}

}  // namespace

TabulatedFunction::TabulatedFunction(std::vector<double> xs, std::vector<double> values)
    : xs_(std::move(xs)), values_(std::move(values)) {
  if (xs_.size() != values_.size())
    throw Error(ErrorKind::invalid_argument, "table columns differ in length");
  if (xs_.size() < 2) throw Error(ErrorKind::invalid_argument, "table needs at least 2 rows");
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!std::isfinite(xs_[i]) || !std::isfinite(values_[i]))
      throw Error(ErrorKind::invalid_argument, "table contains non-finite entries");
    if (i > 0 && !(xs_[i] > xs_[i - 1]))
      throw Error(ErrorKind::invalid_argument, "table x values must be strictly increasing");
  }
}

double TabulatedFunction::operator()(double x) const {
  if (!(x >= xs_.front() && x < xs_.back())) {
    std::ostringstream os;
    os.precision(17);
    os << "x = " << x << " outside table range [" << xs_.front() << ", " << xs_.back() << ")";
    throw Error(ErrorKind::domain_violation, os.str());
  }
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

Function1D TabulatedFunction::as_function(Tail tail) const {
  auto table = std::make_shared<const TabulatedFunction>(*this);
  return Function1D([table](double x) { return (*table)(x); }, domain(), tail);
}

TabulatedFunction parse_csv_function(const std::string& text, const std::string& origin) {
  std::vector<double> xs, values;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    double x = 0.0, v = 0.0;
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos ||
        !parse_double(t.substr(0, comma), x) || !parse_double(t.substr(comma + 1), v)) {
      throw Error(ErrorKind::invalid_argument,
                  origin + ":" + std::to_string(line_no) + ": malformed row '" + t +
                      "' (expected x,value)");
    }
    if (!std::isfinite(x) || !std::isfinite(v))
      throw Error(ErrorKind::invalid_argument,
                  origin + ":" + std::to_string(line_no) + ": non-finite entry");
    if (!xs.empty() && !(x > xs.back()))
      throw Error(ErrorKind::invalid_argument,
                  origin + ":" + std::to_string(line_no) + ": x not strictly increasing");
    xs.push_back(x);
    values.push_back(v);
  }
  if (xs.size() < 2)
    throw Error(ErrorKind::invalid_argument, origin + ": need at least 2 data rows");
  return TabulatedFunction(std::move(xs), std::move(values));
}

TabulatedFunction load_csv_function(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_function(buf.str(), path);
}

std::vector<double> parse_range(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  double lo = 0.0, hi = 0.0, count_d = 0.0;
  if (parts.size() != 4 || !parse_double(parts[0], lo) || !parse_double(parts[1], hi) ||
      !parse_double(parts[3], count_d))
    throw Error(ErrorKind::invalid_argument,
                "range must be lo:hi:spacing:count, got '" + spec + "'");
  const std::string spacing = trim(parts[2]);
  const int count = static_cast<int>(count_d);
  if (count_d != count || count < 2)
    throw Error(ErrorKind::invalid_argument, "range count must be an integer >= 2");
  if (!(hi > lo)) throw Error(ErrorKind::invalid_argument, "range needs lo < hi");
  if (spacing == "uniform") return make_nodes(lo, hi, count, Spacing::uniform);
  if (spacing == "geometric") {
    if (!(lo > 0.0)) throw Error(ErrorKind::invalid_argument, "geometric range needs lo > 0");
    return make_nodes(lo, hi, count, Spacing::geometric);
  }
  throw Error(ErrorKind::invalid_argument, "range spacing must be uniform or geometric");
}

}  // namespace intmean::cli
