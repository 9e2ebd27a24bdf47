#include "vdlab/growth_table.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "vdlab/errors.hpp"
#include "vdlab/expression.hpp"

namespace vdlab {

GrowthTable::GrowthTable(std::string label, std::vector<double> r_grid, std::vector<double> values)
    : label_(std::move(label)), r_(std::move(r_grid)), values_(std::move(values)) {
  if (r_.size() != values_.size()) throw DomainError("GrowthTable: grid and values differ in length");
  if (!r_.empty() && r_.front() < 1.0) throw DomainError("GrowthTable: radii must be >= 1");
  for (std::size_t i = 1; i < r_.size(); ++i)
    if (!(r_[i] > r_[i - 1])) throw DomainError("GrowthTable: radii must be strictly increasing");
}

double GrowthTable::min() const {
  if (values_.empty()) throw DomainError("GrowthTable::min: empty table");
  return *std::min_element(values_.begin(), values_.end());
}

double GrowthTable::max() const {
  if (values_.empty()) throw DomainError("GrowthTable::max: empty table");
  return *std::max_element(values_.begin(), values_.end());
}

namespace {
GrowthTable combine(const GrowthTable& a, const GrowthTable& b, double sign, const char* op) {
  if (!std::equal(a.r().begin(), a.r().end(), b.r().begin(), b.r().end()))
    throw DomainError("GrowthTable arithmetic on different grids");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + sign * b[i];
  return {a.label() + op + b.label(), {a.r().begin(), a.r().end()}, std::move(v)};
}
}  // namespace

GrowthTable operator+(const GrowthTable& a, const GrowthTable& b) { return combine(a, b, 1.0, "+"); }
GrowthTable operator-(const GrowthTable& a, const GrowthTable& b) { return combine(a, b, -1.0, "-"); }

GrowthTable operator*(double s, const GrowthTable& a) {
  std::vector<double> v(a.values().begin(), a.values().end());
  for (double& x : v) x *= s;
  return {format_double(s) + "*" + a.label(), {a.r().begin(), a.r().end()}, std::move(v)};
}

std::vector<double> geometric_grid(double r_min, double r_max, int points) {
  if (points < 1 || r_min < 1.0 || r_max < r_min) throw DomainError("geometric_grid: bad parameters");
  if (points == 1) return {r_min};
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = r_min * std::pow(r_max / r_min, static_cast<double>(k) / (points - 1));
  g.back() = r_max;
  return g;
}

std::vector<double> linear_grid(double r_min, double r_max, int points) {
  if (points < 1 || r_min < 1.0 || r_max < r_min) throw DomainError("linear_grid: bad parameters");
  if (points == 1) return {r_min};
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = r_min + (r_max - r_min) * k / (points - 1);
  return g;
}

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int k = 2; k <= 14; ++k) g.push_back(std::exp2(0.5 * k));
  return g;
}

void write_csv(std::ostream& out, std::span<const GrowthTable> tables) {
  if (tables.empty()) throw DomainError("write_csv: no tables");
  const auto r = tables.front().r();
  for (const auto& t : tables)
    if (!std::equal(r.begin(), r.end(), t.r().begin(), t.r().end())) throw DomainError("write_csv: grids differ");
  out << "r";
  for (const auto& t : tables) out << ',' << t.label();
  out << '\n';
  for (std::size_t i = 0; i < r.size(); ++i) {
    out << format_double(r[i]);
    for (const auto& t : tables) out << ',' << format_double(t[i]);
    out << '\n';
  }
}

std::string to_csv(std::span<const GrowthTable> tables) {
  std::ostringstream s;
  write_csv(s, tables);
  return s.str();
}

}  // namespace vdlab
