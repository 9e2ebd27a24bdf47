#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vdlab {

// A sampled function r -> value on a strictly increasing grid with r >= 1.
class GrowthTable {
 public:
  GrowthTable(std::string label, std::vector<double> r_grid, std::vector<double> values);

  const std::string& label() const noexcept { return label_; }
  std::span<const double> r() const noexcept { return r_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return r_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double min() const;
  double max() const;
  double spread() const { return max() - min(); }

  GrowthTable relabeled(std::string label) const { return {std::move(label), r_, values_}; }

  friend GrowthTable operator+(const GrowthTable& a, const GrowthTable& b);
  friend GrowthTable operator-(const GrowthTable& a, const GrowthTable& b);
  friend GrowthTable operator*(double s, const GrowthTable& a);

 private:
  std::string label_;
  std::vector<double> r_;
  std::vector<double> values_;
};

// Geometric grid: `points` radii from r_min to r_max inclusive.
std::vector<double> geometric_grid(double r_min, double r_max, int points);
std::vector<double> linear_grid(double r_min, double r_max, int points);
// r = 2^(k/2), k = 2..14.
std::vector<double> default_grid();

// CSV with header "r,<label>..."; all tables must share one grid. Values use
// the shortest round-trip decimal form.
void write_csv(std::ostream& out, std::span<const GrowthTable> tables);
std::string to_csv(std::span<const GrowthTable> tables);

}  // namespace vdlab
