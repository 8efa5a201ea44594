#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace rrt {

/// Finite probability mass function with strictly increasing support.
class Pmf {
 public:
  // Throws DomainError on negative masses, masses not summing to 1 +- 1e-10,
  // unsorted support or mismatched lengths.
  Pmf(std::vector<double> support, std::vector<double> mass);

  static Pmf point_mass(double value);

  std::span<const double> support() const { return support_; }
  std::span<const double> mass() const { return mass_; }
  std::size_t size() const { return support_.size(); }

  double mean() const;
  // P(X <= x).
  double cdf(double x) const;

 private:
  std::vector<double> support_;
  std::vector<double> mass_;
};

// Two-column CSV "value,mass" with 17 significant digits.
void write_csv(std::ostream& out, const Pmf& pmf);

}  // namespace rrt
