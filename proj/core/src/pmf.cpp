#include "rrt/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rrt/error.hpp"
#include "rrt/format.hpp"

namespace rrt {

Pmf::Pmf(std::vector<double> support, std::vector<double> mass)
    : support_(std::move(support)), mass_(std::move(mass)) {
  if (support_.empty() || support_.size() != mass_.size())
    throw DomainError("pmf support and mass must be nonempty and of equal length");
  long double total = 0.0L;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    if (!(mass_[i] >= 0.0)) throw DomainError("pmf masses must be nonnegative");
    if (i > 0 && !(support_[i] > support_[i - 1])) throw DomainError("pmf support must be strictly increasing");
    total += mass_[i];
  }
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-10) throw DomainError("pmf masses must sum to 1");
}

Pmf Pmf::point_mass(double value) { return Pmf({value}, {1.0}); }

double Pmf::mean() const {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < size(); ++i) acc += static_cast<long double>(support_[i]) * mass_[i];
  return static_cast<double>(acc);
}

double Pmf::cdf(double x) const {
  const auto end = std::upper_bound(support_.begin(), support_.end(), x);
  long double acc = 0.0L;
  for (auto it = support_.begin(); it != end; ++it) acc += mass_[static_cast<std::size_t>(it - support_.begin())];
  return std::min(1.0, static_cast<double>(acc));
}

void write_csv(std::ostream& out, const Pmf& pmf) {
  out << "value,mass\n";
  for (std::size_t i = 0; i < pmf.size(); ++i)
    out << format_double(pmf.support()[i]) << ',' << format_double(pmf.mass()[i]) << '\n';
}

}  // namespace rrt
