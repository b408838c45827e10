#include "polytight/path.hpp"

#include "polytight/excursion.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace polytight {

LatticePath::LatticePath(std::vector<int> values) : values_(std::move(values)) {
  int prev = 0;
  for (int y : values_) {
    if (std::abs(y - prev) > 1) {
      throw std::invalid_argument("lattice path increments must be -1, 0 or +1");
    }
    prev = y;
  }
}

ContactSet LatticePath::zero_set() const {
  ContactSet set;
  for (int i = 1; i <= size(); ++i) {
    if (at(i) == 0) set.contacts.push_back(i);
  }
  return set;
}

Polymer sample_polymer(const ContactSetLaw& law, Rng& rng,
                       const AssemblyOptions& options) {
  const int n = law.size();
  const WalkParams& walk = law.walk();
  Polymer out;
  out.contacts = sample_contact_set(law, rng);

  std::vector<int> values;
  values.reserve(static_cast<std::size_t>(n));
  auto append = [&](const ConditionedKernel& kernel) {
    Excursion e = sample_excursion(kernel, rng);
    if (options.random_signs && kernel.kind() == ExcursionKind::bulk &&
        (rng() >> 63) != 0) {
      for (int& y : e.values) y = -y;
    }
    values.insert(values.end(), e.values.begin(), e.values.end());
  };

  int prev = 0;
  for (int contact : out.contacts.contacts) {
    append(build_kernel(walk, contact - prev, ExcursionKind::bulk));
    prev = contact;
  }
  if (prev < n) append(build_kernel(walk, n - prev, ExcursionKind::final));
  out.path = LatticePath(std::move(values));
  return out;
}

double exact_path_probability(const ContactSetLaw& law,
                              std::span<const int> path) {
  const int n = law.size();
  if (n > kMaxOracleSize) {
    throw std::invalid_argument("exact path probability is limited to N <= " +
                                std::to_string(kMaxOracleSize));
  }
  if (static_cast<int>(path.size()) != n) {
    throw std::invalid_argument("path length must equal N");
  }
  int prev_value = 0;
  ContactSet zeros;
  for (int i = 0; i < n; ++i) {
    const int y = path[static_cast<std::size_t>(i)];
    if (y < 0 || std::abs(y - prev_value) > 1) return 0.0;
    if (y == 0) zeros.contacts.push_back(i + 1);
    prev_value = y;
  }

  double prob = set_probability(law, zeros);
  if (prob == 0.0) return 0.0;
  int start = 0;
  for (int contact : zeros.contacts) {
    const auto kernel =
        build_kernel(law.walk(), contact - start, ExcursionKind::bulk);
    prob *= path_probability(
        kernel, path.subspan(static_cast<std::size_t>(start),
                             static_cast<std::size_t>(contact - start)));
    start = contact;
  }
  if (start < n) {
    const auto kernel =
        build_kernel(law.walk(), n - start, ExcursionKind::final);
    prob *= path_probability(kernel, path.subspan(static_cast<std::size_t>(start)));
  }
  return prob;
}

RescaledPath::RescaledPath(const LatticePath& path) : n_(path.size()) {
  if (n_ < 1) throw std::invalid_argument("cannot rescale an empty path");
  lattice_.resize(static_cast<std::size_t>(n_ + 1));
  for (int i = 0; i <= n_; ++i) lattice_[static_cast<std::size_t>(i)] = path.at(i);
  const double root = std::sqrt(static_cast<double>(n_));
  grid_ = Eigen::Map<const Eigen::ArrayXi>(lattice_.data(), n_ + 1)
              .cast<double>() /
          root;
}

double RescaledPath::operator()(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("rescaled path is defined on [0, 1]");
  }
  double u = t * n_;
  // t = i/N rounded to a double must land back on grid point i.
  const double nearest = std::nearbyint(u);
  if (std::abs(u - nearest) <= 8.0 * 0x1.0p-52 * n_) u = nearest;
  const auto k = static_cast<int>(std::floor(u));
  if (k >= n_) return grid_(n_);
  return grid_(k) + (u - k) * (grid_(k + 1) - grid_(k));
}

RescaledPath rescale(const LatticePath& path) { return RescaledPath(path); }

}  // namespace polytight
