#pragma once

// Brute-force enumeration oracles. These never touch the transfer-matrix or
// h-transform code: they enumerate raw step sequences of the free walk and
// reweight them directly, so agreement with the fast code is a real check.

#include "polytight/contact_set.hpp"
#include "polytight/excursion.hpp"
#include "polytight/path.hpp"
#include "polytight/rational.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace polytight {

using PathLaw = std::map<std::vector<int>, double>;

/// Calls visit(path, probability) for each of the 3^n step sequences of the
/// free walk started at 0.
template <typename Visit>
void for_each_walk(const WalkParams& walk, int n, Visit&& visit) {
  std::vector<int> path(static_cast<std::size_t>(n));
  const double weight[3] = {walk.p(), walk.stay(), walk.p()};
  auto recurse = [&](auto&& self, int i, int y, double prob) -> void {
    if (i == n) {
      visit(static_cast<const std::vector<int>&>(path), prob);
      return;
    }
    for (int step = -1; step <= 1; ++step) {
      path[static_cast<std::size_t>(i)] = y + step;
      self(self, i + 1, y + step, prob * weight[step + 1]);
    }
  };
  recurse(recurse, 0, 0, 1.0);
}

/// Calls visit(path) for every lattice path of length n with entries >= 0.
template <typename Visit>
void for_each_nonnegative_path(int n, Visit&& visit) {
  std::vector<int> path(static_cast<std::size_t>(n));
  auto recurse = [&](auto&& self, int i, int y) -> void {
    if (i == n) {
      visit(static_cast<const std::vector<int>&>(path));
      return;
    }
    for (int next = y > 0 ? y - 1 : 0; next <= y + 1; ++next) {
      path[static_cast<std::size_t>(i)] = next;
      self(self, i + 1, next);
    }
  };
  recurse(recurse, 0, 0);
}

/// Law of (|S_1|, ..., |S_N|) tilted by exp(sum of beta_l over zeros l).
/// This is the pinned polymer measure for every walk-derived family.
PathLaw brute_force_polymer_law(const ContactSetLaw& law);

/// Conditional law of the first t steps given the excursion event.
PathLaw brute_force_excursion_law(const WalkParams& walk, int t,
                                  ExcursionKind kind);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int pooled_bins = 0;
};

/// Pearson test of `counts` against `probs` (same order). Bins with expected
/// count below 5 are pooled, smallest first, until the pool reaches 5.
ChiSquare chi_square_test(std::span<const long long> counts,
                          std::span<const double> probs);

struct OracleCheck {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool passed() const { return deviation <= tolerance; }
};

struct OracleOptions {
  double tolerance = 1e-10;
  int max_excursion = 12;
  bool rational = false;
  std::string rational_p;  // exact p, e.g. "3/10"; required when rational
};

/// Full cross-check of one configuration with N <= 12.
std::vector<OracleCheck> run_oracle(const ContactSetLaw& law,
                                    const OracleOptions& options);

/// Exact identities evaluated in rational arithmetic; deviation is 0 when
/// every identity holds exactly and 1 otherwise.
std::vector<OracleCheck> rational_checks(const Rational& p, int horizon);

}  // namespace polytight
