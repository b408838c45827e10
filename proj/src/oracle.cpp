#include "polytight/oracle.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polytight {

namespace {

void normalize(PathLaw& law) {
  double total = 0.0;
  for (const auto& [path, prob] : law) total += prob;
  if (!(total > 0.0)) throw std::invalid_argument("conditioning event is null");
  for (auto& [path, prob] : law) prob /= total;
}

}  // namespace

PathLaw brute_force_polymer_law(const ContactSetLaw& law) {
  if (std::holds_alternative<CustomWeights>(law.family())) {
    throw std::invalid_argument("no walk oracle for custom weights");
  }
  const int n = law.size();
  PathLaw out;
  std::vector<int> folded(static_cast<std::size_t>(n));
  for_each_walk(law.walk(), n, [&](const std::vector<int>& path, double prob) {
    double log_tilt = 0.0;
    for (int i = 0; i < n; ++i) {
      const int y = path[static_cast<std::size_t>(i)];
      folded[static_cast<std::size_t>(i)] = std::abs(y);
      if (y == 0) log_tilt += law.pinning(i + 1);
    }
    out[folded] += prob * std::exp(log_tilt);
  });
  normalize(out);
  return out;
}

PathLaw brute_force_excursion_law(const WalkParams& walk, int t,
                                  ExcursionKind kind) {
  if (t < 1) throw std::invalid_argument("excursion length must be >= 1");
  PathLaw out;
  for_each_walk(walk, t, [&](const std::vector<int>& path, double prob) {
    bool inside = true;
    for (int i = 0; i + 1 < t; ++i) inside = inside && path[static_cast<std::size_t>(i)] > 0;
    const int last = path.back();
    if (inside && (kind == ExcursionKind::bulk ? last == 0 : last > 0)) {
      out[path] += prob;
    }
  });
  normalize(out);
  return out;
}

ChiSquare chi_square_test(std::span<const long long> counts,
                          std::span<const double> probs) {
  if (counts.size() != probs.size() || counts.empty()) {
    throw std::invalid_argument("counts and probabilities must match");
  }
  const double total =
      static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0LL));
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

  ChiSquare out;
  double pool_expected = 0.0;
  double pool_observed = 0.0;
  int bins = 0;
  auto add = [&](double observed, double expected) {
    out.statistic += (observed - expected) * (observed - expected) / expected;
    ++bins;
  };
  for (std::size_t i : order) {
    const double expected = probs[i] * total;
    const auto observed = static_cast<double>(counts[i]);
    if (expected == 0.0) {
      if (observed > 0.0) {
        out.statistic = INFINITY;
        out.p_value = 0.0;
        return out;
      }
      continue;
    }
    if (expected < 5.0 || pool_expected > 0.0) {
      pool_expected += expected;
      pool_observed += observed;
      ++out.pooled_bins;
      if (pool_expected >= 5.0) {
        add(pool_observed, pool_expected);
        pool_expected = pool_observed = 0.0;
      }
    } else {
      add(observed, expected);
    }
  }
  if (pool_expected > 0.0) add(pool_observed, pool_expected);
  out.dof = bins - 1;
  if (out.dof < 1) return out;
  const boost::math::chi_squared dist(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

std::vector<OracleCheck> run_oracle(const ContactSetLaw& law,
                                    const OracleOptions& options) {
  const int n = law.size();
  if (n > 12) throw std::invalid_argument("oracle enumeration is limited to N <= 12");
  const WalkParams& walk = law.walk();
  const double tol = options.tolerance;
  std::vector<OracleCheck> checks;

  double total = 0.0;
  double worst = 0.0;
  const bool walk_family = !std::holds_alternative<CustomWeights>(law.family());
  const PathLaw reference = walk_family ? brute_force_polymer_law(law) : PathLaw{};
  for_each_nonnegative_path(n, [&](const std::vector<int>& path) {
    const double prob = exact_path_probability(law, path);
    total += prob;
    if (walk_family) {
      const auto it = reference.find(path);
      worst = std::max(worst, std::abs(prob - (it == reference.end() ? 0.0 : it->second)));
    }
  });
  checks.push_back({"path_law_total", std::abs(total - 1.0), tol});
  if (walk_family) checks.push_back({"path_law_vs_enumeration", worst, tol});

  for (ExcursionKind kind : {ExcursionKind::bulk, ExcursionKind::final}) {
    double tv = 0.0;
    for (int t = 1; t <= std::min(n, options.max_excursion); ++t) {
      if (event_probability(walk, t, kind) <= 0.0) continue;
      const auto kernel = build_kernel(walk, t, kind);
      const auto brute = brute_force_excursion_law(walk, t, kind);
      double distance = 0.0;
      double covered = 0.0;
      for (const auto& [path, prob] : brute) {
        const double fast = path_probability(kernel, path);
        distance += std::abs(fast - prob);
        covered += fast;
      }
      // Mass the kernel puts outside the event counts as well.
      distance += std::abs(1.0 - covered);
      tv = std::max(tv, 0.5 * distance);
    }
    checks.push_back({std::string(to_string(kind)) + "_kernel_tv", tv, tol});
  }

  double reflection = 0.0;
  for (int m = 2; m <= 40; ++m) {
    reflection = std::max(reflection, std::abs(first_passage_pmf(walk, m) -
                                               reflection_first_passage(walk, m)));
  }
  checks.push_back({"first_passage_reflection", reflection, tol});

  double pinned = 0.0;
  for (int m = 1; m <= 40; ++m) {
    for (int b = 1; b <= m + 1; ++b) {
      pinned = std::max(pinned, std::abs(pinned_positive_pmf(walk, m, b) -
                                         pinned_positive_dp(walk, m, b)));
    }
  }
  checks.push_back({"pinned_positive_reflection", pinned, tol});

  double ruin = 0.0;
  for (int b = 1; b <= 20; ++b) {
    ruin = std::max(ruin, std::abs(b * ruin_probability(walk, b) - 1.0));
  }
  checks.push_back({"ruin_identity", ruin, tol});

  if (options.rational) {
    if (options.rational_p.empty()) {
      throw std::invalid_argument("rational checks need the exact value of p");
    }
    for (auto& check : rational_checks(parse_rational(options.rational_p), 40)) {
      checks.push_back(std::move(check));
    }
  }
  return checks;
}

std::vector<OracleCheck> rational_checks(const Rational& p, int horizon) {
  const BasicWalkParams<Rational> walk(p);
  auto verdict = [](bool exact) { return exact ? 0.0 : 1.0; };
  std::vector<OracleCheck> out;

  bool ok = true;
  for (int k = 0; k <= horizon && ok; ++k) ok = pmf_slice(walk, k).sum() == Rational(1);
  out.push_back({"rational_pmf_total", verdict(ok), 0.0});

  ok = true;
  for (int m = 2; m <= horizon && ok; ++m) {
    ok = first_passage_pmf(walk, m) == reflection_first_passage(walk, m);
  }
  out.push_back({"rational_first_passage_reflection", verdict(ok), 0.0});

  ok = true;
  for (int m = 1; m <= horizon && ok; ++m) {
    const auto alive = surviving_slice(walk, m);
    for (int b = 1; b < alive.size() && ok; ++b) {
      ok = alive(b) == pinned_positive_pmf(walk, m, b);
    }
  }
  out.push_back({"rational_pinned_positive_reflection", verdict(ok), 0.0});

  ok = true;
  for (int b = 1; b <= 20 && ok; ++b) ok = ruin_probability(walk, b) * b == Rational(1);
  out.push_back({"rational_ruin_identity", verdict(ok), 0.0});
  return out;
}

}  // namespace polytight
