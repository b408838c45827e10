#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polytight/contact_set.hpp"
#include "polytight/excursion.hpp"
#include "polytight/oracle.hpp"
#include "polytight/parallel.hpp"

#include <map>

using namespace polytight;

namespace {

const double kPs[] = {0.1, 0.3, 0.45};

// Unconditioned event mass by enumeration of raw steps.
double enumerate_event(const WalkParams& walk, int t, ExcursionKind kind) {
  double total = 0.0;
  for_each_walk(walk, t, [&](const std::vector<int>& path, double prob) {
    for (int i = 0; i + 1 < t; ++i) {
      if (path[static_cast<std::size_t>(i)] <= 0) return;
    }
    const int last = path.back();
    if (kind == ExcursionKind::bulk ? last == 0 : last > 0) total += prob;
  });
  return total;
}

std::map<std::vector<int>, int> draw(const ConditionedKernel& kernel, int samples,
                                     std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  std::map<std::vector<int>, int> counts;
  for (int s = 0; s < samples; ++s) ++counts[sample_excursion(kernel, rng).values];
  return counts;
}

void check_frequency(int count, int samples, double prob) {
  const double sd = std::sqrt(prob * (1 - prob) / samples);
  CHECK(std::abs(static_cast<double>(count) / samples - prob) < 3 * sd);
}

}  // namespace

TEST_CASE("unique paths have probability one") {
  const WalkParams w(0.3);
  const std::vector<int> two{1, 0};
  const std::vector<int> three{1, 1, 0};
  const std::vector<int> one{0};
  CHECK(path_probability(build_kernel(w, 2, ExcursionKind::bulk), two) == doctest::Approx(1.0));
  CHECK(path_probability(build_kernel(w, 3, ExcursionKind::bulk), three) == doctest::Approx(1.0));
  CHECK(path_probability(build_kernel(w, 1, ExcursionKind::bulk), one) == 1.0);
  CHECK_THROWS_AS(build_kernel(WalkParams(0.5), 1, ExcursionKind::bulk), std::invalid_argument);
  CHECK_THROWS_AS(build_kernel(w, 0, ExcursionKind::final), std::invalid_argument);
}

TEST_CASE("path probabilities") {
  const WalkParams w(0.3);
  const auto bulk4 = build_kernel(w, 4, ExcursionKind::bulk);
  const std::vector<int> flat{1, 1, 1, 0};
  const std::vector<int> peak{1, 2, 1, 0};
  const std::vector<int> negative{1, -1, 1, 0};
  const std::vector<int> jump{1, 3, 1, 0};
  CHECK(path_probability(bulk4, flat) == doctest::Approx(0.64).epsilon(1e-14));
  CHECK(path_probability(bulk4, peak) == doctest::Approx(0.36).epsilon(1e-14));
  CHECK(path_probability(bulk4, negative) == 0.0);
  CHECK(path_probability(bulk4, jump) == 0.0);
  const std::vector<int> wrong_length{1, 0};
  CHECK_THROWS_AS(path_probability(bulk4, wrong_length), std::invalid_argument);

  const auto final2 = build_kernel(w, 2, ExcursionKind::final);
  const std::vector<int> level{1, 1};
  const std::vector<int> up{1, 2};
  CHECK(path_probability(final2, level) == doctest::Approx(4.0 / 7).epsilon(1e-14));
  CHECK(path_probability(final2, up) == doctest::Approx(3.0 / 7).epsilon(1e-14));
}

TEST_CASE("event probabilities") {
  const WalkParams w(0.3);
  CHECK(event_probability(w, 1, ExcursionKind::bulk) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(event_probability(w, 2, ExcursionKind::bulk) == doctest::Approx(0.09).epsilon(1e-15));
  CHECK(event_probability(w, 2, ExcursionKind::final) == doctest::Approx(0.21).epsilon(1e-15));
  CHECK_THROWS_AS(event_probability(w, 0, ExcursionKind::bulk), std::invalid_argument);

  for (double p : kPs) {
    const WalkParams walk(p);
    for (int t = 2; t <= 10; ++t) {
      for (ExcursionKind kind : {ExcursionKind::bulk, ExcursionKind::final}) {
        CHECK(event_probability(walk, t, kind) ==
              doctest::Approx(enumerate_event(walk, t, kind)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("renewal decomposition") {
  for (double p : kPs) {
    const WalkParams walk(p);
    // One-sided masses: the first step down is absorbed immediately.
    for (int m = 1; m <= 10; ++m) {
      double sum = 0.0;
      for (int t = 1; t <= m; ++t) sum += event_probability(walk, t, ExcursionKind::bulk);
      sum += event_probability(walk, m, ExcursionKind::final);
      CHECK(sum == doctest::Approx(1.0 - p).epsilon(1e-13));
    }
    // Two-sided weights of |S| restore the full mass.
    const auto weights = renewal_weights(walk, 200);
    for (int m = 1; m <= 200; ++m) {
      double sum = std::exp(weights.log_final(m));
      for (int t = 1; t <= m; ++t) sum += std::exp(weights.log_bulk(t));
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("kernel matches enumeration") {
  for (double p : kPs) {
    const WalkParams walk(p);
    for (int t = 1; t <= 10; ++t) {
      for (ExcursionKind kind : {ExcursionKind::bulk, ExcursionKind::final}) {
        const auto kernel = build_kernel(walk, t, kind);
        const auto brute = brute_force_excursion_law(walk, t, kind);
        double tv = 0.0;
        double covered = 0.0;
        for (const auto& [path, prob] : brute) {
          const double fast = path_probability(kernel, path);
          tv += std::abs(fast - prob);
          covered += fast;
        }
        CHECK(0.5 * (tv + std::abs(1.0 - covered)) < 1e-12);
        CHECK(std::abs(covered - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("step weights are normalized") {
  for (double p : kPs) {
    for (ExcursionKind kind : {ExcursionKind::bulk, ExcursionKind::final}) {
      for (int t : {1, 2, 7, 50, 300}) {
        const auto kernel = build_kernel(WalkParams(p), t, kind);
        for (int j = 0; j < t; ++j) {
          for (int x = 0; x <= j + 1; ++x) {
            if (j > 0 && x == 0) continue;
            if (kernel.survival(j, x) <= 0.0) continue;
            const auto w = kernel.step_weights(j, x);
            CHECK(std::abs(w[0] + w[1] + w[2] - 1.0) < 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("sampling frequencies") {
  const WalkParams w(0.3);
  const int samples = 100000;
  const auto bulk = draw(build_kernel(w, 4, ExcursionKind::bulk), samples, 11);
  CHECK(bulk.size() == 2);
  check_frequency(bulk.at({1, 1, 1, 0}), samples, 0.64);
  check_frequency(bulk.at({1, 2, 1, 0}), samples, 0.36);

  const auto final2 = draw(build_kernel(w, 2, ExcursionKind::final), samples, 12);
  check_frequency(final2.at({1, 1}), samples, 4.0 / 7);
  check_frequency(final2.at({1, 2}), samples, 3.0 / 7);

  const auto final1 = draw(build_kernel(w, 1, ExcursionKind::final), 100, 13);
  CHECK(final1.size() == 1);
  CHECK(final1.begin()->first == std::vector<int>{1});
}

TEST_CASE("chi-square against enumeration") {
  for (double p : kPs) {
    const WalkParams walk(p);
    for (ExcursionKind kind : {ExcursionKind::bulk, ExcursionKind::final}) {
      const int t = 8;
      const auto brute = brute_force_excursion_law(walk, t, kind);
      const auto counts = draw(build_kernel(walk, t, kind), 50000, 21);
      std::vector<long long> observed;
      std::vector<double> expected;
      for (const auto& [path, prob] : brute) {
        const auto it = counts.find(path);
        observed.push_back(it == counts.end() ? 0 : it->second);
        expected.push_back(prob);
      }
      CHECK(chi_square_test(observed, expected).p_value > 1e-3);
    }
  }
}

TEST_CASE("long excursions") {
  const WalkParams w(0.3);
  Rng rng = make_stream(5, 0);
  for (ExcursionKind kind : {ExcursionKind::bulk, ExcursionKind::final}) {
    const auto kernel = build_kernel(w, 10000, kind);
    for (int s = 0; s < 5; ++s) {
      const auto e = sample_excursion(kernel, rng);
      CHECK(e.feasible());
      CHECK(e.values.size() == 10000);
    }
    CHECK(std::isfinite(log_event_probability(w, 10000, kind)));
  }
}

TEST_CASE("sampling is deterministic") {
  const auto kernel = build_kernel(WalkParams(0.3), 60, ExcursionKind::bulk);
  Rng a = make_stream(99, 3);
  Rng b = make_stream(99, 3);
  CHECK(sample_excursion(kernel, a).values == sample_excursion(kernel, b).values);
}

TEST_CASE("table cache under concurrent growth") {
  clear_survival_cache();
  const WalkParams w(0.27);
  std::vector<double> seen(64);
  parallel_for(seen.size(), 4, [&](std::size_t i) {
    const int horizon = 50 + static_cast<int>(i * 37 % 400);
    const auto table = survival_table(w, ExcursionKind::bulk, horizon);
    CHECK(table->horizon() >= horizon);
    seen[i] = table->value(40, 3);
  });
  for (double v : seen) CHECK(v == seen.front());
  const SurvivalTable fresh(w, ExcursionKind::bulk, 40);
  CHECK(fresh.value(40, 3) == doctest::Approx(seen.front()).epsilon(1e-14));
}
