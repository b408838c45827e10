#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polytight/oracle.hpp"
#include "polytight/path.hpp"

#include <map>

using namespace polytight;

namespace {

// Custom law putting all mass on one contact set.
ContactSetLaw forcing(int n, const std::vector<int>& contacts) {
  CustomWeights w{Eigen::MatrixXd::Zero(n + 1, n + 1), Eigen::VectorXd::Zero(n + 1)};
  int prev = 0;
  for (int c : contacts) {
    w.bulk(prev, c) = 1.0;
    prev = c;
  }
  w.final_weight(prev) = 1.0;
  return make_law(n, w, WalkParams(0.3));
}

template <typename Visit>
void for_each_lattice_path(int n, Visit&& visit) {
  std::vector<int> path(static_cast<std::size_t>(n));
  auto recurse = [&](auto&& self, int i, int y) -> void {
    if (i == n) {
      visit(static_cast<const std::vector<int>&>(path));
      return;
    }
    for (int step = -1; step <= 1; ++step) {
      path[static_cast<std::size_t>(i)] = y + step;
      self(self, i + 1, y + step);
    }
  };
  recurse(recurse, 0, 0);
}

}  // namespace

TEST_CASE("lattice paths") {
  CHECK_THROWS_AS(LatticePath({2}), std::invalid_argument);
  CHECK_THROWS_AS(LatticePath({1, 3}), std::invalid_argument);
  const LatticePath path({1, 0, -1, 0, 1});
  CHECK(path.at(0) == 0);
  CHECK(path.at(3) == -1);
  CHECK(path.zero_set().contacts == std::vector<int>{2, 4});
}

TEST_CASE("forced contact sets") {
  const auto full = forcing(2, {1, 2});
  Rng rng = make_stream(3, 0);
  for (int s = 0; s < 100; ++s) CHECK(sample_polymer(full, rng).path.values()[1] == 0);
  const std::vector<int> flat{0, 0};
  CHECK(exact_path_probability(full, flat) == doctest::Approx(1.0).epsilon(1e-15));

  const auto none = forcing(2, {});
  std::map<std::vector<int>, int> counts;
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) {
    const auto polymer = sample_polymer(none, rng);
    const auto v = polymer.path.values();
    ++counts[std::vector<int>(v.begin(), v.end())];
  }
  CHECK(counts.size() == 2);
  for (const auto& [path, prob] : std::map<std::vector<int>, double>{{{1, 1}, 4.0 / 7}, {{1, 2}, 3.0 / 7}}) {
    const double sd = std::sqrt(prob * (1 - prob) / samples);
    CHECK(std::abs(static_cast<double>(counts[path]) / samples - prob) < 3 * sd);
  }
}

TEST_CASE("exact path probability") {
  const auto law = make_law(6, Homogeneous{0.5}, WalkParams(0.3));
  const std::vector<int> negative{1, 0, -1, 0, 0, 0};
  const std::vector<int> jump{1, 3, 2, 1, 0, 0};
  CHECK(exact_path_probability(law, negative) == 0.0);
  CHECK(exact_path_probability(law, jump) == 0.0);
  const std::vector<int> short_path{1, 0};
  CHECK_THROWS_AS(exact_path_probability(law, short_path), std::invalid_argument);
  CHECK_THROWS_AS(exact_path_probability(make_law(17, Homogeneous{0.0}, WalkParams(0.3)),
                                         std::vector<int>(17, 0)),
                  std::invalid_argument);

  double total = 0.0;
  for_each_lattice_path(6, [&](const std::vector<int>& path) {
    total += exact_path_probability(law, path);
  });
  CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("path law matches the folded walk") {
  for (double p : {0.1, 0.3, 0.45}) {
    for (int n : {4, 7, 10}) {
      for (const Family& family : {Family{Homogeneous{0.0}}, Family{Homogeneous{0.5}},
                                   Family{Periodic{{1.0, -0.5}}},
                                   Family{Disordered{0.0, 1.0, 9, ChargeLaw::rademacher, {}}}}) {
        const auto law = make_law(n, family, WalkParams(p));
        const auto reference = brute_force_polymer_law(law);
        double worst = 0.0;
        double total = 0.0;
        for (const auto& [path, prob] : reference) {
          const double fast = exact_path_probability(law, path);
          worst = std::max(worst, std::abs(fast - prob));
          total += fast;
        }
        CHECK(worst < 1e-12);
        CHECK(std::abs(total - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("sampled paths follow the exact law") {
  const int n = 8;
  const auto law = make_law(n, Homogeneous{0.5}, WalkParams(0.3));
  const auto reference = brute_force_polymer_law(law);
  std::map<std::vector<int>, long long> counts;
  Rng rng = make_stream(77, 0);
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) {
    const auto polymer = sample_polymer(law, rng);
    REQUIRE(polymer.path.zero_set() == polymer.contacts);
    const auto v = polymer.path.values();
    ++counts[std::vector<int>(v.begin(), v.end())];
  }
  std::vector<long long> observed;
  std::vector<double> expected;
  double tv = 0.0;
  double spread = 0.0;
  for (const auto& [path, prob] : reference) {
    spread += std::sqrt(prob * (1 - prob) / samples);
    const auto it = counts.find(path);
    const long long c = it == counts.end() ? 0 : it->second;
    observed.push_back(c);
    expected.push_back(prob);
    tv += std::abs(static_cast<double>(c) / samples - prob);
  }
  CHECK(counts.size() <= reference.size());
  // E|X| is about 0.8 sd per bin, so the expected value of 0.5 tv is 0.4 spread.
  CHECK(0.5 * tv < 0.5 * spread);
  CHECK(chi_square_test(observed, expected).p_value > 1e-3);
}

TEST_CASE("zero set round trip") {
  Rng rng = make_stream(5, 5);
  for (int n : {1, 2, 17, 300, 2000}) {
    for (double beta : {-1.0, 0.0, 0.6}) {
      const auto law = make_law(n, Homogeneous{beta}, WalkParams(0.3));
      for (int s = 0; s < 20; ++s) {
        const auto polymer = sample_polymer(law, rng);
        CHECK(polymer.path.size() == n);
        CHECK(polymer.path.zero_set() == polymer.contacts);
        for (int y : polymer.path.values()) CHECK(y >= 0);
      }
    }
  }
}

TEST_CASE("random signs") {
  const auto law = make_law(400, Homogeneous{0.2}, WalkParams(0.3));
  Rng rng = make_stream(6, 0);
  bool any_negative = false;
  for (int s = 0; s < 50; ++s) {
    const auto polymer = sample_polymer(law, rng, {.random_signs = true});
    CHECK(polymer.path.zero_set() == polymer.contacts);
    const auto v = polymer.path.values();
    any_negative = any_negative || *std::min_element(v.begin(), v.end()) < 0;
    const int last = polymer.contacts.contacts.empty() ? 0 : polymer.contacts.contacts.back();
    for (int i = last; i < 400; ++i) CHECK(v[static_cast<std::size_t>(i)] > 0);
  }
  CHECK(any_negative);
}

TEST_CASE("rescaling") {
  const RescaledPath two(LatticePath({1, 0}));
  CHECK(two(0.0) == 0.0);
  CHECK(two(0.5) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(two(0.75) == doctest::Approx(1 / (2 * std::sqrt(2.0))).epsilon(1e-15));
  CHECK(two(1.0) == 0.0);
  CHECK_THROWS_AS(two(1.5), std::domain_error);
  CHECK_THROWS_AS(two(-0.1), std::domain_error);
  CHECK_THROWS_AS(RescaledPath(LatticePath{}), std::invalid_argument);

  const RescaledPath four(LatticePath({1, 1, 1, 0}));
  CHECK(four(5.0 / 8) == doctest::Approx(0.5).epsilon(1e-15));

  const auto law = make_law(997, Homogeneous{0.1}, WalkParams(0.3));
  Rng rng = make_stream(8, 0);
  for (int s = 0; s < 10; ++s) {
    const auto path = sample_polymer(law, rng).path;
    const RescaledPath x(path);
    const int n = path.size();
    const double root = std::sqrt(static_cast<double>(n));
    int top = 0;
    for (int i = 0; i <= n; ++i) {
      CHECK(x(static_cast<double>(i) / n) == x.grid_values()(i));
      CHECK(x.grid_values()(i) * root == doctest::Approx(path.at(i)).epsilon(1e-15));
      top = std::max(top, path.at(i));
    }
    CHECK(x.grid_values()(0) == 0.0);
    double sampled_max = 0.0;
    for (int k = 0; k <= 20 * n; ++k) sampled_max = std::max(sampled_max, x(k / (20.0 * n)));
    CHECK(sampled_max == doctest::Approx(top / root).epsilon(1e-15));
  }
}
