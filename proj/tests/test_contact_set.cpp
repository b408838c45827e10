#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polytight/contact_set.hpp"
#include "polytight/oracle.hpp"

#include <map>
#include <sstream>

using namespace polytight;

namespace {

ContactSet from_mask(int n, unsigned mask) {
  ContactSet set;
  for (int l = 1; l <= n; ++l) {
    if (mask & (1u << (l - 1))) set.contacts.push_back(l);
  }
  return set;
}

// Contact-set law obtained by folding the tilted free walk.
std::map<ContactSet, double> enumerate_zero_sets(const ContactSetLaw& law) {
  std::map<ContactSet, double> out;
  for (const auto& [path, prob] : brute_force_polymer_law(law)) {
    ContactSet set;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (path[i] == 0) set.contacts.push_back(static_cast<int>(i) + 1);
    }
    out[set] += prob;
  }
  return out;
}

std::vector<Family> families(int n) {
  return {Homogeneous{0.0}, Homogeneous{0.5}, Homogeneous{-1.2},
          Periodic{{0.8, -0.4, 0.1}},
          Disordered{0.2, 0.7, 17, ChargeLaw::rademacher, {}},
          Disordered{-0.1, 0.5, 3, ChargeLaw::gaussian, {}},
          CustomWeights{Eigen::MatrixXd::Constant(n + 1, n + 1, 0.5),
                        Eigen::VectorXd::Constant(n + 1, 1.5)}};
}

}  // namespace

TEST_CASE("single site") {
  const auto law = make_law(1, Homogeneous{0.0}, WalkParams(0.3));
  const ContactSet contact{{1}};
  const ContactSet empty{};
  CHECK(set_probability(law, contact) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(set_probability(law, empty) == doctest::Approx(0.6).epsilon(1e-14));
  const auto reference = enumerate_zero_sets(law);
  CHECK(reference.at(contact) == doctest::Approx(0.4).epsilon(1e-14));

  const double beta = 0.9;
  const auto tilted = make_law(1, Homogeneous{beta}, WalkParams(0.3));
  CHECK(partition_function(tilted).total() ==
        doctest::Approx(std::exp(beta) * 0.4 + 0.6)
            .epsilon(1e-14));
}

TEST_CASE("free partition function is one") {
  for (double p : {0.1, 0.3, 0.45}) {
    for (int n = 1; n <= 200; ++n) {
      const auto law = make_law(n, Homogeneous{0.0}, WalkParams(p));
      CHECK(std::abs(partition_function(law).total() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("strong pinning concentrates on full contact") {
  const auto law = make_law(3, Homogeneous{20.0}, WalkParams(0.3));
  const ContactSet full{{1, 2, 3}};
  CHECK(set_probability(law, full) > 0.999);
  Rng rng = make_stream(4, 0);
  int hits = 0;
  for (int s = 0; s < 10000; ++s) hits += sample_contact_set(law, rng) == full;
  CHECK(hits > 9990);
}

TEST_CASE("custom weights") {
  const CustomWeights ones{Eigen::MatrixXd::Ones(3, 3), Eigen::VectorXd::Ones(3)};
  const auto law = make_law(2, ones, WalkParams(0.3));
  CHECK(partition_function(law).total() == 4.0);
  for (unsigned mask = 0; mask < 4; ++mask) {
    CHECK(set_probability(law, from_mask(2, mask)) == doctest::Approx(0.25).epsilon(1e-15));
  }
  CustomWeights bad = ones;
  bad.bulk(0, 1) = -1.0;
  CHECK_THROWS_AS(make_law(2, bad, WalkParams(0.3)), std::invalid_argument);
  const CustomWeights zeros{Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Zero(3)};
  CHECK_THROWS_AS(make_law(2, zeros, WalkParams(0.3)), std::invalid_argument);
}

TEST_CASE("malformed sets") {
  const auto law = make_law(4, Homogeneous{0.0}, WalkParams(0.3));
  CHECK_THROWS_AS(set_probability(law, ContactSet{{2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(set_probability(law, ContactSet{{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(set_probability(law, ContactSet{{5}}), std::invalid_argument);
  CHECK_THROWS_AS(set_probability(law, ContactSet{{2, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(make_law(0, Homogeneous{0.0}, WalkParams(0.3)), std::invalid_argument);
  CHECK_THROWS_AS(make_law(3, Periodic{}, WalkParams(0.3)), std::invalid_argument);
}

TEST_CASE("probabilities sum to one for every family") {
  for (int n : {1, 5, 9, 12}) {
    for (const auto& family : families(n)) {
      const auto law = make_law(n, family, WalkParams(0.3));
      double total = 0.0;
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        total += set_probability(law, from_mask(n, mask));
      }
      CHECK(std::abs(total - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("set law matches the folded walk") {
  for (double p : {0.1, 0.3, 0.45}) {
    for (int n : {3, 6, 9}) {
      auto fams = families(n);
      fams.pop_back();
      for (const auto& family : fams) {
        const auto law = make_law(n, family, WalkParams(p));
        const auto reference = enumerate_zero_sets(law);
        double worst = 0.0;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
          const auto set = from_mask(n, mask);
          const auto it = reference.find(set);
          worst = std::max(worst, std::abs(set_probability(law, set) -
                                           (it == reference.end() ? 0.0 : it->second)));
        }
        CHECK(worst < 1e-12);
      }
    }
  }
}

TEST_CASE("sampler matches set probabilities") {
  for (const auto& family : families(8)) {
    const auto law = make_law(8, family, WalkParams(0.3));
    Rng rng = make_stream(2024, 1);
    std::vector<long long> counts(1u << 8);
    for (int s = 0; s < 100000; ++s) {
      const auto set = sample_contact_set(law, rng);
      REQUIRE(set.valid(8));
      unsigned mask = 0;
      for (int c : set.contacts) mask |= 1u << (c - 1);
      ++counts[mask];
    }
    std::vector<double> probs;
    for (unsigned mask = 0; mask < counts.size(); ++mask) {
      probs.push_back(set_probability(law, from_mask(8, mask)));
    }
    CHECK(chi_square_test(counts, probs).p_value > 1e-3);
  }
}

TEST_CASE("sampling is deterministic") {
  const auto law = make_law(300, Homogeneous{0.4}, WalkParams(0.3));
  Rng a = make_stream(8, 8);
  Rng b = make_stream(8, 8);
  CHECK(sample_contact_set(law, a) == sample_contact_set(law, b));
}

TEST_CASE("equivalent families agree bit for bit") {
  const WalkParams w(0.3);
  for (double beta : {0.0, 0.35, -2.0, 9.0}) {
    const auto homogeneous = make_law(150, Homogeneous{beta}, w);
    const auto periodic = make_law(150, Periodic{{beta}}, w);
    const auto disordered = make_law(150, Disordered{beta, 0.0, 5, ChargeLaw::rademacher, {}}, w);
    for (const auto* other : {&periodic, &disordered}) {
      const auto& a = partition_function(homogeneous);
      const auto& b = partition_function(*other);
      CHECK(a.log_space == b.log_space);
      CHECK((a.log_z == b.log_z).all());
      CHECK(a.log_total == b.log_total);
      CHECK(a.total() == b.total());
    }
  }
}

TEST_CASE("log space agrees with a direct linear recursion") {
  const WalkParams w(0.3);
  const int n = 100;
  const double beta = 7.0;  // exp(700) is still representable
  const auto law = make_law(n, Homogeneous{beta}, w);
  CHECK(partition_function(law).log_space);
  const auto weights = renewal_weights(w, n);
  std::vector<long double> z(n + 1, 0.0L);
  z[0] = 1.0L;
  for (int j = 1; j <= n; ++j) {
    for (int i = 0; i < j; ++i) {
      z[j] += z[i] * std::exp(static_cast<long double>(beta + weights.log_bulk(j - i)));
    }
  }
  long double total = 0.0L;
  for (int i = 0; i <= n; ++i) {
    total += z[i] * std::exp(static_cast<long double>(weights.log_final(n - i)));
  }
  CHECK(std::abs(partition_function(law).log_total - static_cast<double>(std::log(total))) < 1e-12);

  const auto huge = make_law(5000, Homogeneous{50.0}, w);
  CHECK(std::isfinite(partition_function(huge).log_total));
  Rng rng = make_stream(1, 0);
  CHECK(sample_contact_set(huge, rng).contacts.size() == 5000);
}

TEST_CASE("charges") {
  const auto a = draw_charges(1000, 42, ChargeLaw::rademacher);
  CHECK(a == draw_charges(1000, 42, ChargeLaw::rademacher));
  for (double w : a) CHECK(std::abs(w) == 1.0);
  const auto g = draw_charges(20000, 42, ChargeLaw::gaussian);
  double mean = 0.0;
  double sq = 0.0;
  for (double w : g) {
    mean += w / g.size();
    sq += w * w / g.size();
  }
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(sq - 1.0) < 0.05);

  std::stringstream io;
  save_charges(io, g);
  CHECK(load_charges(io) == g);

  const auto law = make_law(10, Disordered{0.1, 0.3, 0, ChargeLaw::gaussian, g}, WalkParams(0.3));
  CHECK(law.charges().size() == 10);
  CHECK(law.pinning(4) == 0.1 + 0.3 * g[3]);
  CHECK_THROWS_AS(make_law(10, Disordered{0.1, 0.3, 0, ChargeLaw::gaussian, {1.0}}, WalkParams(0.3)),
                  std::invalid_argument);
}

TEST_CASE("custom weight files round trip") {
  const int n = 4;
  CustomWeights w{Eigen::MatrixXd::Zero(n + 1, n + 1), Eigen::VectorXd::Zero(n + 1)};
  for (int i = 0; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) w.bulk(i, j) = 0.1 * (i + 1) + 0.37 * j;
    w.final_weight(i) = 1.0 / (i + 2);
  }
  w.final_weight(n) = 1.0;
  std::stringstream io;
  save_custom_weights(io, w);
  const auto back = load_custom_weights(io, n);
  CHECK(back.bulk == w.bulk);
  CHECK(back.final_weight == w.final_weight);

  std::stringstream broken("prev,next,weight\n0,9,1\n");
  CHECK_THROWS(load_custom_weights(broken, n));
}
