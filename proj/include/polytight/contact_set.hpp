#pragma once

// Zero level set laws p_N on subsets of {1, ..., N}.
//
// A law assigns each contact set {T_1 < ... < T_k} the unnormalized weight
//
//   prod_i bulk_weight(T_{i-1}, T_i) * final_weight(T_k),   T_0 := 0,
//
// and is normalized once by the partition function Z_N. For the walk-derived
// families bulk_weight(l', l) = exp(beta_l) K(l - l') and
// final_weight(l) = Kbar(N - l), where K and Kbar are the renewal weights of
// the zero set of |S| (see renewal_weights).

#include "polytight/rng.hpp"
#include "polytight/walk.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace polytight {

struct Homogeneous {
  double beta = 0.0;
};

/// beta_l = betas[l mod period].
struct Periodic {
  std::vector<double> betas;
};

enum class ChargeLaw { rademacher, gaussian };

/// beta_l = beta + lambda * omega_l. When `charges` is empty the charges
/// omega_1..omega_N are drawn from `seed`.
struct Disordered {
  double beta = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  ChargeLaw law = ChargeLaw::rademacher;
  std::vector<double> charges;
};

/// Explicit weights: bulk(prev, next) for 0 <= prev < next <= N and
/// final_weight(last) for 0 <= last <= N. final_weight(N) is forced to 1.
struct CustomWeights {
  Eigen::MatrixXd bulk;
  Eigen::VectorXd final_weight;
};

using Family = std::variant<Homogeneous, Periodic, Disordered, CustomWeights>;

/// i.i.d. charges omega_1..omega_n, fair +-1 or standard Gaussian.
std::vector<double> draw_charges(int n, std::uint64_t seed, ChargeLaw law);

/// Renewal weights of the zero set of |S| for the lazy walk:
///   K(1)    = P(S_1 = 0)
///   K(t)    = 2 P(S_1 > 0, ..., S_{t-1} > 0, S_t = 0),   t >= 2
///   Kbar(t) = 2 P(S_1 > 0, ..., S_t > 0),                 t >= 1
///   Kbar(0) = 1
/// so that sum_{t <= M} K(t) + Kbar(M) = 1 for every M.
struct RenewalWeights {
  Eigen::ArrayXd log_bulk;   // index t = 1..N, entry 0 unused (-inf)
  Eigen::ArrayXd log_final;  // index t = 0..N
};

RenewalWeights renewal_weights(const WalkParams& walk, int n);

struct PartitionTable {
  bool log_space = false;
  Eigen::ArrayXd log_z;  // log Z(j), j = 0..N
  Eigen::ArrayXd z;      // Z(j); empty in log space
  double log_total = 0.0;
  double linear_total = 0.0;  // Z_N; unused in log space

  double total() const { return log_space ? std::exp(log_total) : linear_total; }
};

struct ContactSet {
  std::vector<int> contacts;

  bool valid(int n) const;
  friend bool operator==(const ContactSet&, const ContactSet&) = default;
  friend auto operator<=>(const ContactSet&, const ContactSet&) = default;
};

class ContactSetLaw {
 public:
  ContactSetLaw(int n, Family family, const WalkParams& walk);

  int size() const { return n_; }
  const WalkParams& walk() const { return walk_; }
  const Family& family() const { return family_; }
  const PartitionTable& partition() const { return partition_; }

  /// beta_l for the walk-derived families, zero for custom weights.
  double pinning(int site) const { return beta_(site); }
  std::span<const double> charges() const { return charges_; }

  double log_bulk_weight(int prev, int next) const;
  double log_final_weight(int last) const;
  double bulk_weight(int prev, int next) const {
    return std::exp(log_bulk_weight(prev, next));
  }
  double final_weight(int last) const {
    return std::exp(log_final_weight(last));
  }

  /// p_N(T_{i-1} = prev | T_i = next, contacts after next already drawn).
  double backward_probability(int prev, int next) const;
  /// p_N(last contact = last), last = 0 meaning the empty set.
  double last_contact_probability(int last) const;

 private:
  void build_partition();
  void build_partition_linear();
  void build_partition_log();

  int n_;
  Family family_;
  WalkParams walk_;
  bool custom_ = false;
  Eigen::ArrayXd beta_;
  std::vector<double> charges_;
  RenewalWeights renewal_;
  Eigen::MatrixXd log_custom_bulk_;
  Eigen::VectorXd log_custom_final_;
  PartitionTable partition_;
};

ContactSetLaw make_law(int n, const Family& family, const WalkParams& walk);

const PartitionTable& partition_function(const ContactSetLaw& law);

ContactSet sample_contact_set(const ContactSetLaw& law, Rng& rng);

/// Throws std::invalid_argument for sets that are unsorted or out of range.
double set_probability(const ContactSetLaw& law, const ContactSet& set);

/// CSV with a "prev,next,weight" section followed by a "last,final_weight"
/// section; missing entries are zero.
CustomWeights load_custom_weights(std::istream& in, int n);
void save_custom_weights(std::ostream& out, const CustomWeights& weights);

/// Single-column CSV with header "omega".
std::vector<double> load_charges(std::istream& in);
void save_charges(std::ostream& out, std::span<const double> charges);

}  // namespace polytight
