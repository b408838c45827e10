#include "polytight/contact_set.hpp"

#include "polytight/csv.hpp"
#include "polytight/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace polytight {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Largest sum of |beta| over the sites for which linear-space weights are
// guaranteed not to overflow.
constexpr double kLinearBudget = 600.0;

double log_sum_exp(const Eigen::ArrayXd& terms) {
  const double peak = terms.maxCoeff();
  if (peak == kNegInf) return kNegInf;
  return peak + std::log((terms - peak).exp().sum());
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::vector<double> draw_charges(int n, std::uint64_t seed, ChargeLaw law) {
  if (n < 0) throw std::invalid_argument("charge count must be nonnegative");
  Rng rng = make_stream(seed, 0, 0x6368617267657321ULL);
  std::vector<double> charges(static_cast<std::size_t>(n));
  for (double& omega : charges) {
    if (law == ChargeLaw::rademacher) {
      omega = (rng() >> 63) != 0 ? 1.0 : -1.0;
    } else {
      // Box-Muller, first coordinate only.
      const double u = 1.0 - uniform01(rng);
      const double v = uniform01(rng);
      omega = std::sqrt(-2.0 * std::log(u)) *
              std::cos(2.0 * std::numbers::pi * v);
    }
  }
  return charges;
}

RenewalWeights renewal_weights(const WalkParams& walk, int n) {
  if (n < 0) throw std::invalid_argument("system size must be nonnegative");
  RenewalWeights out{Eigen::ArrayXd::Constant(n + 1, kNegInf),
                     Eigen::ArrayXd::Zero(n + 1)};
  const double log2 = std::numbers::ln2;
  if (n == 0) return out;
  survival_table(walk, ExcursionKind::bulk, n - 1);
  survival_table(walk, ExcursionKind::final, n - 1);
  for (int t = 1; t <= n; ++t) {
    const double bulk = log_event_probability(walk, t, ExcursionKind::bulk);
    out.log_bulk(t) = t == 1 ? bulk : bulk + log2;
    out.log_final(t) =
        log_event_probability(walk, t, ExcursionKind::final) + log2;
  }
  return out;
}

bool ContactSet::valid(int n) const {
  int prev = 0;
  for (int c : contacts) {
    if (c <= prev || c > n) return false;
    prev = c;
  }
  return true;
}

ContactSetLaw::ContactSetLaw(int n, Family family, const WalkParams& walk)
    : n_(n), family_(std::move(family)), walk_(walk) {
  if (n_ < 1) throw std::invalid_argument("system size N must be >= 1");
  beta_ = Eigen::ArrayXd::Zero(n_ + 1);
  std::visit(
      Overloaded{
          [&](const Homogeneous& h) {
            if (!std::isfinite(h.beta)) {
              throw std::invalid_argument("beta must be finite");
            }
            beta_.tail(n_).setConstant(h.beta);
          },
          [&](const Periodic& per) {
            if (per.betas.empty()) {
              throw std::invalid_argument("periodic family needs period >= 1");
            }
            const auto period = static_cast<int>(per.betas.size());
            for (int l = 1; l <= n_; ++l) {
              beta_(l) = per.betas[static_cast<std::size_t>(l % period)];
            }
          },
          [&](const Disordered& dis) {
            if (!std::isfinite(dis.beta) || !std::isfinite(dis.lambda)) {
              throw std::invalid_argument("beta and lambda must be finite");
            }
            charges_ = dis.charges.empty()
                           ? draw_charges(n_, dis.seed, dis.law)
                           : dis.charges;
            if (static_cast<int>(charges_.size()) < n_) {
              throw std::invalid_argument("need at least N disorder charges");
            }
            charges_.resize(static_cast<std::size_t>(n_));
            for (int l = 1; l <= n_; ++l) {
              beta_(l) =
                  dis.beta + dis.lambda * charges_[static_cast<std::size_t>(l - 1)];
            }
          },
          [&](const CustomWeights& custom) {
            custom_ = true;
            if (custom.bulk.rows() != n_ + 1 || custom.bulk.cols() != n_ + 1 ||
                custom.final_weight.size() != n_ + 1) {
              throw std::invalid_argument("custom weight table has wrong size");
            }
            if (!(custom.bulk.array() >= 0.0).all() ||
                !custom.bulk.allFinite() ||
                !(custom.final_weight.array() >= 0.0).all() ||
                !custom.final_weight.allFinite()) {
              throw std::invalid_argument(
                  "custom weights must be finite and nonnegative");
            }
            log_custom_bulk_ = custom.bulk.array().log().matrix();
            log_custom_final_ = custom.final_weight.array().log().matrix();
            log_custom_final_(n_) = 0.0;
          }},
      family_);
  if (!beta_.allFinite()) throw std::invalid_argument("weights must be finite");
  if (!custom_) renewal_ = renewal_weights(walk_, n_);
  build_partition();
}

double ContactSetLaw::log_bulk_weight(int prev, int next) const {
  if (prev < 0 || next > n_ || prev >= next) {
    throw std::out_of_range("bulk weight needs 0 <= prev < next <= N");
  }
  if (custom_) return log_custom_bulk_(prev, next);
  return beta_(next) + renewal_.log_bulk(next - prev);
}

double ContactSetLaw::log_final_weight(int last) const {
  if (last < 0 || last > n_) throw std::out_of_range("final weight index");
  if (custom_) return log_custom_final_(last);
  return renewal_.log_final(n_ - last);
}

void ContactSetLaw::build_partition() {
  if (custom_ || beta_.abs().sum() <= kLinearBudget) {
    build_partition_linear();
    if (partition_.z.allFinite() && std::isfinite(partition_.log_total)) return;
  }
  build_partition_log();
  if (!std::isfinite(partition_.log_total)) {
    throw std::invalid_argument("degenerate law: partition function is zero");
  }
}

void ContactSetLaw::build_partition_linear() {
  partition_ = PartitionTable{};
  partition_.log_space = false;
  Eigen::ArrayXd z = Eigen::ArrayXd::Zero(n_ + 1);
  z(0) = 1.0;
  if (custom_) {
    const Eigen::MatrixXd& bulk = std::get<CustomWeights>(family_).bulk;
    for (int j = 1; j <= n_; ++j) {
      z(j) = z.head(j).matrix().dot(bulk.col(j).head(j));
    }
  } else {
    // reversed(r) = K(N - r), so K(j - i) for i < j is reversed.segment(N - j, j).
    const Eigen::ArrayXd bulk = renewal_.log_bulk.exp();
    const Eigen::ArrayXd reversed = bulk.tail(n_).reverse();
    for (int j = 1; j <= n_; ++j) {
      z(j) = std::exp(beta_(j)) *
             z.head(j).matrix().dot(reversed.segment(n_ - j, j).matrix());
    }
  }
  Eigen::ArrayXd finals(n_ + 1);
  for (int i = 0; i <= n_; ++i) finals(i) = std::exp(log_final_weight(i));
  const double total = (z * finals).sum();
  partition_.z = z;
  partition_.log_z = z.log();
  partition_.log_total = std::log(total);
  partition_.linear_total = total;
}

void ContactSetLaw::build_partition_log() {
  partition_ = PartitionTable{};
  partition_.log_space = true;
  Eigen::ArrayXd log_z = Eigen::ArrayXd::Constant(n_ + 1, kNegInf);
  log_z(0) = 0.0;
  for (int j = 1; j <= n_; ++j) {
    Eigen::ArrayXd terms(j);
    for (int i = 0; i < j; ++i) terms(i) = log_z(i) + log_bulk_weight(i, j);
    log_z(j) = log_sum_exp(terms);
  }
  Eigen::ArrayXd terms(n_ + 1);
  for (int i = 0; i <= n_; ++i) terms(i) = log_z(i) + log_final_weight(i);
  partition_.log_z = log_z;
  partition_.log_total = log_sum_exp(terms);
}

double ContactSetLaw::backward_probability(int prev, int next) const {
  const double lz_prev = partition_.log_z(prev);
  if (lz_prev == kNegInf) return 0.0;
  if (!partition_.log_space) {
    return partition_.z(prev) * bulk_weight(prev, next) / partition_.z(next);
  }
  return std::exp(lz_prev + log_bulk_weight(prev, next) -
                  partition_.log_z(next));
}

double ContactSetLaw::last_contact_probability(int last) const {
  const double lz = partition_.log_z(last);
  if (lz == kNegInf) return 0.0;
  if (!partition_.log_space) {
    return partition_.z(last) * final_weight(last) / partition_.total();
  }
  return std::exp(lz + log_final_weight(last) - partition_.log_total);
}

ContactSetLaw make_law(int n, const Family& family, const WalkParams& walk) {
  return ContactSetLaw(n, family, walk);
}

const PartitionTable& partition_function(const ContactSetLaw& law) {
  return law.partition();
}

ContactSet sample_contact_set(const ContactSetLaw& law, Rng& rng) {
  const int n = law.size();
  // Candidates are scanned outward from the current position, so the cost of
  // each draw is proportional to the gap it produces.
  auto pick = [&rng](int from, auto&& probability) {
    const double u = uniform01(rng);
    double acc = 0.0;
    int fallback = -1;
    for (int i = from; i >= 0; --i) {
      const double w = probability(i);
      if (w <= 0.0) continue;
      fallback = i;
      acc += w;
      if (u < acc) return i;
    }
    return fallback;
  };

  ContactSet out;
  int current = pick(n, [&](int i) { return law.last_contact_probability(i); });
  while (current > 0) {
    out.contacts.push_back(current);
    const int next = current;
    current = pick(next - 1,
                   [&](int i) { return law.backward_probability(i, next); });
  }
  std::reverse(out.contacts.begin(), out.contacts.end());
  return out;
}

double set_probability(const ContactSetLaw& law, const ContactSet& set) {
  if (!set.valid(law.size())) {
    throw std::invalid_argument(
        "contact set must be strictly increasing within {1..N}");
  }
  double log_weight = 0.0;
  int prev = 0;
  for (int c : set.contacts) {
    log_weight += law.log_bulk_weight(prev, c);
    prev = c;
  }
  log_weight += law.log_final_weight(prev);
  return std::exp(log_weight - law.partition().log_total);
}

CustomWeights load_custom_weights(std::istream& in, int n) {
  if (n < 1) throw std::invalid_argument("system size N must be >= 1");
  CustomWeights weights{Eigen::MatrixXd::Zero(n + 1, n + 1),
                        Eigen::VectorXd::Zero(n + 1)};
  enum class Section { none, bulk, final } section = Section::none;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.front() == "prev") {
      section = Section::bulk;
      continue;
    }
    if (fields.front() == "last") {
      section = Section::final;
      continue;
    }
    const auto where = "custom weights line " + std::to_string(line_no) + ": ";
    try {
      if (section == Section::bulk && fields.size() == 3) {
        const auto prev = parse_integer(fields[0]);
        const auto next = parse_integer(fields[1]);
        if (prev < 0 || next > n || prev >= next) {
          throw std::invalid_argument("need 0 <= prev < next <= N");
        }
        weights.bulk(prev, next) = parse_double(fields[2]);
      } else if (section == Section::final && fields.size() == 2) {
        const auto last = parse_integer(fields[0]);
        if (last < 0 || last > n) throw std::invalid_argument("need 0 <= last <= N");
        weights.final_weight(last) = parse_double(fields[1]);
      } else {
        throw std::invalid_argument("unexpected row");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
  }
  weights.final_weight(n) = 1.0;
  return weights;
}

void save_custom_weights(std::ostream& out, const CustomWeights& weights) {
  const auto n = weights.final_weight.size() - 1;
  {
    CsvWriter csv(out, {"prev", "next", "weight"});
    for (Eigen::Index j = 1; j <= n; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        if (weights.bulk(i, j) != 0.0) {
          csv.row(static_cast<long long>(i), static_cast<long long>(j),
                  weights.bulk(i, j));
        }
      }
    }
  }
  CsvWriter csv(out, {"last", "final_weight"});
  for (Eigen::Index i = 0; i <= n; ++i) {
    csv.row(static_cast<long long>(i), weights.final_weight(i));
  }
}

std::vector<double> load_charges(std::istream& in) {
  std::vector<double> charges;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line != "omega") throw std::invalid_argument("charges CSV needs header 'omega'");
      continue;
    }
    charges.push_back(parse_double(line));
  }
  return charges;
}

void save_charges(std::ostream& out, std::span<const double> charges) {
  CsvWriter csv(out, {"omega"});
  for (double omega : charges) csv.row(omega);
}

}  // namespace polytight
