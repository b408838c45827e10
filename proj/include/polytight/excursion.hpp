#pragma once

// Conditioned excursion laws of the lazy walk.
//
//   bulk  (length t): S_1 > 0, ..., S_{t-1} > 0, S_t = 0
//   final (length t): S_1 > 0, ..., S_t > 0
//
// Both are sampled and evaluated through a Doob h-transform: the walk is
// reweighted step by step with the probability of completing the event from
// the current state. Because the walk is time-homogeneous that probability
// depends only on the number of steps left, so one table per (p, kind)
// serves every excursion length up to its horizon.

#include "polytight/rng.hpp"
#include "polytight/walk.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace polytight {

enum class ExcursionKind { bulk, final };

std::string_view to_string(ExcursionKind kind);

/// Completion probabilities indexed by steps remaining m and level x >= 0:
///   bulk:  V(m, x) = P_x(S_1..S_{m-1} > 0, S_m = 0), V(0, x) = 1{x = 0}
///   final: V(m, x) = P_x(S_1..S_m > 0),              V(0, x) = 1{x >= 1}
/// Row m is stored divided by its maximum, with the log of that factor kept
/// alongside. Levels past the stored length take the value tail(): zero for
/// bulk (underflowed) and one for final (saturated to double precision).
class SurvivalTable {
 public:
  SurvivalTable(const WalkParams& params, ExcursionKind kind, int horizon);
  SurvivalTable(const SurvivalTable& base, int horizon);

  const WalkParams& params() const { return params_; }
  ExcursionKind kind() const { return kind_; }
  int horizon() const { return static_cast<int>(log_scale_.size()) - 1; }
  double tail() const { return kind_ == ExcursionKind::bulk ? 0.0 : 1.0; }

  Eigen::Map<const Eigen::ArrayXd> row(int m) const {
    return {data_.data() + offset_[m],
            static_cast<Eigen::Index>(offset_[m + 1] - offset_[m])};
  }

  /// Row-normalized value; negative levels give zero.
  double scaled(int m, int x) const {
    if (x < 0) return 0.0;
    const std::size_t at = offset_[m] + static_cast<std::size_t>(x);
    return at < offset_[m + 1] ? data_[at] : tail();
  }

  double log_scale(int m) const { return log_scale_[m]; }
  double value(int m, int x) const;
  std::size_t stored_entries() const { return data_.size(); }

 private:
  void extend_to(int horizon);

  WalkParams params_;
  ExcursionKind kind_;
  std::vector<double> data_;
  std::vector<std::size_t> offset_;
  std::vector<double> log_scale_;
};

/// Shared table with horizon at least `horizon`, built or grown on demand.
/// Safe to call concurrently; callers always receive a complete table.
std::shared_ptr<const SurvivalTable> survival_table(const WalkParams& params,
                                                    ExcursionKind kind,
                                                    int horizon);

/// Drops every cached table.
void clear_survival_cache();

class ConditionedKernel {
 public:
  ConditionedKernel(std::shared_ptr<const SurvivalTable> table, int length);

  ExcursionKind kind() const { return table_->kind(); }
  int length() const { return length_; }
  const WalkParams& params() const { return table_->params(); }
  const SurvivalTable& table() const { return *table_; }

  /// B_j(x): probability of completing the event from level x after j steps.
  double survival(int j, int x) const;
  double event_probability() const { return survival(0, 0); }

  /// Conditioned probabilities of moving from (j, x) to x-1, x, x+1.
  /// All zero when (j, x) cannot complete the event.
  std::array<double, 3> step_weights(int j, int x) const;

 private:
  std::shared_ptr<const SurvivalTable> table_;
  int length_;
};

/// Throws std::invalid_argument when the conditioning event is null
/// (bulk length 1 at p = 1/2) or the length is not positive.
ConditionedKernel build_kernel(const WalkParams& params, int length,
                               ExcursionKind kind);

struct Excursion {
  ExcursionKind kind;
  std::vector<int> values;

  bool feasible() const;
};

Excursion sample_excursion(const ConditionedKernel& kernel, Rng& rng);

/// Exact conditional probability of `path` (y_1..y_t, y_0 = 0). Paths that
/// break the kind's constraints or take non-lattice steps get zero.
double path_probability(const ConditionedKernel& kernel,
                        std::span<const int> path);

/// Probability of the conditioning event itself:
///   bulk  t = 1: P(S_1 = 0);  t >= 2: P(S_1 > 0, ..., S_{t-1} > 0, S_t = 0)
///   final:       P(S_1 > 0, ..., S_t > 0)
double event_probability(const WalkParams& params, int length,
                         ExcursionKind kind);
double log_event_probability(const WalkParams& params, int length,
                             ExcursionKind kind);

}  // namespace polytight
