#include "polytight/excursion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace polytight {

std::string_view to_string(ExcursionKind kind) {
  return kind == ExcursionKind::bulk ? "bulk" : "final";
}

SurvivalTable::SurvivalTable(const WalkParams& params, ExcursionKind kind,
                             int horizon)
    : params_(params), kind_(kind) {
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  data_.push_back(kind == ExcursionKind::bulk ? 1.0 : 0.0);
  offset_ = {0, 1};
  log_scale_ = {0.0};
  extend_to(horizon);
}

SurvivalTable::SurvivalTable(const SurvivalTable& base, int horizon)
    : SurvivalTable(base) {
  extend_to(horizon);
}

double SurvivalTable::value(int m, int x) const {
  const double v = scaled(m, x);
  return v == 0.0 ? 0.0 : v * std::exp(log_scale_[m]);
}

void SurvivalTable::extend_to(int horizon) {
  const double p = params_.p();
  const double stay = params_.stay();
  // Final rows saturate at one; anything within an ulp of it is the tail.
  constexpr double saturated = 1.0 - 0x1.0p-52;
  for (int m = this->horizon() + 1; m <= horizon; ++m) {
    const auto prev = row(m - 1);
    const Eigen::Index len = prev.size();
    Eigen::ArrayXd padded = Eigen::ArrayXd::Constant(len + 3, tail());
    padded(0) = 0.0;
    padded.segment(1, len) = prev;
    Eigen::ArrayXd next = stay * padded.segment(1, len + 1) +
                          p * (padded.segment(0, len + 1) +
                               padded.segment(2, len + 1));
    next(0) = 0.0;

    double log_factor = 0.0;
    Eigen::Index keep = next.size();
    if (kind_ == ExcursionKind::bulk) {
      const double peak = next.maxCoeff();
      next /= peak;
      log_factor = std::log(peak);
      while (keep > 1 && next(keep - 1) == 0.0) --keep;
    } else {
      while (keep > 1 && next(keep - 1) >= saturated) --keep;
    }
    data_.insert(data_.end(), next.data(), next.data() + keep);
    offset_.push_back(data_.size());
    log_scale_.push_back(log_scale_.back() + log_factor);
  }
}

namespace {

struct CacheEntry {
  std::shared_ptr<const SurvivalTable> table;
  std::uint64_t last_use = 0;
};

constexpr std::size_t kMaxCachedTables = 16;

std::mutex cache_mutex;
std::map<std::pair<std::uint64_t, int>, CacheEntry> cache;
std::uint64_t cache_clock = 0;

}  // namespace

std::shared_ptr<const SurvivalTable> survival_table(const WalkParams& params,
                                                    ExcursionKind kind,
                                                    int horizon) {
  const auto key = std::make_pair(std::bit_cast<std::uint64_t>(params.p()),
                                  static_cast<int>(kind));
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    if (cache.size() >= kMaxCachedTables) {
      auto oldest = cache.begin();
      for (auto e = cache.begin(); e != cache.end(); ++e) {
        if (e->second.last_use < oldest->second.last_use) oldest = e;
      }
      cache.erase(oldest);
    }
    it = cache
             .emplace(key, CacheEntry{std::make_shared<const SurvivalTable>(
                                          params, kind, horizon),
                                      0})
             .first;
  } else if (const int have = it->second.table->horizon(); have < horizon) {
    // Growth copies the table, so grow by a margin to amortize it.
    it->second.table = std::make_shared<const SurvivalTable>(
        *it->second.table, std::max(horizon, have + have / 4));
  }
  it->second.last_use = ++cache_clock;
  return it->second.table;
}

void clear_survival_cache() {
  std::lock_guard lock(cache_mutex);
  cache.clear();
}

ConditionedKernel::ConditionedKernel(std::shared_ptr<const SurvivalTable> table,
                                     int length)
    : table_(std::move(table)), length_(length) {
  if (length_ < 1) throw std::invalid_argument("excursion length must be >= 1");
  if (table_->horizon() < length_ - 1) {
    throw std::invalid_argument("survival table horizon too short");
  }
}

double ConditionedKernel::survival(int j, int x) const {
  if (j < 0 || j > length_) throw std::out_of_range("step index out of range");
  if (j > 0) return table_->value(length_ - j, x);
  if (x != 0) return 0.0;
  const int m = length_ - 1;
  const double p = params().p();
  const double scaled =
      params().stay() * table_->scaled(m, 0) + p * table_->scaled(m, 1);
  return scaled == 0.0 ? 0.0 : scaled * std::exp(table_->log_scale(m));
}

std::array<double, 3> ConditionedKernel::step_weights(int j, int x) const {
  if (j < 0 || j >= length_) throw std::out_of_range("step index out of range");
  const int m = length_ - j - 1;
  const double p = params().p();
  std::array<double, 3> w{p * table_->scaled(m, x - 1),
                          params().stay() * table_->scaled(m, x),
                          p * table_->scaled(m, x + 1)};
  const double total = w[0] + w[1] + w[2];
  if (total == 0.0) return {0.0, 0.0, 0.0};
  for (double& v : w) v /= total;
  return w;
}

ConditionedKernel build_kernel(const WalkParams& params, int length,
                               ExcursionKind kind) {
  if (length < 1) throw std::invalid_argument("excursion length must be >= 1");
  ConditionedKernel kernel(survival_table(params, kind, length - 1), length);
  if (!(kernel.event_probability() > 0.0)) {
    throw std::invalid_argument("conditioning event has probability zero");
  }
  return kernel;
}

bool Excursion::feasible() const {
  const auto t = values.size();
  if (t == 0) return false;
  int prev = 0;
  for (std::size_t i = 0; i < t; ++i) {
    if (std::abs(values[i] - prev) > 1) return false;
    prev = values[i];
    const bool last = i + 1 == t;
    if (kind == ExcursionKind::bulk && last) {
      if (values[i] != 0) return false;
    } else if (values[i] <= 0) {
      return false;
    }
  }
  return true;
}

Excursion sample_excursion(const ConditionedKernel& kernel, Rng& rng) {
  const SurvivalTable& table = kernel.table();
  const int t = kernel.length();
  const double p = kernel.params().p();
  const double stay = kernel.params().stay();
  Excursion out{kernel.kind(), std::vector<int>(static_cast<std::size_t>(t))};
  int x = 0;
  for (int j = 0; j < t; ++j) {
    const int m = t - j - 1;
    const double down = p * table.scaled(m, x - 1);
    const double hold = stay * table.scaled(m, x);
    const double up = p * table.scaled(m, x + 1);
    const double u = uniform01(rng) * (down + hold + up);
    // The last two branches only catch u rounding onto an empty top bin.
    if (u < down) {
      --x;
    } else if (u < down + hold) {
    } else if (up > 0.0) {
      ++x;
    } else if (hold == 0.0) {
      --x;
    }
    out.values[static_cast<std::size_t>(j)] = x;
  }
  return out;
}

double path_probability(const ConditionedKernel& kernel,
                        std::span<const int> path) {
  if (static_cast<int>(path.size()) != kernel.length()) {
    throw std::invalid_argument("path length does not match the kernel");
  }
  double prob = 1.0;
  int x = 0;
  for (int j = 0; j < kernel.length(); ++j) {
    const int step = path[static_cast<std::size_t>(j)] - x;
    if (step < -1 || step > 1) return 0.0;
    prob *= kernel.step_weights(j, x)[static_cast<std::size_t>(step + 1)];
    if (prob == 0.0) return 0.0;
    x += step;
  }
  return prob;
}

double event_probability(const WalkParams& params, int length,
                         ExcursionKind kind) {
  if (length < 1) throw std::invalid_argument("excursion length must be >= 1");
  return ConditionedKernel(survival_table(params, kind, length - 1), length)
      .event_probability();
}

double log_event_probability(const WalkParams& params, int length,
                             ExcursionKind kind) {
  if (length < 1) throw std::invalid_argument("excursion length must be >= 1");
  const auto table = survival_table(params, kind, length - 1);
  const int m = length - 1;
  const double scaled =
      params.stay() * table->scaled(m, 0) + params.p() * table->scaled(m, 1);
  return std::log(scaled) + table->log_scale(m);
}

}  // namespace polytight
