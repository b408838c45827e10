#include "polytight/diagnostics.hpp"

#include "polytight/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace polytight {

namespace {

// Monotone queue over integer positions keeping the running max (or min) of
// the values seen in a sliding window.
class WindowExtreme {
 public:
  WindowExtreme(std::span<const int> f, bool maximum) : f_(f), maximum_(maximum) {}

  void push(int i) {
    while (head_ < queue_.size() && dominated(queue_.back(), i)) queue_.pop_back();
    queue_.push_back(i);
  }
  void drop_before(int lo) {
    while (queue_[head_] < lo) ++head_;
  }
  int value() const { return f_[static_cast<std::size_t>(queue_[head_])]; }

 private:
  bool dominated(int old, int fresh) const {
    const int a = f_[static_cast<std::size_t>(old)];
    const int b = f_[static_cast<std::size_t>(fresh)];
    return maximum_ ? a <= b : a >= b;
  }

  std::span<const int> f_;
  bool maximum_;
  std::vector<int> queue_;
  std::size_t head_ = 0;
};

// Piecewise-linear interpolation of integer values at real position u.
double interpolate(std::span<const int> f, double u) {
  const auto k = static_cast<std::size_t>(u);
  const double frac = u - static_cast<double>(k);
  if (frac == 0.0) return f[k];
  return f[k] + frac * (f[k + 1] - f[k]);
}

// sup |f(u) - f(v)| over u, v in [lo, hi] with |u - v| <= width, in lattice
// units. The supremum is attained either at two breakpoints or at a
// breakpoint and a point exactly `width` away from it; both families are
// enumerated. Positions are global so restricted calls evaluate the same
// candidates bit for bit.
double oscillation(std::span<const int> f, int lo, int hi, double width) {
  if (hi <= lo) return 0.0;
  const double span_len = hi - lo;
  const int reach =
      width >= span_len ? hi - lo : static_cast<int>(std::floor(width));
  double best = 0.0;

  WindowExtreme top(f, true);
  WindowExtreme bottom(f, false);
  for (int j = lo; j <= hi; ++j) {
    top.push(j);
    bottom.push(j);
    top.drop_before(j - reach);
    bottom.drop_before(j - reach);
    best = std::max(best, static_cast<double>(top.value() - bottom.value()));
  }

  if (width < span_len && width != std::floor(width)) {
    for (int i = lo; i <= hi; ++i) {
      const double right = i + width;
      if (right <= hi) {
        best = std::max(best, std::abs(interpolate(f, right) - f[static_cast<std::size_t>(i)]));
      }
      const double left = i - width;
      if (left >= lo) {
        best = std::max(best, std::abs(interpolate(f, left) - f[static_cast<std::size_t>(i)]));
      }
    }
  }
  return best;
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
}

}  // namespace

double modulus(const RescaledPath& path, double delta) {
  check_delta(delta);
  const int n = path.size();
  const auto f = path.lattice();
  const double lattice = oscillation(f, 0, n, delta * n);
  return lattice / std::sqrt(static_cast<double>(n));
}

double modified_modulus(const RescaledPath& path, double delta) {
  check_delta(delta);
  const int n = path.size();
  const auto f = path.lattice();
  const double width = delta * n;
  double best = 0.0;
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (f[static_cast<std::size_t>(i)] == 0 || i == n) {
      best = std::max(best, oscillation(f, start, i, width));
      start = i;
    }
  }
  return best / std::sqrt(static_cast<double>(n));
}

int height_threshold(int n, double a, bool strict) {
  const double target = n * a;
  auto satisfied = [&](int h) {
    const double sq = static_cast<double>(h) * h;
    return strict ? sq > target : sq >= target;
  };
  int h = target > 0.0 ? static_cast<int>(std::floor(std::sqrt(target))) : 0;
  while (!satisfied(h)) ++h;
  while (h > 0 && satisfied(h - 1)) --h;
  return h;
}

double max_height_tail(const WalkParams& walk, int n, int h) {
  if (n < 1) throw std::invalid_argument("excursion length must be >= 1");
  if (h <= 0) return 1.0;
  if (n == 1) return 0.0;
  if (h == 1) return 1.0;
  if (2 * h > n) return 0.0;

  const auto table = survival_table(walk, ExcursionKind::bulk, n - 1);
  const double p = walk.p();
  const double stay = walk.stay();
  const double event_scaled = table->scaled(n - 1, 1);
  const double event_log = table->log_scale(n - 1);

  // alive(x): mass at level x in [1, h-1] after j steps, never at 0 or h yet.
  Eigen::ArrayXd alive = Eigen::ArrayXd::Zero(h + 1);
  alive(1) = 1.0;  // after the forced first step; the factor p cancels
  double reach = 0.0;
  for (int j = 2; j <= n - h; ++j) {
    const double first_hit = p * alive(h - 1);
    if (first_hit > 0.0) {
      const int m = n - j;
      reach += first_hit * table->scaled(m, h) *
               std::exp(table->log_scale(m) - event_log);
    }
    Eigen::ArrayXd next = Eigen::ArrayXd::Zero(h + 1);
    next.segment(1, h - 1) = stay * alive.segment(1, h - 1) +
                             p * (alive.segment(0, h - 1) + alive.segment(2, h - 1));
    next(h) = 0.0;
    alive = std::move(next);
  }
  return std::min(1.0, reach / event_scaled);
}

Eigen::ArrayXd max_height_tails(const WalkParams& walk, int n) {
  if (n < 1) throw std::invalid_argument("excursion length must be >= 1");
  const int top = n / 2 + 1;
  Eigen::ArrayXd tails(top + 1);
  for (int h = 0; h <= top; ++h) tails(h) = max_height_tail(walk, n, h);
  // Each h is computed independently; clip rounding so the tail stays monotone.
  for (int h = 1; h <= top; ++h) tails(h) = std::min(tails(h), tails(h - 1));
  return tails;
}

namespace {

double c_from_tails(const Eigen::ArrayXd& tails, int n, double a) {
  const int top = static_cast<int>(tails.size()) - 1;
  const int first = height_threshold(n, a, true);
  double sum = 0.0;
  // Summed from the top so that raising a only removes terms.
  for (int h = top; h >= first; --h) {
    const double next = h + 1 <= top ? tails(h + 1) : 0.0;
    const double mass = std::max(0.0, tails(h) - next);
    sum += static_cast<double>(h) * h / n * mass;
  }
  return sum;
}

}  // namespace

Estimate c_of_a(const WalkParams& walk, int n, double a) {
  if (n < 1) throw std::invalid_argument("excursion length must be >= 1");
  if (n > kMaxExactExcursion) {
    throw std::invalid_argument("exact c_n(a) is limited to n <= " +
                                std::to_string(kMaxExactExcursion));
  }
  return {c_from_tails(max_height_tails(walk, n), n, a), 0.0};
}

Estimate c_of_a_mc(const WalkParams& walk, int n, double a, int samples,
                   Rng& rng) {
  if (n < 1) throw std::invalid_argument("excursion length must be >= 1");
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  const auto kernel = build_kernel(walk, n, ExcursionKind::bulk);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    const auto e = sample_excursion(kernel, rng);
    const int top = std::max(0, *std::max_element(e.values.begin(), e.values.end()));
    const double v = static_cast<double>(top) * top / n;
    const double x = v > a ? v : 0.0;
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / samples;
  const double var = std::max(0.0, (sum_sq - samples * mean * mean) / (samples - 1));
  return {mean, std::sqrt(var / samples)};
}

CTable c_table(const WalkParams& walk, int n_max,
               std::span<const double> a_grid) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (n_max > kMaxExactExcursion) {
    throw std::invalid_argument("exact c_n(a) is limited to n <= " +
                                std::to_string(kMaxExactExcursion));
  }
  CTable out;
  out.a_grid.assign(a_grid.begin(), a_grid.end());
  const auto columns = static_cast<Eigen::Index>(a_grid.size());
  out.values = Eigen::MatrixXd::Zero(n_max, columns);
  out.sup.assign(a_grid.size(), SupValue{});
  for (int n = 1; n <= n_max; ++n) {
    const Eigen::ArrayXd tails = max_height_tails(walk, n);
    for (Eigen::Index k = 0; k < columns; ++k) {
      const double c = c_from_tails(tails, n, a_grid[static_cast<std::size_t>(k)]);
      out.values(n - 1, k) = c;
      auto& sup = out.sup[static_cast<std::size_t>(k)];
      if (c > sup.value) sup = {c, n};
    }
  }
  return out;
}

SupValue sup_c_of_a(const WalkParams& walk, int n_max, double a) {
  const double grid[] = {a};
  return c_table(walk, n_max, grid).sup.front();
}

LemmaValue lemma_bound(const WalkParams& walk, int n, double a) {
  const double f = max_height_tail(walk, n, height_threshold(n, a, false));
  return {f, f * (1.0 + a * a)};
}

LemmaMax lemma_constant(const WalkParams& walk, int n_min, int n_max,
                        std::span<const double> a_grid) {
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("bad n range");
  LemmaMax best;
  for (int n = n_min; n <= n_max; ++n) {
    std::map<int, double> tails;
    for (double a : a_grid) {
      const int h = height_threshold(n, a, false);
      auto it = tails.find(h);
      if (it == tails.end()) it = tails.emplace(h, max_height_tail(walk, n, h)).first;
      const double scaled = it->second * (1.0 + a * a);
      if (scaled > best.value) best = {scaled, n, a};
    }
  }
  return best;
}

std::vector<CkPoint> ck_series(const WalkParams& walk,
                               std::span<const int> n_list) {
  if (n_list.empty()) return {};
  const int top = *std::max_element(n_list.begin(), n_list.end());
  if (*std::min_element(n_list.begin(), n_list.end()) < 1) {
    throw std::invalid_argument("first passage horizon must be >= 1");
  }
  const auto series = first_passage_series(walk, top);
  std::vector<CkPoint> out;
  out.reserve(n_list.size());
  for (int n : n_list) {
    out.push_back({n, std::pow(static_cast<double>(n), 1.5) * series(n)});
  }
  return out;
}

std::vector<CkRatio> ck_doubling_ratios(std::span<const CkPoint> series) {
  std::map<int, double> by_n;
  for (const auto& point : series) by_n[point.n] = point.value;
  std::vector<CkRatio> out;
  for (const auto& [n, value] : by_n) {
    const auto twice = by_n.find(2 * n);
    if (twice != by_n.end()) out.push_back({n, value / twice->second});
  }
  return out;
}

}  // namespace polytight
