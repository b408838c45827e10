#pragma once

// Functionals used to gather evidence for tightness of the rescaled paths:
// continuity moduli, the uniform-integrability functional c_n(a) and its
// supremum C(a), the conditioned maximum bound f_n(a) and the first passage
// asymptotic n^{3/2} P(T = n).

#include "polytight/path.hpp"
#include "polytight/rng.hpp"
#include "polytight/walk.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace polytight {

/// sup |X_t - X_s| over |t - s| <= delta, exact for the piecewise-linear path.
double modulus(const RescaledPath& path, double delta);

/// Same supremum restricted to pairs in the closure of one excursion.
double modified_modulus(const RescaledPath& path, double delta);

/// Smallest integer h >= 0 with h^2 >= n a (strict: h^2 > n a).
int height_threshold(int n, double a, bool strict);

/// P_n(max_i y_i >= h) under the bulk excursion law of length n.
double max_height_tail(const WalkParams& walk, int n, int h);

/// Entry h holds P_n(max_i y_i >= h) for h = 0..n/2 + 1.
Eigen::ArrayXd max_height_tails(const WalkParams& walk, int n);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

constexpr int kMaxExactExcursion = 500;

/// c_n(a) = E_n[(max y_i^2 / n) 1{max y_i^2 / n > a}], exact (n <= 500).
Estimate c_of_a(const WalkParams& walk, int n, double a);

/// Monte Carlo estimate of c_n(a) from `samples` kernel draws.
Estimate c_of_a_mc(const WalkParams& walk, int n, double a, int samples,
                   Rng& rng);

struct SupValue {
  double value = 0.0;
  int argmax = 0;  // smallest n attaining the supremum; 0 when it is zero
};

/// max over n <= n_max of c_n(a). The true supremum runs over every n; the
/// truncation point is part of the result.
SupValue sup_c_of_a(const WalkParams& walk, int n_max, double a);

struct CTable {
  std::vector<double> a_grid;
  Eigen::MatrixXd values;       // row n - 1, column a index
  std::vector<SupValue> sup;    // per a
};

CTable c_table(const WalkParams& walk, int n_max,
               std::span<const double> a_grid);

struct LemmaValue {
  double f = 0.0;       // f_n(a)
  double scaled = 0.0;  // f_n(a) (1 + a^2)
};

/// f_n(a) = P_n(max_i y_i^2 / n >= a). For n = 1 the only path is (0).
LemmaValue lemma_bound(const WalkParams& walk, int n, double a);

struct LemmaMax {
  double value = 0.0;
  int n = 0;
  double a = 0.0;
};

/// Largest f_n(a)(1 + a^2) over n in [n_min, n_max] and the a grid.
LemmaMax lemma_constant(const WalkParams& walk, int n_min, int n_max,
                        std::span<const double> a_grid);

struct CkPoint {
  int n = 0;
  double value = 0.0;  // n^{3/2} P(T = n)
};

std::vector<CkPoint> ck_series(const WalkParams& walk,
                               std::span<const int> n_list);

struct CkRatio {
  int n = 0;
  double ratio = 0.0;  // value(n) / value(2n)
};

/// Ratios for every n in the series whose double is also present.
std::vector<CkRatio> ck_doubling_ratios(std::span<const CkPoint> series);

}  // namespace polytight
